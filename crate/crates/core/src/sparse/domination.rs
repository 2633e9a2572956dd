use std::io::Write;

use serde::{Deserialize, Serialize};

use super::family::{check_sparseness, clip, grid_box, node_set, sparse_operator, SparseFamily};
use super::grids::{DyadicCube, DyadicGridSpec};
use crate::error::{Error, Result};
use crate::grid::{AxisBox, SampledFunction};
use crate::multiplier::MultiplierOperator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DominationParams {
    /// Dilation `(2k+1)Q` of the local averages and truncations.
    pub k: usize,
    /// Initial stopping threshold; doubled per cube until the children fill at most half.
    pub beta: f64,
    pub depth_budget: usize,
    /// Fraction of nodes (with positive right side) at which `C` must dominate.
    pub quantile: f64,
    /// Nodes with `|f| <= support_threshold * max |f|` count as outside the support.
    pub support_threshold: f64,
}

impl Default for DominationParams {
    fn default() -> Self {
        DominationParams {
            k: 1,
            beta: 16.0,
            depth_budget: 32,
            quantile: 0.995,
            support_threshold: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFamily {
    pub grid_index: usize,
    pub root: Option<AxisBox>,
    pub family: SparseFamily,
    pub eta_measured: Option<f64>,
    /// Largest stopping threshold used after doubling.
    pub beta_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominationRow {
    pub node: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub families: Vec<GridFamily>,
    /// Smallest `C` with `|Tf| <= C sum_S A_{r,S} |f|` on the quantile of nodes.
    pub c_measured: f64,
    pub positive_nodes: usize,
    pub exceptional: Vec<usize>,
    pub exceptional_fraction: f64,
    /// Independent recount of the dominated nodes agrees with the quantile.
    pub verified: bool,
    pub rows: Vec<DominationRow>,
}

impl DominationReport {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["node", "lhs", "rhs", "ratio"])
            .map_err(csv_err)?;
        for r in &self.rows {
            wr.write_record([
                r.node.to_string(),
                format!("{:e}", r.lhs),
                format!("{:e}", r.rhs),
                format!("{:e}", r.ratio),
            ])
            .map_err(csv_err)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn inside(b: &AxisBox, outer: &AxisBox) -> bool {
    (0..b.dim()).all(|a| b.lo[a] >= outer.lo[a] && b.hi[a] <= outer.hi[a])
}

struct Stopping<'a> {
    t: &'a MultiplierOperator,
    f: &'a SampledFunction,
    fr: Vec<f64>,
    r: f64,
    params: DominationParams,
    region: AxisBox,
}

impl Stopping<'_> {
    fn dilated_avg(&self, q: &AxisBox) -> f64 {
        let (d, _) = clip(&q.dilate((2 * self.params.k + 1) as f64), &self.region);
        let nodes = node_set(self.f.grid(), &d);
        if nodes.is_empty() {
            return 0.0;
        }
        (nodes.iter().map(|&i| self.fr[i]).sum::<f64>() / nodes.len() as f64).powf(1.0 / self.r)
    }

    /// Maximal subcubes `P ⊊ Q` meeting the stopping rule at threshold `beta`.
    fn select(
        &self,
        spec: &DyadicGridSpec,
        q: &DyadicCube,
        local: &[f64],
        avg_q: f64,
        local_avg: f64,
        beta: f64,
    ) -> Result<Vec<(DyadicCube, Vec<usize>)>> {
        let mut out = Vec::new();
        if q.scale >= spec.scales.1 {
            return Ok(out);
        }
        let mut stack = spec.children(q)?;
        while let Some(p) = stack.pop() {
            let nodes = node_set(self.f.grid(), &p.bounds);
            if nodes.is_empty() {
                continue;
            }
            let loc_max = nodes.iter().map(|&i| local[i]).fold(0.0, f64::max);
            if self.dilated_avg(&p.bounds) > beta * avg_q || loc_max > beta * local_avg {
                out.push((p, nodes));
            } else if p.scale < spec.scales.1 {
                stack.extend(spec.children(&p)?);
            }
        }
        Ok(out)
    }

    fn build(&self, spec: &DyadicGridSpec, root: DyadicCube) -> Result<(SparseFamily, f64)> {
        let g = *self.f.grid();
        let mut cubes = Vec::new();
        let mut e_sets = Vec::new();
        let mut beta_max = self.params.beta;
        let mut stack = vec![(root, 0usize)];
        while let Some((q, depth)) = stack.pop() {
            if depth > self.params.depth_budget {
                return Err(Error::DepthBudget {
                    budget: self.params.depth_budget,
                    cube: q.bounds.describe(),
                });
            }
            let nodes = node_set(&g, &q.bounds);
            let (d, _) = clip(
                &q.bounds.dilate((2 * self.params.k + 1) as f64),
                &self.region,
            );
            let local = self
                .t
                .apply(&super::family::restrict(self.f, &d))?
                .pointwise_norms();
            let local_avg = nodes.iter().map(|&i| local[i]).sum::<f64>() / nodes.len() as f64;
            let avg_q = self.dilated_avg(&q.bounds);
            let mut beta = self.params.beta;
            let mut kids;
            loop {
                kids = self.select(spec, &q, &local, avg_q, local_avg, beta)?;
                let covered: usize = kids.iter().map(|(_, n)| n.len()).sum();
                if 2 * covered <= nodes.len() {
                    break;
                }
                beta *= 2.0;
                if !beta.is_finite() {
                    return Err(Error::arg("beta", "stopping threshold overflowed"));
                }
            }
            beta_max = beta_max.max(beta);
            let mut taken = vec![false; g.num_nodes()];
            for (_, n) in &kids {
                for &i in n {
                    taken[i] = true;
                }
            }
            e_sets.push(nodes.into_iter().filter(|&i| !taken[i]).collect());
            cubes.push(q.bounds.clone());
            for (p, _) in kids {
                stack.push((p, depth + 1));
            }
        }
        Ok((
            SparseFamily {
                grid: g,
                cubes,
                e_sets,
                eta: 0.5,
            },
            beta_max,
        ))
    }
}

/// Stopping-time sparse domination of `T f` on each grid, with the measured constant
/// `C` such that `|Tf| <= C sum_grids A_{r,S} |f|` at the requested quantile of nodes
/// where the right side is positive.
pub fn sparse_dominate(
    t: &MultiplierOperator,
    f: &SampledFunction,
    r: f64,
    params: DominationParams,
    grids: &[DyadicGridSpec],
) -> Result<DominationReport> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::arg(
            "r",
            format!("exponent {r} must lie in [1, inf)"),
        ));
    }
    if grids.is_empty() {
        return Err(Error::arg("grids", "need at least one dyadic grid"));
    }
    if !(params.quantile > 0.0 && params.quantile <= 1.0) {
        return Err(Error::arg("quantile", "must lie in (0, 1]"));
    }
    let g = *f.grid();
    let n = g.dim();
    let norms = f.pointwise_norms();
    let top = norms.iter().cloned().fold(0.0, f64::max);
    let region = grid_box(&g);
    // bounding box of the support, in whole cells
    let h = g.spacing();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for (i, v) in norms.iter().enumerate() {
        if top > 0.0 && *v > params.support_threshold * top {
            let x = g.node(i);
            for a in 0..n {
                lo[a] = lo[a].min(x[a]);
                hi[a] = hi[a].max(x[a] + h);
            }
        }
    }
    let st = Stopping {
        t,
        f,
        fr: norms.iter().map(|v| v.powf(r)).collect(),
        r,
        params,
        region: region.clone(),
    };
    let mut families = Vec::with_capacity(grids.len());
    for (gi, spec) in grids.iter().enumerate() {
        spec.validate()?;
        let root = if top > 0.0 {
            spec.smallest_containing(&AxisBox {
                lo: lo.clone(),
                hi: hi.clone(),
            })?
            .filter(|q| inside(&q.bounds, &region))
        } else {
            None
        };
        let (family, beta_max) = match &root {
            Some(q) => st.build(spec, q.clone())?,
            None => (
                SparseFamily {
                    grid: g,
                    cubes: Vec::new(),
                    e_sets: Vec::new(),
                    eta: 0.5,
                },
                params.beta,
            ),
        };
        let eta_measured = if family.is_empty() {
            None
        } else {
            Some(check_sparseness(&family)?)
        };
        families.push(GridFamily {
            grid_index: gi,
            root: root.map(|q| q.bounds),
            family,
            eta_measured,
            beta_max,
        });
    }
    let lhs = t.apply(f)?.pointwise_norms();
    let mut rhs = vec![0.0; g.num_nodes()];
    for fam in families.iter().filter(|f| !f.family.is_empty()) {
        for (o, v) in rhs
            .iter_mut()
            .zip(sparse_operator(&fam.family, r, f)?.real_parts())
        {
            *o += v;
        }
    }
    let rows: Vec<DominationRow> = (0..g.num_nodes())
        .filter(|&i| rhs[i] > 0.0)
        .map(|i| DominationRow {
            node: i,
            lhs: lhs[i],
            rhs: rhs[i],
            ratio: lhs[i] / rhs[i],
        })
        .collect();
    let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let m = ratios.len();
    let c = if m == 0 {
        0.0
    } else {
        let k = ((params.quantile * m as f64).ceil() as usize).clamp(1, m);
        ratios[k - 1]
    };
    let exceptional: Vec<usize> = rows
        .iter()
        .filter(|r| r.ratio > c)
        .map(|r| r.node)
        .collect();
    // recount from the raw arrays
    let dominated = (0..g.num_nodes())
        .filter(|&i| rhs[i] > 0.0 && lhs[i] <= c * rhs[i] * (1.0 + 1e-12))
        .count();
    let verified = m == 0 || dominated as f64 >= params.quantile * m as f64 - 1e-9;
    Ok(DominationReport {
        families,
        c_measured: c,
        positive_nodes: m,
        exceptional_fraction: if m == 0 {
            0.0
        } else {
            exceptional.len() as f64 / m as f64
        },
        exceptional,
        verified,
        rows,
    })
}
