use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grids::{standard_dyadic_cubes, DyadicCube};
use crate::error::{Error, Result};
use crate::grid::{AxisBox, Grid, SampledFunction};
use crate::multiplier::MultiplierOperator;

/// Per-axis node index ranges `[start, end)` of the nodes of `grid` in `b` (half-open).
pub fn node_ranges(grid: &Grid, b: &AxisBox) -> Vec<(usize, usize)> {
    let h = grid.spacing();
    let half = grid.length() / 2.0;
    let n = grid.points() as f64;
    (0..grid.dim())
        .map(|a| {
            let lo = ((b.lo[a] + half) / h).ceil().clamp(0.0, n) as usize;
            let hi = ((b.hi[a] + half) / h).ceil().clamp(0.0, n) as usize;
            (lo, hi.max(lo))
        })
        .collect()
}

/// Flat indices of the nodes in `b`, ascending.
pub fn node_set(grid: &Grid, b: &AxisBox) -> Vec<usize> {
    let r = node_ranges(grid, b);
    let mut out = Vec::new();
    let n = grid.dim();
    let mut multi: Vec<usize> = r.iter().map(|x| x.0).collect();
    if r.iter().any(|(a, b)| a >= b) {
        return out;
    }
    'outer: loop {
        out.push(grid.ravel(&multi));
        for a in (0..n).rev() {
            multi[a] += 1;
            if multi[a] < r[a].1 {
                continue 'outer;
            }
            multi[a] = r[a].0;
        }
        break;
    }
    out
}

/// The working box `[-L/2, L/2)^n` of a grid.
pub fn grid_box(grid: &Grid) -> AxisBox {
    let h = grid.length() / 2.0;
    AxisBox {
        lo: vec![-h; grid.dim()],
        hi: vec![h; grid.dim()],
    }
}

/// Cubes with chosen subsets `E_Q`, all realized as node sets of one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseFamily {
    pub grid: Grid,
    pub cubes: Vec<AxisBox>,
    /// Node indices of each `E_Q`.
    pub e_sets: Vec<Vec<usize>>,
    /// Declared sparseness constant.
    pub eta: f64,
}

impl SparseFamily {
    /// `E_Q = Q` for every cube.
    pub fn full(grid: Grid, cubes: Vec<AxisBox>, eta: f64) -> Self {
        let e_sets = cubes.iter().map(|q| node_set(&grid, q)).collect();
        SparseFamily {
            grid,
            cubes,
            e_sets,
            eta,
        }
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Verifies `E_Q ⊂ Q` and pairwise disjointness, and returns `min_Q |E_Q| / |Q|` in node
/// counts.
pub fn check_sparseness(s: &SparseFamily) -> Result<f64> {
    if s.cubes.len() != s.e_sets.len() {
        return Err(Error::DimensionMismatch {
            expected: s.cubes.len(),
            found: s.e_sets.len(),
        });
    }
    if s.is_empty() {
        return Err(Error::Empty("sparse family has no cubes".into()));
    }
    let mut owner = vec![usize::MAX; s.grid.num_nodes()];
    let mut eta = f64::INFINITY;
    for (i, (q, e)) in s.cubes.iter().zip(&s.e_sets).enumerate() {
        let nodes = node_set(&s.grid, q);
        if nodes.is_empty() {
            return Err(Error::arg(
                "cubes",
                format!("cube {i} contains no grid node"),
            ));
        }
        for &x in e {
            if nodes.binary_search(&x).is_err() {
                return Err(Error::NotContained(i));
            }
            if owner[x] != usize::MAX {
                return Err(Error::OverlappingSets {
                    first: owner[x],
                    second: i,
                });
            }
            owner[x] = i;
        }
        eta = eta.min(e.len() as f64 / nodes.len() as f64);
    }
    Ok(eta)
}

/// `A_{r,S} f = sum_Q <|f|^r>_Q^{1/r} 1_Q` with node-count averages; `|f|` is the
/// pointwise fiber norm.
pub fn sparse_operator(s: &SparseFamily, r: f64, f: &SampledFunction) -> Result<SampledFunction> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::arg(
            "r",
            format!("exponent {r} must lie in [1, inf)"),
        ));
    }
    if f.grid() != &s.grid {
        return Err(Error::arg(
            "f",
            "function and family live on different grids",
        ));
    }
    let fr: Vec<f64> = f.pointwise_norms().iter().map(|v| v.powf(r)).collect();
    let mut out = vec![0.0; s.grid.num_nodes()];
    for q in &s.cubes {
        let nodes = node_set(&s.grid, q);
        if nodes.is_empty() {
            continue;
        }
        let avg = (nodes.iter().map(|&i| fr[i]).sum::<f64>() / nodes.len() as f64).powf(1.0 / r);
        for i in nodes {
            out[i] += avg;
        }
    }
    SampledFunction::from_real(s.grid, &out)
}

/// `1_b` at the nodes: exactly 1 on the nodes of `node_set(grid, b)` and 0 elsewhere.
pub fn node_indicator(grid: Grid, b: &AxisBox) -> SampledFunction {
    SampledFunction::from_fn(grid, 1, |x, _| {
        num_complex::Complex64::new(if b.contains(x) { 1.0 } else { 0.0 }, 0.0)
    })
}

/// `sup_lambda lambda |{|f| > lambda}|^{1/p}`. For samples the supremum is approached as
/// `lambda` rises to a sample value `v`, giving `v (h^n #{|f| >= v})^{1/p}`.
pub fn weak_lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::arg(
            "p",
            format!("exponent {p} must lie in [1, inf)"),
        ));
    }
    let mut v = f.pointwise_norms();
    v.sort_by(|a, b| b.total_cmp(a));
    let cell = f.grid().cell_volume();
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < v.len() && v[i] > 0.0 {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        best = best.max(v[i] * ((j + 1) as f64 * cell).powf(1.0 / p));
        i = j + 1;
    }
    Ok(best)
}

/// Dilation parameter and cube scales of the grand maximal truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationParams {
    pub k: usize,
    /// `(coarsest, finest)` dyadic scale `j`, side `2^{-j}`.
    pub scales: (i32, i32),
}

#[derive(Debug, Clone)]
pub struct GrandMaximal {
    pub values: SampledFunction,
    pub cubes: usize,
    /// Some `(2k+1)Q` left the box and was clipped.
    pub clipped: bool,
}

/// `f` with the nodes of `b` zeroed.
pub(crate) fn cut_out(f: &SampledFunction, b: &AxisBox) -> SampledFunction {
    let d = f.fiber();
    let mut out = f.clone();
    let vals = out.values_mut();
    for i in node_set(f.grid(), b) {
        for c in 0..d {
            vals[i * d + c] = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    out
}

/// `f 1_b`.
pub(crate) fn restrict(f: &SampledFunction, b: &AxisBox) -> SampledFunction {
    let d = f.fiber();
    let mut out = SampledFunction::zeros(*f.grid(), d);
    let src = f.values();
    let vals = out.values_mut();
    for i in node_set(f.grid(), b) {
        vals[i * d..(i + 1) * d].copy_from_slice(&src[i * d..(i + 1) * d]);
    }
    out
}

pub(crate) fn clip(b: &AxisBox, outer: &AxisBox) -> (AxisBox, bool) {
    let mut clipped = false;
    let lo: Vec<f64> =
        b.lo.iter()
            .zip(&outer.lo)
            .map(|(x, o)| {
                clipped |= x < o;
                x.max(*o)
            })
            .collect();
    let hi: Vec<f64> =
        b.hi.iter()
            .zip(&outer.hi)
            .map(|(x, o)| {
                clipped |= x > o;
                x.min(*o)
            })
            .collect();
    (AxisBox { lo, hi }, clipped)
}

/// `sup_{y in Q} |T(f 1_{((2k+1)Q)^c})(y)|` and the node set of `Q` for every cube.
pub fn truncated_sup_per_cube(
    t: &MultiplierOperator,
    f: &SampledFunction,
    cubes: &[DyadicCube],
    k: usize,
) -> Result<(Vec<(Vec<usize>, f64)>, bool)> {
    let g = *f.grid();
    let region = grid_box(&g);
    let rows: Vec<Result<(Vec<usize>, f64, bool)>> = cubes
        .par_iter()
        .map(|q| {
            let (dil, clipped) = clip(&q.bounds.dilate((2 * k + 1) as f64), &region);
            let tf = t.apply(&cut_out(f, &dil))?;
            let norms = tf.pointwise_norms();
            let nodes = node_set(&g, &q.bounds);
            let sup = nodes.iter().map(|&i| norms[i]).fold(0.0, f64::max);
            Ok((nodes, sup, clipped))
        })
        .collect();
    let mut out = Vec::with_capacity(rows.len());
    let mut any_clipped = false;
    for r in rows {
        let (nodes, sup, c) = r?;
        any_clipped |= c;
        out.push((nodes, sup));
    }
    Ok((out, any_clipped))
}

/// `M_{T,k} f(x) = sup_{Q ∋ x} sup_{y in Q} |T(f 1_{((2k+1)Q)^c})(y)|` over the whole
/// standard dyadic cubes of the scale range inside the box.
pub fn grand_maximal_truncation(
    t: &MultiplierOperator,
    f: &SampledFunction,
    params: TruncationParams,
) -> Result<GrandMaximal> {
    if params.scales.0 > params.scales.1 {
        return Err(Error::arg("scales", "empty scale range"));
    }
    let g = *f.grid();
    let cubes = standard_dyadic_cubes(params.scales, &grid_box(&g))?;
    let (rows, clipped) = truncated_sup_per_cube(t, f, &cubes, params.k)?;
    let mut out = vec![0.0; g.num_nodes()];
    for (nodes, sup) in &rows {
        for &i in nodes {
            out[i] = f64::max(out[i], *sup);
        }
    }
    Ok(GrandMaximal {
        values: SampledFunction::from_real(g, &out)?,
        cubes: cubes.len(),
        clipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, FunctionSpec};
    use crate::multiplier::{MatrixSymbol, Sgn};
    use crate::opnorm::weighted_lp_norm;
    use crate::weights::Weight;

    fn unit(lo: f64, hi: f64) -> AxisBox {
        AxisBox::new(vec![lo], vec![hi]).unwrap()
    }

    #[test]
    fn sparseness_cases() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let s = SparseFamily::full(
            g,
            vec![unit(0.0, 1.0), unit(1.0, 2.0), unit(-2.0, 0.0)],
            1.0,
        );
        assert_eq!(check_sparseness(&s).unwrap(), 1.0);
        // tower Q0 ⊃ Q1 with |Q1| = |Q0|/2
        let q0 = unit(0.0, 2.0);
        let q1 = unit(0.0, 1.0);
        let e1 = node_set(&g, &q1);
        let e0: Vec<usize> = node_set(&g, &q0)
            .into_iter()
            .filter(|i| !e1.contains(i))
            .collect();
        let tower = SparseFamily {
            grid: g,
            cubes: vec![q0.clone(), q1.clone()],
            e_sets: vec![e0, e1.clone()],
            eta: 0.5,
        };
        assert_eq!(check_sparseness(&tower).unwrap(), 0.5);
        let bad = SparseFamily {
            grid: g,
            cubes: vec![q0, q1],
            e_sets: vec![e1.clone(), e1],
            eta: 0.5,
        };
        assert!(matches!(
            check_sparseness(&bad),
            Err(Error::OverlappingSets {
                first: 0,
                second: 1
            })
        ));
    }

    #[test]
    fn single_cube_operator() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let q = unit(0.0, 1.0);
        let s = SparseFamily::full(g, vec![q.clone()], 1.0);
        let one = SampledFunction::from_real(g, &vec![1.0; 64]).unwrap();
        let a = sparse_operator(&s, 2.0, &one).unwrap();
        let mask: Vec<f64> = (0..64)
            .map(|i| q.contains(&g.node(i)[..1]) as u8 as f64)
            .collect();
        assert_eq!(a.real_parts(), mask);
        assert_eq!(
            sparse_operator(&s, 1.5, &SampledFunction::zeros(g, 1))
                .unwrap()
                .max_norm(),
            0.0
        );
        assert!(sparse_operator(&s, 0.5, &one).is_err());
    }

    #[test]
    fn weak_norm_of_indicator() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let f = node_indicator(g, &AxisBox::new(vec![-1.0], vec![1.0]).unwrap());
        let f = f.scale(num_complex::Complex64::new(3.0, 0.0));
        for p in [1.0, 2.0, 4.0] {
            let w = weak_lp_norm(&f, p).unwrap();
            assert!((w - 3.0 * 2f64.powf(1.0 / p)).abs() < 1e-12);
            assert!(w <= weighted_lp_norm(&f, p, &Weight::constant(1.0)).unwrap() + 1e-12);
        }
    }

    #[test]
    fn grand_maximal_matches_brute_force() {
        let g = Grid::new(1, 128, 8.0).unwrap();
        let t = MultiplierOperator::new(MatrixSymbol::from_fn(g, Sgn::hilbert(1)).unwrap());
        let f = sample(
            &FunctionSpec::CompactBump {
                center: vec![0.3],
                radius: 0.6,
            },
            g,
            1,
        )
        .unwrap();
        let params = TruncationParams {
            k: 1,
            scales: (-1, 2),
        };
        let m = grand_maximal_truncation(&t, &f, params).unwrap();
        let cubes = standard_dyadic_cubes(params.scales, &grid_box(&g)).unwrap();
        for x in 0..g.num_nodes() {
            let xp = g.node(x);
            let mut best: f64 = 0.0;
            for q in cubes.iter().filter(|q| q.bounds.contains(&xp[..1])) {
                let d = q.bounds.dilate(3.0);
                let masked = SampledFunction::from_fn(g, 1, |y, _| {
                    if d.contains(y) {
                        num_complex::Complex64::new(0.0, 0.0)
                    } else {
                        f.at(g.nearest_node(y))[0]
                    }
                });
                let tf = t.apply(&masked).unwrap();
                for y in 0..g.num_nodes() {
                    if q.bounds.contains(&g.node(y)[..1]) {
                        best = best.max(tf.at(y)[0].norm());
                    }
                }
            }
            assert!((best - m.values.at(x)[0].re).abs() <= 1e-12 * best.max(1.0));
        }
    }

    #[test]
    fn cutoff_annihilates_supported_input() {
        let g = Grid::new(1, 128, 16.0).unwrap();
        let t = MultiplierOperator::new(MatrixSymbol::identity(g, 1));
        let f = sample(
            &FunctionSpec::CompactBump {
                center: vec![0.5],
                radius: 0.4,
            },
            g,
            1,
        )
        .unwrap();
        let cubes = standard_dyadic_cubes((0, 0), &grid_box(&g)).unwrap();
        let q = cubes.iter().find(|q| q.bounds.lo[0] == 0.0).unwrap();
        let (rows, _) = truncated_sup_per_cube(&t, &f, std::slice::from_ref(q), 1).unwrap();
        assert!(rows[0].1 < 1e-14);
    }
}
