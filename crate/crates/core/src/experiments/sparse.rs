use serde::{Deserialize, Serialize};

use super::{rel_spread, Comparison, Outcome};
use crate::error::Result;
use crate::grid::{sample, AxisBox, FunctionSpec, Grid, SampledFunction};
use crate::multiplier::{MatrixSymbol, MultiplierOperator, Sgn};
use crate::sparse::{
    check_sparseness, default_grids, node_indicator, node_set, sparse_dominate, sparse_operator,
    sparse_weighted_bound_check, CharacteristicSetup, DominationParams, SparseFamily,
};
use crate::weights::{ap_characteristic, apr_characteristic, CandidateSpec, Quadrature, Shape, Weight};

fn unit(lo: f64, hi: f64) -> AxisBox {
    AxisBox {
        lo: vec![lo],
        hi: vec![hi],
    }
}

/// `Q_j = [0, 2^{-j})` and `-Q_j`, `j = 0..depth`, with `E_j = Q_j \ Q_{j+1}` and the
/// last `E` equal to its cube. Sparse with `eta = 1/2`.
fn nested_family(g: Grid, depth: i32) -> SparseFamily {
    let mut cubes = Vec::new();
    let mut e_sets = Vec::new();
    for sign in [1.0, -1.0] {
        for j in 0..=depth {
            let s = 2f64.powi(-j);
            let q = if sign > 0.0 { unit(0.0, s) } else { unit(-s, 0.0) };
            let inner = if sign > 0.0 { unit(0.0, s / 2.0) } else { unit(-s / 2.0, 0.0) };
            let nodes = node_set(&g, &q);
            let e = if j == depth {
                nodes
            } else {
                let drop = node_set(&g, &inner);
                nodes.into_iter().filter(|i| drop.binary_search(i).is_err()).collect()
            };
            cubes.push(q);
            e_sets.push(e);
        }
    }
    SparseFamily {
        grid: g,
        cubes,
        e_sets,
        eta: 0.5,
    }
}

/// `sum_{Q ni x} (|Q_nodes|^{-1} sum_{y in Q} |f(y)|^r)^{1/r}` node by node.
fn sparse_oracle(s: &SparseFamily, r: f64, f: &SampledFunction) -> Vec<f64> {
    let g = s.grid;
    let vals = f.pointwise_norms();
    (0..g.num_nodes())
        .map(|i| {
            let x = g.node(i);
            s.cubes
                .iter()
                .filter(|q| q.contains(&x[..1]))
                .map(|q| {
                    let inside: Vec<f64> = (0..g.num_nodes())
                        .filter(|&j| q.contains(&g.node(j)[..1]))
                        .map(|j| vals[j].powf(r))
                        .collect();
                    (inside.iter().sum::<f64>() / inside.len() as f64).powf(1.0 / r)
                })
                .sum()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SparseDominateParams {
    pub ladder: Vec<usize>,
    pub length: f64,
    pub coarsest: i32,
    pub finest: i32,
    pub r: f64,
    pub input: FunctionSpec,
    pub domination: DominationParams,
}

impl Default for SparseDominateParams {
    fn default() -> Self {
        SparseDominateParams {
            ladder: vec![1024, 2048],
            length: 8.0,
            coarsest: -2,
            finest: 5,
            r: 1.0,
            input: FunctionSpec::Gaussian {
                center: vec![0.1],
                scale: 0.25,
            },
            domination: DominationParams::default(),
        }
    }
}

const OPERATOR_TOL: f64 = 1e-12;
const C_STABILITY: f64 = 0.25;
const EXCEPTIONAL_MAX: f64 = 0.005;

pub(crate) fn sparse_dominate_run(p: &SparseDominateParams, _seed: u64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let g = Grid::new(1, 128, 4.0)?;

    let disjoint = SparseFamily::full(g, vec![unit(-1.0, 0.0), unit(0.0, 0.5), unit(0.5, 1.5)], 1.0);
    let eta1 = check_sparseness(&disjoint)?;
    out.check("hand-built disjoint family: measured eta", eta1, Comparison::Equal, 1.0);
    let nested = nested_family(g, 3);
    let eta_half = check_sparseness(&nested)?;
    out.check("hand-built nested family: measured eta", eta_half, Comparison::Equal, 0.5);
    let mut overlap = nested.clone();
    overlap.e_sets[1] = node_set(&g, &overlap.cubes[1]);
    out.check_flag("overlapping E sets rejected", check_sparseness(&overlap).is_err());

    let f = sample(&FunctionSpec::Gaussian { center: vec![0.2], scale: 0.7 }, g, 1)?;
    let mut op_err: f64 = 0.0;
    for r in [1.0, 2.0] {
        let a = sparse_operator(&nested, r, &f)?.real_parts();
        let want = sparse_oracle(&nested, r, &f);
        for (x, y) in a.iter().zip(&want) {
            op_err = op_err.max((x - y).abs());
        }
    }
    out.check("sparse operator vs per-node oracle", op_err, Comparison::AtMost, OPERATOR_TOL);

    let grids = default_grids(1, p.coarsest, p.finest);
    let mut cs = Vec::new();
    for &n in &p.ladder {
        let g = Grid::new(1, n, p.length)?;
        let f = sample(&p.input, g, 1)?;
        let t = MultiplierOperator::new(MatrixSymbol::from_fn(g, Sgn::hilbert(1))?);
        let rep = sparse_dominate(&t, &f, p.r, p.domination, &grids)?;
        let eta_min = rep
            .families
            .iter()
            .filter_map(|fam| fam.eta_measured)
            .fold(f64::INFINITY, f64::min);
        out.record(format!("C N={n}"), rep.c_measured);
        out.record(format!("exceptional fraction N={n}"), rep.exceptional_fraction);
        out.check(format!("min family eta N={n}"), eta_min, Comparison::AtLeast, 0.5);
        out.check(format!("exceptional fraction N={n}"), rep.exceptional_fraction, Comparison::AtMost, EXCEPTIONAL_MAX);
        out.check_flag(format!("recount verified N={n}"), rep.verified);
        cs.push(rep.c_measured);
    }
    out.check("relative spread of C over the ladder", rel_spread(&cs), Comparison::AtMost, C_STABILITY);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SparseWeightedParams {
    pub points: usize,
    pub length: f64,
    pub exponents: Vec<f64>,
    pub p: f64,
    pub r: f64,
    /// Depth of the nested family `[0, 2^{-j})`, `[-2^{-j}, 0)`.
    pub depth: i32,
    /// Constant the ratio must stay below across the ladder.
    pub recorded_constant: f64,
    pub candidates: CandidateSpec,
    pub ainf_cells: usize,
}

impl Default for SparseWeightedParams {
    fn default() -> Self {
        SparseWeightedParams {
            points: 1024,
            length: 8.0,
            exponents: vec![0.0, 0.2, 0.4],
            p: 4.0,
            r: 2.0,
            depth: 4,
            recorded_constant: 5.0,
            candidates: CandidateSpec::new(Shape::Cubes),
            ainf_cells: 16,
        }
    }
}

const REDUCTION_TOL: f64 = 1e-6;

pub(crate) fn sparse_weighted(p: &SparseWeightedParams, _seed: u64) -> Result<Outcome> {
    let g = Grid::new(1, p.points, p.length)?;
    let s = nested_family(g, p.depth);
    let f = node_indicator(g, &unit(-1.0, 1.0));
    let quad = Quadrature::default();
    let setup = CharacteristicSetup {
        family: p.candidates.build(1)?,
        quadrature: quad,
        ainf_cells: p.ainf_cells,
    };
    let one = Weight::constant(1.0);
    let mut out = Outcome::default();
    let mut worst: f64 = 0.0;
    let mut reduction: f64 = 0.0;
    for &a in &p.exponents {
        let w = Weight::power(a);
        let rep = sparse_weighted_bound_check(&s, p.r, p.p, &w, &one, &f, &setup)?;
        out.record(format!("ratio a={a}"), rep.ratio);
        out.record(format!("apr a={a}"), rep.apr);
        out.record(format!("ainf omega a={a}"), rep.ainf_omega);
        worst = worst.max(rep.ratio);

        let sigma = w.pow(-1.0 / (p.p - p.r));
        let apr = apr_characteristic(&w, &sigma, p.p, p.r, &setup.family, &quad)?.value;
        let ap = ap_characteristic(&w, p.p / p.r, &setup.family, &quad)?.value.powf(1.0 / p.p);
        reduction = reduction.max((apr - ap).abs() / ap);
    }
    out.check("max ratio over the ladder", worst, Comparison::AtMost, p.recorded_constant);
    out.check(
        "relative defect [w, w^(-1/(p-r))]_Apr vs [w]_A(p/r)^(1/p)",
        reduction,
        Comparison::AtMost,
        REDUCTION_TOL,
    );
    Ok(out)
}
