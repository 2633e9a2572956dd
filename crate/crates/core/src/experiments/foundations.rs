use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{rng, Comparison, Outcome};
use crate::error::Result;
use crate::grid::{forward_dft, inverse_dft, sample, FunctionSpec, Grid, SampledFunction};
use crate::multiplier::{hilbert_transform_quadrature, HilbertKernel, MatrixSymbol, MultiplierOperator, Sgn};
use crate::opnorm::{operator_norm_estimate, Budget, Strategy};
use crate::weights::{ap_characteristic, CandidateSpec, Quadrature, Shape, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DftCase {
    pub dim: usize,
    pub points: usize,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DftParams {
    pub cases: Vec<DftCase>,
    pub samples: usize,
}

impl Default for DftParams {
    fn default() -> Self {
        DftParams {
            cases: vec![
                DftCase { dim: 1, points: 256, length: 8.0 },
                DftCase { dim: 2, points: 64, length: 8.0 },
            ],
            samples: 4,
        }
    }
}

const ROUNDTRIP_TOL: f64 = 1e-12;
const PARSEVAL_TOL: f64 = 1e-10;

pub(crate) fn dft_roundtrip(p: &DftParams, seed: u64) -> Result<Outcome> {
    let mut rng = rng(seed);
    let mut out = Outcome::default();
    for case in &p.cases {
        let g = Grid::new(case.dim, case.points, case.length)?;
        let (mut trip, mut pars): (f64, f64) = (0.0, 0.0);
        for _ in 0..p.samples {
            let mut f = SampledFunction::zeros(g, 1);
            for v in f.values_mut() {
                *v = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
            let s = forward_dft(&f);
            trip = trip.max(inverse_dft(&s).max_abs_diff(&f));
            // h^n sum |f|^2 = L^{-n} sum |F f|^2
            let space: f64 = f.values().iter().map(|z| z.norm_sqr()).sum::<f64>() * g.cell_volume();
            let freq = s.energy() * g.freq_spacing().powi(g.dim() as i32);
            pars = pars.max((space - freq).abs() / space);
        }
        let tag = format!("n={} N={}", case.dim, case.points);
        out.record(format!("roundtrip {tag}"), trip);
        out.record(format!("parseval {tag}"), pars);
        out.check(format!("round trip max error, {tag}"), trip, Comparison::AtMost, ROUNDTRIP_TOL);
        out.check(format!("Parseval relative defect, {tag}"), pars, Comparison::AtMost, PARSEVAL_TOL);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApDualityParams {
    pub exponents: Vec<f64>,
    pub p: Vec<f64>,
    pub candidates: CandidateSpec,
}

impl Default for ApDualityParams {
    fn default() -> Self {
        ApDualityParams {
            exponents: vec![-0.5, 0.0, 0.5],
            p: vec![2.0, 3.0],
            candidates: CandidateSpec::new(Shape::Cubes),
        }
    }
}

const DUALITY_TOL: f64 = 1e-6;

pub(crate) fn ap_duality(p: &ApDualityParams, _seed: u64) -> Result<Outcome> {
    let fam = p.candidates.build(1)?;
    let quad = Quadrature::default();
    let mut out = Outcome::default();
    for &a in &p.exponents {
        for &pp in &p.p {
            let w = Weight::power(a);
            let direct = ap_characteristic(&w, pp, &fam, &quad)?.value;
            let pc = pp / (pp - 1.0);
            let dual = ap_characteristic(&w.dual(pp)?, pc, &fam, &quad)?.value.powf(pp - 1.0);
            let defect = (direct - dual).abs() / direct;
            out.record(format!("[w]_Ap a={a} p={pp}"), direct);
            out.check(format!("duality defect a={a} p={pp}"), defect, Comparison::AtMost, DUALITY_TOL);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ApCharParams {
    pub exponent: f64,
    pub p: f64,
    pub intervals: usize,
    /// Brute-force endpoints are drawn uniformly from `[-reach, reach]`.
    pub reach: f64,
    pub candidates: CandidateSpec,
}

impl Default for ApCharParams {
    fn default() -> Self {
        ApCharParams {
            exponent: 0.5,
            p: 2.0,
            intervals: 100_000,
            reach: 4.0,
            candidates: CandidateSpec::new(Shape::Cubes),
        }
    }
}

const AP_ORACLE_TOL: f64 = 1e-2;

/// Average of `|t|^a` over `[u, v]`, from the antiderivative `sgn(t)|t|^{a+1}/(a+1)`.
fn power_average(a: f64, u: f64, v: f64) -> f64 {
    let prim = |t: f64| t.signum() * t.abs().powf(a + 1.0) / (a + 1.0);
    (prim(v) - prim(u)) / (v - u)
}

pub(crate) fn ap_char(p: &ApCharParams, seed: u64) -> Result<Outcome> {
    let mut rng = rng(seed);
    let fam = p.candidates.build(1)?;
    let w = Weight::power(p.exponent);
    let est = ap_characteristic(&w, p.p, &fam, &Quadrature::default())?.value;
    let dual_a = -p.exponent / (p.p - 1.0);
    let mut brute: f64 = 0.0;
    for _ in 0..p.intervals {
        let x: f64 = rng.random_range(-p.reach..p.reach);
        let y: f64 = rng.random_range(-p.reach..p.reach);
        let (u, v) = (x.min(y), x.max(y));
        if v - u < 1e-12 {
            continue;
        }
        let val = power_average(p.exponent, u, v) * power_average(dual_a, u, v).powf(p.p - 1.0);
        brute = brute.max(val);
    }
    let mut out = Outcome::default();
    out.record("candidate estimate", est);
    out.record("brute force", brute);
    out.check("relative gap to brute force", (est - brute).abs() / brute, Comparison::AtMost, AP_ORACLE_TOL);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HilbertParams {
    pub points: usize,
    pub length: f64,
    /// Gaussian `exp(-pi x^2 / s^2)` fed to both transforms.
    pub scale: f64,
    pub norm_points: usize,
    pub norm_length: f64,
    pub budget: Budget,
}

impl Default for HilbertParams {
    fn default() -> Self {
        HilbertParams {
            points: 4096,
            length: 40.0,
            scale: 1.0,
            norm_points: 256,
            norm_length: 8.0,
            budget: Budget::default(),
        }
    }
}

const HILBERT_L2_TOL: f64 = 1e-2;
const HILBERT_NORM_TOL: f64 = 1e-4;

pub(crate) fn hilbert(p: &HilbertParams, _seed: u64) -> Result<Outcome> {
    let g = Grid::new(1, p.points, p.length)?;
    let f = sample(&FunctionSpec::Gaussian { center: vec![0.0], scale: p.scale }, g, 1)?;
    let quad = hilbert_transform_quadrature(&f, HilbertKernel::Periodized)?;
    let t = MultiplierOperator::new(MatrixSymbol::from_fn(g, Sgn::hilbert(1))?);
    let spec = t.apply(&f)?;
    let rel = quad.sub(&spec).l2_norm() / spec.l2_norm();

    let gn = Grid::new(1, p.norm_points, p.norm_length)?;
    let tn = MultiplierOperator::new(MatrixSymbol::from_fn(gn, Sgn::hilbert(1))?);
    let one = Weight::constant(1.0);
    let est = operator_norm_estimate(&tn, 2.0, &one, &one, Strategy::PowerIteration, p.budget)?;

    let mut out = Outcome::default();
    out.record("quadrature vs multiplier", rel);
    out.record("L2 norm estimate", est.value);
    out.check("relative L2 gap, quadrature vs -pi i sgn", rel, Comparison::AtMost, HILBERT_L2_TOL);
    out.check(
        "|norm - pi|",
        (est.value - std::f64::consts::PI).abs(),
        Comparison::AtMost,
        HILBERT_NORM_TOL,
    );
    Ok(out)
}
