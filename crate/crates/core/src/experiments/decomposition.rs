use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{rel_spread, rng, sub_seeds, Comparison, Outcome};
use crate::error::Result;
use crate::grid::{sample, FunctionSpec, Grid, SampledFunction};
use crate::lp_decomp::{
    aniso_blocking_rects, blocking_identity_scan, blocking_rects, decompose, product_rects, reconstruct,
    unconditionality_constants, SignSampling,
};
use crate::symbols::{aniso_dilate, aniso_distance};
use crate::weights::Weight;

/// Random band-limited test functions strictly inside `2^lo <= |xi_j| < 2^hi` on every axis.
fn band_limited(g: Grid, lo: i32, hi: i32, seeds: &[u64]) -> Result<Vec<SampledFunction>> {
    let df = g.freq_spacing();
    seeds
        .iter()
        .map(|&seed| {
            sample(
                &FunctionSpec::RandomBandLimited {
                    band: 2f64.powi(hi) - 0.5 * df,
                    min_abs: 2f64.powi(lo) + 0.5 * df,
                    seed,
                },
                g,
                1,
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LpReconstructParams {
    pub dim: usize,
    pub points: usize,
    pub length: f64,
    pub l_min: i32,
    pub l_max: i32,
    pub functions: usize,
}

impl Default for LpReconstructParams {
    fn default() -> Self {
        LpReconstructParams {
            dim: 2,
            points: 128,
            length: 8.0,
            l_min: -2,
            l_max: 2,
            functions: 5,
        }
    }
}

const RECONSTRUCT_TOL: f64 = 1e-10;

pub(crate) fn lp_reconstruct(p: &LpReconstructParams, seed: u64) -> Result<Outcome> {
    let g = Grid::new(p.dim, p.points, p.length)?;
    let fam = blocking_rects(p.dim, p.l_min, p.l_max)?;
    let seeds = sub_seeds(&mut rng(seed), p.functions);
    let mut worst: f64 = 0.0;
    for f in band_limited(g, p.l_min, p.l_max + 1, &seeds)? {
        let r = reconstruct(&f, &fam)?;
        worst = worst.max(r.max_abs_diff(&f) / f.max_norm());
    }
    let mut out = Outcome::default();
    out.record("members", fam.len() as f64);
    out.check("max relative reconstruction error", worst, Comparison::AtMost, RECONSTRUCT_TOL);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BlockingParams {
    pub dim: usize,
    pub points: usize,
    pub length: f64,
    pub l_min: i32,
    pub l_max: i32,
}

impl Default for BlockingParams {
    fn default() -> Self {
        BlockingParams {
            dim: 2,
            points: 256,
            length: 8.0,
            l_min: -2,
            l_max: 2,
        }
    }
}

pub(crate) fn blocking_identity(p: &BlockingParams, _seed: u64) -> Result<Outcome> {
    let g = Grid::new(p.dim, p.points, p.length)?;
    let scan = blocking_identity_scan(p.dim, p.l_min, p.l_max, &g)?;
    let mut out = Outcome::default();
    out.record("members", scan.members as f64);
    out.record("covered nodes", scan.covered_nodes as f64);
    out.check("defect nodes", scan.defects as f64, Comparison::Equal, 0.0);
    out.check("covered nodes", scan.covered_nodes as f64, Comparison::AtLeast, 1.0);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LpUnweightedParams {
    pub points: usize,
    pub length: f64,
    /// Dyadic scales of the 1-d family; four scales give eight members.
    pub k_min: i32,
    pub k_max: i32,
    pub functions: usize,
}

impl Default for LpUnweightedParams {
    fn default() -> Self {
        LpUnweightedParams {
            points: 256,
            length: 16.0,
            k_min: -1,
            k_max: 2,
            functions: 20,
        }
    }
}

const ORTHOGONALITY_TOL: f64 = 1e-10;

pub(crate) fn lp_unweighted(p: &LpUnweightedParams, seed: u64) -> Result<Outcome> {
    let g = Grid::new(1, p.points, p.length)?;
    let fam = product_rects(1, p.k_min, p.k_max)?;
    let seeds = sub_seeds(&mut rng(seed), p.functions);
    let fs = band_limited(g, p.k_min, p.k_max + 1, &seeds)?;
    let m = fam.len();
    let mut worst: f64 = 0.0;
    for f in &fs {
        let pieces = decompose(f, &fam);
        let norm = f.l2_norm();
        for bits in 0..1usize << m {
            let mut acc = SampledFunction::zeros(g, 1);
            for (j, piece) in pieces.iter().enumerate() {
                let s = if bits >> j & 1 == 1 { -1.0 } else { 1.0 };
                acc = acc.combine(Complex64::new(1.0, 0.0), piece, Complex64::new(s, 0.0));
            }
            worst = worst.max((acc.l2_norm() / norm - 1.0).abs());
        }
    }
    let rep = unconditionality_constants(&fam, 2.0, &Weight::constant(1.0), &fs, SignSampling::Exhaustive)?;
    let mut out = Outcome::default();
    out.record("members", m as f64);
    out.record("patterns", rep.patterns as f64);
    out.record("c_plus_est", rep.c_plus_est);
    out.record("c_minus_est", rep.c_minus_est);
    out.record("c_est", rep.c_est);
    out.check("max |ratio - 1| over all sign patterns", worst, Comparison::AtMost, ORTHOGONALITY_TOL);
    out.check("|c_est - 1|", (rep.c_est - 1.0).abs(), Comparison::AtMost, ORTHOGONALITY_TOL);
    out.check("|c_minus_est - 1|", (rep.c_minus_est - 1.0).abs(), Comparison::AtMost, ORTHOGONALITY_TOL);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LpUnconditionalityParams {
    pub ladder: Vec<usize>,
    pub length: f64,
    pub k_min: i32,
    pub k_max: i32,
    pub weight: Weight,
    pub p: f64,
    pub functions: usize,
}

impl Default for LpUnconditionalityParams {
    fn default() -> Self {
        LpUnconditionalityParams {
            ladder: vec![512, 1024, 2048],
            length: 16.0,
            k_min: -2,
            k_max: 3,
            weight: Weight::power(0.5),
            p: 2.0,
            functions: 20,
        }
    }
}

const STABILITY_TOL: f64 = 0.2;

pub(crate) fn lp_unconditionality(p: &LpUnconditionalityParams, seed: u64) -> Result<Outcome> {
    let fam = product_rects(1, p.k_min, p.k_max)?;
    let seeds = sub_seeds(&mut rng(seed), p.functions);
    let mut out = Outcome::default();
    let (mut plus, mut minus) = (Vec::new(), Vec::new());
    for &n in &p.ladder {
        let g = Grid::new(1, n, p.length)?;
        let fs = band_limited(g, p.k_min, p.k_max + 1, &seeds)?;
        let rep = unconditionality_constants(&fam, p.p, &p.weight, &fs, SignSampling::Auto { seed })?;
        out.record(format!("c_plus N={n}"), rep.c_plus_est);
        out.record(format!("c_minus N={n}"), rep.c_minus_est);
        plus.push(rep.c_plus_est);
        minus.push(rep.c_minus_est);
    }
    out.check("relative spread of C+ over the ladder", rel_spread(&plus), Comparison::AtMost, STABILITY_TOL);
    out.check("relative spread of C- over the ladder", rel_spread(&minus), Comparison::AtMost, STABILITY_TOL);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnisoParams {
    pub samples: usize,
    pub l_min: i32,
    pub l_max: i32,
}

impl Default for AnisoParams {
    fn default() -> Self {
        AnisoParams {
            samples: 1000,
            l_min: -2,
            l_max: 2,
        }
    }
}

const HOMOGENEITY_TOL: f64 = 1e-12;

pub(crate) fn aniso_homogeneity(p: &AnisoParams, seed: u64) -> Result<Outcome> {
    let mut rng = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..p.samples {
        let n = rng.random_range(1..=3);
        let xi: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        let a: Vec<f64> = (0..n).map(|_| 2f64.powf(rng.random_range(-2.0..2.0))).collect();
        let lambda = 10f64.powf(rng.random_range(-3.0..3.0));
        let lhs = aniso_distance(&aniso_dilate(&xi, &a, lambda), &a);
        let rhs = lambda * aniso_distance(&xi, &a);
        if rhs > 0.0 {
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
    }
    let iso = blocking_rects(2, p.l_min, p.l_max)?;
    let aniso = aniso_blocking_rects(&[1.0, 1.0], p.l_min, p.l_max)?;
    let mismatch = iso.len().abs_diff(aniso.len())
        + iso
            .members
            .iter()
            .zip(&aniso.members)
            .filter(|(x, y)| x.bounds != y.bounds || x.label != y.label)
            .count();
    let mut out = Outcome::default();
    out.check("max relative homogeneity defect", worst, Comparison::AtMost, HOMOGENEITY_TOL);
    out.check("members differing between E_2 and E_2^(1,1)", mismatch as f64, Comparison::Equal, 0.0);
    Ok(out)
}
