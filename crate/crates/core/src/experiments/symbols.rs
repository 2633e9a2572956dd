use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{rng, Comparison, Outcome};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{c, from_rows, CMat};
use crate::multiplier::{MatrixSymbol, Sgn};
use crate::symbols::{
    approx_kernel, check_p_hoermander, maxreg_symbol, mikhlin_norm_1d, rbdd_variation_1d, LogLadder,
    PartitionOfUnity,
};

pub(crate) fn real_matrix(rows: &[Vec<f64>]) -> Result<CMat> {
    from_rows(&rows.iter().map(|r| r.iter().map(|x| c(*x, 0.0)).collect()).collect::<Vec<_>>())
}

fn diag_one_two() -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.0], vec![0.0, 2.0]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MikhlinParams {
    /// Real matrix `A` of the resolvent symbol `i xi (i xi - A)^{-1}`.
    pub matrix: Vec<Vec<f64>>,
    pub ladder: LogLadder,
}

impl Default for MikhlinParams {
    fn default() -> Self {
        MikhlinParams {
            matrix: diag_one_two(),
            ladder: LogLadder::default(),
        }
    }
}

const MIKHLIN_TOL: f64 = 1e-3;

pub(crate) fn mikhlin_check(p: &MikhlinParams, _seed: u64) -> Result<Outcome> {
    let g = Grid::new(1, 64, 1.0)?;
    let mut out = Outcome::default();
    let sgn = MatrixSymbol::from_fn(g, Sgn { d: 2, axis: 0, scale: c(1.0, 0.0) })?;
    let rs = mikhlin_norm_1d(&sgn, &p.ladder)?;
    out.record("sgn Id", rs.value);
    out.check("|sgn Id| - 1", rs.value - 1.0, Comparison::Equal, 0.0);

    let a = real_matrix(&p.matrix)?;
    let m = maxreg_symbol(&a, g)?;
    let rm = mikhlin_norm_1d(&m, &p.ladder)?;
    let d1 = rm.breakdown.iter().find(|e| e.alpha == [1]).map_or(f64::NAN, |e| e.sup);
    out.record("resolvent", rm.value);
    out.record("resolvent sup |xi m'|", d1);
    out.check("|resolvent norm - 1|", (rm.value - 1.0).abs(), Comparison::AtMost, MIKHLIN_TOL);
    // xi m'(xi) has modulus lambda |xi| / (xi^2 + lambda^2) on each eigenvalue, maximal 1/2 at |xi| = lambda
    out.check("|sup |xi m'| - 1/2|", (d1 - 0.5).abs(), Comparison::AtMost, MIKHLIN_TOL);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationParams {
    pub k_min: i32,
    pub k_max: i32,
    pub samples: usize,
    pub matrix: Vec<Vec<f64>>,
}

impl Default for VariationParams {
    fn default() -> Self {
        VariationParams {
            k_min: -10,
            k_max: 10,
            samples: 32,
            matrix: diag_one_two(),
        }
    }
}

const VARIATION_TOL: f64 = 1e-9;

pub(crate) fn rbdd_variation(p: &VariationParams, _seed: u64) -> Result<Outcome> {
    let g = Grid::new(1, 64, 1.0)?;
    let m = maxreg_symbol(&real_matrix(&p.matrix)?, g)?;
    let want = 2.0 + 2f64.ln();
    let (mut worst, mut tau): (f64, f64) = (0.0, 0.0);
    for k in p.k_min..=p.k_max {
        let a = 2f64.powi(k);
        for (lo, hi) in [(a, 2.0 * a), (-2.0 * a, -a)] {
            let r = rbdd_variation_1d(&m, lo, hi, p.samples)?;
            worst = worst.max((r.measure_norm - want).abs());
            tau = tau.max(r.tau_r_bound);
        }
    }
    let mut out = Outcome::default();
    out.record("max tau R-bound", tau);
    out.check("max |measure norm - (2 + ln 2)|", worst, Comparison::AtMost, VARIATION_TOL);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionParams {
    /// Telescoped band `2^{-J} <= |xi| <= 2^J`.
    pub j: i32,
    pub samples: usize,
    pub points: usize,
    pub length: f64,
    pub truncation: i32,
    pub matrix: Vec<Vec<f64>>,
}

impl Default for PartitionParams {
    fn default() -> Self {
        PartitionParams {
            j: 6,
            samples: 2000,
            points: 512,
            length: 16.0,
            truncation: 3,
            matrix: diag_one_two(),
        }
    }
}

const PARTITION_TOL: f64 = 1e-10;
const KERNEL_TOL: f64 = 1e-8;

/// `max |F K_N - sum_{|j| <= N} phi(2^{-j} xi) m(xi)|` over nodes and columns, relative to `max |m|`.
fn kernel_defect(m: &MatrixSymbol, truncation: i32, g: Grid) -> Result<f64> {
    let kt = approx_kernel(m, truncation, g)?;
    let pou = PartitionOfUnity;
    let n = g.dim();
    let mut worst: f64 = 0.0;
    for u in 0..m.d_in() {
        let spec = kt.spectrum(u);
        for idx in 0..g.num_nodes() {
            let xi = g.freq_node(idx);
            let w: f64 = (-truncation..=truncation).map(|j| pou.block(j, &xi[..n])).sum();
            let mv = m.at(idx);
            for (r, got) in spec.at(idx).iter().enumerate() {
                worst = worst.max((got - mv[(r, u)] * w).norm());
            }
        }
    }
    Ok(worst / m.max_node_norm().max(f64::MIN_POSITIVE))
}

pub(crate) fn partition_unity(p: &PartitionParams, seed: u64) -> Result<Outcome> {
    let mut rng = rng(seed);
    let pou = PartitionOfUnity;
    let mut worst: f64 = 0.0;
    for _ in 0..p.samples {
        let n = rng.random_range(1..=3usize);
        let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let len = dir.iter().map(|t| t * t).sum::<f64>().sqrt();
        if len == 0.0 {
            continue;
        }
        let r = 2f64.powf(rng.random_range(-(p.j as f64)..=p.j as f64));
        let xi: Vec<f64> = dir.iter().map(|t| t / len * r).collect();
        worst = worst.max((pou.partial_sum(p.j, &xi) - 1.0).abs());
    }
    for r in [2f64.powi(-p.j), 2f64.powi(p.j)] {
        worst = worst.max((pou.partial_sum(p.j, &[r]) - 1.0).abs());
    }
    let g = Grid::new(1, p.points, p.length)?;
    let hil = kernel_defect(&MatrixSymbol::from_fn(g, Sgn::hilbert(1))?, p.truncation, g)?;
    let res = kernel_defect(&maxreg_symbol(&real_matrix(&p.matrix)?, g)?, p.truncation, g)?;
    let mut out = Outcome::default();
    out.check("max |partial sum - 1| on the band", worst, Comparison::AtMost, PARTITION_TOL);
    out.check("K_N spectral defect, Hilbert", hil, Comparison::AtMost, KERNEL_TOL);
    out.check("K_N spectral defect, resolvent", res, Comparison::AtMost, KERNEL_TOL);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PHoermanderParams {
    /// Coarse and refined grid sizes.
    pub points: Vec<usize>,
    pub length: f64,
    pub truncation: i32,
    pub p: f64,
    pub y: Vec<f64>,
    pub k_min: i32,
    pub k_max: i32,
}

impl Default for PHoermanderParams {
    fn default() -> Self {
        PHoermanderParams {
            points: vec![32768, 65536],
            length: 2048.0,
            truncation: 1,
            p: 1.0,
            y: vec![0.5, 1.0],
            k_min: 0,
            k_max: 8,
        }
    }
}

const HOERMANDER_STABILITY: f64 = 0.1;

pub(crate) fn p_hoermander(p: &PHoermanderParams, _seed: u64) -> Result<Outcome> {
    if p.points.len() < 2 {
        return Err(Error::arg("points", "need a grid and its refinement"));
    }
    let ys: Vec<Vec<f64>> = p.y.iter().map(|y| vec![*y]).collect();
    let mut sums = Vec::new();
    let mut out = Outcome::default();
    for &n in &p.points {
        let g = Grid::new(1, n, p.length)?;
        let m = MatrixSymbol::from_fn(g, Sgn::hilbert(1))?;
        let kt = approx_kernel(&m, p.truncation, g)?;
        let rep = check_p_hoermander(&kt, p.p, &ys, (p.k_min, p.k_max))?;
        out.record(format!("sum N={n}"), rep.sum);
        for e in &rep.entries {
            out.record(format!("a_{} N={n}", e.k), e.a_k);
        }
        sums.push(rep.sum);
    }
    let finite = sums.iter().all(|s| s.is_finite() && *s > 0.0);
    out.check_flag("sums finite and positive", finite);
    for w in sums.windows(2) {
        out.check(
            "relative change under refinement",
            (w[1] / w[0] - 1.0).abs(),
            Comparison::AtMost,
            HOERMANDER_STABILITY,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::diag;

    #[test]
    fn diag_helper() {
        assert_eq!(real_matrix(&diag_one_two()).unwrap(), diag(&[c(1.0, 0.0), c(2.0, 0.0)]));
    }
}
