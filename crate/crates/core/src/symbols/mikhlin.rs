use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, op_norm, CMat};
use crate::lp_decomp::{FamilyKind, FreqRectFamily};
use crate::multiplier::{MatrixSymbol, SharedSymbol, SymbolFunction};

/// Relative step of the central differences.
pub const FD_STEP: f64 = 1e-4;
/// Minimal ladder density when derivatives come from finite differences.
pub const MIN_POINTS_PER_DECADE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

/// `\partial^alpha m(xi)` from the closure when available, else by nested central
/// differences with step `FD_STEP |xi_j|` (or `FD_STEP |xi|` on the hyperplane `xi_j = 0`).
pub fn derivative_at(
    m: &dyn SymbolFunction,
    xi: &[f64],
    alpha: &[usize],
) -> (CMat, DerivativeSource) {
    if let Some(d) = m.derivative(xi, alpha) {
        return (d, DerivativeSource::Analytic);
    }
    (
        finite_difference(m, xi, alpha),
        DerivativeSource::FiniteDifference,
    )
}

fn finite_difference(m: &dyn SymbolFunction, xi: &[f64], alpha: &[usize]) -> CMat {
    let Some(j) = alpha.iter().position(|&a| a > 0) else {
        return m.value(xi);
    };
    let norm = xi.iter().map(|t| t * t).sum::<f64>().sqrt();
    let h = if xi[j] != 0.0 {
        FD_STEP * xi[j].abs()
    } else {
        FD_STEP * norm.max(f64::MIN_POSITIVE)
    };
    let mut rest = alpha.to_vec();
    rest[j] -= 1;
    let mut plus = xi.to_vec();
    let mut minus = xi.to_vec();
    plus[j] += h;
    minus[j] -= h;
    (finite_difference(m, &plus, &rest) - finite_difference(m, &minus, &rest)) * c(0.5 / h, 0.0)
}

/// `{+-2^t}` for `t` on a uniform grid over `[lo_exp, hi_exp]` (base-2 exponents)
/// with `points_per_decade` points per factor of ten.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogLadder {
    pub lo_exp: f64,
    pub hi_exp: f64,
    pub points_per_decade: usize,
}

impl Default for LogLadder {
    fn default() -> Self {
        LogLadder {
            lo_exp: -12.0,
            hi_exp: 12.0,
            points_per_decade: MIN_POINTS_PER_DECADE,
        }
    }
}

impl LogLadder {
    /// Positive ladder points.
    pub fn positive(&self) -> Vec<f64> {
        let decades =
            (self.hi_exp - self.lo_exp) * std::f64::consts::LN_2 / std::f64::consts::LN_10;
        let count = ((decades * self.points_per_decade as f64).ceil() as usize).max(1);
        (0..=count)
            .map(|i| 2f64.powf(self.lo_exp + (self.hi_exp - self.lo_exp) * i as f64 / count as f64))
            .collect()
    }

    pub fn symmetric(&self) -> Vec<f64> {
        let pos = self.positive();
        pos.iter().map(|x| -x).chain(pos.iter().cloned()).collect()
    }

    pub fn describe(&self) -> String {
        format!(
            "+-2^t, t in [{}, {}], {} points per decade",
            self.lo_exp, self.hi_exp, self.points_per_decade
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEntry {
    pub alpha: Vec<usize>,
    pub sup: f64,
    pub argmax: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectEntry {
    pub member: usize,
    pub sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MikhlinReport {
    pub value: f64,
    pub breakdown: Vec<AlphaEntry>,
    pub per_rectangle: Vec<RectEntry>,
    pub sample_grid: String,
    pub derivative_source: DerivativeSource,
    pub is_lower_bound: bool,
}

fn closure_of(m: &MatrixSymbol) -> Result<&SharedSymbol> {
    m.analytic().ok_or(Error::NotEvaluable)
}

fn source_check(
    m: &dyn SymbolFunction,
    probe: &[f64],
    alphas: &[Vec<usize>],
    points_per_decade: Option<usize>,
) -> Result<DerivativeSource> {
    let analytic = alphas.iter().all(|a| m.derivative(probe, a).is_some());
    if analytic {
        return Ok(DerivativeSource::Analytic);
    }
    if let Some(ppd) = points_per_decade {
        if ppd < MIN_POINTS_PER_DECADE {
            return Err(Error::LadderTooCoarse {
                points_per_decade: ppd,
            });
        }
    }
    Ok(DerivativeSource::FiniteDifference)
}

/// `max_{k=0,1} R{ xi^k m^{(k)}(xi) }` over the ladder.
pub fn mikhlin_norm_1d(m: &MatrixSymbol, ladder: &LogLadder) -> Result<MikhlinReport> {
    if m.grid().dim() != 1 {
        return Err(Error::arg("m", "one-dimensional symbol required"));
    }
    let f = closure_of(m)?;
    let alphas = vec![vec![0], vec![1]];
    let source = source_check(f.as_ref(), &[1.0], &alphas, Some(ladder.points_per_decade))?;
    let pts = ladder.symmetric();
    let mut breakdown = Vec::new();
    for alpha in alphas {
        let vals: Vec<f64> = pts
            .par_iter()
            .map(|&x| {
                let (d, _) = derivative_at(f.as_ref(), &[x], &alpha);
                x.abs().powi(alpha[0] as i32) * op_norm(&d)
            })
            .collect();
        let (i, sup) = argmax(&vals);
        breakdown.push(AlphaEntry {
            alpha,
            sup,
            argmax: vec![pts[i]],
        });
    }
    Ok(MikhlinReport {
        value: breakdown.iter().map(|e| e.sup).fold(0.0, f64::max),
        breakdown,
        per_rectangle: Vec::new(),
        sample_grid: ladder.describe(),
        derivative_source: source,
        is_lower_bound: true,
    })
}

fn argmax(v: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &x) in v.iter().enumerate() {
        if x > best.1 {
            best = (i, x);
        }
    }
    best
}

/// `(sum_j |x_j|^{2/a_j})^{1/2}`.
pub fn aniso_distance(x: &[f64], a: &[f64]) -> f64 {
    x.iter()
        .zip(a)
        .map(|(t, aj)| t.abs().powf(2.0 / aj))
        .sum::<f64>()
        .sqrt()
}

/// `delta_lambda xi = (lambda^{a_1} xi_1, ..., lambda^{a_n} xi_n)`, so that
/// `|delta_lambda xi|_a = lambda |xi|_a`.
pub fn aniso_dilate(x: &[f64], a: &[f64], lambda: f64) -> Vec<f64> {
    x.iter()
        .zip(a)
        .map(|(t, aj)| t * lambda.powf(*aj))
        .collect()
}

/// Weight factor multiplying `|partial^alpha m|` in the rectangle Mikhlin conditions.
#[derive(Debug, Clone, PartialEq)]
pub enum MikhlinWeight {
    /// `|xi|^{|alpha|}`.
    Isotropic,
    /// `|xi^alpha| = prod_{alpha_j = 1} |xi_j|`.
    Monomial,
    /// `|xi|_a^{|alpha|}`.
    Anisotropic(Vec<f64>),
}

impl MikhlinWeight {
    fn factor(&self, xi: &[f64], alpha: &[usize]) -> f64 {
        let order: usize = alpha.iter().sum();
        match self {
            MikhlinWeight::Isotropic => xi
                .iter()
                .map(|t| t * t)
                .sum::<f64>()
                .sqrt()
                .powi(order as i32),
            MikhlinWeight::Monomial => xi
                .iter()
                .zip(alpha)
                .map(|(t, &k)| t.abs().powi(k as i32))
                .product(),
            MikhlinWeight::Anisotropic(a) => aniso_distance(xi, a).powi(order as i32),
        }
    }
}

/// Interior samples of a member rectangle: per axis `q` log-spaced magnitudes strictly
/// inside `[lo, hi)`, carried to the rectangle's sign.
pub fn rect_samples(lo: &[f64], hi: &[f64], q: usize) -> Result<Vec<Vec<f64>>> {
    let n = lo.len();
    let mut axes = Vec::with_capacity(n);
    for j in 0..n {
        let (a, b) = if lo[j] >= 0.0 {
            (lo[j], hi[j])
        } else {
            (-hi[j], -lo[j])
        };
        if hi[j] > 0.0 && lo[j] < 0.0 || !(a < b) {
            return Err(Error::arg(
                "family",
                "a rectangle crosses a coordinate hyperplane; no admissible samples",
            ));
        }
        let sign = if lo[j] >= 0.0 { 1.0 } else { -1.0 };
        let pts: Vec<f64> = if a == 0.0 {
            // linear spacing away from the excluded hyperplane
            (0..q)
                .map(|i| sign * b * (i as f64 + 0.5) / q as f64)
                .collect()
        } else {
            (0..q)
                .map(|i| sign * a * (b / a).powf((i as f64 + 0.5) / q as f64))
                .collect()
        };
        axes.push(pts);
    }
    let total = q.pow(n as u32);
    Ok((0..total)
        .map(|flat| {
            let mut r = flat;
            let mut x = vec![0.0; n];
            for j in (0..n).rev() {
                x[j] = axes[j][r % q];
                r /= q;
            }
            x
        })
        .collect())
}

/// All `alpha in {0,1}^n`.
pub fn binary_multi_indices(n: usize) -> Vec<Vec<usize>> {
    (0..1usize << n)
        .map(|bits| (0..n).map(|j| bits >> j & 1).collect())
        .collect()
}

/// Supremum of `weight(xi, alpha) |partial^alpha m(xi)|` over `alpha in {0,1}^n` and
/// `samples_per_axis^n` interior samples of every member rectangle.
pub fn mikhlin_over_family(
    m: &MatrixSymbol,
    family: &FreqRectFamily,
    weight: &MikhlinWeight,
    samples_per_axis: usize,
) -> Result<MikhlinReport> {
    if family.is_empty() {
        return Err(Error::Empty("rectangle family".into()));
    }
    if samples_per_axis == 0 {
        return Err(Error::arg(
            "samples_per_axis",
            "need at least one sample per axis",
        ));
    }
    let n = family.n;
    if m.grid().dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.grid().dim(),
        });
    }
    let f = closure_of(m)?;
    let alphas = binary_multi_indices(n);
    let probe: Vec<f64> = family.members[0]
        .bounds
        .lo
        .iter()
        .zip(&family.members[0].bounds.hi)
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let source = source_check(f.as_ref(), &probe, &alphas, None)?;
    let mut samples = Vec::with_capacity(family.len());
    for rect in &family.members {
        samples.push(rect_samples(
            &rect.bounds.lo,
            &rect.bounds.hi,
            samples_per_axis,
        )?);
    }
    // per member, per alpha: (sup, argmax)
    let per: Vec<Vec<(f64, Vec<f64>)>> = samples
        .par_iter()
        .map(|pts| {
            alphas
                .iter()
                .map(|alpha| {
                    let mut best = (f64::NEG_INFINITY, Vec::new());
                    for x in pts {
                        let (d, _) = derivative_at(f.as_ref(), x, alpha);
                        let v = weight.factor(x, alpha) * op_norm(&d);
                        if v > best.0 {
                            best = (v, x.clone());
                        }
                    }
                    best
                })
                .collect()
        })
        .collect();
    let mut breakdown: Vec<AlphaEntry> = alphas
        .iter()
        .map(|a| AlphaEntry {
            alpha: a.clone(),
            sup: f64::NEG_INFINITY,
            argmax: Vec::new(),
        })
        .collect();
    let mut per_rectangle = Vec::with_capacity(family.len());
    for (member, row) in per.into_iter().enumerate() {
        let mut rect_sup = f64::NEG_INFINITY;
        for (k, (v, x)) in row.into_iter().enumerate() {
            rect_sup = rect_sup.max(v);
            if v > breakdown[k].sup {
                breakdown[k].sup = v;
                breakdown[k].argmax = x;
            }
        }
        per_rectangle.push(RectEntry {
            member,
            sup: rect_sup,
        });
    }
    let kind = match family.kind {
        FamilyKind::Product => "product",
        FamilyKind::Blocking => "blocking",
        FamilyKind::Anisotropic => "anisotropic blocking",
    };
    Ok(MikhlinReport {
        value: breakdown.iter().map(|e| e.sup).fold(0.0, f64::max),
        breakdown,
        per_rectangle,
        sample_grid: format!(
            "{} interior log-spaced samples per axis in each of {} {kind} rectangles, l in [{}, {}]",
            samples_per_axis,
            family.len(),
            family.l_min,
            family.l_max
        ),
        derivative_source: source,
        is_lower_bound: true,
    })
}

/// Rectangle Mikhlin norm: `|xi|^{|alpha|}` weights on blocking families, `|xi^alpha|`
/// on product families.
pub fn mikhlin_norm_rect(
    m: &MatrixSymbol,
    family: &FreqRectFamily,
    samples_per_axis: usize,
) -> Result<MikhlinReport> {
    let weight = match family.kind {
        FamilyKind::Product => MikhlinWeight::Monomial,
        FamilyKind::Blocking => MikhlinWeight::Isotropic,
        FamilyKind::Anisotropic => MikhlinWeight::Anisotropic(family.a.clone()),
    };
    mikhlin_over_family(m, family, &weight, samples_per_axis)
}

/// Anisotropic Mikhlin norm over an anisotropic blocking family built with `a`.
pub fn mikhlin_norm_aniso(
    m: &MatrixSymbol,
    a: &[f64],
    family: &FreqRectFamily,
    samples_per_axis: usize,
) -> Result<MikhlinReport> {
    if a.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::arg("a", "anisotropy exponents must be positive"));
    }
    if a.len() != family.n {
        return Err(Error::DimensionMismatch {
            expected: family.n,
            found: a.len(),
        });
    }
    mikhlin_over_family(
        m,
        family,
        &MikhlinWeight::Anisotropic(a.to_vec()),
        samples_per_axis,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::multiplier::{FromFn, Sgn};

    #[test]
    fn sgn_has_norm_one() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let m = MatrixSymbol::from_fn(
            g,
            Sgn {
                d: 2,
                axis: 0,
                scale: c(1.0, 0.0),
            },
        )
        .unwrap();
        let r = mikhlin_norm_1d(&m, &LogLadder::default()).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.derivative_source, DerivativeSource::Analytic);
    }

    #[test]
    fn coarse_ladder_rejected_without_derivative() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let m = MatrixSymbol::from_fn(
            g,
            FromFn::new(1, 1, "atan", |x| crate::linalg::scalar(c(x[0].atan(), 0.0))),
        )
        .unwrap();
        let coarse = LogLadder {
            points_per_decade: 16,
            ..LogLadder::default()
        };
        assert!(matches!(
            mikhlin_norm_1d(&m, &coarse),
            Err(Error::LadderTooCoarse {
                points_per_decade: 16
            })
        ));
        // sup |atan| -> pi/2 at the ends; sup |x/(1+x^2)| = 1/2
        let r = mikhlin_norm_1d(&m, &LogLadder::default()).unwrap();
        assert!((r.breakdown[1].sup - 0.5).abs() < 1e-3);
        assert!((r.value - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
    }

    #[test]
    fn aniso_distance_unit_vector() {
        assert!((aniso_distance(&[3.0, 4.0], &[1.0, 1.0]) - 5.0).abs() < 1e-15);
        assert!((aniso_distance(&[4.0, 0.0], &[2.0, 1.0]) - 2.0).abs() < 1e-15);
    }
}
