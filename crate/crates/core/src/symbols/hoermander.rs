use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mikhlin::{derivative_at, DerivativeSource};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::multiplier::{Adjoint, MatrixSymbol, SharedSymbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoermanderMode {
    #[default]
    Direct,
    /// Apply the condition to `m(-xi)^*` on the standard basis of the output fiber.
    Adjoint,
}

/// Midpoint rule on `R < |xi| < 2R`: `radial` nodes in `rho = R (1 + t)`, `angular`
/// nodes per angle in polar or spherical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusQuadrature {
    pub radial: usize,
    pub angular: usize,
}

impl Default for AnnulusQuadrature {
    fn default() -> Self {
        AnnulusQuadrature {
            radial: 64,
            angular: 64,
        }
    }
}

impl AnnulusQuadrature {
    /// Nodes and weights on the annulus of inner radius `r` in dimension `n`.
    pub fn nodes(&self, n: usize, r: f64) -> Vec<(Vec<f64>, f64)> {
        let nr = self.radial.max(1);
        let na = self.angular.max(1);
        let dr = r / nr as f64;
        let mut out = Vec::new();
        for i in 0..nr {
            let rho = r * (1.0 + (i as f64 + 0.5) / nr as f64);
            match n {
                1 => {
                    out.push((vec![rho], dr));
                    out.push((vec![-rho], dr));
                }
                2 => {
                    let dt = 2.0 * PI / na as f64;
                    for k in 0..na {
                        let t = (k as f64 + 0.5) * dt;
                        out.push((vec![rho * t.cos(), rho * t.sin()], rho * dr * dt));
                    }
                }
                _ => {
                    let dth = PI / na as f64;
                    let dph = 2.0 * PI / (2 * na) as f64;
                    for a in 0..na {
                        let th = (a as f64 + 0.5) * dth;
                        for b in 0..2 * na {
                            let ph = (b as f64 + 0.5) * dph;
                            out.push((
                                vec![
                                    rho * th.sin() * ph.cos(),
                                    rho * th.sin() * ph.sin(),
                                    rho * th.cos(),
                                ],
                                rho * rho * th.sin() * dr * dth * dph,
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

/// All multi-indices in `N^n` with `|alpha|_1 <= l`.
pub fn multi_indices_up_to(n: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![0; n]];
    let mut frontier = out.clone();
    for _ in 0..l {
        let mut next = Vec::new();
        for a in &frontier {
            // extend only at or after the last nonzero entry to avoid duplicates
            let start = a.iter().rposition(|&x| x > 0).unwrap_or(0);
            for j in start..n {
                let mut b = a.clone();
                b[j] += 1;
                next.push(b);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoermanderEntry {
    pub alpha: Vec<usize>,
    pub radius: f64,
    /// Index of the basis vector `u`.
    pub basis: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoermanderReport {
    /// Worst constant `C` over the entries.
    pub value: f64,
    pub s: f64,
    pub l: usize,
    pub mode: HoermanderMode,
    pub entries: Vec<HoermanderEntry>,
    pub derivative_source: DerivativeSource,
    pub is_lower_bound: bool,
}

/// `max_{alpha, R, u} (R^{s|alpha| - n} \int_{R<|xi|<2R} |d^alpha m(xi) u|^s dxi)^{1/s}`
/// over `|alpha|_1 <= l`, the radius ladder and the standard basis.
pub fn hoermander_condition(
    m: &MatrixSymbol,
    s: f64,
    l: usize,
    r_ladder: &[f64],
    mode: HoermanderMode,
    quad: AnnulusQuadrature,
) -> Result<HoermanderReport> {
    let f = m.analytic().ok_or(Error::NotEvaluable)?;
    hoermander_condition_fn(f.clone(), m.grid().dim(), s, l, r_ladder, mode, quad)
}

/// As [`hoermander_condition`] for a bare symbol function on `R^n`.
pub fn hoermander_condition_fn(
    f: SharedSymbol,
    n: usize,
    s: f64,
    l: usize,
    r_ladder: &[f64],
    mode: HoermanderMode,
    quad: AnnulusQuadrature,
) -> Result<HoermanderReport> {
    if !(s > 1.0 && s <= 2.0) {
        return Err(Error::arg("s", format!("exponent {s} must lie in (1, 2]")));
    }
    if l > n {
        return Err(Error::arg(
            "l",
            format!("order {l} exceeds the dimension {n}"),
        ));
    }
    if r_ladder.is_empty() || r_ladder.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::arg("r_ladder", "radii must be positive and finite"));
    }
    let sym: SharedSymbol = match mode {
        HoermanderMode::Direct => f,
        HoermanderMode::Adjoint => Arc::new(Adjoint { inner: f }),
    };
    let alphas = multi_indices_up_to(n, l);
    let probe = vec![r_ladder[0]; n];
    let analytic = alphas.iter().all(|a| sym.derivative(&probe, a).is_some());
    let dim_in = sym.d_in();
    let jobs: Vec<(usize, usize)> = (0..alphas.len())
        .flat_map(|a| (0..r_ladder.len()).map(move |r| (a, r)))
        .collect();
    let rows: Vec<Vec<HoermanderEntry>> = jobs
        .par_iter()
        .map(|&(ai, ri)| {
            let alpha = &alphas[ai];
            let r = r_ladder[ri];
            let order: usize = alpha.iter().sum();
            let mut sums = vec![0.0; dim_in];
            for (xi, w) in quad.nodes(n, r) {
                let (d, _): (CMat, _) = derivative_at(sym.as_ref(), &xi, alpha);
                for (u, acc) in sums.iter_mut().enumerate() {
                    *acc += d.column(u).norm().powf(s) * w;
                }
            }
            let scale = r.powf(s * order as f64 - n as f64);
            sums.into_iter()
                .enumerate()
                .map(|(u, v)| HoermanderEntry {
                    alpha: alpha.clone(),
                    radius: r,
                    basis: u,
                    value: (scale * v).powf(1.0 / s),
                })
                .collect()
        })
        .collect();
    let entries: Vec<HoermanderEntry> = rows.into_iter().flatten().collect();
    Ok(HoermanderReport {
        value: entries.iter().map(|e| e.value).fold(0.0, f64::max),
        s,
        l,
        mode,
        entries,
        derivative_source: if analytic {
            DerivativeSource::Analytic
        } else {
            DerivativeSource::FiniteDifference
        },
        is_lower_bound: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::linalg::c;
    use crate::multiplier::{Constant, Dilated, FromFn, Sgn};

    #[test]
    fn identity_matches_annulus_volume() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let m = MatrixSymbol::identity(g, 2);
        for s in [1.5, 2.0] {
            let rep = hoermander_condition(
                &m,
                s,
                1,
                &[0.25, 1.0, 8.0],
                HoermanderMode::Direct,
                Default::default(),
            )
            .unwrap();
            assert!((rep.value - 2f64.powf(1.0 / s)).abs() < 1e-6);
        }
        let sg = MatrixSymbol::from_fn(g, Sgn::hilbert(1)).unwrap();
        let unit = MatrixSymbol::from_fn(
            g,
            Sgn {
                d: 1,
                axis: 0,
                scale: c(1.0, 0.0),
            },
        )
        .unwrap();
        let a = hoermander_condition(
            &unit,
            2.0,
            1,
            &[1.0],
            HoermanderMode::Adjoint,
            Default::default(),
        )
        .unwrap();
        assert!((a.value - 2f64.sqrt()).abs() < 1e-12);
        let b = hoermander_condition(
            &sg,
            2.0,
            1,
            &[1.0],
            HoermanderMode::Direct,
            Default::default(),
        )
        .unwrap();
        assert!((b.value - PI * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn zero_symbol_and_errors() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let z = MatrixSymbol::from_fn(
            g,
            Constant {
                d: 1,
                z: c(0.0, 0.0),
            },
        )
        .unwrap();
        let q = AnnulusQuadrature {
            radial: 8,
            angular: 8,
        };
        assert_eq!(
            hoermander_condition(&z, 2.0, 2, &[1.0], HoermanderMode::Direct, q)
                .unwrap()
                .value,
            0.0
        );
        assert!(hoermander_condition(&z, 1.0, 1, &[1.0], HoermanderMode::Direct, q).is_err());
        assert!(hoermander_condition(&z, 2.0, 3, &[1.0], HoermanderMode::Direct, q).is_err());
    }

    #[test]
    fn two_dim_annulus_area() {
        // alpha = 0, m = Id: (R^{-2} * 3 pi R^2)^{1/s}
        let g = Grid::new(2, 16, 1.0).unwrap();
        let m = MatrixSymbol::identity(g, 1);
        let rep = hoermander_condition(
            &m,
            2.0,
            0,
            &[3.0],
            HoermanderMode::Direct,
            Default::default(),
        )
        .unwrap();
        assert!((rep.value - (3.0 * PI).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn dilation_moves_the_ladder() {
        let f: SharedSymbol = Arc::new(FromFn::new(1, 1, "x/(1+x^2)", |x| {
            crate::linalg::scalar(c(x[0] / (1.0 + x[0] * x[0]), 0.0))
        }));
        let lam = 4.0;
        let dil: SharedSymbol = Arc::new(Dilated {
            inner: f.clone(),
            lambda: lam,
        });
        let q = AnnulusQuadrature::default();
        let radii = [0.125, 0.5, 2.0];
        let scaled: Vec<f64> = radii.iter().map(|r| r * lam).collect();
        let a = hoermander_condition_fn(dil, 1, 1.5, 1, &radii, HoermanderMode::Direct, q).unwrap();
        let b = hoermander_condition_fn(f, 1, 1.5, 1, &scaled, HoermanderMode::Direct, q).unwrap();
        assert!((a.value - b.value).abs() <= 1e-6 * b.value);
    }

    #[test]
    fn multi_index_count() {
        assert_eq!(multi_indices_up_to(2, 2).len(), 6);
        assert_eq!(multi_indices_up_to(3, 1).len(), 4);
        assert_eq!(multi_indices_up_to(1, 0), vec![vec![0]]);
    }
}
