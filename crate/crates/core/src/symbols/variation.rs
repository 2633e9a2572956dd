use serde::{Deserialize, Serialize};

use super::mikhlin::derivative_at;
use super::rbound::{r_bound, OperatorFamily};
use crate::error::{Error, Result};
use crate::lp_decomp::DyadicInterval;
use crate::multiplier::MatrixSymbol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub interval: DyadicInterval,
    /// `|mu_{m,I}| = 2 + \int_I |eta|^{-1} d eta`.
    pub measure_norm: f64,
    /// R-bound of `tau_{m,I}`: endpoint values and `eta m'(eta)` on the interior.
    pub tau_r_bound: f64,
    pub samples: usize,
}

/// Measure norm and R-bound of the density `tau_{m,I}` for a dyadic `I = [lo, hi]`.
/// Interior samples are log-spaced midpoints.
pub fn rbdd_variation_1d(
    m: &MatrixSymbol,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<VariationReport> {
    let interval = DyadicInterval::from_bounds(lo, hi)?;
    if m.grid().dim() != 1 {
        return Err(Error::arg("m", "one-dimensional symbol required"));
    }
    if samples == 0 {
        return Err(Error::arg("samples", "need at least one interior sample"));
    }
    let f = m.analytic().ok_or(Error::NotEvaluable)?;
    // two point masses of total variation 1 each, plus the density 1/|eta| on (lo, hi)
    let measure_norm = 2.0 + (hi.abs().max(lo.abs()) / hi.abs().min(lo.abs())).ln();
    let mut members = vec![f.value(&[lo]), f.value(&[hi])];
    let (a, b) = (lo.abs().min(hi.abs()), lo.abs().max(hi.abs()));
    let sign = lo.signum();
    for i in 0..samples {
        let eta = sign * a * (b / a).powf((i as f64 + 0.5) / samples as f64);
        let (d, _) = derivative_at(f.as_ref(), &[eta], &[1]);
        members.push(d * crate::linalg::c(eta, 0.0));
    }
    let fam = OperatorFamily::new(members)?;
    Ok(VariationReport {
        interval,
        measure_norm,
        tau_r_bound: r_bound(&fam),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::linalg::c;
    use crate::multiplier::Sgn;

    #[test]
    fn measure_norm_constant() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let m = MatrixSymbol::identity(g, 3);
        for k in -5..5 {
            let a = 2f64.powi(k);
            for (lo, hi) in [(a, 2.0 * a), (-2.0 * a, -a)] {
                let r = rbdd_variation_1d(&m, lo, hi, 32).unwrap();
                assert!((r.measure_norm - (2.0 + 2f64.ln())).abs() < 1e-12);
                assert!(r.tau_r_bound <= 1.0 + 1e-12);
            }
        }
        assert!(rbdd_variation_1d(&m, 1.0, 3.0, 8).is_err());
        assert!(rbdd_variation_1d(&m, -1.0, 1.0, 8).is_err());
    }

    #[test]
    fn sgn_tau_is_unit() {
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
        let r = rbdd_variation_1d(&m, 0.5, 1.0, 16).unwrap();
        assert_eq!(r.tau_r_bound, 1.0);
    }
}
