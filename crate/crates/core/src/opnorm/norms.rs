use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction};
use crate::weights::Weight;

/// `(h^n sum_j |f(x_j)|^p w_j)^{1/p}` for precomputed node weights.
pub fn weighted_lp_norm_with(f: &SampledFunction, p: f64, node_weights: &[f64]) -> f64 {
    let norms = f.pointwise_norms();
    let mut s = 0.0;
    for (v, w) in norms.iter().zip(node_weights) {
        s += v.powf(p) * w;
    }
    (s * f.grid().cell_volume()).powf(1.0 / p)
}

/// `||f||_{L^p_w}` by the node rule; the singular node of a power weight carries its
/// cell average.
pub fn weighted_lp_norm(f: &SampledFunction, p: f64, w: &Weight) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::arg(
            "p",
            format!("exponent {p} must lie in [1, inf)"),
        ));
    }
    let wv = w.node_values(f.grid())?;
    Ok(weighted_lp_norm_with(f, p, &wv))
}

/// `R^n = R^{n_1} x ... x R^{n_l}` with one exponent and weight per block; the first
/// block is integrated innermost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedNormSpec {
    pub split: Vec<usize>,
    pub p: Vec<f64>,
    pub weights: Vec<Weight>,
}

impl MixedNormSpec {
    pub fn validate(&self) -> Result<()> {
        let l = self.split.len();
        if l == 0 || self.p.len() != l || self.weights.len() != l {
            return Err(Error::arg(
                "mixed_norm",
                "split, p and weights must have equal nonzero length",
            ));
        }
        if self.split.contains(&0) {
            return Err(Error::arg("split", "blocks must be nonempty"));
        }
        if self.p.iter().any(|p| !(*p >= 1.0 && p.is_finite())) {
            return Err(Error::arg("p", "exponents must lie in [1, inf)"));
        }
        Ok(())
    }
}

/// The nested weighted mixed norm.
pub fn mixed_norm(f: &SampledFunction, spec: &MixedNormSpec) -> Result<f64> {
    spec.validate()?;
    let g = *f.grid();
    let n: usize = spec.split.iter().sum();
    if n != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: n,
        });
    }
    let pts = g.points();
    let h = g.spacing();
    // axis 0 is slowest, so the innermost block is the leading axes of the flat index
    let mut vals = f.pointwise_norms();
    for (b, &nb) in spec.split.iter().enumerate() {
        let sub = Grid::new(nb, pts, g.length())?;
        let wv = spec.weights[b].node_values(&sub)?;
        let block = pts.pow(nb as u32);
        let rest = vals.len() / block;
        let p = spec.p[b];
        let cell = h.powi(nb as i32);
        let mut next = vec![0.0; rest];
        for (r, slot) in next.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in 0..block {
                let v = vals[i * rest + r];
                s += v.powf(p) * wv[i];
            }
            *slot = (s * cell).powf(1.0 / p);
        }
        vals = next;
    }
    Ok(vals[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{forward_dft, sample, FunctionSpec};
    use num_complex::Complex64;

    #[test]
    fn unweighted_l2_matches_parseval() {
        let g = Grid::new(1, 128, 4.0).unwrap();
        let f = sample(
            &FunctionSpec::RandomBandLimited {
                band: 8.0,
                min_abs: 0.0,
                seed: 9,
            },
            g,
            2,
        )
        .unwrap();
        let n = weighted_lp_norm(&f, 2.0, &Weight::constant(1.0)).unwrap();
        let e = forward_dft(&f).energy() / g.length();
        assert!((n * n - e).abs() <= 1e-10 * e);
    }

    #[test]
    fn half_power_integral() {
        let g = Grid::new(1, 4096, 8.0).unwrap();
        let f = sample(
            &FunctionSpec::Indicator {
                lo: vec![0.0],
                hi: vec![1.0],
            },
            g,
            1,
        )
        .unwrap();
        let v = weighted_lp_norm(&f, 1.0, &Weight::power(0.5)).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-4, "{v}");
        assert_eq!(
            weighted_lp_norm(&SampledFunction::zeros(g, 1), 1.0, &Weight::power(0.5)).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_block_is_bitwise_equal() {
        let g = Grid::new(2, 16, 2.0).unwrap();
        let f = SampledFunction::from_fn(g, 1, |x, _| Complex64::new(x[0].cos() + x[1], x[1]));
        let w = Weight::coord_power(vec![0.3, -0.2]);
        let spec = MixedNormSpec {
            split: vec![2],
            p: vec![3.0],
            weights: vec![w.clone()],
        };
        assert_eq!(
            mixed_norm(&f, &spec).unwrap(),
            weighted_lp_norm(&f, 3.0, &w).unwrap()
        );
    }
}
