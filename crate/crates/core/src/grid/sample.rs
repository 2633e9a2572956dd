use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{inverse_dft, Grid, SampledFunction, SampledSpectrum};
use crate::error::{Error, Result};

/// Built-in test-function constructors. Scalar profiles are replicated in every
/// fiber component; random constructors draw each component independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `exp(-pi |x - c|^2 / s^2)`.
    Gaussian {
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `exp(2 pi i a . x) exp(-pi |x - c|^2 / s^2)`.
    ModulatedGaussian {
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "one")]
        scale: f64,
        frequency: Vec<f64>,
    },
    /// `exp(1 - 1 / (1 - |x - c|^2 / R^2))` inside the ball of radius `R`, zero outside.
    CompactBump {
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "one")]
        radius: f64,
    },
    /// Gaussian coefficients on the frequency nodes with `min_abs <= |xi_j| <= band`
    /// for every axis `j`, Nyquist nodes excluded.
    RandomBandLimited {
        band: f64,
        #[serde(default)]
        min_abs: f64,
        #[serde(default)]
        seed: u64,
    },
    /// `sin(2 pi a . x + phase)`.
    Sinusoid {
        frequency: Vec<f64>,
        #[serde(default)]
        phase: f64,
    },
    /// Indicator of the box `[lo, hi)`, sampled as the covered fraction of each grid cell
    /// `[x_j - h/2, x_j + h/2)`.
    Indicator { lo: Vec<f64>, hi: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

const KINDS: [&str; 6] = [
    "gaussian",
    "modulated_gaussian",
    "compact_bump",
    "random_band_limited",
    "sinusoid",
    "indicator",
];

impl FunctionSpec {
    /// Parses a JSON constructor, distinguishing unknown constructor names from
    /// malformed parameters.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| Error::Config("function spec needs a string `kind`".into()))?;
        if !KINDS.contains(&kind) {
            return Err(Error::UnsupportedConstructor(kind.to_string()));
        }
        Ok(serde_json::from_value(value.clone())?)
    }
}

fn padded(v: &[f64], dim: usize, what: &'static str) -> Result<Vec<f64>> {
    match v.len() {
        0 => Ok(vec![0.0; dim]),
        l if l == dim => Ok(v.to_vec()),
        1 => Ok(vec![v[0]; dim]),
        l => Err(Error::arg(
            what,
            format!("expected {dim} coordinates, found {l}"),
        )),
    }
}

fn dist2(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn overlap(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    (b.min(hi) - a.max(lo)).max(0.0)
}

/// Random spectrum with independent standard complex Gaussian coefficients at the
/// frequency nodes where `keep` holds; Nyquist nodes are always left empty so that
/// the support is symmetric.
pub fn random_spectrum_where(
    grid: Grid,
    fiber: usize,
    rng: &mut impl Rng,
    keep: impl Fn(&[f64]) -> bool,
) -> SampledSpectrum {
    let mut s = SampledSpectrum::zeros(grid, fiber);
    let half = grid.points() / 2;
    for idx in 0..grid.num_nodes() {
        let m = grid.unravel(idx);
        if m[..grid.dim()].contains(&half) {
            continue;
        }
        let xi = grid.freq_node(idx);
        if !keep(&xi[..grid.dim()]) {
            continue;
        }
        for c in 0..fiber {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            s.values[idx * fiber + c] = Complex64::new(re, im);
        }
    }
    s
}

/// Evaluates a constructor at the spatial nodes of `grid` with fiber dimension `fiber`.
pub fn sample(expr: &FunctionSpec, grid: Grid, fiber: usize) -> Result<SampledFunction> {
    if fiber == 0 {
        return Err(Error::arg("fiber", "fiber dimension must be positive"));
    }
    let dim = grid.dim();
    let real = |v: f64| Complex64::new(v, 0.0);
    let f = match expr {
        FunctionSpec::Gaussian { center, scale } => {
            let c = padded(center, dim, "center")?;
            let s2 = scale * scale;
            SampledFunction::from_fn(grid, fiber, |x, _| {
                real((-std::f64::consts::PI * dist2(x, &c) / s2).exp())
            })
        }
        FunctionSpec::ModulatedGaussian {
            center,
            scale,
            frequency,
        } => {
            let c = padded(center, dim, "center")?;
            let a = padded(frequency, dim, "frequency")?;
            let s2 = scale * scale;
            SampledFunction::from_fn(grid, fiber, |x, _| {
                let phase: f64 = x.iter().zip(&a).map(|(xi, ai)| xi * ai).sum();
                Complex64::from_polar(
                    (-std::f64::consts::PI * dist2(x, &c) / s2).exp(),
                    2.0 * std::f64::consts::PI * phase,
                )
            })
        }
        FunctionSpec::CompactBump { center, radius } => {
            let c = padded(center, dim, "center")?;
            if !(*radius > 0.0) {
                return Err(Error::arg("radius", "bump radius must be positive"));
            }
            SampledFunction::from_fn(grid, fiber, |x, _| {
                let t = dist2(x, &c) / (radius * radius);
                if t < 1.0 {
                    real((1.0 - 1.0 / (1.0 - t)).exp())
                } else {
                    real(0.0)
                }
            })
        }
        FunctionSpec::RandomBandLimited {
            band,
            min_abs,
            seed,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let (b, lo) = (*band, *min_abs);
            let s = random_spectrum_where(grid, fiber, &mut rng, |xi| {
                xi.iter().all(|&t| t.abs() <= b && t.abs() >= lo)
            });
            inverse_dft(&s)
        }
        FunctionSpec::Sinusoid { frequency, phase } => {
            let a = padded(frequency, dim, "frequency")?;
            SampledFunction::from_fn(grid, fiber, |x, _| {
                let t: f64 = x.iter().zip(&a).map(|(xi, ai)| xi * ai).sum();
                real((2.0 * std::f64::consts::PI * t + phase).sin())
            })
        }
        FunctionSpec::Indicator { lo, hi } => {
            let lo = padded(lo, dim, "lo")?;
            let hi = padded(hi, dim, "hi")?;
            let h = grid.spacing();
            SampledFunction::from_fn(grid, fiber, |x, _| {
                let frac: f64 = (0..dim)
                    .map(|a| overlap(x[a] - 0.5 * h, x[a] + 0.5 * h, lo[a], hi[a]) / h)
                    .product();
                real(frac)
            })
        }
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::forward_dft;

    #[test]
    fn gaussian_positive_symmetric() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let f = sample(
            &FunctionSpec::Gaussian {
                center: vec![],
                scale: 1.0,
            },
            g,
            1,
        )
        .unwrap();
        for j in 1..64 {
            let v = f.values()[j].re;
            assert!(v > 0.0);
            assert!((v - f.values()[64 - j].re).abs() < 1e-15);
        }
    }

    #[test]
    fn band_limited_spectrum_vanishes_outside_band() {
        let g = Grid::new(2, 32, 4.0).unwrap();
        let f = sample(
            &FunctionSpec::RandomBandLimited {
                band: 1.5,
                min_abs: 0.0,
                seed: 3,
            },
            g,
            2,
        )
        .unwrap();
        let s = forward_dft(&f);
        for idx in 0..g.num_nodes() {
            let xi = g.freq_node(idx);
            if xi[0].abs() > 1.5 || xi[1].abs() > 1.5 {
                assert!(s.at(idx).iter().all(|z| z.norm() <= 1e-12));
            }
        }
    }

    #[test]
    fn compact_bump_support() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let f = sample(
            &FunctionSpec::CompactBump {
                center: vec![],
                radius: 1.0,
            },
            g,
            1,
        )
        .unwrap();
        for j in 0..256 {
            if g.coord(j).abs() >= 1.0 {
                assert_eq!(f.values()[j].norm(), 0.0);
            }
        }
    }

    #[test]
    fn unknown_constructor_rejected() {
        let v = serde_json::json!({"kind": "sawtooth"});
        assert_eq!(
            FunctionSpec::from_json(&v),
            Err(Error::UnsupportedConstructor("sawtooth".into()))
        );
        let ok = serde_json::json!({"kind": "gaussian", "scale": 2.0});
        assert!(FunctionSpec::from_json(&ok).is_ok());
    }
}
