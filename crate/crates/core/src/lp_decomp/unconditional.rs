use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{decompose, spectral_leak, FreqRectFamily, LEAK_TOLERANCE};
use crate::error::{Error, Result};
use crate::grid::{forward_dft, SampledFunction};
use crate::opnorm::weighted_lp_norm_with;
use crate::weights::Weight;

/// Largest active-member count for exhaustive sign enumeration.
pub const MAX_EXHAUSTIVE: usize = 12;
/// Smallest accepted Monte Carlo sample count.
pub const MIN_MONTE_CARLO: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SignSampling {
    /// All sign patterns when at most 12 members are active, else 1000 Monte Carlo draws.
    Auto {
        seed: u64,
    },
    Exhaustive,
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnconditionalityReport {
    /// `max_f (E |sum eps Delta f|^2)^{1/2} / |sum Delta f|`.
    pub c_plus_est: f64,
    /// `max_f |sum Delta f| / (E |sum eps Delta f|^2)^{1/2}`.
    pub c_minus_est: f64,
    /// `max_f max_eps |sum eps Delta f| / |sum Delta f|`.
    pub c_est: f64,
    pub sampling: String,
    pub patterns: usize,
    pub active_members: usize,
    pub test_functions: usize,
    /// Standard error of the Monte Carlo mean at the maximizing test function, relative
    /// to the reported `c_plus_est`; `None` for exhaustive enumeration.
    pub relative_standard_error: Option<f64>,
    pub is_lower_bound: bool,
}

fn patterns_for(active: usize, sampling: SignSampling) -> Result<(Vec<Vec<f64>>, String, bool)> {
    let exhaustive = |active: usize| -> Vec<Vec<f64>> {
        (0..1usize << active)
            .map(|bits| {
                (0..active)
                    .map(|j| if bits >> j & 1 == 1 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect()
    };
    let monte = |samples: usize, seed: u64| -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                (0..active)
                    .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect()
    };
    match sampling {
        SignSampling::Exhaustive => {
            if active > MAX_EXHAUSTIVE {
                return Err(Error::arg(
                    "signs",
                    format!("{active} active members exceed the exhaustive limit {MAX_EXHAUSTIVE}"),
                ));
            }
            Ok((
                exhaustive(active),
                format!("exhaustive over {} patterns", 1usize << active),
                false,
            ))
        }
        SignSampling::MonteCarlo { samples, seed } => {
            if samples < MIN_MONTE_CARLO {
                return Err(Error::arg(
                    "signs",
                    format!("Monte Carlo needs at least {MIN_MONTE_CARLO} samples, got {samples}"),
                ));
            }
            Ok((
                monte(samples, seed),
                format!("Monte Carlo, {samples} patterns, seed {seed}"),
                true,
            ))
        }
        SignSampling::Auto { seed } => {
            if active <= MAX_EXHAUSTIVE {
                patterns_for(active, SignSampling::Exhaustive)
            } else {
                patterns_for(
                    active,
                    SignSampling::MonteCarlo {
                        samples: 1000,
                        seed,
                    },
                )
            }
        }
    }
}

/// Empirical U-plus / U-minus constants of the family's cutoffs on `L^p_w`, with the
/// `L^2` average over signs taken exactly or by sampling. Members on which no test
/// function has spectrum are inactive and excluded from the patterns.
pub fn unconditionality_constants(
    family: &FreqRectFamily,
    p: f64,
    w: &Weight,
    test_fns: &[SampledFunction],
    signs: SignSampling,
) -> Result<UnconditionalityReport> {
    let Some(first) = test_fns.first() else {
        return Err(Error::Empty("no test functions".into()));
    };
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::arg(
            "p",
            format!("exponent {p} must lie in [1, inf)"),
        ));
    }
    let grid = *first.grid();
    let wv = w.node_values(&grid)?;
    let mut pieces_all = Vec::with_capacity(test_fns.len());
    let mut active_mask = vec![false; family.len()];
    for f in test_fns {
        if f.grid() != &grid {
            return Err(Error::arg(
                "test_fns",
                "test functions live on different grids",
            ));
        }
        let (leaked, total) = spectral_leak(&forward_dft(f), family);
        if leaked > LEAK_TOLERANCE * total {
            return Err(Error::SpectralLeak { leaked, total });
        }
        let pieces = decompose(f, family);
        let scale = f.max_norm().max(f64::MIN_POSITIVE);
        for (i, piece) in pieces.iter().enumerate() {
            if piece.max_norm() > 1e-12 * scale {
                active_mask[i] = true;
            }
        }
        pieces_all.push(pieces);
    }
    let active: Vec<usize> = (0..family.len()).filter(|&i| active_mask[i]).collect();
    let (patterns, sampling, random) = patterns_for(active.len(), signs)?;

    let mut c_plus: f64 = 0.0;
    let mut c_minus: f64 = 0.0;
    let mut c_max: f64 = 0.0;
    let mut rel_se = None;
    for pieces in &pieces_all {
        let base = {
            let mut acc = SampledFunction::zeros(grid, first.fiber());
            for &i in &active {
                acc = acc.add(&pieces[i]);
            }
            weighted_lp_norm_with(&acc, p, &wv)
        };
        if base == 0.0 {
            continue;
        }
        let sq: Vec<f64> = patterns
            .par_iter()
            .map(|eps| {
                let mut acc = SampledFunction::zeros(grid, first.fiber());
                {
                    let vals = acc.values_mut();
                    for (e, &i) in eps.iter().zip(&active) {
                        for (v, x) in vals.iter_mut().zip(pieces[i].values()) {
                            *v += x * *e;
                        }
                    }
                }
                weighted_lp_norm_with(&acc, p, &wv).powi(2)
            })
            .collect();
        let mean = sq.iter().sum::<f64>() / sq.len() as f64;
        let plus = mean.sqrt() / base;
        let minus = base / mean.sqrt();
        let worst = sq.iter().cloned().fold(0.0, f64::max).sqrt() / base;
        if plus > c_plus {
            c_plus = plus;
            if random {
                let var =
                    sq.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (sq.len() as f64 - 1.0);
                // delta method for the square root of the mean
                rel_se = Some((var / sq.len() as f64).sqrt() / (2.0 * mean));
            }
        }
        c_minus = c_minus.max(minus);
        c_max = c_max.max(worst);
    }
    Ok(UnconditionalityReport {
        c_plus_est: c_plus,
        c_minus_est: c_minus,
        c_est: c_max,
        sampling,
        patterns: patterns.len(),
        active_members: active.len(),
        test_functions: test_fns.len(),
        relative_standard_error: rel_se,
        is_lower_bound: true,
    })
}
