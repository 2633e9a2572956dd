use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::norms::weighted_lp_norm_with;
use crate::error::{Error, Result};
use crate::grid::{inverse_dft, random_spectrum_where, Grid, SampledFunction};
use crate::multiplier::{apply_multiplier, MatrixSymbol, MultiplierOperator};
use crate::weights::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Power iteration at `p = 2`, random ascent otherwise.
    #[default]
    Auto,
    PowerIteration,
    RandomAscent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budget {
    pub iterations: usize,
    pub restarts: usize,
    /// Stop once the relative residual (power iteration) or the relative gain of a step
    /// (ascent) falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            iterations: 400,
            restarts: 3,
            tolerance: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormEstimate {
    /// `|T f|_{L^p_omega} / |f|_{L^p_sigma}` at the witness.
    pub value: f64,
    pub strategy: Strategy,
    pub iterations: usize,
    pub certified_lower_bound: bool,
    /// `|B^* B v - lambda v| / lambda` for power iteration.
    pub residual: Option<f64>,
    /// Set when the budget ran out before the stopping tolerance was met.
    pub budget_exhausted: bool,
    #[serde(skip)]
    pub witness: Option<SampledFunction>,
}

/// Node-wise conjugate transpose: the Hilbert adjoint for the plain discrete `L^2` pairing.
pub fn hermitian_symbol(m: &MatrixSymbol) -> MatrixSymbol {
    let g = *m.grid();
    let (d_out, d_in) = (m.d_out(), m.d_in());
    let mut values = Vec::with_capacity(g.num_nodes() * d_out * d_in);
    for idx in 0..g.num_nodes() {
        let v = m.node_values(idx);
        for j in 0..d_in {
            for i in 0..d_out {
                values.push(v[i * d_in + j].conj());
            }
        }
    }
    MatrixSymbol::tabulated(g, d_in, d_out, values)
        .expect("conjugate transpose of a finite symbol is finite")
}

struct Weighted<'a> {
    t: &'a MatrixSymbol,
    t_star: MatrixSymbol,
    sigma: Vec<f64>,
    omega: Vec<f64>,
}

impl Weighted<'_> {
    fn scale(f: &SampledFunction, w: &[f64], pow: f64) -> SampledFunction {
        let d = f.fiber();
        let mut out = f.clone();
        for (i, v) in out.values_mut().iter_mut().enumerate() {
            *v *= w[i / d].powf(pow);
        }
        out
    }

    fn ratio(&self, f: &SampledFunction, p: f64) -> Result<f64> {
        let tf = apply_multiplier(self.t, f)?;
        let den = weighted_lp_norm_with(f, p, &self.sigma);
        Ok(if den == 0.0 {
            0.0
        } else {
            weighted_lp_norm_with(&tf, p, &self.omega) / den
        })
    }
}

fn random_start(grid: Grid, fiber: usize, seed: u64) -> SampledFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    inverse_dft(&random_spectrum_where(grid, fiber, &mut rng, |_| true))
}

struct Run {
    value: f64,
    iterations: usize,
    residual: Option<f64>,
    exhausted: bool,
    witness: SampledFunction,
}

fn power_run(w: &Weighted, start: SampledFunction, budget: &Budget) -> Result<Run> {
    // B g = omega^{1/2} T (sigma^{-1/2} g), B^* g = sigma^{-1/2} T^* (omega^{1/2} g)
    let b = |g: &SampledFunction| -> Result<SampledFunction> {
        let f = Weighted::scale(g, &w.sigma, -0.5);
        Ok(Weighted::scale(&apply_multiplier(w.t, &f)?, &w.omega, 0.5))
    };
    let b_star = |g: &SampledFunction| -> Result<SampledFunction> {
        let f = Weighted::scale(g, &w.omega, 0.5);
        Ok(Weighted::scale(
            &apply_multiplier(&w.t_star, &f)?,
            &w.sigma,
            -0.5,
        ))
    };
    let mut v = start;
    let n0 = v.l2_norm();
    if n0 == 0.0 {
        return Err(Error::arg("start", "zero start vector"));
    }
    v = v.scale(Complex64::new(1.0 / n0, 0.0));
    let mut residual = f64::INFINITY;
    let mut it = 0;
    while it < budget.iterations {
        it += 1;
        let bbv = b_star(&b(&v)?)?;
        // unit v: Rayleigh quotient <B^*B v, v> = |Bv|^2
        let lambda = bbv.inner(&v).re;
        if lambda <= 0.0 {
            break;
        }
        residual = bbv.sub(&v.scale(Complex64::new(lambda, 0.0))).l2_norm() / lambda;
        let nb = bbv.l2_norm();
        v = bbv.scale(Complex64::new(1.0 / nb, 0.0));
        if residual < budget.tolerance {
            break;
        }
    }
    let witness = Weighted::scale(&v, &w.sigma, -0.5);
    Ok(Run {
        value: w.ratio(&witness, 2.0)?,
        iterations: it,
        residual: Some(residual),
        exhausted: !(residual < budget.tolerance),
        witness,
    })
}

fn ascent_run(w: &Weighted, p: f64, start: SampledFunction, budget: &Budget) -> Result<Run> {
    let d = start.fiber();
    let grad = |f: &SampledFunction| -> Result<SampledFunction> {
        // T^*(omega |Tf|^{p-2} Tf)/|Tf|^p - sigma |f|^{p-2} f / |f|^p
        let tf = apply_multiplier(w.t, f)?;
        let nt = weighted_lp_norm_with(&tf, p, &w.omega).powf(p);
        let nf = weighted_lp_norm_with(f, p, &w.sigma).powf(p);
        let pw = |g: &SampledFunction, wt: &[f64], norm: f64| -> SampledFunction {
            let norms = g.pointwise_norms();
            let mut out = g.clone();
            for (i, v) in out.values_mut().iter_mut().enumerate() {
                let r = norms[i / d];
                let e = if r > 0.0 { r.powf(p - 2.0) } else { 0.0 };
                *v *= wt[i / d] * e / norm;
            }
            out
        };
        let a = apply_multiplier(&w.t_star, &pw(&tf, &w.omega, nt))?;
        Ok(a.sub(&pw(f, &w.sigma, nf)))
    };
    let mut f = start;
    let mut best = w.ratio(&f, p)?;
    let mut step = 0.5;
    let mut it = 0;
    let mut converged = false;
    while it < budget.iterations {
        it += 1;
        let g = grad(&f)?;
        let gn = g.l2_norm();
        if gn == 0.0 {
            converged = true;
            break;
        }
        let fn_ = f.l2_norm();
        let mut accepted = false;
        for _ in 0..30 {
            let cand = f.combine(
                Complex64::new(1.0, 0.0),
                &g,
                Complex64::new(step * fn_ / gn, 0.0),
            );
            let r = w.ratio(&cand, p)?;
            if r > best {
                let gain = (r - best) / best;
                f = cand;
                best = r;
                accepted = true;
                step = (step * 1.5).min(2.0);
                if gain < budget.tolerance {
                    converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted || converged {
            converged = true;
            break;
        }
    }
    Ok(Run {
        value: best,
        iterations: it,
        residual: None,
        exhausted: !converged,
        witness: f,
    })
}

/// Lower bound for `|T|_{L^p_sigma -> L^p_omega}` with a witness attaining it.
pub fn operator_norm_estimate(
    t: &MultiplierOperator,
    p: f64,
    sigma: &Weight,
    omega: &Weight,
    strategy: Strategy,
    budget: Budget,
) -> Result<NormEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::arg(
            "p",
            format!("exponent {p} must lie in (1, inf)"),
        ));
    }
    let grid = *t.grid();
    let strategy = match strategy {
        Strategy::Auto if p == 2.0 => Strategy::PowerIteration,
        Strategy::Auto => Strategy::RandomAscent,
        s => s,
    };
    if strategy == Strategy::PowerIteration && p != 2.0 {
        return Err(Error::arg("strategy", "power iteration needs p = 2"));
    }
    let w = Weighted {
        t: &t.symbol,
        t_star: hermitian_symbol(&t.symbol),
        sigma: sigma.node_values(&grid)?,
        omega: omega.node_values(&grid)?,
    };
    if w.sigma.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
        return Err(Error::arg(
            "sigma",
            "node weights must be positive and finite",
        ));
    }
    let d = t.symbol.d_in();
    let restarts = budget.restarts.max(1);
    let runs: Vec<Result<Run>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let start = random_start(grid, d, budget.seed.wrapping_add(r as u64));
            match strategy {
                Strategy::PowerIteration => power_run(&w, start, &budget),
                _ => ascent_run(&w, p, start, &budget),
            }
        })
        .collect();
    let mut best: Option<Run> = None;
    for r in runs {
        let r = r?;
        if best.as_ref().map_or(true, |b| r.value > b.value) {
            best = Some(r);
        }
    }
    let best = best.expect("at least one restart");
    Ok(NormEstimate {
        value: best.value,
        strategy,
        iterations: best.iterations,
        certified_lower_bound: true,
        residual: best.residual,
        budget_exhausted: best.exhausted,
        witness: Some(best.witness),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Bounded,
    Diverging,
    Indeterminate,
}

/// Per-step growth at or below this is bounded.
pub const BOUNDED_RATIO: f64 = 1.1;
/// Per-step growth at or above this, at every step, is divergent.
pub const DIVERGING_RATIO: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub points: Vec<usize>,
    pub values: Vec<f64>,
    pub ratios: Vec<f64>,
    pub verdict: Verdict,
}

pub fn classify(ratios: &[f64]) -> Verdict {
    if ratios.iter().all(|r| *r <= BOUNDED_RATIO) {
        Verdict::Bounded
    } else if ratios.iter().all(|r| *r >= DIVERGING_RATIO) {
        Verdict::Diverging
    } else {
        Verdict::Indeterminate
    }
}

/// Rebuilds `T` on every grid of the ladder, estimates `|T|_{L^p_omega}` (one weight)
/// and classifies the growth between consecutive grids.
pub fn divergence_probe(
    build: impl Fn(Grid) -> Result<MultiplierOperator>,
    p: f64,
    omega: &Weight,
    ladder: &[Grid],
    strategy: Strategy,
    budget: Budget,
) -> Result<ProbeReport> {
    if ladder.len() < 2 {
        return Err(Error::arg("ladder", "need at least two grids"));
    }
    let mut values = Vec::with_capacity(ladder.len());
    for g in ladder {
        let t = build(*g)?;
        values.push(operator_norm_estimate(&t, p, omega, omega, strategy, budget)?.value);
    }
    let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(ProbeReport {
        points: ladder.iter().map(|g| g.points()).collect(),
        verdict: classify(&ratios),
        values,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::Sgn;

    #[test]
    fn hilbert_norm_is_pi() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let t = MultiplierOperator::new(MatrixSymbol::from_fn(g, Sgn::hilbert(1)).unwrap());
        let one = Weight::constant(1.0);
        let est =
            operator_norm_estimate(&t, 2.0, &one, &one, Strategy::Auto, Budget::default()).unwrap();
        assert!((est.value - std::f64::consts::PI).abs() < 1e-8);
        assert_eq!(est.strategy, Strategy::PowerIteration);
    }

    #[test]
    fn identity_is_one_for_any_p() {
        let g = Grid::new(1, 128, 8.0).unwrap();
        let t = MultiplierOperator::new(MatrixSymbol::identity(g, 1));
        let w = Weight::power(0.5);
        for p in [1.5, 2.0, 3.0] {
            let est =
                operator_norm_estimate(&t, p, &w, &w, Strategy::Auto, Budget::default()).unwrap();
            assert!((est.value - 1.0).abs() < 1e-8, "{p}: {}", est.value);
        }
    }

    #[test]
    fn witness_reproduces_value() {
        let g = Grid::new(1, 128, 8.0).unwrap();
        let t = MultiplierOperator::new(MatrixSymbol::from_fn(g, Sgn::hilbert(1)).unwrap());
        let w = Weight::power(0.5);
        let est = operator_norm_estimate(
            &t,
            3.0,
            &w,
            &w,
            Strategy::Auto,
            Budget {
                iterations: 30,
                ..Default::default()
            },
        )
        .unwrap();
        let f = est.witness.as_ref().unwrap();
        let tf = t.apply(f).unwrap();
        let direct = crate::opnorm::weighted_lp_norm(&tf, 3.0, &w).unwrap()
            / crate::opnorm::weighted_lp_norm(f, 3.0, &w).unwrap();
        assert!((direct - est.value).abs() <= 1e-10 * est.value);
        assert!(est.value >= std::f64::consts::PI * 0.99);
    }

    #[test]
    fn classify_bands() {
        assert_eq!(classify(&[1.0, 1.05]), Verdict::Bounded);
        assert_eq!(classify(&[1.25, 1.3]), Verdict::Diverging);
        assert_eq!(classify(&[1.25, 1.15]), Verdict::Indeterminate);
    }
}
