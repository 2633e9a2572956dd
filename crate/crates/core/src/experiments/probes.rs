use serde::{Deserialize, Serialize};

use super::symbols::real_matrix;
use super::{Comparison, Outcome};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::c;
use crate::multiplier::{Indicator, MatrixSymbol, MultiplierOperator};
use crate::opnorm::{divergence_probe, Budget, Strategy, Verdict};
use crate::symbols::{maxreg_symbol, mikhlin_norm_1d, LogLadder};
use crate::weights::Weight;

fn ladder(points: &[usize], length: f64) -> Result<Vec<Grid>> {
    points.iter().map(|&n| Grid::new(1, n, length)).collect()
}

fn verdict_code(v: Verdict) -> f64 {
    match v {
        Verdict::Bounded => 1.0,
        Verdict::Indeterminate => 0.0,
        Verdict::Diverging => -1.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KurtzParams {
    pub ladder: Vec<usize>,
    pub length: f64,
    pub bounded_exponent: f64,
    pub diverging_exponent: f64,
    pub budget: Budget,
}

impl Default for KurtzParams {
    fn default() -> Self {
        KurtzParams {
            ladder: vec![32, 64, 128, 256],
            length: 8.0,
            bounded_exponent: 0.5,
            diverging_exponent: 1.5,
            budget: Budget::default(),
        }
    }
}

/// Verdicts are recorded as 1 (BOUNDED), 0 (INDETERMINATE), -1 (DIVERGING).
pub(crate) fn kurtz_iff(p: &KurtzParams, _seed: u64) -> Result<Outcome> {
    let grids = ladder(&p.ladder, p.length)?;
    let mut out = Outcome::default();
    for (a, want) in [(p.bounded_exponent, Verdict::Bounded), (p.diverging_exponent, Verdict::Diverging)] {
        let rep = divergence_probe(
            |g| Ok(MultiplierOperator::new(MatrixSymbol::from_fn(g, Indicator::half_line(1, 1, 0))?)),
            2.0,
            &Weight::power(a),
            &grids,
            Strategy::PowerIteration,
            p.budget,
        )?;
        for (n, v) in rep.points.iter().zip(&rep.values) {
            out.record(format!("norm a={a} N={n}"), *v);
        }
        for (i, r) in rep.ratios.iter().enumerate() {
            out.record(format!("ratio a={a} step {}", i + 1), *r);
        }
        out.check(format!("verdict a={a}"), verdict_code(rep.verdict), Comparison::Equal, verdict_code(want));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaxregParams {
    pub matrix: Vec<Vec<f64>>,
    pub ladder: Vec<usize>,
    pub length: f64,
    pub weight: Weight,
    pub budget: Budget,
}

impl Default for MaxregParams {
    fn default() -> Self {
        MaxregParams {
            matrix: vec![vec![1.0, 0.0], vec![0.0, 2.0]],
            ladder: vec![32, 64, 128, 256],
            length: 8.0,
            weight: Weight::power(0.5),
            budget: Budget::default(),
        }
    }
}

const MAXREG_MIKHLIN_TOL: f64 = 1e-3;

pub(crate) fn maxreg(p: &MaxregParams, _seed: u64) -> Result<Outcome> {
    let a = real_matrix(&p.matrix)?;
    let mut out = Outcome::default();
    let g0 = Grid::new(1, 64, 1.0)?;
    let mk = mikhlin_norm_1d(&maxreg_symbol(&a, g0)?, &LogLadder::default())?;
    out.record("mikhlin norm", mk.value);
    out.check("|mikhlin norm - 1|", (mk.value - 1.0).abs(), Comparison::AtMost, MAXREG_MIKHLIN_TOL);

    let grids = ladder(&p.ladder, p.length)?;
    let rep = divergence_probe(
        |g| Ok(MultiplierOperator::new(maxreg_symbol(&a, g)?)),
        2.0,
        &p.weight,
        &grids,
        Strategy::PowerIteration,
        p.budget,
    )?;
    for (n, v) in rep.points.iter().zip(&rep.values) {
        out.record(format!("norm N={n}"), *v);
    }
    out.check("verdict", verdict_code(rep.verdict), Comparison::Equal, verdict_code(Verdict::Bounded));

    // a rotation generator has eigenvalues +-i on the imaginary axis
    let rot = crate::linalg::from_rows(&[vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])?;
    let rejected = matches!(maxreg_symbol(&rot, g0), Err(Error::SpectrumViolation(_)));
    out.check_flag("imaginary-axis spectrum rejected", rejected);
    Ok(out)
}
