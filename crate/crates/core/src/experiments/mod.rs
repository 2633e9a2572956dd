//! Named experiments: JSON configs in, deterministic reports out.
//!
//! A config names an experiment, a seed and a `params` object. Each experiment has its
//! own parameter struct with defaults for every knob, so `{"experiment": "hilbert"}` is a
//! complete config. Unknown keys are rejected at both levels.

mod config;
mod decomposition;
mod foundations;
mod probes;
mod report;
mod sparse;
mod symbols;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub use config::{parse_config, parse_config_str, ExperimentConfig};
pub use report::{emit_report, Comparison, CriterionRow, Format, Report, CSV_HEADER};

pub use decomposition::{
    AnisoParams, BlockingParams, LpReconstructParams, LpUnconditionalityParams, LpUnweightedParams,
};
pub use foundations::{ApCharParams, ApDualityParams, DftCase, DftParams, HilbertParams};
pub use probes::{KurtzParams, MaxregParams};
pub use sparse::{SparseDominateParams, SparseWeightedParams};
pub use symbols::{MikhlinParams, PHoermanderParams, PartitionParams, VariationParams};

/// Results and per-criterion checks produced by one run.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub results: BTreeMap<String, f64>,
    pub criteria: Vec<CriterionRow>,
}

impl Outcome {
    pub fn record(&mut self, key: impl Into<String>, value: f64) {
        self.results.insert(key.into(), value);
    }

    pub fn check(&mut self, label: impl Into<String>, measured: f64, cmp: Comparison, threshold: f64) {
        self.criteria.push(CriterionRow::new(label, measured, cmp, threshold));
    }

    /// A yes/no criterion, recorded as 1 or 0 against 1.
    pub fn check_flag(&mut self, label: impl Into<String>, ok: bool) {
        self.check(label, if ok { 1.0 } else { 0.0 }, Comparison::Equal, 1.0);
    }
}

/// The seeded generator every experiment draws from.
pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn sub_seeds(rng: &mut ChaCha8Rng, count: usize) -> Vec<u64> {
    (0..count).map(|_| rng.random()).collect()
}

pub(crate) fn rel_spread(values: &[f64]) -> f64 {
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo - 1.0
}

/// A registered experiment.
pub struct Entry {
    pub name: &'static str,
    /// Acceptance criterion reproduced with the default parameters.
    pub criterion: u32,
    pub summary: &'static str,
    resolve: fn(&serde_json::Value) -> Result<serde_json::Value>,
    run: fn(&serde_json::Value, u64) -> Result<Outcome>,
}

fn resolve<P: Serialize + DeserializeOwned>(v: &serde_json::Value) -> Result<serde_json::Value> {
    let p: P = serde_json::from_value(v.clone())?;
    Ok(serde_json::to_value(p)?)
}

macro_rules! registry {
    ($( $name:literal, $crit:literal, $summary:literal => $params:ty, $run:path; )*) => {
        /// Every experiment, in acceptance order.
        pub static EXPERIMENTS: &[Entry] = &[
            $(Entry {
                name: $name,
                criterion: $crit,
                summary: $summary,
                resolve: resolve::<$params>,
                run: |v, seed| {
                    let p: $params = serde_json::from_value(v.clone())?;
                    $run(&p, seed)
                },
            },)*
        ];
    };
}

registry! {
    "dft-roundtrip", 1, "DFT round trip and Parseval on random samples" => DftParams, foundations::dft_roundtrip;
    "ap-duality", 2, "[w]_{A_p} against the dual characteristic [w'_p]_{A_p'}^{p-1}" => ApDualityParams, foundations::ap_duality;
    "ap-char", 3, "A_p characteristic against a random-interval brute force" => ApCharParams, foundations::ap_char;
    "hilbert", 4, "Hilbert quadrature against the multiplier, and its L^2 norm" => HilbertParams, foundations::hilbert;
    "lp-reconstruct", 5, "Blocking family reconstruction of band-limited functions" => LpReconstructParams, decomposition::lp_reconstruct;
    "blocking-identity", 6, "Blockings against unions of product rectangles" => BlockingParams, decomposition::blocking_identity;
    "lp-unweighted", 7, "Exhaustive random signs on L^2" => LpUnweightedParams, decomposition::lp_unweighted;
    "lp-unconditionality", 8, "Weighted U-plus/U-minus estimates under refinement" => LpUnconditionalityParams, decomposition::lp_unconditionality;
    "kurtz-iff", 9, "Half-line cutoff on power-weighted L^2" => KurtzParams, probes::kurtz_iff;
    "mikhlin-check", 10, "Mikhlin norms of sgn and of a resolvent symbol" => MikhlinParams, symbols::mikhlin_check;
    "rbdd-variation", 11, "Variation measure norms on dyadic intervals" => VariationParams, symbols::rbdd_variation;
    "partition-unity", 12, "Dyadic partition of unity and approximative kernels" => PartitionParams, symbols::partition_unity;
    "p-hoermander", 13, "Kernel sums of the Hilbert multiplier under refinement" => PHoermanderParams, symbols::p_hoermander;
    "sparse-dominate", 14, "Sparse families, sparse operators and Hilbert domination" => SparseDominateParams, sparse::sparse_dominate_run;
    "sparse-weighted", 15, "Two-weight sparse bound along a power ladder" => SparseWeightedParams, sparse::sparse_weighted;
    "maxreg", 16, "Resolvent symbol: Mikhlin norm and weighted boundedness" => MaxregParams, probes::maxreg;
    "aniso-homogeneity", 17, "Anisotropic distance homogeneity and isotropic coincidence" => AnisoParams, decomposition::aniso_homogeneity;
}

pub fn lookup(name: &str) -> Result<&'static Entry> {
    EXPERIMENTS.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = EXPERIMENTS.iter().map(|e| e.name).collect();
        Error::Config(format!("unknown experiment `{name}`; known: {}", names.join(", ")))
    })
}

/// Runs a validated config.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let entry = lookup(&config.experiment)?;
    let outcome = (entry.run)(&config.params, config.seed).map_err(|e| Error::Experiment {
        experiment: entry.name.to_string(),
        source: Box::new(e),
    })?;
    Ok(Report {
        experiment: entry.name.to_string(),
        criterion: entry.criterion,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        config: config.params.clone(),
        results: outcome.results,
        criteria: outcome.criteria,
    })
}

/// Runs an experiment with all parameters at their defaults.
pub fn run_default(name: &str, seed: u64) -> Result<Report> {
    run(&ExperimentConfig::new(name, seed, serde_json::json!({}))?)
}
