//! Weighted and mixed norms, operator-norm estimation between weighted spaces, and the
//! refinement divergence probe.

mod estimate;
mod norms;

pub use estimate::{
    classify, divergence_probe, hermitian_symbol, operator_norm_estimate, Budget, NormEstimate,
    ProbeReport, Strategy, Verdict, BOUNDED_RATIO, DIVERGING_RATIO,
};
pub use norms::{mixed_norm, weighted_lp_norm, weighted_lp_norm_with, MixedNormSpec};
