//! Symbol calculus: R-bounds, Mikhlin and Hörmander conditions, the dyadic partition of
//! unity with its approximative kernels, and the maximal-regularity symbol.

mod hoermander;
mod kernels;
mod maxreg;
mod mikhlin;
mod rbound;
mod variation;

pub use hoermander::{
    hoermander_condition, hoermander_condition_fn, multi_indices_up_to, AnnulusQuadrature,
    HoermanderEntry, HoermanderMode, HoermanderReport,
};
pub use kernels::{
    approx_kernel, check_p_hoermander, smooth_step, KernelTable, PHoermanderEntry,
    PHoermanderReport, PartitionOfUnity,
};
pub use maxreg::maxreg_symbol;
pub use mikhlin::{
    aniso_dilate, aniso_distance, binary_multi_indices, derivative_at, mikhlin_norm_1d,
    mikhlin_norm_aniso, mikhlin_norm_rect, mikhlin_over_family, rect_samples, AlphaEntry,
    DerivativeSource, LogLadder, MikhlinReport, MikhlinWeight, RectEntry, FD_STEP,
    MIN_POINTS_PER_DECADE,
};
pub use rbound::{r_bound, OperatorFamily};
pub use variation::{rbdd_variation_1d, VariationReport};
