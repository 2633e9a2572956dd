//! Shifted dyadic grids, sparse families and operators, the grand maximal truncation,
//! stopping-time sparse domination and the two-weight sparse bound.

mod domination;
mod family;
mod grids;
mod weighted;

pub use domination::{
    sparse_dominate, DominationParams, DominationReport, DominationRow, GridFamily,
};
pub use family::{
    check_sparseness, grand_maximal_truncation, grid_box, node_indicator, node_ranges, node_set,
    sparse_operator, truncated_sup_per_cube, weak_lp_norm, GrandMaximal, SparseFamily,
    TruncationParams,
};
pub use grids::{
    best_cover, default_grids, shifted_dyadic_cubes, standard_dyadic_cubes, DyadicCube,
    DyadicGridSpec,
};
pub use weighted::{sparse_weighted_bound_check, CharacteristicSetup, SparseWeightedReport};
