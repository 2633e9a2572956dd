//! Littlewood-Paley rectangle families, reconstruction and empirical unconditionality
//! constants.

mod families;
mod unconditional;

pub use families::{
    aniso_blocking_rect, aniso_blocking_rects, blocking_identity_scan, blocking_index_set,
    blocking_rects, dyadic_intervals, product_rects, BlockingIdentityScan, DyadicInterval,
    FamilyKind, FreqRect, FreqRectFamily, RectLabel,
};
pub use unconditional::{unconditionality_constants, SignSampling, UnconditionalityReport};

use crate::error::{Error, Result};
use crate::grid::{forward_dft, inverse_dft, SampledFunction, SampledSpectrum};

/// Relative spectral energy outside the union below which a function counts as
/// supported in the family.
pub const LEAK_TOLERANCE: f64 = 1e-20;

/// Energy of the spectrum outside the family's union, and the total energy.
pub fn spectral_leak(s: &SampledSpectrum, family: &FreqRectFamily) -> (f64, f64) {
    let mask = family.union_mask(s.grid());
    let d = s.fiber();
    let mut leaked = 0.0;
    let mut total = 0.0;
    for (i, z) in s.values().iter().enumerate() {
        let e = z.norm_sqr();
        total += e;
        if mask[i / d] == 0.0 {
            leaked += e;
        }
    }
    (leaked, total)
}

/// The cutoffs `Delta[E] f` of every member, in family order.
pub fn decompose(f: &SampledFunction, family: &FreqRectFamily) -> Vec<SampledFunction> {
    let s = forward_dft(f);
    (0..family.len())
        .map(|i| inverse_dft(&s.mask(&family.member_mask(f.grid(), i))))
        .collect()
}

/// `sum_E Delta[E] f`, rejecting inputs whose spectrum leaves the family's union.
pub fn reconstruct(f: &SampledFunction, family: &FreqRectFamily) -> Result<SampledFunction> {
    if family.n != f.grid().dim() {
        return Err(Error::DimensionMismatch {
            expected: f.grid().dim(),
            found: family.n,
        });
    }
    let (leaked, total) = spectral_leak(&forward_dft(f), family);
    if leaked > LEAK_TOLERANCE * total {
        return Err(Error::SpectralLeak { leaked, total });
    }
    let mut acc = SampledFunction::zeros(*f.grid(), f.fiber());
    for piece in decompose(f, family) {
        acc = acc.add(&piece);
    }
    Ok(acc)
}
