use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linalg::{eigenvalues, CMat};
use crate::multiplier::{MatrixSymbol, Resolvent};

/// `m(xi) = i xi (i xi - A)^{-1}` with the closure `m'(xi) = -i A (i xi - A)^{-2}`.
/// The spectrum of `A` must lie in the open right half-plane.
pub fn maxreg_symbol(a: &CMat, grid: Grid) -> Result<MatrixSymbol> {
    if !a.is_square() {
        return Err(Error::arg("A", "matrix must be square"));
    }
    if grid.dim() != 1 {
        return Err(Error::arg("grid", "the resolvent symbol lives on the line"));
    }
    let ev = eigenvalues(a);
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if let Some(z) = ev.iter().find(|z| !(z.re > 1e-12 * scale)) {
        return Err(Error::SpectrumViolation(format!(
            "A has eigenvalue {z} outside the open right half-plane"
        )));
    }
    MatrixSymbol::from_fn(grid, Resolvent { a: a.clone() })
}
