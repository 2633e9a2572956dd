//! Numerical laboratory for weighted, operator-valued Fourier multipliers with
//! finite-dimensional matrix fibers.
//!
//! Everything lives on a periodic grid over `[-L/2, L/2)^n` (see [`grid`]); the Fourier
//! convention is `F f(xi) = \int f(x) exp(-2 pi i x . xi) dx`. Weight characteristics,
//! symbol norms and operator norms are computed over finite candidate sets and are
//! therefore lower bounds of the corresponding suprema.

pub mod error;
pub mod experiments;
pub mod grid;
pub mod linalg;
pub mod lp_decomp;
pub mod multiplier;
pub mod opnorm;
pub mod sparse;
pub mod symbols;
pub mod weights;

pub use error::{Error, Result};
