use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Derivative, Indicator, MatrixSymbol, Modulation, Sgn};
use crate::error::{Error, Result};
use crate::grid::{AxisBox, Grid};
use crate::linalg::{from_rows, CMat};

/// A complex number in JSON: either a bare real or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexJson {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexJson {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexJson::Real(r) => Complex64::new(r, 0.0),
            ComplexJson::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

fn one_d() -> usize {
    1
}

fn unit() -> ComplexJson {
    ComplexJson::Real(1.0)
}

/// JSON description of a symbol. Box bounds given as `null` are infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Identity {
        #[serde(default = "one_d")]
        d: usize,
    },
    Zero {
        #[serde(default = "one_d")]
        d: usize,
    },
    Sgn {
        #[serde(default = "one_d")]
        d: usize,
        #[serde(default)]
        axis: usize,
        #[serde(default = "unit")]
        scale: ComplexJson,
    },
    /// `-pi i sgn(xi)`.
    Hilbert {
        #[serde(default = "one_d")]
        d: usize,
    },
    /// `1_{[0, inf)}(xi_axis)`.
    HalfLine {
        #[serde(default = "one_d")]
        d: usize,
        #[serde(default)]
        axis: usize,
    },
    Indicator {
        #[serde(default = "one_d")]
        d: usize,
        lo: Vec<Option<f64>>,
        hi: Vec<Option<f64>>,
    },
    Resolvent {
        #[serde(rename = "A")]
        a: Vec<Vec<ComplexJson>>,
    },
    Modulation {
        #[serde(default = "one_d")]
        d: usize,
        shift: Vec<f64>,
    },
    Derivative {
        #[serde(default)]
        axis: usize,
    },
    /// Node values in the grid's storage order, row-major per node.
    Tabulated {
        d_out: usize,
        d_in: usize,
        values: Vec<ComplexJson>,
    },
}

pub(crate) fn matrix_from_json(rows: &[Vec<ComplexJson>]) -> Result<CMat> {
    let r: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|row| row.iter().map(|z| z.value()).collect())
        .collect();
    from_rows(&r)
}

impl SymbolSpec {
    pub fn build(&self, grid: Grid) -> Result<MatrixSymbol> {
        let dim = grid.dim();
        let check_axis = |axis: usize| {
            if axis >= dim {
                Err(Error::arg(
                    "axis",
                    format!("axis {axis} out of range for dimension {dim}"),
                ))
            } else {
                Ok(())
            }
        };
        match self {
            SymbolSpec::Identity { d } => Ok(MatrixSymbol::identity(grid, *d)),
            SymbolSpec::Zero { d } => Ok(MatrixSymbol::zero(grid, *d)),
            SymbolSpec::Sgn { d, axis, scale } => {
                check_axis(*axis)?;
                MatrixSymbol::from_fn(
                    grid,
                    Sgn {
                        d: *d,
                        axis: *axis,
                        scale: scale.value(),
                    },
                )
            }
            SymbolSpec::Hilbert { d } => {
                if dim != 1 {
                    return Err(Error::arg(
                        "symbol",
                        "the Hilbert multiplier is one-dimensional",
                    ));
                }
                MatrixSymbol::from_fn(grid, Sgn::hilbert(*d))
            }
            SymbolSpec::HalfLine { d, axis } => {
                check_axis(*axis)?;
                MatrixSymbol::from_fn(grid, Indicator::half_line(*d, dim, *axis))
            }
            SymbolSpec::Indicator { d, lo, hi } => {
                if lo.len() != dim || hi.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: lo.len().min(hi.len()),
                    });
                }
                let bounds = AxisBox {
                    lo: lo.iter().map(|v| v.unwrap_or(f64::NEG_INFINITY)).collect(),
                    hi: hi.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect(),
                };
                MatrixSymbol::from_fn(grid, Indicator { d: *d, bounds })
            }
            SymbolSpec::Resolvent { a } => {
                if dim != 1 {
                    return Err(Error::arg(
                        "symbol",
                        "the resolvent symbol is one-dimensional",
                    ));
                }
                crate::symbols::maxreg_symbol(&matrix_from_json(a)?, grid)
            }
            SymbolSpec::Modulation { d, shift } => {
                if shift.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: shift.len(),
                    });
                }
                MatrixSymbol::from_fn(
                    grid,
                    Modulation {
                        d: *d,
                        shift: shift.clone(),
                    },
                )
            }
            SymbolSpec::Derivative { axis } => {
                check_axis(*axis)?;
                MatrixSymbol::from_fn(grid, Derivative { axis: *axis })
            }
            SymbolSpec::Tabulated {
                d_out,
                d_in,
                values,
            } => MatrixSymbol::tabulated(
                grid,
                *d_out,
                *d_in,
                values.iter().map(|z| z.value()).collect(),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        let s: SymbolSpec = serde_json::from_str(r#"{"kind":"sgn"}"#).unwrap();
        assert_eq!(
            s,
            SymbolSpec::Sgn {
                d: 1,
                axis: 0,
                scale: ComplexJson::Real(1.0)
            }
        );
        let r: SymbolSpec =
            serde_json::from_str(r#"{"kind":"resolvent","A":[[1,0],[0,[2,0.5]]]}"#).unwrap();
        let m = match r {
            SymbolSpec::Resolvent { a } => matrix_from_json(&a).unwrap(),
            _ => unreachable!(),
        };
        assert_eq!(m[(1, 1)], Complex64::new(2.0, 0.5));
        let i: SymbolSpec =
            serde_json::from_str(r#"{"kind":"indicator","lo":[0.5],"hi":[null]}"#).unwrap();
        let g = Grid::new(1, 16, 4.0).unwrap();
        let sym = i.build(g).unwrap();
        assert_eq!(
            sym.at(g.storage_index(2).unwrap())[(0, 0)],
            Complex64::new(1.0, 0.0)
        );
        assert_eq!(
            sym.at(g.storage_index(1).unwrap())[(0, 0)],
            Complex64::new(0.0, 0.0)
        );
        assert!(serde_json::from_str::<SymbolSpec>(r#"{"kind":"sgn","axes":1}"#).is_err());
    }
}
