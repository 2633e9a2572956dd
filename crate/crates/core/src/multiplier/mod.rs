//! Fourier multipliers with matrix-valued symbols, frequency cutoffs, the Hilbert
//! transform and adjoint symbols.

mod builtin;
mod hilbert;
mod spec;

pub use builtin::{
    Adjoint, Constant, Derivative, Dilated, FromFn, Indicator, Modulation, Product, Resolvent, Sgn,
    SharedSymbol, SymbolFunction,
};
pub use hilbert::{hilbert_transform_quadrature, HilbertKernel};
pub use spec::{ComplexJson, SymbolSpec};

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{
    forward_dft, inverse_dft, AxisBox, Grid, Interval, SampledFunction, SampledSpectrum,
};
use crate::linalg::CMat;

/// A `d_out x d_in` matrix per frequency node (row-major per node), optionally backed by
/// an analytic closure that also serves off-grid evaluation and derivatives.
#[derive(Debug, Clone)]
pub struct MatrixSymbol {
    grid: Grid,
    d_out: usize,
    d_in: usize,
    values: Vec<Complex64>,
    analytic: Option<SharedSymbol>,
}

impl MatrixSymbol {
    /// Tabulates `f` at every frequency node.
    pub fn from_function(grid: Grid, f: SharedSymbol) -> Result<Self> {
        let (d_out, d_in) = (f.d_out(), f.d_in());
        let mut values = Vec::with_capacity(grid.num_nodes() * d_out * d_in);
        for idx in 0..grid.num_nodes() {
            let xi = grid.freq_node(idx);
            let m = f.value(&xi[..grid.dim()]);
            if m.shape() != (d_out, d_in) {
                return Err(Error::DimensionMismatch {
                    expected: d_out * d_in,
                    found: m.len(),
                });
            }
            for i in 0..d_out {
                for j in 0..d_in {
                    values.push(m[(i, j)]);
                }
            }
        }
        let s = MatrixSymbol {
            grid,
            d_out,
            d_in,
            values,
            analytic: Some(f),
        };
        s.check_finite()?;
        Ok(s)
    }

    pub fn from_fn(grid: Grid, f: impl SymbolFunction + 'static) -> Result<Self> {
        MatrixSymbol::from_function(grid, Arc::new(f))
    }

    /// Node values without an analytic closure.
    pub fn tabulated(
        grid: Grid,
        d_out: usize,
        d_in: usize,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if d_out == 0 || d_in == 0 {
            return Err(Error::arg("symbol", "fiber dimensions must be positive"));
        }
        if values.len() != grid.num_nodes() * d_out * d_in {
            return Err(Error::DimensionMismatch {
                expected: grid.num_nodes() * d_out * d_in,
                found: values.len(),
            });
        }
        let s = MatrixSymbol {
            grid,
            d_out,
            d_in,
            values,
            analytic: None,
        };
        s.check_finite()?;
        Ok(s)
    }

    fn check_finite(&self) -> Result<()> {
        if let Some(k) = self
            .values
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            let idx = k / (self.d_out * self.d_in);
            return Err(Error::SpectrumViolation(format!(
                "symbol is not finite at frequency {:?}",
                &self.grid.freq_node(idx)[..self.grid.dim()]
            )));
        }
        Ok(())
    }

    pub fn identity(grid: Grid, d: usize) -> Self {
        MatrixSymbol::from_fn(
            grid,
            Constant {
                d,
                z: Complex64::new(1.0, 0.0),
            },
        )
        .expect("identity is finite")
    }

    pub fn zero(grid: Grid, d: usize) -> Self {
        MatrixSymbol::from_fn(
            grid,
            Constant {
                d,
                z: Complex64::new(0.0, 0.0),
            },
        )
        .expect("zero is finite")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn analytic(&self) -> Option<&SharedSymbol> {
        self.analytic.as_ref()
    }

    pub fn node_values(&self, idx: usize) -> &[Complex64] {
        let s = self.d_out * self.d_in;
        &self.values[idx * s..(idx + 1) * s]
    }

    /// The matrix at frequency node `idx`.
    pub fn at(&self, idx: usize) -> CMat {
        CMat::from_row_slice(self.d_out, self.d_in, self.node_values(idx))
    }

    /// Evaluation away from the nodes through the analytic closure.
    pub fn eval(&self, xi: &[f64]) -> Result<CMat> {
        self.analytic
            .as_ref()
            .map(|f| f.value(xi))
            .ok_or(Error::NotEvaluable)
    }

    pub fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        self.analytic.as_ref().and_then(|f| f.derivative(xi, alpha))
    }

    /// The same symbol tabulated on another grid (requires an analytic closure).
    pub fn on_grid(&self, grid: Grid) -> Result<Self> {
        match &self.analytic {
            Some(f) => MatrixSymbol::from_function(grid, f.clone()),
            None => Err(Error::NotEvaluable),
        }
    }

    /// Largest spectral norm over the nodes.
    pub fn max_node_norm(&self) -> f64 {
        (0..self.grid.num_nodes())
            .map(|i| crate::linalg::op_norm(&self.at(i)))
            .fold(0.0, f64::max)
    }

    /// Pointwise matrix product `self(xi) other(xi)`.
    pub fn compose(&self, other: &MatrixSymbol) -> Result<MatrixSymbol> {
        if self.grid != other.grid || self.d_in != other.d_out {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                found: other.d_out,
            });
        }
        let mut values = Vec::with_capacity(self.grid.num_nodes() * self.d_out * other.d_in);
        for idx in 0..self.grid.num_nodes() {
            let m = self.at(idx) * other.at(idx);
            for i in 0..self.d_out {
                for j in 0..other.d_in {
                    values.push(m[(i, j)]);
                }
            }
        }
        let analytic = match (&self.analytic, &other.analytic) {
            (Some(a), Some(b)) => Some(Arc::new(Product {
                left: a.clone(),
                right: b.clone(),
            }) as SharedSymbol),
            _ => None,
        };
        Ok(MatrixSymbol {
            grid: self.grid,
            d_out: self.d_out,
            d_in: other.d_in,
            values,
            analytic,
        })
    }

    /// Multiplies a spectrum node by node.
    pub fn apply_spectrum(&self, s: &SampledSpectrum) -> Result<SampledSpectrum> {
        if s.grid() != &self.grid {
            return Err(Error::arg(
                "grid",
                "symbol and function live on different grids",
            ));
        }
        if s.fiber() != self.d_in {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                found: s.fiber(),
            });
        }
        let (d_out, d_in) = (self.d_out, self.d_in);
        let mut out = SampledSpectrum::zeros(self.grid, d_out);
        for idx in 0..self.grid.num_nodes() {
            let m = self.node_values(idx);
            let v = s.at(idx);
            let o = out.at_mut(idx);
            for i in 0..d_out {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..d_in {
                    acc += m[i * d_in + j] * v[j];
                }
                o[i] = acc;
            }
        }
        Ok(out)
    }
}

/// `T_m f = F^{-1}(m F f)`.
pub fn apply_multiplier(m: &MatrixSymbol, f: &SampledFunction) -> Result<SampledFunction> {
    let s = m.apply_spectrum(&forward_dft(f))?;
    Ok(inverse_dft(&s))
}

/// The operator `T_m` as a value.
#[derive(Debug, Clone)]
pub struct MultiplierOperator {
    pub symbol: MatrixSymbol,
}

impl MultiplierOperator {
    pub fn new(symbol: MatrixSymbol) -> Self {
        MultiplierOperator { symbol }
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        apply_multiplier(&self.symbol, f)
    }

    pub fn grid(&self) -> &Grid {
        self.symbol.grid()
    }

    pub fn adjoint(&self) -> MultiplierOperator {
        MultiplierOperator::new(adjoint_symbol(&self.symbol))
    }
}

/// Real mask `1_A(xi_k)` on the frequency nodes (half-open box, bounds may be infinite).
pub fn box_mask(grid: &Grid, a: &AxisBox) -> Vec<f64> {
    (0..grid.num_nodes())
        .map(|idx| {
            let xi = grid.freq_node(idx);
            if a.contains(&xi[..grid.dim()]) {
                1.0
            } else {
                0.0
            }
        })
        .collect()
}

/// `Delta(A) f`.
pub fn frequency_cutoff(a: &AxisBox, f: &SampledFunction) -> Result<SampledFunction> {
    if a.dim() != f.grid().dim() {
        return Err(Error::DimensionMismatch {
            expected: f.grid().dim(),
            found: a.dim(),
        });
    }
    let mask = box_mask(f.grid(), a);
    Ok(inverse_dft(&forward_dft(f).mask(&mask)))
}

/// `Delta_j[I] f`: cutoff to `xi_axis in I` (axes counted from 0).
pub fn coordinate_cutoff(
    axis: usize,
    interval: Interval,
    f: &SampledFunction,
) -> Result<SampledFunction> {
    let dim = f.grid().dim();
    if axis >= dim {
        return Err(Error::arg(
            "axis",
            format!("axis {axis} out of range for dimension {dim}"),
        ));
    }
    let mut ints = vec![Interval::real_line(); dim];
    ints[axis] = interval;
    frequency_cutoff(&AxisBox::from_intervals(&ints), f)
}

/// `m~*(xi) = m(-xi)^*`; the Nyquist node is its own reflection.
pub fn adjoint_symbol(m: &MatrixSymbol) -> MatrixSymbol {
    let g = m.grid;
    let (d_out, d_in) = (m.d_in, m.d_out);
    let mut values = Vec::with_capacity(m.values.len());
    for idx in 0..g.num_nodes() {
        let src = m.node_values(g.reflect_freq(idx));
        for i in 0..d_out {
            for j in 0..d_in {
                values.push(src[j * m.d_in + i].conj());
            }
        }
    }
    MatrixSymbol {
        grid: g,
        d_out,
        d_in,
        values,
        analytic: m
            .analytic
            .as_ref()
            .map(|f| Arc::new(Adjoint { inner: f.clone() }) as SharedSymbol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, FunctionSpec};
    use crate::linalg::c;
    use std::f64::consts::PI;

    #[test]
    fn derivative_symbol_on_sine() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let f = sample(
            &FunctionSpec::Sinusoid {
                frequency: vec![1.0],
                phase: 0.0,
            },
            g,
            1,
        )
        .unwrap();
        let m = MatrixSymbol::from_fn(g, Derivative { axis: 0 }).unwrap();
        let out = apply_multiplier(&m, &f).unwrap();
        for j in 0..64 {
            let want = 2.0 * PI * (2.0 * PI * g.coord(j)).cos();
            assert!((out.values()[j] - c(want, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn modulation_translates() {
        let g = Grid::new(1, 128, 8.0).unwrap();
        let f = sample(
            &FunctionSpec::RandomBandLimited {
                band: 4.0,
                min_abs: 0.0,
                seed: 1,
            },
            g,
            2,
        )
        .unwrap();
        let a = 5.0 * g.spacing();
        let m = MatrixSymbol::from_fn(
            g,
            Modulation {
                d: 2,
                shift: vec![a],
            },
        )
        .unwrap();
        let out = apply_multiplier(&m, &f).unwrap();
        for j in 0..128 {
            let src = (j + 5) % 128;
            for k in 0..2 {
                assert!((out.at(j)[k] - f.at(src)[k]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = Grid::new(1, 16, 1.0).unwrap();
        let m = MatrixSymbol::identity(g, 2);
        let f = SampledFunction::zeros(g, 3);
        assert!(matches!(
            apply_multiplier(&m, &f),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn adjoint_nyquist_and_involution() {
        let g = Grid::new(1, 16, 2.0).unwrap();
        let m = MatrixSymbol::from_fn(
            g,
            FromFn::new(2, 2, "test", |xi| {
                crate::linalg::from_rows(&[
                    vec![c(xi[0], 1.0), c(0.0, xi[0] * xi[0])],
                    vec![c(2.0, -xi[0]), c(xi[0].sin(), 0.5)],
                ])
                .unwrap()
            }),
        )
        .unwrap();
        let a = adjoint_symbol(&m);
        let nyq = g.storage_index(-8).unwrap();
        assert!(crate::linalg::max_abs_diff(&a.at(nyq), &m.at(nyq).adjoint()) == 0.0);
        let aa = adjoint_symbol(&a);
        for i in 0..16 {
            assert_eq!(aa.at(i), m.at(i));
        }
    }

    #[test]
    fn coordinate_cutoff_axis_checked() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let f = SampledFunction::zeros(g, 1);
        assert!(coordinate_cutoff(2, Interval::real_line(), &f).is_err());
    }
}
