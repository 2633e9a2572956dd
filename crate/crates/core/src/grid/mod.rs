//! Periodic discretization of the box `[-L/2, L/2)^n` and its discrete Fourier data.
//!
//! Spatial nodes are `x_j = -L/2 + j h` with `h = L/N`; frequency nodes are
//! `xi_k = k / L` for `k` in `-N/2 .. N/2`. Spectra are stored in FFT order,
//! so storage index `m` carries the signed frequency index `m` for `m < N/2`
//! and `m - N` otherwise. The transform convention is
//! `F f(xi) = \int f(x) exp(-2 pi i x . xi) dx`, approximated by
//! `h^n sum_j f(x_j) exp(-2 pi i x_j . xi)`.

mod dft;
mod sample;

pub use dft::{forward_dft, inverse_dft};
pub use sample::{random_spectrum_where, sample, FunctionSpec};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum supported dimension.
pub const MAX_DIM: usize = 3;

/// A point in at most three dimensions; unused trailing coordinates are zero.
pub type Point = [f64; MAX_DIM];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    dim: usize,
    points: usize,
    length: f64,
}

impl Grid {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension {dim} outside the supported range 1..=3"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "axis size {points} must be a power of two and at least 8"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "box length {length} must be positive and finite"
            )));
        }
        Ok(Grid {
            dim,
            points,
            length,
        })
    }

    /// Re-validates a grid obtained through deserialization.
    pub fn validated(self) -> Result<Self> {
        Grid::new(self.dim, self.points, self.length)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Spatial spacing `h = L / N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Frequency spacing `1 / L`.
    pub fn freq_spacing(&self) -> f64 {
        1.0 / self.length
    }

    /// Cell volume `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn num_nodes(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    /// Largest representable frequency magnitude `N / (2L)` (the Nyquist node is `-N/(2L)`).
    pub fn nyquist(&self) -> f64 {
        self.points as f64 / (2.0 * self.length)
    }

    /// Axis coordinate of spatial index `j`.
    pub fn coord(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    /// Signed frequency index of storage index `m`.
    pub fn signed_index(&self, m: usize) -> i64 {
        let n = self.points as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Axis frequency of storage index `m`.
    pub fn freq(&self, m: usize) -> f64 {
        self.signed_index(m) as f64 / self.length
    }

    /// Storage index of the signed frequency index `k`, if representable.
    pub fn storage_index(&self, k: i64) -> Option<usize> {
        let n = self.points as i64;
        if k >= -n / 2 && k < n / 2 {
            Some(k.rem_euclid(n) as usize)
        } else {
            None
        }
    }

    /// Splits a flat node index into per-axis indices (axis 0 slowest).
    pub fn unravel(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut out = [0usize; MAX_DIM];
        for axis in (0..self.dim).rev() {
            out[axis] = idx % self.points;
            idx /= self.points;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi[..self.dim]
            .iter()
            .fold(0usize, |acc, &i| acc * self.points + i)
    }

    pub fn node(&self, idx: usize) -> Point {
        let m = self.unravel(idx);
        let mut p = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            p[axis] = self.coord(m[axis]);
        }
        p
    }

    pub fn freq_node(&self, idx: usize) -> Point {
        let m = self.unravel(idx);
        let mut p = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            p[axis] = self.freq(m[axis]);
        }
        p
    }

    /// Flat index of the frequency node `-xi` (the Nyquist node maps to itself).
    pub fn reflect_freq(&self, idx: usize) -> usize {
        let mut m = self.unravel(idx);
        for v in m.iter_mut().take(self.dim) {
            *v = (self.points - *v) % self.points;
        }
        self.ravel(&m)
    }

    /// Flat index of the spatial node `-x`, periodically (`-L/2` maps to itself).
    pub fn reflect_node(&self, idx: usize) -> usize {
        self.reflect_freq(idx)
    }

    /// Spatial node nearest to `p`, clamped to the box.
    pub fn nearest_node(&self, p: &[f64]) -> usize {
        let mut m = [0usize; MAX_DIM];
        for axis in 0..self.dim {
            let j = ((p[axis] + 0.5 * self.length) / self.spacing()).round();
            m[axis] = j.clamp(0.0, (self.points - 1) as f64) as usize;
        }
        self.ravel(&m)
    }

    /// The grid with the same box and twice as many points per axis.
    pub fn refined(&self) -> Result<Self> {
        Grid::new(self.dim, self.points * 2, self.length)
    }

    pub fn with_points(&self, points: usize) -> Result<Self> {
        Grid::new(self.dim, points, self.length)
    }
}

/// A half-open interval `[lo, hi)`; bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn real_line() -> Self {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t < self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    pub fn length(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        !(self.lo < self.hi)
    }
}

/// An axis-parallel box realized half-open as `prod_j [lo_j, hi_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::arg("box", "corner dimensions differ or are empty"));
        }
        for (a, b) in lo.iter().zip(&hi) {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::arg(
                    "box",
                    format!("side [{a}, {b}) must have positive finite length"),
                ));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// Box from per-axis intervals (bounds may be infinite; no volume check).
    pub fn from_intervals(intervals: &[Interval]) -> Self {
        AxisBox {
            lo: intervals.iter().map(|i| i.lo).collect(),
            hi: intervals.iter().map(|i| i.hi).collect(),
        }
    }

    pub fn cube(center: &[f64], side: f64) -> Result<Self> {
        AxisBox::new(
            center.iter().map(|c| c - 0.5 * side).collect(),
            center.iter().map(|c| c + 0.5 * side).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.side(a)).product()
    }

    pub fn is_cube(&self) -> bool {
        let s0 = self.side(0);
        (1..self.dim()).all(|a| ((self.side(a) - s0) / s0).abs() <= 1e-12)
    }

    pub fn interval(&self, axis: usize) -> Interval {
        Interval::new(self.lo[axis], self.hi[axis])
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        (0..self.dim()).all(|a| self.lo[a] <= p[a] && p[a] < self.hi[a])
    }

    pub fn center(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|a| 0.5 * (self.lo[a] + self.hi[a]))
            .collect()
    }

    /// Concentric box with every side multiplied by `factor`.
    pub fn dilate(&self, factor: f64) -> AxisBox {
        let c = self.center();
        AxisBox {
            lo: (0..self.dim())
                .map(|a| c[a] - 0.5 * factor * self.side(a))
                .collect(),
            hi: (0..self.dim())
                .map(|a| c[a] + 0.5 * factor * self.side(a))
                .collect(),
        }
    }

    /// Whether the closure of the box contains the origin in coordinate `axis`.
    pub fn touches_zero(&self, axis: usize) -> bool {
        self.lo[axis] <= 0.0 && 0.0 <= self.hi[axis]
    }

    pub fn describe(&self) -> String {
        let sides: Vec<String> = (0..self.dim())
            .map(|a| format!("[{:.6}, {:.6})", self.lo[a], self.hi[a]))
            .collect();
        sides.join("x")
    }
}

/// Complex `d`-vector samples at the spatial nodes, node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub(crate) grid: Grid,
    pub(crate) fiber: usize,
    pub(crate) values: Vec<Complex64>,
}

/// Complex `d`-vector samples at the frequency nodes (FFT order), node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSpectrum {
    pub(crate) grid: Grid,
    pub(crate) fiber: usize,
    pub(crate) values: Vec<Complex64>,
}

macro_rules! sampled_common {
    ($t:ident) => {
        impl $t {
            pub fn zeros(grid: Grid, fiber: usize) -> Self {
                $t {
                    grid,
                    fiber,
                    values: vec![Complex64::new(0.0, 0.0); grid.num_nodes() * fiber],
                }
            }

            pub fn from_values(grid: Grid, fiber: usize, values: Vec<Complex64>) -> Result<Self> {
                if fiber == 0 {
                    return Err(Error::arg("fiber", "fiber dimension must be positive"));
                }
                if values.len() != grid.num_nodes() * fiber {
                    return Err(Error::DimensionMismatch {
                        expected: grid.num_nodes() * fiber,
                        found: values.len(),
                    });
                }
                if values
                    .iter()
                    .any(|v| !v.re.is_finite() || !v.im.is_finite())
                {
                    return Err(Error::arg("values", "all samples must be finite"));
                }
                Ok($t {
                    grid,
                    fiber,
                    values,
                })
            }

            pub fn grid(&self) -> &Grid {
                &self.grid
            }

            pub fn fiber(&self) -> usize {
                self.fiber
            }

            pub fn values(&self) -> &[Complex64] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [Complex64] {
                &mut self.values
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.values
            }

            /// The fiber vector at node `idx`.
            pub fn at(&self, idx: usize) -> &[Complex64] {
                &self.values[idx * self.fiber..(idx + 1) * self.fiber]
            }

            pub fn at_mut(&mut self, idx: usize) -> &mut [Complex64] {
                let d = self.fiber;
                &mut self.values[idx * d..(idx + 1) * d]
            }

            /// Euclidean fiber norm at every node.
            pub fn pointwise_norms(&self) -> Vec<f64> {
                self.values
                    .chunks(self.fiber)
                    .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
                    .collect()
            }

            pub fn max_norm(&self) -> f64 {
                self.pointwise_norms().into_iter().fold(0.0, f64::max)
            }

            /// `max_j |self_j - other_j|` over all entries.
            pub fn max_abs_diff(&self, other: &$t) -> f64 {
                self.values
                    .iter()
                    .zip(&other.values)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
            }

            pub fn scale(&self, c: Complex64) -> $t {
                $t {
                    grid: self.grid,
                    fiber: self.fiber,
                    values: self.values.iter().map(|v| v * c).collect(),
                }
            }

            /// `a * self + b * other`.
            pub fn combine(&self, a: Complex64, other: &$t, b: Complex64) -> $t {
                $t {
                    grid: self.grid,
                    fiber: self.fiber,
                    values: self
                        .values
                        .iter()
                        .zip(&other.values)
                        .map(|(x, y)| a * x + b * y)
                        .collect(),
                }
            }

            pub fn add(&self, other: &$t) -> $t {
                let one = Complex64::new(1.0, 0.0);
                self.combine(one, other, one)
            }

            pub fn sub(&self, other: &$t) -> $t {
                self.combine(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
            }
        }
    };
}

sampled_common!(SampledFunction);
sampled_common!(SampledSpectrum);

impl SampledFunction {
    /// Builds a scalar-per-component function by evaluating `f` at every node.
    pub fn from_fn(grid: Grid, fiber: usize, f: impl Fn(&[f64], usize) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.num_nodes() * fiber);
        for idx in 0..grid.num_nodes() {
            let p = grid.node(idx);
            for c in 0..fiber {
                values.push(f(&p[..grid.dim()], c));
            }
        }
        SampledFunction {
            grid,
            fiber,
            values,
        }
    }

    /// Real nonnegative scalar function from per-node values.
    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        SampledFunction::from_values(
            grid,
            1,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    /// Scalar function of the pointwise fiber norms.
    pub fn norm_function(&self) -> SampledFunction {
        let norms = self.pointwise_norms();
        SampledFunction {
            grid: self.grid,
            fiber: 1,
            values: norms.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        }
    }

    /// Pointwise product with a real mask (e.g. an indicator of a node set).
    pub fn mask(&self, mask: &[f64]) -> SampledFunction {
        let d = self.fiber;
        SampledFunction {
            grid: self.grid,
            fiber: d,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v * mask[i / d])
                .collect(),
        }
    }

    /// Real parts of a scalar function.
    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Discrete `L^2` norm `(h^n sum_j |f(x_j)|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (self.grid.cell_volume() * s).sqrt()
    }

    /// Sesquilinear discrete pairing `h^n sum_j <f(x_j), g(x_j)>` (conjugate on `g`).
    pub fn inner(&self, other: &SampledFunction) -> Complex64 {
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        s * self.grid.cell_volume()
    }

    /// Pairing under which `m(xi) -> m(-xi)^*` is the exact adjoint symbol:
    /// `h^n sum_j <f(x_j), conj(g(-x_j))>` with the periodic reflection of nodes.
    pub fn reflected_pairing(&self, other: &SampledFunction) -> Complex64 {
        let d = self.fiber;
        let mut s = Complex64::new(0.0, 0.0);
        for idx in 0..self.grid.num_nodes() {
            let r = self.grid.reflect_node(idx);
            for c in 0..d {
                s += self.values[idx * d + c] * other.values[r * d + c].conj();
            }
        }
        s * self.grid.cell_volume()
    }
}

impl SampledSpectrum {
    /// Spectrum with a single fiber vector `v` at node `idx`.
    pub fn single_node(grid: Grid, fiber: usize, idx: usize, v: &[Complex64]) -> Self {
        let mut s = SampledSpectrum::zeros(grid, fiber);
        s.at_mut(idx).copy_from_slice(v);
        s
    }

    /// Pointwise product with a real frequency mask.
    pub fn mask(&self, mask: &[f64]) -> SampledSpectrum {
        let d = self.fiber;
        SampledSpectrum {
            grid: self.grid,
            fiber: d,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| v * mask[i / d])
                .collect(),
        }
    }

    /// Spectral energy `sum_k |F(xi_k)|^2`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_grid_1d_nodes() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let xs: Vec<f64> = (0..8).map(|j| g.coord(j)).collect();
        assert_eq!(xs[0], -0.5);
        assert_eq!(xs[7], 0.375);
        let mut ks: Vec<f64> = (0..8).map(|m| g.freq(m)).collect();
        ks.sort_by(f64::total_cmp);
        assert_eq!(ks, vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn make_grid_2d_counts() {
        let g = Grid::new(2, 16, 2.0).unwrap();
        assert_eq!(g.num_nodes(), 256);
        assert_eq!(g.freq_spacing(), 0.5);
    }

    #[test]
    fn make_grid_rejects_bad_input() {
        assert!(Grid::new(1, 7, 1.0).is_err());
        assert!(Grid::new(1, 4, 1.0).is_err());
        assert!(Grid::new(1, 8, 0.0).is_err());
        assert!(Grid::new(1, 8, -1.0).is_err());
        assert!(Grid::new(4, 8, 1.0).is_err());
        assert!(Grid::new(0, 8, 1.0).is_err());
    }

    #[test]
    fn reflection_fixes_nyquist_and_zero() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        assert_eq!(g.reflect_freq(0), 0);
        assert_eq!(g.reflect_freq(4), 4);
        assert_eq!(g.freq(4), -4.0);
        assert_eq!(g.freq(g.reflect_freq(1)), -1.0);
        // node 0 is x = -L/2, identified with L/2
        assert_eq!(g.reflect_node(0), 0);
        assert_eq!(g.coord(g.reflect_node(6)), -g.coord(6));
    }

    #[test]
    fn ravel_roundtrip() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        for idx in [0, 1, 77, 511] {
            assert_eq!(g.ravel(&g.unravel(idx)), idx);
        }
    }

    #[test]
    fn box_half_open_membership() {
        let b = AxisBox::new(vec![0.0, -1.0], vec![1.0, 1.0]).unwrap();
        assert!(b.contains(&[0.0, -1.0]));
        assert!(!b.contains(&[1.0, 0.0]));
        assert!(!b.is_cube());
        assert_eq!(b.dilate(3.0).volume(), 9.0 * b.volume());
        assert!(AxisBox::new(vec![1.0], vec![1.0]).is_err());
    }
}
