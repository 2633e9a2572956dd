use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{Grid, SampledFunction, SampledSpectrum};

thread_local! {
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> = RefCell::new(HashMap::new());
}

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((len, forward))
            .or_insert_with(|| {
                let dir = if forward {
                    FftDirection::Forward
                } else {
                    FftDirection::Inverse
                };
                FftPlanner::new().plan_fft(len, dir)
            })
            .clone()
    })
}

/// Unnormalized multidimensional FFT of one component, in place.
fn fft_nd(grid: &Grid, data: &mut [Complex64], forward: bool) {
    let n = grid.points();
    let dim = grid.dim();
    let fft = plan(n, forward);
    let total = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            for chunk in data.chunks_mut(n) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let block = stride * n;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[start + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[start + i * stride] = *v;
                }
            }
        }
    }
}

/// `(-1)^{m_1 + ... + m_n}`: the phase of the shift `x_0 = -L/2` (`N` is even).
fn parity_sign(grid: &Grid, idx: usize) -> f64 {
    let m = grid.unravel(idx);
    let s: usize = m[..grid.dim()].iter().sum();
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn transform(grid: &Grid, fiber: usize, input: &[Complex64], forward: bool) -> Vec<Complex64> {
    let nodes = grid.num_nodes();
    let scale = if forward {
        grid.cell_volume()
    } else {
        grid.length().powi(grid.dim() as i32).recip()
    };
    let mut out = vec![Complex64::new(0.0, 0.0); nodes * fiber];
    let mut comp = vec![Complex64::new(0.0, 0.0); nodes];
    for c in 0..fiber {
        for idx in 0..nodes {
            comp[idx] = input[idx * fiber + c];
        }
        if !forward {
            for (idx, v) in comp.iter_mut().enumerate() {
                *v *= parity_sign(grid, idx);
            }
        }
        fft_nd(grid, &mut comp, forward);
        for idx in 0..nodes {
            let sign = if forward { parity_sign(grid, idx) } else { 1.0 };
            out[idx * fiber + c] = comp[idx] * (scale * sign);
        }
    }
    out
}

/// `F f(xi_k) = h^n sum_j f(x_j) exp(-2 pi i x_j . xi_k)`.
pub fn forward_dft(f: &SampledFunction) -> SampledSpectrum {
    SampledSpectrum {
        grid: f.grid,
        fiber: f.fiber,
        values: transform(&f.grid, f.fiber, &f.values, true),
    }
}

/// Exact inverse of [`forward_dft`]: `f(x_j) = L^{-n} sum_k F(xi_k) exp(2 pi i x_j . xi_k)`.
pub fn inverse_dft(spec: &SampledSpectrum) -> SampledFunction {
    SampledFunction {
        grid: spec.grid,
        fiber: spec.fiber,
        values: transform(&spec.grid, spec.fiber, &spec.values, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn naive_forward(f: &SampledFunction) -> Vec<Complex64> {
        let g = f.grid;
        let mut out = vec![Complex64::new(0.0, 0.0); g.num_nodes() * f.fiber];
        for k in 0..g.num_nodes() {
            let xi = g.freq_node(k);
            for j in 0..g.num_nodes() {
                let x = g.node(j);
                let phase: f64 = (0..g.dim()).map(|a| x[a] * xi[a]).sum();
                let e = Complex64::from_polar(1.0, -2.0 * PI * phase);
                for c in 0..f.fiber {
                    out[k * f.fiber + c] += f.values[j * f.fiber + c] * e * g.cell_volume();
                }
            }
        }
        out
    }

    #[test]
    fn matches_direct_sum_2d_vector() {
        let g = Grid::new(2, 8, 3.0).unwrap();
        let f = SampledFunction::from_fn(g, 2, |x, c| {
            Complex64::new(x[0] + 0.3 * c as f64, x[1] * x[0] - 0.1)
        });
        let fast = forward_dft(&f);
        let slow = naive_forward(&f);
        for (a, b) in fast.values.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_node_gives_exponential() {
        let g = Grid::new(1, 16, 2.0).unwrap();
        let k = g.storage_index(3).unwrap();
        let s = SampledSpectrum::single_node(g, 1, k, &[Complex64::new(1.0, 0.0)]);
        let f = inverse_dft(&s);
        for j in 0..16 {
            let want = Complex64::from_polar(1.0 / 2.0, 2.0 * PI * g.coord(j) * 1.5);
            assert!((f.values[j] - want).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        let f = SampledFunction::zeros(g, 2);
        assert_eq!(forward_dft(&f).max_norm(), 0.0);
        assert_eq!(inverse_dft(&SampledSpectrum::zeros(g, 1)).max_norm(), 0.0);
    }
}
