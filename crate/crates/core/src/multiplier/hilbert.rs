use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SampledFunction;

/// Kernel used by the principal-value sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbertKernel {
    /// `(pi/L) cot(pi (x - t) / L)`, the periodization of `1/(x - t)` over the box.
    /// Its discrete symbol is `-pi i sgn(xi) (1 - 2 |xi| h)`, so the sum converges to the
    /// multiplier `-pi i sgn` at first order in `h`.
    #[default]
    Periodized,
    /// `1/(x - t)` restricted to the box.
    Free,
}

/// `(Hf)(x_i) = h sum_{j != i} k(x_i - x_j) f(x_j)`: the Riemann sum of
/// `p.v. \int f(t) / (x - t) dt` with the singular node skipped (symmetric truncation at `h`).
pub fn hilbert_transform_quadrature(
    f: &SampledFunction,
    kernel: HilbertKernel,
) -> Result<SampledFunction> {
    let g = *f.grid();
    if g.dim() != 1 {
        return Err(Error::arg(
            "f",
            "the Hilbert transform quadrature is one-dimensional",
        ));
    }
    let n = g.points();
    let h = g.spacing();
    let l = g.length();
    let d = f.fiber();
    // kernel table by signed offset i - j
    let k = |off: i64| -> f64 {
        let t = off as f64 * h;
        match kernel {
            HilbertKernel::Periodized => h * (PI / l) / (PI * t / l).tan(),
            HilbertKernel::Free => h / t,
        }
    };
    let table: Vec<f64> = (-(n as i64) + 1..n as i64)
        .map(|o| if o == 0 { 0.0 } else { k(o) })
        .collect();
    let mut out = SampledFunction::zeros(g, d);
    for i in 0..n {
        let o = out.at_mut(i);
        for j in 0..n {
            let w = table[(i as i64 - j as i64 + n as i64 - 1) as usize];
            if w == 0.0 {
                continue;
            }
            let v = f.at(j);
            for c in 0..d {
                o[c] += v[c] * w;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, FunctionSpec, Grid};
    use num_complex::Complex64;

    #[test]
    fn kernel_oddness_cancels_for_even_input() {
        // the kernel is odd about x0, so pairs cancel when f is even about x0
        let g = Grid::new(1, 256, 8.0).unwrap();
        let x0 = g.nearest_node(&[0.0]);
        let f = SampledFunction::from_fn(g, 1, |x, _| {
            Complex64::new((-x[0] * x[0]).exp(), 0.5 * (-2.0 * x[0] * x[0]).exp())
        });
        for kernel in [HilbertKernel::Periodized, HilbertKernel::Free] {
            let hf = hilbert_transform_quadrature(&f, kernel).unwrap();
            assert!(hf.at(x0)[0].norm() <= 1e-8);
        }
    }

    #[test]
    fn zero_and_dimension() {
        let g = Grid::new(1, 64, 4.0).unwrap();
        let z = SampledFunction::zeros(g, 2);
        assert_eq!(
            hilbert_transform_quadrature(&z, HilbertKernel::default())
                .unwrap()
                .max_norm(),
            0.0
        );
        let g2 = Grid::new(2, 8, 1.0).unwrap();
        let f = sample(
            &FunctionSpec::Gaussian {
                center: vec![],
                scale: 1.0,
            },
            g2,
            1,
        )
        .unwrap();
        assert!(hilbert_transform_quadrature(&f, HilbertKernel::Free).is_err());
    }
}
