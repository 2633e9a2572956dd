use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{forward_dft, inverse_dft, Grid, SampledFunction, SampledSpectrum};
use crate::multiplier::MatrixSymbol;

fn bump_tail(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth step: 0 for `t <= 0`, 1 for `t >= 1`.
pub fn smooth_step(t: f64) -> f64 {
    let a = bump_tail(t);
    let b = bump_tail(1.0 - t);
    if a + b == 0.0 {
        return if t >= 1.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// Radial profile `phi(xi) = beta(log2|xi| + 1) - beta(log2|xi|)` with `beta` the
/// smooth step. `supp phi = [1/2, 2]` and `sum_{|j| <= J} phi(2^{-j} xi)` telescopes to
/// `beta(u + J + 1) - beta(u - J)`, which is 1 for `2^{-J} <= |xi| <= 2^J`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionOfUnity;

impl PartitionOfUnity {
    pub fn phi_radial(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        let u = r.log2();
        if u <= -1.0 || u >= 1.0 {
            return 0.0;
        }
        smooth_step(u + 1.0) - smooth_step(u)
    }

    pub fn phi(&self, xi: &[f64]) -> f64 {
        self.phi_radial(xi.iter().map(|t| t * t).sum::<f64>().sqrt())
    }

    /// `phi(2^{-j} xi)`.
    pub fn block(&self, j: i32, xi: &[f64]) -> f64 {
        self.phi_radial(xi.iter().map(|t| t * t).sum::<f64>().sqrt() * 2f64.powi(-j))
    }

    /// `sum_{|j| <= big_j} phi(2^{-j} xi)`.
    pub fn partial_sum(&self, big_j: i32, xi: &[f64]) -> f64 {
        (-big_j..=big_j).map(|j| self.block(j, xi)).sum()
    }
}

/// `k_j = F^{-1}(m phi(2^{-j} .))` for `|j| <= N` and `K_N = sum_j k_j`. A kernel is kept
/// as its columns `k e_u`, each a function with the output fiber.
#[derive(Debug, Clone)]
pub struct KernelTable {
    pub truncation: i32,
    grid: Grid,
    d_out: usize,
    d_in: usize,
    blocks: Vec<(i32, Vec<SampledFunction>)>,
    total: Vec<SampledFunction>,
}

impl KernelTable {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    /// Columns of `k_j` for each `j`.
    pub fn blocks(&self) -> &[(i32, Vec<SampledFunction>)] {
        &self.blocks
    }

    /// Columns of `K_N`.
    pub fn columns(&self) -> &[SampledFunction] {
        &self.total
    }

    /// `K_N(x_idx)` as the `d_out x d_in` entries, row-major.
    pub fn value_at(&self, idx: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.d_out * self.d_in];
        for (u, col) in self.total.iter().enumerate() {
            for (r, z) in col.at(idx).iter().enumerate() {
                v[r * self.d_in + u] = *z;
            }
        }
        v
    }

    /// Spectrum of column `u` of `K_N`.
    pub fn spectrum(&self, u: usize) -> SampledSpectrum {
        forward_dft(&self.total[u])
    }

    /// Periodic convolution `h^n sum_y K_N(x - y) f(y)`, through the spectra.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        if f.fiber() != self.d_in || f.grid() != &self.grid {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                found: f.fiber(),
            });
        }
        let fs = forward_dft(f);
        let mut out = SampledSpectrum::zeros(self.grid, self.d_out);
        for (u, col) in self.total.iter().enumerate() {
            let ks = forward_dft(col);
            for idx in 0..self.grid.num_nodes() {
                let fu = fs.at(idx)[u];
                let kv = ks.at(idx).to_vec();
                for (o, k) in out.at_mut(idx).iter_mut().zip(kv) {
                    *o += k * fu;
                }
            }
        }
        Ok(inverse_dft(&out))
    }
}

/// Builds the approximative kernels of `m` on `grid`. The top block reaches `2^{N+1}`,
/// so `2^N <= N_grid / (4L)` keeps it below the Nyquist frequency.
pub fn approx_kernel(m: &MatrixSymbol, truncation: i32, grid: Grid) -> Result<KernelTable> {
    let limit = grid.points() as f64 / (4.0 * grid.length());
    if 2f64.powi(truncation) > limit || truncation < 0 {
        return Err(Error::BandOverflow { truncation, limit });
    }
    let sym = if m.grid() == &grid {
        m.clone()
    } else {
        m.on_grid(grid)?
    };
    let (d_out, d_in) = (sym.d_out(), sym.d_in());
    let pou = PartitionOfUnity;
    let dim = grid.dim();
    let blocks: Vec<(i32, Vec<SampledFunction>)> = (-truncation..=truncation)
        .into_par_iter()
        .map(|j| {
            let cols = (0..d_in)
                .map(|u| {
                    let mut s = SampledSpectrum::zeros(grid, d_out);
                    for idx in 0..grid.num_nodes() {
                        let xi = grid.freq_node(idx);
                        let w = pou.block(j, &xi[..dim]);
                        if w == 0.0 {
                            continue;
                        }
                        let mv = sym.node_values(idx);
                        for (r, o) in s.at_mut(idx).iter_mut().enumerate() {
                            *o = mv[r * d_in + u] * w;
                        }
                    }
                    inverse_dft(&s)
                })
                .collect();
            (j, cols)
        })
        .collect();
    let mut total: Vec<SampledFunction> = (0..d_in)
        .map(|_| SampledFunction::zeros(grid, d_out))
        .collect();
    for (_, cols) in &blocks {
        for (t, c) in total.iter_mut().zip(cols) {
            *t = t.add(c);
        }
    }
    Ok(KernelTable {
        truncation,
        grid,
        d_out,
        d_in,
        blocks,
        total,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PHoermanderEntry {
    pub k: i32,
    pub a_k: f64,
    /// Displacement `y` that attains `a_k`.
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PHoermanderReport {
    pub p: f64,
    pub entries: Vec<PHoermanderEntry>,
    pub sum: f64,
    /// Displacements after snapping to whole grid steps.
    pub y_ladder: Vec<Vec<f64>>,
}

/// `a_k = sup_{y,u} (\int_{2^k|y| < |x| < 2^{k+1}|y|} |[K_N(x - y) - K_N(x)] u|^p dx)^{1/p}
/// (2^k |y|)^{n/p'}` over displacements `y` (snapped to grid steps) and basis vectors `u`.
pub fn check_p_hoermander(
    kernel: &KernelTable,
    p: f64,
    y_ladder: &[Vec<f64>],
    k_range: (i32, i32),
) -> Result<PHoermanderReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::arg(
            "p",
            format!("exponent {p} must lie in [1, inf)"),
        ));
    }
    if k_range.0 > k_range.1 {
        return Err(Error::arg("k_range", "empty range"));
    }
    let g = *kernel.grid();
    let n = g.dim();
    let h = g.spacing();
    let pts = g.points();
    let half = g.length() / 2.0;
    let mut snapped = Vec::with_capacity(y_ladder.len());
    for y in y_ladder {
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y.len(),
            });
        }
        let steps: Vec<i64> = y.iter().map(|t| (t / h).round() as i64).collect();
        if steps.iter().all(|s| *s == 0) {
            return Err(Error::arg(
                "y_ladder",
                "displacement rounds to zero grid steps",
            ));
        }
        snapped.push(steps);
    }
    if snapped.is_empty() {
        return Err(Error::arg("y_ladder", "empty ladder"));
    }
    let p_conj_inv = 1.0 - 1.0 / p;
    for steps in &snapped {
        let ylen = steps
            .iter()
            .map(|s| (*s as f64 * h).powi(2))
            .sum::<f64>()
            .sqrt();
        let radius = 2f64.powi(k_range.1 + 1) * ylen;
        if radius + ylen > half {
            return Err(Error::AnnulusOutsideBox {
                radius,
                half_width: half,
            });
        }
    }
    let cell = g.cell_volume();
    let ks: Vec<i32> = (k_range.0..=k_range.1).collect();
    let entries: Vec<PHoermanderEntry> = ks
        .par_iter()
        .map(|&k| {
            let mut best = (0.0f64, Vec::new());
            for steps in &snapped {
                let yv: Vec<f64> = steps.iter().map(|s| *s as f64 * h).collect();
                let ylen = yv.iter().map(|t| t * t).sum::<f64>().sqrt();
                let (r0, r1) = (2f64.powi(k) * ylen, 2f64.powi(k + 1) * ylen);
                for col in kernel.columns() {
                    let mut acc = 0.0;
                    for idx in 0..g.num_nodes() {
                        let x = g.node(idx);
                        let r = x[..n].iter().map(|t| t * t).sum::<f64>().sqrt();
                        if !(r > r0 && r < r1) {
                            continue;
                        }
                        let multi = g.unravel(idx);
                        let shifted: Vec<usize> = (0..n)
                            .map(|a| (multi[a] as i64 - steps[a]).rem_euclid(pts as i64) as usize)
                            .collect();
                        let j = g.ravel(&shifted);
                        let d: f64 = col
                            .at(j)
                            .iter()
                            .zip(col.at(idx))
                            .map(|(a, b)| (a - b).norm_sqr())
                            .sum::<f64>()
                            .sqrt();
                        acc += d.powf(p);
                    }
                    let a = (acc * cell).powf(1.0 / p) * r0.powf(n as f64 * p_conj_inv);
                    if a > best.0 {
                        best = (a, yv.clone());
                    }
                }
            }
            PHoermanderEntry {
                k,
                a_k: best.0,
                y: best.1,
            }
        })
        .collect();
    Ok(PHoermanderReport {
        p,
        sum: entries.iter().map(|e| e.a_k).sum(),
        entries,
        y_ladder: snapped
            .iter()
            .map(|s| s.iter().map(|t| *t as f64 * h).collect())
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample, FunctionSpec};
    use crate::multiplier::Sgn;

    #[test]
    fn telescoping_and_support() {
        let pou = PartitionOfUnity;
        for r in [0.75, 1.0, 1.3, 3.9, 0.26] {
            assert!((pou.partial_sum(3, &[r]) - 1.0).abs() < 1e-12);
        }
        assert!((pou.partial_sum(1, &[1.0]) - 1.0).abs() < 1e-12);
        assert_eq!(pou.phi(&[0.5 - 1e-9]), 0.0);
        assert_eq!(pou.phi(&[2.0 + 1e-9]), 0.0);
        assert_eq!(pou.phi(&[0.0]), 0.0);
        // blocks two apart have disjoint supports
        for r in [0.3f64, 0.6, 1.1, 1.9, 2.7] {
            assert_eq!(pou.block(0, &[r]) * pou.block(2, &[r]), 0.0);
        }
    }

    #[test]
    fn identity_kernel_is_band_pass_identity() {
        let g = Grid::new(1, 512, 16.0).unwrap();
        let m = MatrixSymbol::identity(g, 2);
        let kt = approx_kernel(&m, 3, g).unwrap();
        // band 2^{-3} .. 2^3 is exactly covered
        let f = sample(
            &FunctionSpec::RandomBandLimited {
                band: 7.9,
                min_abs: 0.13,
                seed: 4,
            },
            g,
            2,
        )
        .unwrap();
        let out = kt.apply(&f).unwrap();
        assert!(out.max_abs_diff(&f) <= 1e-8 * f.max_norm());
        assert!(approx_kernel(&m, 4, g).is_err());
    }

    #[test]
    fn apply_matches_direct_convolution() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let m = MatrixSymbol::from_fn(g, Sgn::hilbert(1)).unwrap();
        let kt = approx_kernel(&m, 1, g).unwrap();
        let f = sample(
            &FunctionSpec::Gaussian {
                center: vec![0.3],
                scale: 0.7,
            },
            g,
            1,
        )
        .unwrap();
        let out = kt.apply(&f).unwrap();
        let col = &kt.columns()[0];
        let n = g.points();
        let h = g.spacing();
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                // x_i - x_j as a node: index (i - j + N/2) mod N
                let d = (i + n + n / 2 - j) % n;
                s += col.at(d)[0] * f.at(j)[0] * h;
            }
            assert!((s - out.at(i)[0]).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_symbol_zero_sequence() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let m = MatrixSymbol::zero(g, 1);
        let kt = approx_kernel(&m, 2, g).unwrap();
        let rep = check_p_hoermander(&kt, 1.0, &[vec![0.0625]], (1, 4)).unwrap();
        assert_eq!(rep.sum, 0.0);
        assert!(check_p_hoermander(&kt, 1.0, &[vec![0.0625]], (1, 6)).is_err());
    }
}
