//! Small dense complex matrices acting on Euclidean fibers.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn scalar(z: Complex64) -> CMat {
    CMat::from_element(1, 1, z)
}

pub fn diag(entries: &[Complex64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_column_slice(entries))
}

/// Row-major construction.
pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<CMat> {
    let r = rows.len();
    let cols = rows.first().map_or(0, |v| v.len());
    if r == 0 || cols == 0 || rows.iter().any(|v| v.len() != cols) {
        return Err(Error::arg(
            "matrix",
            "rows must be nonempty and of equal length",
        ));
    }
    Ok(CMat::from_fn(r, cols, |i, j| rows[i][j]))
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    match m.shape() {
        (0, _) | (_, 0) => 0.0,
        (1, 1) => m[(0, 0)].norm(),
        (1, _) | (_, 1) => m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        _ => m
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0, |a: f64, &b| a.max(b)),
    }
}

/// `m v` for a fiber vector `v`, written into `out`.
pub fn matvec_into(m: &CMat, v: &[Complex64], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for (j, x) in v.iter().enumerate() {
            s += m[(i, j)] * x;
        }
        *o = s;
    }
}

pub fn matvec(m: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); m.nrows()];
    matvec_into(m, v, &mut out);
    out
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a square complex matrix via the complex Schur form.
pub fn eigenvalues(m: &CMat) -> Vec<Complex64> {
    if m.nrows() == 1 {
        return vec![m[(0, 0)]];
    }
    let t = m.clone().schur().unpack().1;
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_of_diagonal() {
        let m = diag(&[c(1.0, 0.0), c(0.0, -3.0)]);
        assert!((op_norm(&m) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn norm_of_rank_one() {
        // u v^* with |u| = sqrt 2, |v| = sqrt 5
        let m = from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(1.0, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        assert!((op_norm(&m) - 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_triangular_and_rotation() {
        let t = from_rows(&[
            vec![c(1.0, 0.0), c(5.0, 0.0)],
            vec![c(0.0, 0.0), c(2.0, 1.0)],
        ])
        .unwrap();
        let mut ev = eigenvalues(&t);
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - c(1.0, 0.0)).norm() < 1e-10);
        assert!((ev[1] - c(2.0, 1.0)).norm() < 1e-10);
        let r = from_rows(&[
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        for z in eigenvalues(&r) {
            assert!(z.re.abs() < 1e-10 && (z.im.abs() - 1.0).abs() < 1e-10);
        }
    }
}
