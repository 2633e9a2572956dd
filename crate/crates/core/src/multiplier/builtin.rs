use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::grid::AxisBox;
use crate::linalg::{c, identity, CMat};

/// A matrix-valued function of frequency, optionally with analytic partial derivatives.
pub trait SymbolFunction: Send + Sync + fmt::Debug {
    fn d_out(&self) -> usize;
    fn d_in(&self) -> usize;
    fn value(&self, xi: &[f64]) -> CMat;
    /// `\partial^alpha m(xi)`; `None` when no closed form is supplied.
    fn derivative(&self, _xi: &[f64], _alpha: &[usize]) -> Option<CMat> {
        None
    }
    fn describe(&self) -> String;
}

pub type SharedSymbol = Arc<dyn SymbolFunction>;

fn order(alpha: &[usize]) -> usize {
    alpha.iter().sum()
}

fn sgn(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `z Id_d`, constant.
#[derive(Debug, Clone)]
pub struct Constant {
    pub d: usize,
    pub z: Complex64,
}

impl SymbolFunction for Constant {
    fn d_out(&self) -> usize {
        self.d
    }
    fn d_in(&self) -> usize {
        self.d
    }
    fn value(&self, _xi: &[f64]) -> CMat {
        identity(self.d) * self.z
    }
    fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        Some(if order(alpha) == 0 {
            self.value(xi)
        } else {
            CMat::zeros(self.d, self.d)
        })
    }
    fn describe(&self) -> String {
        format!("({}) Id_{}", self.z, self.d)
    }
}

/// `scale sgn(xi_axis) Id_d`, with `sgn 0 = 0`. Derivatives vanish off the hyperplane.
#[derive(Debug, Clone)]
pub struct Sgn {
    pub d: usize,
    pub axis: usize,
    pub scale: Complex64,
}

impl Sgn {
    /// The Hilbert multiplier `-pi i sgn`, the exact counterpart of the kernel `1/x`.
    pub fn hilbert(d: usize) -> Self {
        Sgn {
            d,
            axis: 0,
            scale: c(0.0, -PI),
        }
    }
}

impl SymbolFunction for Sgn {
    fn d_out(&self) -> usize {
        self.d
    }
    fn d_in(&self) -> usize {
        self.d
    }
    fn value(&self, xi: &[f64]) -> CMat {
        identity(self.d) * (self.scale * sgn(xi[self.axis]))
    }
    fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        Some(if order(alpha) == 0 {
            self.value(xi)
        } else {
            CMat::zeros(self.d, self.d)
        })
    }
    fn describe(&self) -> String {
        format!("({}) sgn(xi_{}) Id_{}", self.scale, self.axis + 1, self.d)
    }
}

/// Indicator of an axis-parallel box (bounds may be infinite), half-open per axis.
#[derive(Debug, Clone)]
pub struct Indicator {
    pub d: usize,
    pub bounds: AxisBox,
}

impl Indicator {
    /// `1_{[0, inf)}(xi_axis)` in dimension `dim`.
    pub fn half_line(d: usize, dim: usize, axis: usize) -> Self {
        let mut lo = vec![f64::NEG_INFINITY; dim];
        let hi = vec![f64::INFINITY; dim];
        lo[axis] = 0.0;
        Indicator {
            d,
            bounds: AxisBox { lo, hi },
        }
    }
}

impl SymbolFunction for Indicator {
    fn d_out(&self) -> usize {
        self.d
    }
    fn d_in(&self) -> usize {
        self.d
    }
    fn value(&self, xi: &[f64]) -> CMat {
        if self.bounds.contains(xi) {
            identity(self.d)
        } else {
            CMat::zeros(self.d, self.d)
        }
    }
    fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        Some(if order(alpha) == 0 {
            self.value(xi)
        } else {
            CMat::zeros(self.d, self.d)
        })
    }
    fn describe(&self) -> String {
        format!("indicator of {} (Id_{})", self.bounds.describe(), self.d)
    }
}

/// `exp(2 pi i xi . a) Id_d`: translation by `a`.
#[derive(Debug, Clone)]
pub struct Modulation {
    pub d: usize,
    pub shift: Vec<f64>,
}

impl SymbolFunction for Modulation {
    fn d_out(&self) -> usize {
        self.d
    }
    fn d_in(&self) -> usize {
        self.d
    }
    fn value(&self, xi: &[f64]) -> CMat {
        let t: f64 = xi.iter().zip(&self.shift).map(|(x, a)| x * a).sum();
        identity(self.d) * Complex64::from_polar(1.0, 2.0 * PI * t)
    }
    fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        let mut f = c(1.0, 0.0);
        for (k, a) in alpha.iter().zip(&self.shift) {
            f *= (c(0.0, 2.0 * PI) * a).powu(*k as u32);
        }
        Some(self.value(xi) * f)
    }
    fn describe(&self) -> String {
        format!("translation by {:?} (Id_{})", self.shift, self.d)
    }
}

/// `2 pi i xi_axis`: differentiation along `axis`.
#[derive(Debug, Clone)]
pub struct Derivative {
    pub axis: usize,
}

impl SymbolFunction for Derivative {
    fn d_out(&self) -> usize {
        1
    }
    fn d_in(&self) -> usize {
        1
    }
    fn value(&self, xi: &[f64]) -> CMat {
        crate::linalg::scalar(c(0.0, 2.0 * PI * xi[self.axis]))
    }
    fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        let z = match order(alpha) {
            0 => return Some(self.value(xi)),
            1 if alpha[self.axis] == 1 => c(0.0, 2.0 * PI),
            _ => c(0.0, 0.0),
        };
        Some(crate::linalg::scalar(z))
    }
    fn describe(&self) -> String {
        format!("2 pi i xi_{}", self.axis + 1)
    }
}

/// `i xi (i xi - A)^{-1}` on the line.
#[derive(Debug, Clone)]
pub struct Resolvent {
    pub a: CMat,
}

impl Resolvent {
    fn resolvent(&self, xi: f64) -> CMat {
        let d = self.a.nrows();
        let m = identity(d) * c(0.0, xi) - &self.a;
        // invertibility is checked by the constructor on the whole line
        m.try_inverse()
            .unwrap_or_else(|| CMat::from_element(d, d, c(f64::NAN, f64::NAN)))
    }
}

impl SymbolFunction for Resolvent {
    fn d_out(&self) -> usize {
        self.a.nrows()
    }
    fn d_in(&self) -> usize {
        self.a.nrows()
    }
    fn value(&self, xi: &[f64]) -> CMat {
        self.resolvent(xi[0]) * c(0.0, xi[0])
    }
    fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        match alpha[0] {
            0 => Some(self.value(xi)),
            1 => {
                let r = self.resolvent(xi[0]);
                Some(&self.a * &r * &r * c(0.0, -1.0))
            }
            _ => None,
        }
    }
    fn describe(&self) -> String {
        format!("i xi (i xi - A)^(-1), A = {:?}", self.a.as_slice())
    }
}

/// `m(lambda xi)`.
#[derive(Debug, Clone)]
pub struct Dilated {
    pub inner: SharedSymbol,
    pub lambda: f64,
}

impl SymbolFunction for Dilated {
    fn d_out(&self) -> usize {
        self.inner.d_out()
    }
    fn d_in(&self) -> usize {
        self.inner.d_in()
    }
    fn value(&self, xi: &[f64]) -> CMat {
        let s: Vec<f64> = xi.iter().map(|x| x * self.lambda).collect();
        self.inner.value(&s)
    }
    fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        let s: Vec<f64> = xi.iter().map(|x| x * self.lambda).collect();
        self.inner
            .derivative(&s, alpha)
            .map(|m| m * c(self.lambda.powi(order(alpha) as i32), 0.0))
    }
    fn describe(&self) -> String {
        format!("({})({} xi)", self.inner.describe(), self.lambda)
    }
}

/// `m(-xi)^*`.
#[derive(Debug, Clone)]
pub struct Adjoint {
    pub inner: SharedSymbol,
}

impl SymbolFunction for Adjoint {
    fn d_out(&self) -> usize {
        self.inner.d_in()
    }
    fn d_in(&self) -> usize {
        self.inner.d_out()
    }
    fn value(&self, xi: &[f64]) -> CMat {
        let r: Vec<f64> = xi.iter().map(|x| -x).collect();
        self.inner.value(&r).adjoint()
    }
    fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        let r: Vec<f64> = xi.iter().map(|x| -x).collect();
        let sign = if order(alpha) % 2 == 0 { 1.0 } else { -1.0 };
        self.inner
            .derivative(&r, alpha)
            .map(|m| m.adjoint() * c(sign, 0.0))
    }
    fn describe(&self) -> String {
        format!("adjoint of [{}]", self.inner.describe())
    }
}

/// Pointwise matrix product `m1(xi) m2(xi)`, derivatives by the Leibniz rule.
#[derive(Debug, Clone)]
pub struct Product {
    pub left: SharedSymbol,
    pub right: SharedSymbol,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl SymbolFunction for Product {
    fn d_out(&self) -> usize {
        self.left.d_out()
    }
    fn d_in(&self) -> usize {
        self.right.d_in()
    }
    fn value(&self, xi: &[f64]) -> CMat {
        self.left.value(xi) * self.right.value(xi)
    }
    fn derivative(&self, xi: &[f64], alpha: &[usize]) -> Option<CMat> {
        let n = alpha.len();
        let counts: Vec<usize> = alpha.iter().map(|a| a + 1).collect();
        let total: usize = counts.iter().product();
        let mut acc = CMat::zeros(self.d_out(), self.d_in());
        let mut beta = vec![0usize; n];
        for flat in 0..total {
            let mut r = flat;
            let mut coef = 1.0;
            for j in (0..n).rev() {
                beta[j] = r % counts[j];
                r /= counts[j];
                coef *= binom(alpha[j], beta[j]);
            }
            let rest: Vec<usize> = alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
            let l = self.left.derivative(xi, &beta)?;
            let rr = self.right.derivative(xi, &rest)?;
            acc += l * rr * c(coef, 0.0);
        }
        Some(acc)
    }
    fn describe(&self) -> String {
        format!("[{}] [{}]", self.left.describe(), self.right.describe())
    }
}

/// A symbol given only by a value closure; derivatives come from finite differences.
#[derive(Clone)]
pub struct FromFn {
    pub d_out: usize,
    pub d_in: usize,
    pub name: String,
    pub f: Arc<dyn Fn(&[f64]) -> CMat + Send + Sync>,
}

impl fmt::Debug for FromFn {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "FromFn({})", self.name)
    }
}

impl FromFn {
    pub fn new(
        d_out: usize,
        d_in: usize,
        name: impl Into<String>,
        f: impl Fn(&[f64]) -> CMat + Send + Sync + 'static,
    ) -> Self {
        FromFn {
            d_out,
            d_in,
            name: name.into(),
            f: Arc::new(f),
        }
    }
}

impl SymbolFunction for FromFn {
    fn d_out(&self) -> usize {
        self.d_out
    }
    fn d_in(&self) -> usize {
        self.d_in
    }
    fn value(&self, xi: &[f64]) -> CMat {
        (self.f)(xi)
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, max_abs_diff};

    #[test]
    fn resolvent_derivative_matches_difference_quotient() {
        let r = Resolvent {
            a: diag(&[c(1.0, 0.0), c(2.0, 0.5)]),
        };
        for &x in &[-3.0, -0.2, 0.7, 5.0] {
            let h = 1e-6;
            let fd = (r.value(&[x + h]) - r.value(&[x - h])) / c(2.0 * h, 0.0);
            let an = r.derivative(&[x], &[1]).unwrap();
            assert!(max_abs_diff(&fd, &an) < 1e-8);
        }
    }

    #[test]
    fn product_leibniz_mixed() {
        // m1 = exp(2 pi i xi.a), m2 = 2 pi i xi_1 in 2-d; d_1 d_2 of the product
        let a = vec![0.3, -0.7];
        let p = Product {
            left: Arc::new(Modulation {
                d: 1,
                shift: a.clone(),
            }),
            right: Arc::new(Derivative { axis: 0 }),
        };
        let xi = [0.4, 1.1];
        let e = Complex64::from_polar(1.0, 2.0 * PI * (xi[0] * a[0] + xi[1] * a[1]));
        let tpi = c(0.0, 2.0 * PI);
        // d2 d1 (e * tpi xi1) = d2 (tpi a1 e tpi xi1 + e tpi) = tpi a2 (tpi a1 e tpi xi1 + e tpi)
        let want = tpi * a[1] * (tpi * a[0] * e * tpi * xi[0] + e * tpi);
        let got = p.derivative(&xi, &[1, 1]).unwrap()[(0, 0)];
        assert!((got - want).norm() < 1e-12);
    }

    #[test]
    fn adjoint_of_sgn_is_fixed() {
        let s: SharedSymbol = Arc::new(Sgn {
            d: 1,
            axis: 0,
            scale: c(0.0, 1.0),
        });
        let a = Adjoint { inner: s.clone() };
        for &x in &[-2.0, 0.0, 3.0] {
            assert!(max_abs_diff(&a.value(&[x]), &s.value(&[x])) < 1e-15);
        }
    }
}
