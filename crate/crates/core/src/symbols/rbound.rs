use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{op_norm, CMat};
use crate::multiplier::SymbolFunction;

/// A finite family of `d_out x d_in` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorFamily {
    members: Vec<CMat>,
}

impl OperatorFamily {
    pub fn new(members: Vec<CMat>) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::Empty("operator family".into()));
        };
        let shape = first.shape();
        if members.iter().any(|m| m.shape() != shape) {
            return Err(Error::arg("family", "members have different shapes"));
        }
        if members
            .iter()
            .any(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()))
        {
            return Err(Error::arg("family", "members must be finite"));
        }
        Ok(OperatorFamily { members })
    }

    /// `{ m(xi) : xi in points }`.
    pub fn from_symbol(m: &dyn SymbolFunction, points: &[Vec<f64>]) -> Result<Self> {
        OperatorFamily::new(points.iter().map(|xi| m.value(xi)).collect())
    }

    pub fn members(&self) -> &[CMat] {
        &self.members
    }

    pub fn union(&self, other: &OperatorFamily) -> Result<Self> {
        let mut m = self.members.clone();
        m.extend(other.members.iter().cloned());
        OperatorFamily::new(m)
    }
}

/// The R-bound of a family acting between Euclidean fibers. There the Rademacher
/// average satisfies `E |sum eps_k T_k x_k|^2 = sum |T_k x_k|^2`, so the R-bound is the
/// largest spectral norm in the family.
pub fn r_bound(t: &OperatorFamily) -> f64 {
    let norms: Vec<f64> = t.members.par_iter().map(op_norm).collect();
    norms.into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity, scalar};

    #[test]
    fn scalar_multiples_of_identity() {
        let fam: Vec<CMat> = (0..=20)
            .map(|k| identity(3) * c(-1.0 + 0.1 * k as f64, 0.0))
            .collect();
        assert!((r_bound(&OperatorFamily::new(fam).unwrap()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singleton_and_empty() {
        let a = scalar(c(3.0, 4.0));
        assert!((r_bound(&OperatorFamily::new(vec![a]).unwrap()) - 5.0).abs() < 1e-14);
        assert!(OperatorFamily::new(vec![]).is_err());
    }
}
