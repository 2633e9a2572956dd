use serde::{Deserialize, Serialize};

use super::family::{sparse_operator, SparseFamily};
use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::opnorm::weighted_lp_norm_with;
use crate::weights::{
    ainf_characteristic, apr_characteristic, CandidateFamily, Quadrature, Weight,
};

/// Candidate cubes and quadrature used for the characteristics on the right side.
#[derive(Debug, Clone)]
pub struct CharacteristicSetup {
    pub family: CandidateFamily,
    pub quadrature: Quadrature,
    pub ainf_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseWeightedReport {
    /// `|A_{r,S}(f sigma)|_{L^p_omega}`.
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub apr: f64,
    pub ainf_omega: f64,
    pub ainf_sigma_r: f64,
    /// `|f|_{L^p_{sigma^r}}`.
    pub f_norm: f64,
}

/// `lhs = |A_{r,S}(f sigma)|_{L^p_omega}` against
/// `rhs = [omega, sigma]_{A_p^r} ([omega]_{A_inf}^{1/p'} + [sigma^r]_{A_inf}^{1/p}) |f|_{L^p_{sigma^r}}`.
pub fn sparse_weighted_bound_check(
    s: &SparseFamily,
    r: f64,
    p: f64,
    omega: &Weight,
    sigma: &Weight,
    f: &SampledFunction,
    setup: &CharacteristicSetup,
) -> Result<SparseWeightedReport> {
    if !(p > r && p.is_finite()) {
        return Err(Error::arg("p", format!("need p > r, got p = {p}, r = {r}")));
    }
    let g = s.grid;
    let sv = sigma.node_values(&g)?;
    let wv = omega.node_values(&g)?;
    let d = f.fiber();
    let mut fs = f.clone();
    for (i, v) in fs.values_mut().iter_mut().enumerate() {
        *v *= sv[i / d];
    }
    let a = sparse_operator(s, r, &fs)?;
    let lhs = weighted_lp_norm_with(&a, p, &wv);
    let sigma_r = sigma.pow(r);
    let srv = sigma_r.node_values(&g)?;
    let f_norm = weighted_lp_norm_with(f, p, &srv);
    let apr = apr_characteristic(omega, sigma, p, r, &setup.family, &setup.quadrature)?.value;
    let ainf_omega =
        ainf_characteristic(omega, &setup.family, &setup.quadrature, setup.ainf_cells)?.value;
    let ainf_sigma_r =
        ainf_characteristic(&sigma_r, &setup.family, &setup.quadrature, setup.ainf_cells)?.value;
    let p_conj = p / (p - 1.0);
    let rhs = apr * (ainf_omega.powf(1.0 / p_conj) + ainf_sigma_r.powf(1.0 / p)) * f_norm;
    Ok(SparseWeightedReport {
        lhs,
        rhs,
        ratio: if rhs > 0.0 { lhs / rhs } else { 0.0 },
        apr,
        ainf_omega,
        ainf_sigma_r,
        f_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{AxisBox, Grid};
    use crate::weights::{CandidateSpec, Shape};

    #[test]
    fn constant_weights_give_one_half() {
        let g = Grid::new(1, 256, 8.0).unwrap();
        let q = AxisBox::new(vec![0.0], vec![1.0]).unwrap();
        let s = SparseFamily::full(g, vec![q], 1.0);
        let f = crate::sparse::node_indicator(g, &AxisBox::new(vec![0.0], vec![1.0]).unwrap());
        let setup = CharacteristicSetup {
            family: CandidateSpec::new(Shape::Cubes).build(1).unwrap(),
            quadrature: Quadrature::default(),
            ainf_cells: 16,
        };
        let one = Weight::constant(1.0);
        let rep = sparse_weighted_bound_check(&s, 2.0, 4.0, &one, &one, &f, &setup).unwrap();
        assert!((rep.lhs - 1.0).abs() < 1e-12);
        assert!((rep.ratio - 0.5).abs() < 1e-9, "{rep:?}");
        let z = SampledFunction::zeros(g, 1);
        assert_eq!(
            sparse_weighted_bound_check(&s, 2.0, 4.0, &one, &one, &z, &setup)
                .unwrap()
                .ratio,
            0.0
        );
        assert!(sparse_weighted_bound_check(&s, 2.0, 2.0, &one, &one, &f, &setup).is_err());
    }
}
