//! The Hilbert transform as a principal-value quadrature and as the multiplier -pi i sgn.

use multiplier_lab::grid::{sample, FunctionSpec, Grid};
use multiplier_lab::multiplier::{hilbert_transform_quadrature, HilbertKernel, MatrixSymbol, MultiplierOperator, Sgn};
use multiplier_lab::opnorm::{operator_norm_estimate, Budget, Strategy};
use multiplier_lab::weights::Weight;

fn main() -> multiplier_lab::Result<()> {
    let g = Grid::new(1, 4096, 40.0)?;
    let f = sample(&FunctionSpec::Gaussian { center: vec![0.0], scale: 1.0 }, g, 1)?;
    let t = MultiplierOperator::new(MatrixSymbol::from_fn(g, Sgn::hilbert(1))?);
    let spectral = t.apply(&f)?;
    for kernel in [HilbertKernel::Free, HilbertKernel::Periodized] {
        let q = hilbert_transform_quadrature(&f, kernel)?;
        println!("{kernel:?}: relative L2 gap {:.4e}", q.sub(&spectral).l2_norm() / spectral.l2_norm());
    }

    let small = Grid::new(1, 256, 8.0)?;
    let t = MultiplierOperator::new(MatrixSymbol::from_fn(small, Sgn::hilbert(1))?);
    let one = Weight::constant(1.0);
    let est = operator_norm_estimate(&t, 2.0, &one, &one, Strategy::PowerIteration, Budget::default())?;
    println!("||H||_(2->2) ~ {:.12} (pi = {:.12})", est.value, std::f64::consts::PI);
    for a in [0.5, 0.9] {
        let w = Weight::power(a);
        let est = operator_norm_estimate(&t, 2.0, &w, &w, Strategy::PowerIteration, Budget::default())?;
        println!("||H|| on L^2(|x|^{a}) ~ {:.6}", est.value);
    }
    Ok(())
}
