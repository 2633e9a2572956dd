//! The resolvent symbol i xi (i xi - A)^{-1} of a sectorial matrix on weighted L^2, and the
//! rejection of matrices with spectrum on the imaginary axis.

use multiplier_lab::grid::Grid;
use multiplier_lab::linalg::{c, diag, from_rows};
use multiplier_lab::multiplier::MultiplierOperator;
use multiplier_lab::opnorm::{divergence_probe, Budget, Strategy};
use multiplier_lab::symbols::maxreg_symbol;
use multiplier_lab::weights::Weight;

fn main() -> multiplier_lab::Result<()> {
    let a = diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
    let ladder: Vec<Grid> = [32, 64, 128, 256]
        .iter()
        .map(|&n| Grid::new(1, n, 8.0))
        .collect::<Result<_, _>>()?;
    let rep = divergence_probe(
        |g| Ok(MultiplierOperator::new(maxreg_symbol(&a, g)?)),
        2.0,
        &Weight::power(0.5),
        &ladder,
        Strategy::PowerIteration,
        Budget::default(),
    )?;
    println!("A = diag(1, 2), |x|^(1/2): norms {:?} -> {:?}", rep.values, rep.verdict);

    let rotation = from_rows(&[vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])?;
    match maxreg_symbol(&rotation, ladder[0]) {
        Ok(_) => println!("rotation accepted"),
        Err(e) => println!("rotation rejected: {e}"),
    }
    Ok(())
}
