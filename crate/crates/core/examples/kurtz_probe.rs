//! Half-line cutoff on power-weighted L^2: bounded for |x|^{1/2}, divergent for |x|^{3/2}.

use multiplier_lab::grid::Grid;
use multiplier_lab::multiplier::{Indicator, MatrixSymbol, MultiplierOperator};
use multiplier_lab::opnorm::{divergence_probe, Budget, Strategy};
use multiplier_lab::weights::Weight;

fn main() -> multiplier_lab::Result<()> {
    let length = 8.0;
    let ladder: Vec<Grid> = [32, 64, 128, 256]
        .iter()
        .map(|&n| Grid::new(1, n, length))
        .collect::<Result<_, _>>()?;
    for a in [0.5, 1.5] {
        let rep = divergence_probe(
            |g| {
                Ok(MultiplierOperator::new(MatrixSymbol::from_fn(
                    g,
                    Indicator::half_line(1, 1, 0),
                )?))
            },
            2.0,
            &Weight::power(a),
            &ladder,
            Strategy::PowerIteration,
            Budget::default(),
        )?;
        println!("a = {a}: values {:?}", rep.values);
        println!("  ratios {:?} -> {:?}", rep.ratios, rep.verdict);
    }
    Ok(())
}
