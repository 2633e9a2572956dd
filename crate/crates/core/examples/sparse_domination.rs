//! Stopping-time sparse domination of the Hilbert transform of a Gaussian bump.

use multiplier_lab::grid::{sample, FunctionSpec, Grid};
use multiplier_lab::multiplier::{MatrixSymbol, MultiplierOperator, Sgn};
use multiplier_lab::sparse::{default_grids, sparse_dominate, DominationParams};

fn main() -> multiplier_lab::Result<()> {
    let g = Grid::new(1, 1024, 8.0)?;
    let f = sample(&FunctionSpec::Gaussian { center: vec![0.1], scale: 0.25 }, g, 1)?;
    let t = MultiplierOperator::new(MatrixSymbol::from_fn(g, Sgn::hilbert(1))?);
    let rep = sparse_dominate(&t, &f, 1.0, DominationParams::default(), &default_grids(1, -2, 5))?;
    for fam in &rep.families {
        match &fam.root {
            Some(root) => println!(
                "grid {}: root {}, {} cubes, eta {:?}",
                fam.grid_index,
                root.describe(),
                fam.family.len(),
                fam.eta_measured
            ),
            None => println!("grid {}: no cube contains the support", fam.grid_index),
        }
    }
    println!(
        "C = {:.4}, exceptional {} of {} nodes, verified {}",
        rep.c_measured,
        rep.exceptional.len(),
        rep.positive_nodes,
        rep.verified
    );
    Ok(())
}
