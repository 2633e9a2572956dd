//! Dyadic decompositions: reconstruction from the blocking family in 2-d, and weighted
//! unconditionality constants of the 1-d dyadic family.

use multiplier_lab::grid::{sample, FunctionSpec, Grid};
use multiplier_lab::lp_decomp::{
    blocking_rects, decompose, product_rects, reconstruct, unconditionality_constants, SignSampling,
};
use multiplier_lab::weights::Weight;

fn main() -> multiplier_lab::Result<()> {
    let g = Grid::new(2, 128, 8.0)?;
    let df = g.freq_spacing();
    let fam = blocking_rects(2, -2, 2)?;
    let f = sample(
        &FunctionSpec::RandomBandLimited { band: 8.0 - df / 2.0, min_abs: 0.25 + df / 2.0, seed: 1 },
        g,
        1,
    )?;
    let pieces = decompose(&f, &fam);
    let active = pieces.iter().filter(|p| p.max_norm() > 1e-12).count();
    println!("blocking family: {} members, {active} active", fam.len());
    println!("reconstruction error {:.3e}", reconstruct(&f, &fam)?.max_abs_diff(&f));

    let g = Grid::new(1, 1024, 16.0)?;
    let df = g.freq_spacing();
    let fam = product_rects(1, -2, 3)?;
    let fs = (0..10)
        .map(|seed| {
            sample(
                &FunctionSpec::RandomBandLimited { band: 16.0 - df / 2.0, min_abs: 0.25 + df / 2.0, seed },
                g,
                1,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    for a in [0.0, 0.5, -0.5] {
        let rep = unconditionality_constants(&fam, 2.0, &Weight::power(a), &fs, SignSampling::Exhaustive)?;
        println!(
            "|x|^{a}: C+ >= {:.6}, C- >= {:.6} over {} patterns",
            rep.c_plus_est, rep.c_minus_est, rep.patterns
        );
    }
    Ok(())
}
