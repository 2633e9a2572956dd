//! Forward and inverse transforms of a Gaussian, and the discrete Parseval identity.

use multiplier_lab::grid::{forward_dft, inverse_dft, sample, FunctionSpec, Grid};

fn main() -> multiplier_lab::Result<()> {
    let g = Grid::new(1, 256, 16.0)?;
    let f = sample(&FunctionSpec::Gaussian { center: vec![0.0], scale: 1.0 }, g, 1)?;
    let s = forward_dft(&f);

    // exp(-pi x^2) is its own transform, up to periodization and sampling
    let mut worst: f64 = 0.0;
    for idx in 0..g.num_nodes() {
        let xi = g.freq(idx);
        worst = worst.max((s.at(idx)[0].re - (-std::f64::consts::PI * xi * xi).exp()).abs());
    }
    println!("max |F f - exp(-pi xi^2)| = {worst:.3e}");
    println!("round trip error         = {:.3e}", inverse_dft(&s).max_abs_diff(&f));

    let space = f.l2_norm().powi(2);
    let freq = s.energy() * g.freq_spacing();
    println!("||f||^2 = {space:.12}, ||F f||^2 = {freq:.12}");
    Ok(())
}
