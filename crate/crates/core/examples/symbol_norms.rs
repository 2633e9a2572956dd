//! Mikhlin norms, variation measures and discrete Hoermander kernel sums.

use multiplier_lab::grid::Grid;
use multiplier_lab::linalg::{c, diag};
use multiplier_lab::multiplier::{MatrixSymbol, Sgn};
use multiplier_lab::symbols::{
    approx_kernel, check_p_hoermander, maxreg_symbol, mikhlin_norm_1d, rbdd_variation_1d, LogLadder,
};

fn main() -> multiplier_lab::Result<()> {
    let g = Grid::new(1, 64, 1.0)?;
    let ladder = LogLadder::default();
    let a = diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
    let resolvent = maxreg_symbol(&a, g)?;
    let sgn = MatrixSymbol::from_fn(g, Sgn { d: 2, axis: 0, scale: c(1.0, 0.0) })?;
    for (name, m) in [("sgn Id", &sgn), ("i xi (i xi - A)^-1", &resolvent)] {
        let rep = mikhlin_norm_1d(m, &ladder)?;
        println!("{name}: Mikhlin norm {:.6}", rep.value);
        for e in &rep.breakdown {
            println!("  alpha {:?}: sup {:.6}", e.alpha, e.sup);
        }
    }

    for k in [-4, 0, 4] {
        let lo = 2f64.powi(k);
        let v = rbdd_variation_1d(&resolvent, lo, 2.0 * lo, 32)?;
        println!("[2^{k}, 2^{}): variation measure {:.9}", k + 1, v.measure_norm);
    }

    let g = Grid::new(1, 32768, 2048.0)?;
    let h = MatrixSymbol::from_fn(g, Sgn::hilbert(1))?;
    let kt = approx_kernel(&h, 1, g)?;
    let rep = check_p_hoermander(&kt, 1.0, &[vec![0.5], vec![1.0]], (0, 8))?;
    for e in &rep.entries {
        println!("a_{} = {:.4e}", e.k, e.a_k);
    }
    println!("sum = {:.4}", rep.sum);
    Ok(())
}
