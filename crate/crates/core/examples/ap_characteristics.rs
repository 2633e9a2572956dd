//! Muckenhoupt characteristics of power weights |x|^a over a finite candidate family.

use multiplier_lab::weights::{ainf_characteristic, ap_characteristic, CandidateSpec, Quadrature, Shape, Weight};

fn main() -> multiplier_lab::Result<()> {
    let family = CandidateSpec::new(Shape::Cubes).build(1)?;
    let quad = Quadrature::default();
    println!("{:>6} {:>10} {:>10} {:>10}", "a", "A_2", "A_3", "A_inf");
    for a in [-0.5, -0.25, 0.0, 0.25, 0.5, 0.9] {
        let w = Weight::power(a);
        let a2 = ap_characteristic(&w, 2.0, &family, &quad)?;
        let a3 = ap_characteristic(&w, 3.0, &family, &quad)?;
        let ainf = ainf_characteristic(&w, &family, &quad, 16)?;
        println!("{a:>6} {:>10.5} {:>10.5} {:>10.5}", a2.value, a3.value, ainf.value);
    }
    // |x|^1 sits on the A_2 boundary: its dual weight |x|^{-1} is not integrable at 0
    match ap_characteristic(&Weight::power(1.0), 2.0, &family, &quad) {
        Ok(e) => println!("a = 1, p = 2: {:.3}", e.value),
        Err(e) => println!("a = 1, p = 2: rejected ({e})"),
    }
    Ok(())
}
