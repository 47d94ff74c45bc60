//! An untied class has no closed geodesic: its loops slide down one leg of
//! the pants and their length tends to the circumference of the cylinder.

use std::f64::consts::FRAC_1_SQRT_2;

use shape_pants::realizer::{self, ShortenOptions};
use shape_pants::shape_geometry::MassTriple;
use shape_pants::syzygy::SignedWord;

fn main() -> shape_pants::Result<()> {
    let m = MassTriple::equal();
    for w in ["1+2-", "1+2-1+2-1+2-"] {
        let word: SignedWord = w.parse()?;
        let rep = realizer::untied_demo(&word, &m, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0])?;
        println!("{word}: {} circuit(s) of end {}", rep.windings, rep.end);
        for r in &rep.rows {
            println!("  ell* {:>3.1}  total {:>10.6}  circuits {:.8}  bound {:.8}", r.ell, r.total_length, r.anklet_length, r.lower_bound);
        }
        if let Some(x) = rep.extrapolated_infimum {
            println!("  extrapolated infimum {x:.8}");
        }
    }
    println!("2 pi / sqrt 2 = {:.8}\n", std::f64::consts::TAU * FRAC_1_SQRT_2);

    // Shortening never settles: it keeps pushing the loop into the end.
    let word: SignedWord = "1+2-".parse()?;
    let seed = realizer::seed_polygon(&word, 20, None)?;
    let opts = ShortenOptions { max_iter: 800, ..Default::default() };
    let rep = realizer::curve_shorten(&seed.units(), &word, &m, &opts)?;
    let l = &rep.lengths;
    for i in (0..l.len()).step_by((l.len() / 8).max(1)) {
        println!("  step {i:>4}: length {:.8}", l[i]);
    }
    println!("converged: {}", rep.converged);
    Ok(())
}
