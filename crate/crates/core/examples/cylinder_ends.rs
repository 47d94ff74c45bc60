//! Near a binary collision the metric looks like a half-infinite cylinder.
//! Prints the circumferential factor against the end coordinate for each
//! end, and the slope of the end coordinate in log of the distance.

use shape_pants::commands::end_table;
use shape_pants::jm_metric;
use shape_pants::shape_geometry::{Letter, MassTriple};

fn main() -> shape_pants::Result<()> {
    let arg = std::env::args().nth(1);
    let m: MassTriple = arg.as_deref().unwrap_or("1,2,3").parse()?;
    let ells = [0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0];
    for k in Letter::ALL {
        println!("end {k} (masses {:?}): radius {:.6}", m.masses(), m.cyl_radius(k));
        for row in end_table(&m, k, &ells, 32)? {
            println!("  ell {:>4.1}  f in [{:.7}, {:.7}]", row.ell, row.min_f, row.max_f);
        }
        let (a, b) = (1e-3f64, 1e-5f64);
        let slope = (jm_metric::end_ell(&m, k, b, 0.0)? - jm_metric::end_ell(&m, k, a, 0.0)?) / (a / b).ln();
        println!("  d ell / d |ln rho| = {slope:.6}\n");
    }
    Ok(())
}
