//! Integrates a fan of geodesics from one shape and reads off their syzygy
//! sequences.

use std::f64::consts::TAU;

use shape_pants::geodesic_flow::{self, GeodesicState};
use shape_pants::shape_geometry::{MassTriple, ShapePoint};
use shape_pants::syzygy;

fn main() -> shape_pants::Result<()> {
    let m = MassTriple::equal();
    let start = ShapePoint::new(0.3, 1.0);
    println!("{:>7}  {:>6}  {:<18} {:<26} word", "heading", "length", "fate", "reduced");
    for i in 0..12 {
        let heading = TAU * i as f64 / 12.0;
        let st = GeodesicState::launch(start, heading, &m)?;
        let tr = geodesic_flow::integrate(&st, &m, 25.0, 1e-10)?;
        let word = tr.word();
        println!(
            "{heading:>7.3}  {:>6.2}  {:<18} {:<26} {word}",
            tr.arclength(),
            format!("{:?}", tr.fate),
            syzygy::reduce_stutters(&word).to_string()
        );
    }

    let st = GeodesicState::launch(start, -1.0, &m)?;
    let tr = geodesic_flow::integrate(&st, &m, 25.0, 1e-10)?;
    println!("\ncrossings of the heading -1.0 geodesic:");
    for e in &tr.events {
        println!("  s = {:>8.4}  theta = {:.4}  {}{}", e.s_at, e.theta_at, e.letter, e.sign.symbol());
    }
    println!("speed drift {:.1e} per unit length", tr.drift_rate());
    Ok(())
}
