//! For products (1, 1, a) with a != 1 the curvature changes sign near the
//! Lagrange points.

use shape_pants::jm_metric::{self, ScanOptions, ScanRegion};
use shape_pants::shape_geometry::{MassTriple, ShapePoint};

fn main() -> shape_pants::Result<()> {
    for a in [1.0, 1.5, 2.0, 4.0] {
        let m = MassTriple::from_products([1.0, 1.0, a])?;
        let (dk, degenerate) = jm_metric::dkappa_lagrange(&m);
        let opts = ScanOptions {
            resolution: 120,
            region: ScanRegion::Ball { center: ShapePoint::NORTH_LAGRANGE, radius: 1e-2 },
            ..Default::default()
        };
        let rep = jm_metric::curvature_scan(&m, &opts)?;
        println!(
            "a = {a}: dkappa = ({:.3}, {:.3}, {:.3}) degenerate {degenerate}; near the pole {} positive, {} negative, verdict {:?}",
            dk[0], dk[1], dk[2], rep.positive, rep.negative, rep.verdict
        );
    }
    let m = MassTriple::new(1.0, 1.0, 2.0)?;
    let rep = jm_metric::curvature_scan(&m, &ScanOptions { resolution: 400, ..Default::default() })?;
    println!("\nmasses (1, 1, 2), whole sphere: max K {:.3e} at phi={:.4}, verdict {:?}", rep.max_curvature, rep.max_at.phi, rep.verdict);
    Ok(())
}
