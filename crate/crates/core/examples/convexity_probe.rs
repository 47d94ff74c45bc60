//! Distance from one geodesic to another, sampled along the second. With
//! nonpositive curvature the distance is a convex function of arclength.

use shape_pants::geodesic_flow::GeodesicState;
use shape_pants::realizer;
use shape_pants::shape_geometry::{MassTriple, ShapePoint};

fn main() -> shape_pants::Result<()> {
    let m = MassTriple::equal();
    let pairs = [
        ((0.4, 1.0, 0.3), (0.42, 1.0, 0.3)),
        ((0.4, 1.0, 0.3), (0.4, 1.05, 0.5)),
        ((-0.6, 3.0, 2.0), (-0.55, 3.0, 1.9)),
        ((1.2, 0.0, 0.0), (1.25, 0.0, -0.1)),
    ];
    for ((p1, t1, h1), (p2, t2, h2)) in pairs {
        let g1 = GeodesicState::launch(ShapePoint::new(p1, t1), h1, &m)?.to_embedded();
        let g2 = GeodesicState::launch(ShapePoint::new(p2, t2), h2, &m)?.to_embedded();
        let r = match realizer::convexity_probe(g1, g2, &m, 0.5, 41, 0.1) {
            Ok(r) => r,
            Err(e) => {
                println!("({p1}, {t1}) vs ({p2}, {t2}): {e}");
                continue;
            }
        };
        let (first, last) = (r.h[0], *r.h.last().unwrap());
        println!(
            "({p1}, {t1}) vs ({p2}, {t2}): h {first:+.5} -> {last:+.5}, first-variation error {:.1e}, min sign(h) h'' {:+.2e}",
            r.first_variation_error, r.min_convexity
        );
    }
    Ok(())
}
