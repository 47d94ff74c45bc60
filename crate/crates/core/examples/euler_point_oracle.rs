//! Closed-form curvature and the potential identities against finite
//! differences, at the Euler points and at random shapes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shape_pants::jm_metric;
use shape_pants::shape_geometry::{collision_distance, Letter, MassTriple, ShapePoint};

fn main() -> shape_pants::Result<()> {
    let eq = MassTriple::equal();
    println!("Euler points, equal masses (expect -20/27 = {:.12})", -20.0 / 27.0);
    for k in Letter::ALL {
        let p = ShapePoint::euler(k);
        let exact = jm_metric::curvature_closed_form(p, &eq)?;
        let fd = jm_metric::curvature_fd_oracle(p, &eq, 1e-4)?;
        println!("  E{}  closed {exact:.12}  differences {fd:.9}", k.digit());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = MassTriple::new(1.0, 2.0, 3.0)?;
    println!("\nrandom shapes, masses {:?}", m.masses());
    println!("  {:>8} {:>8} {:>14} {:>10} {:>10} {:>10}", "phi", "theta", "K", "K rel err", "lap err", "grad err");
    let mut shown = 0;
    while shown < 8 {
        let p = ShapePoint::new(rng.gen_range(-1.0f64..1.0).asin(), rng.gen_range(0.0..std::f64::consts::TAU));
        if Letter::ALL.iter().any(|&k| collision_distance(p, k) < 0.1) {
            continue;
        }
        let k = jm_metric::curvature_closed_form(p, &m)?;
        let kfd = jm_metric::curvature_fd_oracle(p, &m, 1e-4)?;
        let lap = jm_metric::laplacian_u_closed(p, &m)?;
        let lap_fd = jm_metric::laplacian_u_oracle(p, &m, 1e-4)?;
        let g = jm_metric::gradsq_u_closed(p, &m)?;
        let g_fd = jm_metric::gradsq_u_oracle(p, &m, 1e-4)?;
        println!(
            "  {:>8.4} {:>8.4} {:>14.8} {:>10.2e} {:>10.2e} {:>10.2e}",
            p.phi,
            p.theta,
            k,
            ((k - kfd) / k).abs(),
            ((lap - lap_fd) / lap).abs(),
            ((g - g_fd) / g).abs()
        );
        shown += 1;
    }
    Ok(())
}
