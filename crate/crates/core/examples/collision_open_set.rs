//! Binary collision in the full planar problem: calibrate the bound
//! constant, run a collinear zero-energy start into collision, and check
//! that nearby starts collide in time too.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shape_pants::collision_lab as lab;
use shape_pants::output;
use shape_pants::shape_geometry::MassTriple;

fn main() -> shape_pants::Result<()> {
    let m = MassTriple::equal();
    for eps in [0.1, 0.05, 0.02] {
        println!("K* from starts with r(0) < {eps}: {:.4}", lab::calibrate_kstar(&m, eps, 100, 1)?);
    }
    let kstar = lab::calibrate_kstar(&m, 0.1, 100, 1)?;

    let start = lab::collinear_start(&m, 0.05)?;
    let rep = lab::collision_bound_experiment(&start, &m, 1.0, kstar)?;
    println!(
        "\ncollinear start r(0) = 0.05: open condition {}, collision at {:.6e}, bound {:.6e}",
        rep.open_condition,
        rep.collision_time.unwrap_or(f64::NAN),
        rep.bound_time
    );
    println!("|I'' - 4H| <= {:.1e}, inertia defect {:.1e}", rep.max_lagrange_jacobi_residual, rep.max_inertia_defect);

    let tl = lab::integrate_full(&start, &m, rep.bound_time, 1e-12)?;
    let rows = tl.rows.iter().map(|r| vec![r.t, r.r, r.j1, r.energy, r.inertia, r.inertia_ddot]);
    output::write_text("out/collision_timeline.csv".as_ref(), &output::csv(&["t", "r", "J1", "H", "I", "Iddot"], rows))?;
    println!("{} timeline rows written to out/collision_timeline.csv", tl.rows.len());

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut ok = 0;
    for _ in 0..100 {
        let p = lab::perturb(&start, &m, 1e-4, &mut rng)?;
        let r = lab::collision_bound_experiment(&p, &m, 1.0, kstar)?;
        ok += usize::from(r.open_condition && r.collided_within_bound);
    }
    println!("perturbations of size 1e-4 colliding within the bound: {ok}/100");
    Ok(())
}
