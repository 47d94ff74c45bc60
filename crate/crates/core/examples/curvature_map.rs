//! Curvature of the JM metric over the whole shape sphere.
//!
//! ```text
//! cargo run --release --example curvature_map -- 1,1,1 600
//! ```
//! Writes `out/curvature_map.svg` (blue negative, red positive).

use shape_pants::jm_metric::{self, ScanOptions};
use shape_pants::output;
use shape_pants::shape_geometry::MassTriple;

fn main() -> shape_pants::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: MassTriple = args.next().as_deref().unwrap_or("1,1,1").parse()?;
    let resolution = args.next().and_then(|s| s.parse().ok()).unwrap_or(600);

    let opts = ScanOptions { resolution, ..Default::default() };
    let grid = jm_metric::curvature_grid(&m, &opts)?;
    let rep = jm_metric::summarize_grid(&grid, &opts);
    println!("masses {:?}, {}x{} grid, collision balls of radius {} removed", m.masses(), resolution, resolution, opts.exclusion);
    println!("verdict        {:?}", rep.verdict);
    println!("most negative  {:.6} at phi={:.4} theta={:.4}", rep.min_curvature, rep.min_at.phi, rep.min_at.theta);
    println!("largest        {:.3e} at phi={:.4} theta={:.4}", rep.max_curvature, rep.max_at.phi, rep.max_at.theta);
    println!("signs          {} positive, {} negative, {} sign changes", rep.positive, rep.negative, rep.sign_changes);
    if let Some(gap) = rep.flat_max_pole_gap {
        println!("|K| < {:e} only within {gap:.2e} of a pole", opts.flat_threshold);
    }
    output::write_text("out/curvature_map.svg".as_ref(), &output::heatmap_svg(&grid, 360))?;
    println!("wrote out/curvature_map.svg");
    Ok(())
}
