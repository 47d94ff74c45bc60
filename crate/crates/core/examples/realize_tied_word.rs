//! Shortens several random seeds of one tied syzygy class and compares the
//! closed geodesics they converge to.
//!
//! ```text
//! cargo run --release --example realize_tied_word -- 1+2-3+1-2+3- 1,1,1
//! ```

use shape_pants::output;
use shape_pants::realizer::{self, ShortenOptions};
use shape_pants::shape_geometry::MassTriple;
use shape_pants::syzygy::SignedWord;

fn main() -> shape_pants::Result<()> {
    let mut args = std::env::args().skip(1);
    let word: SignedWord = args.next().as_deref().unwrap_or("1+2-3+1-2+3-").parse()?;
    let m: MassTriple = args.next().as_deref().unwrap_or("1,1,1").parse()?;
    let opts = ShortenOptions::default();

    let mut loops = Vec::new();
    for seed in 0..5 {
        let r = realizer::realize(&word, &m, seed, 20, &opts)?;
        println!(
            "seed {seed}: length {:.12}  residual {:.1e}  newton steps {}  polygon steps {}",
            r.jm_length,
            r.gradient_norm,
            r.iterations,
            r.length_history.len()
        );
        loops.push(r.loop_.units());
    }
    for i in 1..loops.len() {
        let (d, g) = realizer::symmetric_hausdorff(&loops[0], &loops[i]);
        println!("distance seed 0 to seed {i}: {d:.2e} (under {g:?})");
    }
    let curves: Vec<_> = loops.iter().map(|l| (l.as_slice(), "#06c")).collect();
    output::write_text("out/realize_tied_word.svg".as_ref(), &output::trace_svg(&curves, true))?;
    println!("wrote out/realize_tied_word.svg");
    Ok(())
}
