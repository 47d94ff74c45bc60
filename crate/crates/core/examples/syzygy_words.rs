//! Stutter reduction, tied/untied classes, sign patterns and periodic
//! approximants of collision sequences.

use shape_pants::syzygy::{self, BiInfinite, SignedWord};

fn main() -> shape_pants::Result<()> {
    for w in ["1221", "123321", "12131", "1232", "121212", "11233213"] {
        let word = SignedWord::parse(w, true)?;
        let red = syzygy::reduce_stutters(&word);
        let c = syzygy::classify(&word);
        println!("{w:<10} reduces to {:<8} stutter-free {:<5} tied {}", format!("\"{red}\""), c.stutter_free, c.tied);
    }

    let word = SignedWord::parse("123123", true)?;
    let (p, q) = syzygy::sign_decorations(&word)?;
    println!("\nsign patterns of 123123: {p} and {q}");

    // ...3 3 3 | 1 2 | 1 2 1 2...: the forward tail alternates two letters.
    let s = BiInfinite::parse("3", "12", "12")?;
    let c = s.classify();
    println!("\n...333 12 1212...: collision forward {}, backward {}", c.collision_forward, c.collision_backward);
    let s = BiInfinite::parse("123", "", "132")?;
    for n in 1..=5 {
        match syzygy::periodic_approximants(&s, n) {
            Ok(w) => println!("approximant n={n}: {w}"),
            Err(e) => println!("approximant n={n}: {e}"),
        }
    }
    Ok(())
}
