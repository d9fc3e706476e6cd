//! Simple length spectra of a Fuchsian quad.
//!
//! ```text
//! cargo run --example length_spectrum -- 2,5,5,8 12
//! ```

use markoff::spectra::{count_s, one_sided_spectrum, two_sided_spectrum};
use markoff::{ExploreOptions, MarkoffQuad};

fn main() -> markoff::Result<()> {
    let mut args = std::env::args().skip(1);
    let q = match args.next() {
        Some(s) => markoff::cli::parse_quad(&s)?,
        None => MarkoffQuad::from_real(2.0, 5.0, 5.0, 8.0),
    };
    let l: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let opts = ExploreOptions::default();

    println!("one-sided curves of {q} shorter than {l}:");
    for e in one_sided_spectrum(&q, l, &opts)? {
        println!("  {:>10.6}  trace {:<12} cell {:?}", e.length.re, e.trace.re, e.cell);
    }
    println!("two-sided curves:");
    for e in two_sided_spectrum(&q, l, &opts)? {
        println!("  {:>10.6}  trace {:<12} cell {:?}", e.length.re, e.trace.re, e.cell);
    }
    for x in [5.0, 10.0, 15.0, 20.0] {
        println!("s({x}) = {}", count_s(&q, x, &opts)?);
    }
    Ok(())
}
