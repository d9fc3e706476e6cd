//! The systole never beats the (4,4,4,4) surface.

use markoff::coords::sample_fuchsian_quad;
use markoff::spectra::systole;
use markoff::MarkoffQuad;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> markoff::Result<()> {
    let best = systole(&MarkoffQuad::from_real(4.0, 4.0, 4.0, 4.0), 1_000_000)?;
    println!("systole of 4,4,4,4: {} (2 asinh 2 = {})", best.length.re, 2.0 * 2f64.asinh());

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut top = 0.0f64;
    for _ in 0..2000 {
        let q = sample_fuchsian_quad(&mut rng);
        let s = systole(&q, 1_000_000)?;
        if s.length.re > top {
            top = s.length.re;
            println!("new largest {:.9} at sink {} ({:?})", top, s.sink, s.witness.kind);
        }
    }
    Ok(())
}
