//! Power-law fit of the one-sided counting function.

use markoff::spectra::{geometric_shells, growth_exponent, klein_growth_exponent};
use markoff::{ExploreOptions, MarkoffQuad, C64};

fn main() -> markoff::Result<()> {
    let opts = ExploreOptions::default();
    println!("shells {:?}", geometric_shells(10.0, 34.0, 8).iter().map(|x| (x * 100.0).round() / 100.0).collect::<Vec<_>>());
    for v in [[4.0, 4.0, 4.0, 4.0], [2.0, 5.0, 5.0, 8.0], [1.0, 5.0, 24.0, 30.0]] {
        let q = MarkoffQuad::from_real(v[0], v[1], v[2], v[3]);
        let fit = growth_exponent(&q, 10.0, 34.0, 8, &opts)?;
        println!("{q:<12} m = {:.4}  log eta = {:.3}  residual {:.3}", fit.exponent, fit.intercept_log_eta, fit.fit_residual);
        println!("             counts {:?}", fit.samples.iter().map(|s| s.1).collect::<Vec<_>>());
    }
    let one = C64::new(1.0, 0.0);
    let k = klein_growth_exponent(C64::new(3.0, 0.0), one, 2.0 * one, 20.0, 200.0, 8, 1e-9)?;
    println!("Klein bottle, A = 3: m = {:.4}", k.exponent);
    Ok(())
}
