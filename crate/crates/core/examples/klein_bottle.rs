//! One-sided traces of a punctured Klein bottle.

use markoff::quad::{klein_sequence, klein_sequence_exact};
use markoff::spectra::klein_lengths;
use markoff::C64;
use num_bigint::BigInt;
use num_rational::BigRational;

fn main() -> markoff::Result<()> {
    let c = |x: f64| C64::new(x, 0.0);
    let seq = klein_sequence(c(3.0), c(1.0), c(2.0), 12, 1e-12)?;
    println!("terms {:?}", seq.terms.iter().map(|z| z.re).collect::<Vec<_>>());
    println!("growth {} (ratio of last two {})", seq.lambda_plus.re, (seq.terms[11] / seq.terms[10]).re);

    let r = |n: i64| BigRational::from_integer(BigInt::from(n));
    let exact = klein_sequence_exact(&r(3), &r(1), &r(2), 40)?;
    println!("40th term exactly: {}", exact[39]);

    let lengths = klein_lengths(c(3.0), c(1.0), c(2.0), 30.0, 1e-12)?;
    println!("{} one-sided lengths below 30: {:?}", lengths.len(), &lengths[..lengths.len().min(6)]);
    Ok(())
}
