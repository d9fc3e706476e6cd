//! Positive integer quads: the reduced ones, orbits and classification.

use markoff::integral::{classify, enumerate_fundamental, enumerate_integral_below, int_flip, IntegerQuad};
use markoff::Slot;
use num_bigint::BigUint;

fn main() -> markoff::Result<()> {
    println!("reduced positive integer quads:");
    for q in enumerate_fundamental() {
        println!("  {q}");
    }

    let mut q = IntegerQuad::from_u64(2, 3, 10, 15);
    for s in [Slot::D, Slot::A, Slot::C, Slot::B, Slot::D, Slot::A] {
        q = int_flip(&q, s);
    }
    let (root, word) = classify(&q)?;
    println!("{q} -> {root} in {} flips", word.len());

    let all = enumerate_integral_below(&BigUint::from(1000u32));
    println!("{} integer quads with entries up to 1000", all.len());
    Ok(())
}
