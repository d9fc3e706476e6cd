//! Fibonacci weights around an edge and the spiral of values around a face.

use markoff::tree::{fibonacci_level_counts, fibonacci_values, jordan_totient_2, spiral_sequence};
use markoff::{CellId, C64};

fn main() {
    let f = fibonacci_values([CellId(0), CellId(1), CellId(2)], 4);
    // every weight is odd
    println!("{} cells within 4 flips; smallest weights:", f.values.len());
    for n in (1..=9).step_by(2) {
        println!("  weight {n:>2}: {}", f.level_count(n));
    }
    let counts = fibonacci_level_counts(31);
    for n in [5u64, 11, 21, 31] {
        println!("level {n}: {} cells, 4 J2(n) = {}", counts[n as usize], 4 * jordan_totient_2(n));
    }

    let c = |x: f64| C64::new(x, 0.0);
    let s = spiral_sequence(c(4.0), c(4.0), c(4.0), c(36.0), -3, 5);
    for n in -3..=5 {
        println!("c_{n:<2} = {}", s.get(n).unwrap().re);
    }
    println!("closed form deviation {:?}", s.max_closed_form_deviation());
}
