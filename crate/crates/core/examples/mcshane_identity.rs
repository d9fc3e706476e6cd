//! Partial sums of h(ab) over faces approach 1/2.

use markoff::integral::fundamental_table;
use markoff::mcshane::{default_schedule, mcshane_partial, mcshane_verify};
use markoff::{ExploreOptions, MarkoffQuad, C64};

fn main() -> markoff::Result<()> {
    let opts = ExploreOptions::default();
    let q = MarkoffQuad::from_real(4.0, 4.0, 4.0, 4.0);
    for k in default_schedule(8) {
        let r = mcshane_partial(&q, k, &opts)?;
        println!("cutoff {k:>8}: {:>4} terms, sum {:.12}", r.term_count, r.partial_sum.re);
    }

    for root in fundamental_table() {
        let v = mcshane_verify(&root.to_markoff(), 1e-4, &default_schedule(16), &opts)?;
        println!("{root:<12} {:?} sum {:.8} ({} terms)", v.report.verdict, v.report.partial_sum.re, v.report.term_count);
    }

    // a complex deformation still sums to 1/2
    let (a, b, c) = (C64::new(5.0, 0.4), C64::new(5.0, -0.2), C64::new(5.0, 0.1));
    let (d, _) = markoff::quad::complete_quad(a, b, c);
    let z = MarkoffQuad::new(a, b, c, d);
    let v = mcshane_verify(&z, 1e-4, &default_schedule(16), &opts)?;
    println!("{z}: sum {}", v.report.partial_sum);
    Ok(())
}
