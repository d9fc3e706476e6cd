//! Flips, completion and the explicit matrices for a few quads.

use markoff::quad::{
    build_representation, complete_quad, format_complex, one_sided_length, two_sided_length, two_sided_trace,
};
use markoff::{MarkoffQuad, Slot, C64};

fn main() -> markoff::Result<()> {
    let q = MarkoffQuad::from_real(4.0, 4.0, 4.0, 4.0);
    println!("{q}  residual {:e}", q.residual());
    for s in Slot::ALL {
        println!("  flip {s}: {}", q.flip(s));
    }

    // the two roots of the completion quadratic
    let (d, d2) = complete_quad(C64::new(1.0, 0.0), C64::new(5.0, 0.0), C64::new(24.0, 0.0));
    println!("completing 1,5,24: d = {}, d' = {}", format_complex(d), format_complex(d2));

    let a = q[Slot::A];
    println!("one-sided length of a = 4: {}", one_sided_length(a)?);
    let e = two_sided_trace(a, q[Slot::B]);
    println!("two-sided trace ab - 2 = {e}, length {}", two_sided_length(e)?);

    let z = MarkoffQuad::new(C64::new(4.0, 0.5), C64::new(4.0, -0.3), C64::new(4.2, 0.1), C64::new(0.0, 0.0));
    let (_, d) = complete_quad(z[Slot::A], z[Slot::B], z[Slot::C]);
    let z = MarkoffQuad::new(z[Slot::A], z[Slot::B], z[Slot::C], d);
    let rep = build_representation(&z, 1e-9)?;
    println!("representation of {z}:");
    for (i, m) in rep.matrices().iter().enumerate() {
        println!("  M{} det {:.3} trace {:.6}", i + 1, m.det(), m.trace());
    }
    println!("  max deviation {:e}", rep.max_deviation(&z));
    Ok(())
}
