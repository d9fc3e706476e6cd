//! Sinks, vertex types and a bounded breadth-first walk.

use markoff::tree::{classify_vertex, enumerate_cells, enumerate_faces, format_word, reduce_to_sink};
use markoff::{MarkoffQuad, Slot, C64};

fn main() -> markoff::Result<()> {
    let far = MarkoffQuad::from_real(4.0, 4.0, 4.0, 4.0).flip(Slot::D).flip(Slot::A).flip(Slot::B);
    let (sink, word) = reduce_to_sink(&far, 1000)?;
    println!("{far} reduces to {sink} by {}", format_word(&word));
    println!("vertex type at the start: {:?}", classify_vertex(&far, 1e-9)?.kind);
    println!("vertex type at the sink:  {:?}", classify_vertex(&sink, 1e-9)?.kind);

    for r in enumerate_cells(&sink, 500.0, 10_000)? {
        println!("  cell {:>3} = {:<6} via {}", r.id.0, r.value.re, format_word(&r.word));
    }
    let faces = enumerate_faces(&sink, 2000.0, 10_000)?;
    println!("{} faces with |ab| <= 2000", faces.len());

    // small complex entries: both roots of the completion, two vertex types
    let a = C64::new(0.5, 1.0);
    let (d_small, d_big) = markoff::quad::complete_quad(a, a, a);
    for d in [d_small, d_big] {
        let q = MarkoffQuad::new(a, a, a, d);
        let class = classify_vertex(&q, 1e-9)?;
        println!("{q}: {:?}, outgoing {:?}", class.kind, class.outgoing());
    }
    Ok(())
}
