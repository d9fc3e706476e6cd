//! The curve complex of a Markoff quad.
//!
//! Vertices of the 4-regular tree are quads; an edge is a flip. A 3-cell (a
//! one-sided curve) is the set of vertices sharing one entry, so it keeps its
//! identity across every flip that does not replace it. Cells are tracked by
//! [`CellId`] rather than by value because values collide freely.

mod explore;
mod fibonacci;
mod spiral;

pub use explore::{
    enumerate_cells, enumerate_cells_with, enumerate_faces, enumerate_faces_with, CellRecord,
    ExploreOptions, FaceRecord,
};
pub use fibonacci::{fibonacci_level_counts, fibonacci_values, jordan_totient_2, FibonacciAssignment};
pub use spiral::{spiral_sequence, SpiralClosedForm, SpiralSequence};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{MarkoffQuad, Slot};

/// Relative tolerance below which two magnitudes count as tied.
pub const TIE_TOL: f64 = 1e-12;

/// Identity of a 3-cell, assigned in discovery order; the root cells are 0..3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub u64);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A vertex of the curve complex.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexNode {
    pub cells: [CellId; 4],
    pub values: MarkoffQuad,
    pub parent_move: Option<Slot>,
    pub depth: usize,
}

/// Root vertex with cells `0, 1, 2, 3`.
pub fn root_node(q: &MarkoffQuad, tol: f64) -> Result<ComplexNode> {
    Ok(ComplexNode {
        cells: [CellId(0), CellId(1), CellId(2), CellId(3)],
        values: q.validated(tol)?,
        parent_move: None,
        depth: 0,
    })
}

impl ComplexNode {
    /// The neighbour across `slot`; the replaced cell gets `next_id`.
    pub fn apply_flip(&self, slot: Slot, next_id: CellId) -> ComplexNode {
        let mut cells = self.cells;
        cells[slot.index()] = next_id;
        ComplexNode {
            cells,
            values: self.values.flip(slot),
            parent_move: Some(slot),
            depth: self.depth + 1,
        }
    }
}

/// Orientation of the edge leaving a vertex through one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeOrientation {
    /// The flip strictly decreases the magnitude.
    Outgoing,
    Incoming,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    Sink,
    Funnel,
    Saddle2,
    Saddle3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexClass {
    pub kind: VertexKind,
    pub edges: [EdgeOrientation; 4],
}

impl VertexClass {
    pub fn outgoing(&self) -> Vec<Slot> {
        Slot::ALL
            .into_iter()
            .filter(|s| self.edges[s.index()] == EdgeOrientation::Outgoing)
            .collect()
    }
}

fn orientation(q: &MarkoffQuad, slot: Slot) -> EdgeOrientation {
    let old = q[slot].norm();
    let new = q.flipped_value(slot).norm();
    let slack = TIE_TOL * old.max(new);
    if new < old - slack {
        EdgeOrientation::Outgoing
    } else if new > old + slack {
        EdgeOrientation::Incoming
    } else {
        EdgeOrientation::Tie
    }
}

/// Orients the four edges at `q` and classifies the vertex. Ties count as
/// incoming.
pub fn classify_vertex(q: &MarkoffQuad, tol: f64) -> Result<VertexClass> {
    let q = q.validated(tol)?;
    let edges = Slot::ALL.map(|s| orientation(&q, s));
    let out = edges.iter().filter(|e| **e == EdgeOrientation::Outgoing).count();
    let kind = match out {
        0 => VertexKind::Sink,
        1 => VertexKind::Funnel,
        2 => VertexKind::Saddle2,
        3 => VertexKind::Saddle3,
        _ => return Err(Error::SourceVertex),
    };
    Ok(VertexClass { kind, edges })
}

/// Follows strictly decreasing flips until none is left.
///
/// At each step the decreasing flip of the largest-magnitude entry is taken,
/// lowest slot first on ties. The returned word lists the flips in the order
/// applied.
pub fn reduce_to_sink(q: &MarkoffQuad, max_steps: usize) -> Result<(MarkoffQuad, Vec<Slot>)> {
    if !q.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut cur = *q;
    let mut word = Vec::new();
    loop {
        let mut best: Option<(Slot, f64)> = None;
        for s in Slot::ALL {
            if orientation(&cur, s) == EdgeOrientation::Outgoing {
                let m = cur[s].norm();
                if best.is_none_or(|(_, bm)| m > bm) {
                    best = Some((s, m));
                }
            }
        }
        let Some((slot, _)) = best else {
            return Ok((cur, word));
        };
        if word.len() >= max_steps {
            return Err(Error::MaxStepsExceeded(max_steps));
        }
        cur = cur.flip(slot);
        word.push(slot);
    }
}

/// Formats a flip word as `1.4.2`; the empty word is `-`.
pub fn format_word(word: &[Slot]) -> String {
    if word.is_empty() {
        return "-".into();
    }
    word.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
}
