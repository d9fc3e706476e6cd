//! Fibonacci weights on 3-cells.
//!
//! Fix an edge of the tree; its three shared cells get weight 1. Walking away
//! from the edge, every new cell gets the sum of the three cells it meets at
//! the vertex where it appears. Weights grow along every outward path, so the
//! level sets are finite and can be counted by a walk pruned at the level.

use std::collections::{BTreeMap, VecDeque};

use super::CellId;
use crate::quad::Slot;

/// Weights of all cells within some tree depth of a basis edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibonacciAssignment {
    pub basis: [CellId; 3],
    pub values: BTreeMap<CellId, u64>,
}

impl FibonacciAssignment {
    /// Number of cells with weight exactly `n`.
    pub fn level_count(&self, n: u64) -> usize {
        self.values.values().filter(|&&v| v == n).count()
    }
}

struct Vertex {
    cells: [CellId; 4],
    weights: [u64; 4],
    back: Slot,
    depth: usize,
}

/// Breadth-first walk from both ends of the basis edge. `keep` sees every
/// created cell with its weight and decides whether to walk past it.
fn walk(basis: [CellId; 3], max_depth: usize, mut keep: impl FnMut(CellId, u64) -> bool) {
    let mut next = basis.iter().map(|c| c.0).max().unwrap_or(0) + 1;
    let mut fresh = || {
        next += 1;
        CellId(next - 1)
    };
    // the edge is the flip at slot D between two vertices sharing the basis
    let mut queue = VecDeque::new();
    for _ in 0..2 {
        let id = fresh();
        if max_depth >= 1 && keep(id, 3) {
            queue.push_back(Vertex {
                cells: [basis[0], basis[1], basis[2], id],
                weights: [1, 1, 1, 3],
                back: Slot::D,
                depth: 1,
            });
        }
    }
    while let Some(v) = queue.pop_front() {
        if v.depth >= max_depth {
            continue;
        }
        for slot in Slot::ALL {
            if slot == v.back {
                continue;
            }
            let w: u64 = slot.others().iter().map(|o| v.weights[o.index()]).sum();
            let id = fresh();
            if !keep(id, w) {
                continue;
            }
            let mut cells = v.cells;
            let mut weights = v.weights;
            cells[slot.index()] = id;
            weights[slot.index()] = w;
            queue.push_back(Vertex { cells, weights, back: slot, depth: v.depth + 1 });
        }
    }
}

/// Weights of every cell created within `depth` flips of the basis edge.
/// Depth 1 adds the two cells on either side of the edge, both of weight 3.
/// Fresh cells are numbered after the largest basis id in creation order.
pub fn fibonacci_values(basis_edge: [CellId; 3], depth: usize) -> FibonacciAssignment {
    let mut values: BTreeMap<CellId, u64> = basis_edge.iter().map(|&c| (c, 1)).collect();
    walk(basis_edge, depth, |id, w| {
        values.insert(id, w);
        true
    });
    FibonacciAssignment { basis: basis_edge, values }
}

/// `counts[n]` is the number of cells of weight `n`, for `n <= max_n`.
pub fn fibonacci_level_counts(max_n: u64) -> Vec<usize> {
    let mut counts = vec![0usize; max_n as usize + 1];
    if max_n >= 1 {
        counts[1] = 3;
    }
    walk([CellId(0), CellId(1), CellId(2)], usize::MAX, |_, w| {
        if w <= max_n {
            counts[w as usize] += 1;
            true
        } else {
            false
        }
    });
    counts
}

/// Jordan's totient `J_2(n) = n^2 prod_{p | n} (1 - 1/p^2)`.
pub fn jordan_totient_2(n: u64) -> u64 {
    let mut result = n * n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            result = result / (p * p) * (p * p - 1);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        result = result / (m * m) * (m * m - 1);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_one() {
        let f = fibonacci_values([CellId(0), CellId(1), CellId(2)], 1);
        let mut vals: Vec<u64> = f.values.values().copied().collect();
        vals.sort();
        assert_eq!(vals, vec![1, 1, 1, 3, 3]);
    }

    #[test]
    fn depth_two_sums() {
        let f = fibonacci_values([CellId(0), CellId(1), CellId(2)], 2);
        // each end vertex (1,1,1,3) has three outward flips giving 1+1+3 = 5
        assert_eq!(f.level_count(5), 6);
        assert_eq!(f.values.len(), 3 + 2 + 6);
    }

    #[test]
    fn totient() {
        let j: Vec<u64> = (1..=8).map(jordan_totient_2).collect();
        assert_eq!(j, vec![1, 3, 8, 12, 24, 24, 48, 48]);
    }

    #[test]
    fn level_counts_match_depth_walk() {
        // weight at depth k is at least 2k + 1, so depth 8 covers n <= 17
        let counts = fibonacci_level_counts(17);
        let f = fibonacci_values([CellId(0), CellId(1), CellId(2)], 8);
        for n in 1..=17u64 {
            assert_eq!(counts[n as usize], f.level_count(n), "n = {n}");
        }
    }
}
