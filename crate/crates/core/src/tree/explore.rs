//! Pruned breadth-first enumeration of 3-cells and 2-cells.
//!
//! The walk starts at the given vertex and visits children in slot order 1..4
//! without immediate backtracking, so every tree vertex is reached at most
//! once and every new cell is created exactly once. Cell ids follow discovery
//! order: the root cells are 0..3 and the cell created at the k-th visited
//! non-root vertex is `3 + k`.
//!
//! A flip is followed only if the new value is small enough to matter or is
//! smaller than some value it sits next to. The second clause keeps every
//! descending direction open, which is what makes the enumeration complete
//! from a reduced start.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use super::CellId;
use crate::error::{Error, Result};
use crate::quad::{MarkoffQuad, Slot, C64, DEFAULT_TOL};
use crate::DEFAULT_MAX_CELLS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExploreOptions {
    /// Hard cap on the number of cells created, root cells included.
    pub max_cells: usize,
    /// Worker threads; anything above 1 explores the four root subtrees in
    /// parallel. Output is identical either way.
    pub threads: usize,
    pub tol: f64,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { max_cells: DEFAULT_MAX_CELLS, threads: 1, tol: DEFAULT_TOL }
    }
}

impl ExploreOptions {
    pub fn with_max_cells(max_cells: usize) -> Self {
        ExploreOptions { max_cells, ..Default::default() }
    }
}

/// One 3-cell with its value and the flip word leading to the vertex where it
/// was created.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub id: CellId,
    pub value: C64,
    pub word: Vec<Slot>,
}

/// One 2-cell, identified by its two 3-cells (`cells.0 < cells.1`).
#[derive(Debug, Clone, PartialEq)]
pub struct FaceRecord {
    pub cells: (CellId, CellId),
    pub values: (C64, C64),
    pub product: C64,
    pub word: Vec<Slot>,
}

struct Budget {
    used: AtomicUsize,
    limit: usize,
}

impl Budget {
    fn take(&self, n: usize) -> Result<()> {
        let before = self.used.fetch_add(n, Ordering::Relaxed);
        if before + n > self.limit {
            Err(Error::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Parent links of one walk. Node 0 is the start vertex.
struct Arena {
    parent: Vec<u32>,
    mv: Vec<Slot>,
    depth: Vec<u32>,
}

impl Arena {
    fn word(&self, mut node: usize) -> Vec<Slot> {
        let mut w = Vec::with_capacity(self.depth[node] as usize);
        while node != 0 {
            w.push(self.mv[node]);
            node = self.parent[node] as usize;
        }
        w.reverse();
        w
    }
}

struct Visit<'a> {
    node: usize,
    values: &'a [C64; 4],
    cells: &'a [u64; 4],
    created: Option<Slot>,
}

/// Breadth-first walk from one vertex. The cell created at node `k` gets the
/// local id `base + k`.
fn walk(
    values: [C64; 4],
    cells: [u64; 4],
    start_created: Option<Slot>,
    base: u64,
    budget: &Budget,
    keep: &(dyn Fn(C64, [C64; 3]) -> bool + Sync),
    visit: &mut dyn FnMut(Visit<'_>),
) -> Result<Arena> {
    let mut arena = Arena { parent: vec![0], mv: vec![Slot::A], depth: vec![0] };
    visit(Visit { node: 0, values: &values, cells: &cells, created: start_created });
    let mut queue = VecDeque::new();
    queue.push_back((values, cells, 0usize, start_created));
    while let Some((vals, cs, node, back)) = queue.pop_front() {
        let q = MarkoffQuad::from_entries(vals);
        for slot in Slot::ALL {
            if Some(slot) == back {
                continue;
            }
            let v = q.flipped_value(slot);
            let retained = slot.others().map(|s| vals[s.index()]);
            if !keep(v, retained) {
                continue;
            }
            budget.take(1)?;
            let child = arena.parent.len();
            arena.parent.push(node as u32);
            arena.mv.push(slot);
            arena.depth.push(arena.depth[node] + 1);
            let mut cvals = vals;
            cvals[slot.index()] = v;
            let mut ccells = cs;
            ccells[slot.index()] = base + child as u64;
            visit(Visit { node: child, values: &cvals, cells: &ccells, created: Some(slot) });
            queue.push_back((cvals, ccells, child, Some(slot)));
        }
    }
    Ok(arena)
}

/// What a visit emits: positions in the local arena plus local cell ids.
enum Emit {
    Cell { node: usize, id: u64, value: C64 },
    Face { node: usize, ids: (u64, u64), values: (C64, C64) },
}

/// Runs the walk from the root, optionally one subtree per thread, and maps
/// every emitted record to global ids and words.
fn explore(
    q: &MarkoffQuad,
    opts: &ExploreOptions,
    keep: &(dyn Fn(C64, [C64; 3]) -> bool + Sync),
    emit: &(dyn Fn(&Visit<'_>, &mut Vec<Emit>) + Sync),
) -> Result<(Vec<CellRecord>, Vec<FaceRecord>)> {
    let q = q.validated(opts.tol)?;
    let budget = Budget { used: AtomicUsize::new(0), limit: opts.max_cells };
    budget.take(4)?;
    let root_vals = q.entries();
    let root_cells = [0u64, 1, 2, 3];

    if opts.threads <= 1 {
        let mut out = Vec::new();
        let arena = walk(root_vals, root_cells, None, 3, &budget, keep, &mut |v| emit(&v, &mut out))?;
        let id = |local: u64| CellId(local);
        return Ok(finish(out, |node| arena.word(node), id));
    }

    // one subtree per root child; local ids: root cells 0..3, node k -> 4 + k
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let mut root_out = Vec::new();
    emit(&Visit { node: 0, values: &root_vals, cells: &root_cells, created: None }, &mut root_out);
    let subtrees: Vec<Option<(Arena, Vec<Emit>)>> = pool.install(|| {
        Slot::ALL
            .par_iter()
            .map(|&slot| {
                let v = q.flipped_value(slot);
                let retained = slot.others().map(|s| root_vals[s.index()]);
                if !keep(v, retained) {
                    return Ok(None);
                }
                budget.take(1)?;
                let mut vals = root_vals;
                vals[slot.index()] = v;
                let mut cells = root_cells;
                cells[slot.index()] = 4;
                let mut out = Vec::new();
                let arena = walk(vals, cells, Some(slot), 4, &budget, keep, &mut |v| emit(&v, &mut out))?;
                Ok(Some((arena, out)))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    // global rank: by depth, then subtree, then local BFS position
    let mut rank: Vec<Vec<u64>> = subtrees
        .iter()
        .map(|s| s.as_ref().map_or(Vec::new(), |(a, _)| vec![0; a.parent.len()]))
        .collect();
    let mut cursor = [0usize; 4];
    let mut next = 0u64;
    let mut depth = 0u32;
    loop {
        let mut any = false;
        for (t, sub) in subtrees.iter().enumerate() {
            if let Some((arena, _)) = sub {
                while cursor[t] < arena.depth.len() && arena.depth[cursor[t]] == depth {
                    rank[t][cursor[t]] = next;
                    next += 1;
                    cursor[t] += 1;
                }
                any |= cursor[t] < arena.depth.len();
            }
        }
        if !any {
            break;
        }
        depth += 1;
    }

    let (mut cells, mut faces) = finish(root_out, |_| Vec::new(), CellId);
    for (t, sub) in subtrees.into_iter().enumerate() {
        let Some((arena, out)) = sub else { continue };
        let slot = Slot::ALL[t];
        let ranks = &rank[t];
        let word = |node: usize| {
            let mut w = vec![slot];
            w.extend(arena.word(node));
            w
        };
        let id = |local: u64| if local < 4 { CellId(local) } else { CellId(4 + ranks[(local - 4) as usize]) };
        // the root visit is emitted once above, not per subtree
        let (c, f) = finish(out, word, id);
        cells.extend(c);
        faces.extend(f);
    }
    cells.sort_by_key(|c| c.id);
    faces.sort_by_key(|f| f.cells);
    Ok((cells, faces))
}

fn finish(
    out: Vec<Emit>,
    word: impl Fn(usize) -> Vec<Slot>,
    id: impl Fn(u64) -> CellId,
) -> (Vec<CellRecord>, Vec<FaceRecord>) {
    let mut cells = Vec::new();
    let mut faces = Vec::new();
    for e in out {
        match e {
            Emit::Cell { node, id: local, value } => {
                cells.push(CellRecord { id: id(local), value, word: word(node) });
            }
            Emit::Face { node, ids, values } => {
                let (x, y) = (id(ids.0), id(ids.1));
                let (cells_pair, values) = if x < y { ((x, y), values) } else { ((y, x), (values.1, values.0)) };
                faces.push(FaceRecord { cells: cells_pair, values, product: values.0 * values.1, word: word(node) });
            }
        }
    }
    cells.sort_by_key(|c| c.id);
    faces.sort_by_key(|f| f.cells);
    (cells, faces)
}

fn max_norm(r: [C64; 3]) -> f64 {
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn min_norm(r: [C64; 3]) -> f64 {
    r.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
}

/// Every 3-cell with `|value| <= bound`, in id order.
///
/// The start should be reduced (see [`super::reduce_to_sink`]); from a
/// non-reduced start cells behind large intermediate values can be missed.
pub fn enumerate_cells(q: &MarkoffQuad, bound: f64, max_cells: usize) -> Result<Vec<CellRecord>> {
    enumerate_cells_with(q, bound, &ExploreOptions::with_max_cells(max_cells))
}

pub fn enumerate_cells_with(q: &MarkoffQuad, bound: f64, opts: &ExploreOptions) -> Result<Vec<CellRecord>> {
    let keep = move |v: C64, r: [C64; 3]| {
        let n = v.norm();
        n <= bound || n < max_norm(r)
    };
    let emit = move |v: &Visit<'_>, out: &mut Vec<Emit>| match v.created {
        None => {
            for s in Slot::ALL {
                if v.values[s.index()].norm() <= bound {
                    out.push(Emit::Cell { node: v.node, id: v.cells[s.index()], value: v.values[s.index()] });
                }
            }
        }
        Some(s) => {
            if v.values[s.index()].norm() <= bound {
                out.push(Emit::Cell { node: v.node, id: v.cells[s.index()], value: v.values[s.index()] });
            }
        }
    };
    Ok(explore(q, opts, &keep, &emit)?.0)
}

/// Every 2-cell with `|ab| <= product_bound`, deduplicated by its pair of cell
/// ids, in id-pair order.
pub fn enumerate_faces(q: &MarkoffQuad, product_bound: f64, max_cells: usize) -> Result<Vec<FaceRecord>> {
    enumerate_faces_with(q, product_bound, &ExploreOptions::with_max_cells(max_cells))
}

pub fn enumerate_faces_with(q: &MarkoffQuad, product_bound: f64, opts: &ExploreOptions) -> Result<Vec<FaceRecord>> {
    let keep = move |v: C64, r: [C64; 3]| {
        let n = v.norm();
        n * min_norm(r) <= product_bound || n < max_norm(r)
    };
    let emit = move |v: &Visit<'_>, out: &mut Vec<Emit>| {
        let mut push = |i: usize, j: usize| {
            let (x, y) = (v.values[i], v.values[j]);
            if (x * y).norm() <= product_bound {
                out.push(Emit::Face { node: v.node, ids: (v.cells[i], v.cells[j]), values: (x, y) });
            }
        };
        match v.created {
            None => {
                for i in 0..4 {
                    for j in i + 1..4 {
                        push(i, j);
                    }
                }
            }
            Some(s) => {
                for o in s.others() {
                    push(s.index(), o.index());
                }
            }
        }
    };
    Ok(explore(q, opts, &keep, &emit)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q4() -> MarkoffQuad {
        MarkoffQuad::from_real(4.0, 4.0, 4.0, 4.0)
    }

    #[test]
    fn cells_of_4444() {
        let cells = enumerate_cells(&q4(), 36.0, 1000).unwrap();
        assert_eq!(cells.len(), 8);
        let vals: Vec<f64> = cells.iter().map(|c| c.value.re).collect();
        assert_eq!(vals, vec![4.0, 4.0, 4.0, 4.0, 36.0, 36.0, 36.0, 36.0]);
        assert_eq!(cells[7].word, vec![Slot::D]);
        assert_eq!(enumerate_cells(&q4(), 4.0, 1000).unwrap().len(), 4);
        assert_eq!(enumerate_cells(&q4(), 3.0, 1000).unwrap().len(), 0);
    }

    #[test]
    fn faces_of_4444() {
        let faces = enumerate_faces(&q4(), 16.0, 1000).unwrap();
        assert_eq!(faces.len(), 6);
        assert!(faces.iter().all(|f| f.product.re == 16.0));
        assert_eq!(enumerate_faces(&q4(), 144.0, 1000).unwrap().len(), 18);
        assert!(enumerate_faces(&q4(), 15.9, 1000).unwrap().is_empty());
    }

    #[test]
    fn budget_guard() {
        assert_eq!(enumerate_cells(&q4(), 1e6, 10), Err(Error::BudgetExceeded { limit: 10 }));
    }

    #[test]
    fn parallel_matches_sequential() {
        for root in [q4(), MarkoffQuad::from_real(1.0, 5.0, 24.0, 30.0), MarkoffQuad::from_real(2.0, 5.0, 5.0, 8.0)] {
            let seq = ExploreOptions::default();
            let par = ExploreOptions { threads: 4, ..seq };
            assert_eq!(
                enumerate_cells_with(&root, 1e5, &seq).unwrap(),
                enumerate_cells_with(&root, 1e5, &par).unwrap()
            );
            assert_eq!(
                enumerate_faces_with(&root, 1e5, &seq).unwrap(),
                enumerate_faces_with(&root, 1e5, &par).unwrap()
            );
        }
    }
}
