//! The BQ condition, the edge function `psi` and the McShane identity.
//!
//! For a BQ quad the sum of `h(ab)` over all 2-cells `{a, b}` is `1/2`, where
//! `h(x) = (1 - sqrt(1 - 4/x)) / 2`. Through `ab = e + 2` and
//! `e = 2 cosh(l/2)` each term is `1 / (1 + exp(l/2))` for the two-sided curve
//! of length `l`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{two_sided_length, MarkoffQuad, Slot, C64, DEFAULT_TOL};
use crate::tree::{
    enumerate_cells_with, enumerate_faces_with, reduce_to_sink, CellId, ExploreOptions, FaceRecord,
};

/// Distance to the segment `[0, 4]` treated as lying on it.
pub const SEGMENT_TOL: f64 = 1e-9;

/// Flip limit used when reducing before an enumeration.
pub const REDUCE_STEPS: usize = 100_000;

/// Distance from `x` to the real segment `[0, 4]`.
pub fn distance_to_segment(x: C64) -> f64 {
    let re = x.re.clamp(0.0, 4.0);
    (x - C64::new(re, 0.0)).norm()
}

/// `h(x) = 2 / (x (1 + sqrt(1 - 4/x)))`, equal to `(1 - sqrt(1 - 4/x)) / 2`
/// without the cancellation for large `|x|`.
pub fn h(x: C64) -> Result<C64> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if distance_to_segment(x) <= SEGMENT_TOL {
        return Err(Error::BranchCut(x));
    }
    let root = (C64::new(1.0, 0.0) - 4.0 / x).sqrt();
    Ok(2.0 / (x * (root + 1.0)))
}

/// The same term from the two-sided length: `1 / (1 + exp(l/2))` with
/// `l = 2 arccosh((x - 2)/2)`.
pub fn h_from_length(x: C64) -> Result<C64> {
    let l = two_sided_length(x - 2.0)?;
    Ok((C64::new(1.0, 0.0) + (l / 2.0).exp()).inv())
}

/// `psi` of the edge pointing into entry `slot`: `q_slot / (a + b + c + d)`.
pub fn psi(q: &MarkoffQuad, slot: Slot) -> Result<C64> {
    let s = q.sum();
    let others: C64 = slot.others().iter().map(|&o| q[o]).product();
    if s == C64::new(0.0, 0.0) {
        return Err(Error::ZeroDenominator("psi: a + b + c + d"));
    }
    if others == C64::new(0.0, 0.0) {
        return Err(Error::ZeroDenominator("psi: product of the other entries"));
    }
    Ok(q[slot] / s)
}

/// The second expression for `psi`, `(a + b + c + d) / (product of the other
/// three)`. It agrees with [`psi`] exactly when the quad relation holds.
pub fn psi_alt(q: &MarkoffQuad, slot: Slot) -> Result<C64> {
    let s = q.sum();
    let others: C64 = slot.others().iter().map(|&o| q[o]).product();
    if others == C64::new(0.0, 0.0) {
        return Err(Error::ZeroDenominator("psi: product of the other entries"));
    }
    Ok(s / others)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BqFace {
    pub cells: (CellId, CellId),
    #[serde(serialize_with = "crate::cli::ser_complex")]
    pub product: C64,
}

impl From<&FaceRecord> for BqFace {
    fn from(f: &FaceRecord) -> Self {
        BqFace { cells: f.cells, product: f.product }
    }
}

/// Findings of a bounded BQ check. Faces are numbered from the sink the input
/// reduces to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BqReport {
    pub cutoff: f64,
    /// Number of faces with `|ab| <= max(cutoff, 4)`.
    pub faces: usize,
    pub faces4: Vec<BqFace>,
    pub violations: Vec<BqFace>,
    pub cells_below2: usize,
    pub budget_hit: bool,
}

impl BqReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && !self.budget_hit
    }
}

fn reduced(q: &MarkoffQuad, tol: f64) -> Result<MarkoffQuad> {
    let q = q.validated(tol)?;
    Ok(reduce_to_sink(&q, REDUCE_STEPS)?.0)
}

/// Looks for faces with `ab` on `[0, 4]` among those with `|ab| <= max(k, 4)`.
///
/// Finiteness of the face sets cannot be certified from finite data; running
/// out of budget is reported through `budget_hit` instead.
pub fn check_bq(q: &MarkoffQuad, k: f64, opts: &ExploreOptions) -> Result<BqReport> {
    let cutoff = k.max(4.0);
    let mut report =
        BqReport { cutoff: k, faces: 0, faces4: vec![], violations: vec![], cells_below2: 0, budget_hit: false };
    let sink = match reduced(q, opts.tol) {
        Ok(s) => s,
        Err(e) if e.is_budget() => {
            report.budget_hit = true;
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    match enumerate_faces_with(&sink, cutoff, opts) {
        Ok(faces) => {
            report.faces = faces.len();
            for f in &faces {
                if f.product.norm() <= 4.0 {
                    report.faces4.push(f.into());
                }
                if distance_to_segment(f.product) <= SEGMENT_TOL {
                    report.violations.push(f.into());
                }
            }
        }
        Err(e) if e.is_budget() => {
            report.budget_hit = true;
            // the sink's own faces are still known
            let v = sink.entries();
            for i in 0..4 {
                for j in i + 1..4 {
                    let product = v[i] * v[j];
                    let face = BqFace { cells: (CellId(i as u64), CellId(j as u64)), product };
                    if product.norm() <= 4.0 {
                        report.faces4.push(face.clone());
                    }
                    if distance_to_segment(product) <= SEGMENT_TOL {
                        report.violations.push(face);
                    }
                }
            }
        }
        Err(e) => return Err(e),
    }
    match enumerate_cells_with(&sink, 2.0, opts) {
        Ok(cells) => report.cells_below2 = cells.len(),
        Err(e) if e.is_budget() => report.budget_hit = true,
        Err(e) => return Err(e),
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Within the target tolerance, with a small final shell.
    Converged,
    /// A finished sum that does not meet the target (or had none).
    Partial,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McShaneReport {
    #[serde(serialize_with = "crate::cli::ser_complex")]
    pub partial_sum: C64,
    pub term_count: usize,
    pub product_cutoff: f64,
    /// Largest `|h|` over terms with `|ab| > cutoff / 2`.
    pub last_shell_max: f64,
    /// Largest difference between `h(ab)` and `1 / (1 + exp(l/2))`.
    pub form_gap: f64,
    pub verdict: Verdict,
}

/// Compensated (Neumaier) sum, applied to both components.
#[derive(Default)]
struct KahanSum {
    sum: C64,
    comp: C64,
}

impl KahanSum {
    fn add(&mut self, x: C64) {
        let step = |s: &mut f64, c: &mut f64, x: f64| {
            let t = *s + x;
            if s.abs() >= x.abs() {
                *c += (*s - t) + x;
            } else {
                *c += (x - t) + *s;
            }
            *s = t;
        };
        step(&mut self.sum.re, &mut self.comp.re, x.re);
        step(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    fn total(&self) -> C64 {
        self.sum + self.comp
    }
}

fn require_bq(sink: &MarkoffQuad, opts: &ExploreOptions) -> Result<()> {
    // the sink's own faces first: degenerate inputs fail here without a walk
    let e = sink.entries();
    for i in 0..4 {
        for j in i + 1..4 {
            if distance_to_segment(e[i] * e[j]) <= SEGMENT_TOL {
                return Err(Error::BqViolation(e[i] * e[j]));
            }
        }
    }
    let faces = enumerate_faces_with(sink, 4.0, opts)?;
    match faces.iter().find(|f| distance_to_segment(f.product) <= SEGMENT_TOL) {
        Some(f) => Err(Error::BqViolation(f.product)),
        None => Ok(()),
    }
}

fn sum_faces(sink: &MarkoffQuad, cutoff: f64, opts: &ExploreOptions) -> Result<McShaneReport> {
    let faces = match enumerate_faces_with(sink, cutoff, opts) {
        Ok(f) => f,
        Err(e) if e.is_budget() => {
            return Ok(McShaneReport {
                partial_sum: C64::new(0.0, 0.0),
                term_count: 0,
                product_cutoff: cutoff,
                last_shell_max: 0.0,
                form_gap: 0.0,
                verdict: Verdict::BudgetExceeded,
            })
        }
        Err(e) => return Err(e),
    };
    let mut acc = KahanSum::default();
    let mut last_shell_max: f64 = 0.0;
    let mut form_gap: f64 = 0.0;
    // faces arrive sorted by id pair, which fixes the summation order
    for f in &faces {
        let term = h(f.product)?;
        acc.add(term);
        if f.product.norm() > cutoff / 2.0 {
            last_shell_max = last_shell_max.max(term.norm());
        }
        form_gap = form_gap.max((term - h_from_length(f.product)?).norm());
    }
    Ok(McShaneReport {
        partial_sum: acc.total(),
        term_count: faces.len(),
        product_cutoff: cutoff,
        last_shell_max,
        form_gap,
        verdict: Verdict::Partial,
    })
}

/// Sum of `h(ab)` over all faces with `|ab| <= product_cutoff`.
pub fn mcshane_partial(q: &MarkoffQuad, product_cutoff: f64, opts: &ExploreOptions) -> Result<McShaneReport> {
    let sink = reduced(q, opts.tol)?;
    require_bq(&sink, opts)?;
    sum_faces(&sink, product_cutoff, opts)
}

/// Cutoffs `16 * 4^k`, `k = 0..steps`.
pub fn default_schedule(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| 16.0 * 4f64.powi(k as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McShaneVerification {
    pub pass: bool,
    pub target_tol: f64,
    pub report: McShaneReport,
    /// `(cutoff, partial sum)` for every completed step of the schedule.
    #[serde(skip)]
    pub history: Vec<(f64, C64)>,
}

/// Raises the cutoff along `schedule` until the partial sum is within
/// `target_tol` of `1/2` and the last shell is below `target_tol / 10`.
pub fn mcshane_verify(
    q: &MarkoffQuad,
    target_tol: f64,
    schedule: &[f64],
    opts: &ExploreOptions,
) -> Result<McShaneVerification> {
    let sink = reduced(q, opts.tol)?;
    require_bq(&sink, opts)?;
    let mut history = Vec::new();
    let mut last: Option<McShaneReport> = None;
    for &cutoff in schedule {
        let mut report = sum_faces(&sink, cutoff, opts)?;
        if report.verdict == Verdict::BudgetExceeded {
            // keep the last finished sum if there is one
            let report = match last {
                Some(mut r) => {
                    r.verdict = Verdict::BudgetExceeded;
                    r
                }
                None => report,
            };
            return Ok(McShaneVerification { pass: false, target_tol, report, history });
        }
        history.push((cutoff, report.partial_sum));
        let close = (report.partial_sum - 0.5).norm() <= target_tol;
        if close && report.last_shell_max <= target_tol / 10.0 && report.form_gap <= 1e-10 {
            report.verdict = Verdict::Converged;
            return Ok(McShaneVerification { pass: true, target_tol, report, history });
        }
        last = Some(report);
    }
    let report = last.ok_or_else(|| Error::Domain("empty cutoff schedule".into()))?;
    Ok(McShaneVerification { pass: false, target_tol, report, history })
}

/// Strips immediate backtracks (`i i`) so that each word names a unique
/// vertex.
pub fn reduce_word(word: &[Slot]) -> Vec<Slot> {
    let mut out: Vec<Slot> = Vec::with_capacity(word.len());
    for &s in word {
        if out.last() == Some(&s) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    out
}

/// Sum of `psi` over the edges entering a finite subtree from outside. The
/// subtree is given as flip words from `q`; it must contain the empty word and
/// be closed under dropping the last letter.
pub fn finite_tree_psi_sum(q: &MarkoffQuad, tree: &[Vec<Slot>]) -> Result<C64> {
    use std::collections::{BTreeMap, BTreeSet};
    let q = q.validated(DEFAULT_TOL)?;
    let words: BTreeSet<Vec<Slot>> = tree.iter().map(|w| reduce_word(w)).collect();
    if !words.contains(&Vec::new()) {
        return Err(Error::DisconnectedTree("root vertex missing".into()));
    }
    for w in &words {
        if let Some((_, parent)) = w.split_last() {
            if !words.contains(parent) {
                return Err(Error::DisconnectedTree(format!(
                    "vertex {} has no parent in the tree",
                    crate::tree::format_word(w)
                )));
            }
        }
    }
    // values by breadth, parents first
    let mut values: BTreeMap<&Vec<Slot>, MarkoffQuad> = BTreeMap::new();
    let mut by_len: Vec<&Vec<Slot>> = words.iter().collect();
    by_len.sort_by_key(|w| w.len());
    let mut acc = KahanSum::default();
    for w in by_len {
        let v = match w.split_last() {
            None => q,
            Some((&last, parent)) => values[&parent.to_vec()].flip(last),
        };
        values.insert(w, v);
        for s in Slot::ALL {
            let mut child = w.clone();
            if child.last() == Some(&s) {
                child.pop();
            } else {
                child.push(s);
            }
            if !words.contains(&child) {
                acc.add(psi(&v, s)?);
            }
        }
    }
    Ok(acc.total())
}

/// Flip words of the ball of the given radius around the root.
pub fn ball(radius: usize) -> Vec<Vec<Slot>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for s in Slot::ALL {
                if (w as &Vec<Slot>).last() != Some(&s) {
                    let mut c: Vec<Slot> = w.clone();
                    c.push(s);
                    next.push(c);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn q4() -> MarkoffQuad {
        MarkoffQuad::from_real(4.0, 4.0, 4.0, 4.0)
    }

    #[test]
    fn h_values() {
        assert!((h(c(16.0)).unwrap().re - (1.0 - 3f64.sqrt() / 2.0) / 2.0).abs() < 1e-15);
        assert!((h(c(1e8)).unwrap().re * 1e8 - 1.0).abs() < 1e-7);
        assert!((h(c(-4.0)).unwrap().re - (1.0 - 2f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!(matches!(h(c(2.0)), Err(Error::BranchCut(_))));
        assert!(matches!(h(c(0.0)), Err(Error::BranchCut(_))));
        assert!(h(C64::new(2.0, 1e-3)).is_ok());
        for x in [4.5, 16.0, 144.0, 1e6] {
            assert!((h(c(x)).unwrap() - h_from_length(c(x)).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn psi_relations() {
        for s in Slot::ALL {
            assert_eq!(psi(&q4(), s).unwrap(), c(0.25));
            assert_eq!(psi_alt(&q4(), s).unwrap(), c(0.25));
        }
        let q = MarkoffQuad::from_real(1.0, 5.0, 24.0, 30.0);
        let total: C64 = Slot::ALL.iter().map(|&s| psi(&q, s).unwrap()).sum();
        assert!((total - 1.0).norm() < 1e-15);
        let edge = psi(&q4(), Slot::D).unwrap() + psi(&q4().flip(Slot::D), Slot::D).unwrap();
        assert!((edge - 1.0).norm() < 1e-15);
        assert!(psi(&MarkoffQuad::from_real(0.0, 0.0, 0.0, 0.0), Slot::A).is_err());
    }

    #[test]
    fn bq_reports() {
        let opts = ExploreOptions::default();
        let r = check_bq(&q4(), 16.0, &opts).unwrap();
        assert_eq!((r.faces, r.violations.len(), r.faces4.len()), (6, 0, 0));
        // every face of the zero quad is degenerate, so the walk never ends
        let small = ExploreOptions::with_max_cells(1000);
        let r = check_bq(&MarkoffQuad::from_real(0.0, 0.0, 0.0, 0.0), 4.0, &small).unwrap();
        assert!(!r.violations.is_empty() && r.budget_hit);
        let r = check_bq(&MarkoffQuad::from_real(2.0, 5.0, 5.0, 8.0), 10.0, &opts).unwrap();
        assert!(r.violations.is_empty() && r.passed());
        assert_eq!(r.faces, 2);
    }

    #[test]
    fn partial_sums() {
        let opts = ExploreOptions::default();
        let r = mcshane_partial(&q4(), 16.0, &opts).unwrap();
        assert_eq!(r.term_count, 6);
        assert!((r.partial_sum.re - 6.0 * h(c(16.0)).unwrap().re).abs() < 1e-15);
        assert!((r.partial_sum.re - 0.401_923_788_646_684).abs() < 1e-12);
        let r = mcshane_partial(&q4(), 144.0, &opts).unwrap();
        assert_eq!(r.term_count, 18);
        assert!((r.partial_sum.re - 0.485_844_005_547_068).abs() < 1e-12);
        assert_eq!(mcshane_partial(&q4(), 15.0, &opts).unwrap().term_count, 0);
        assert!(matches!(
            mcshane_partial(&MarkoffQuad::from_real(0.0, 0.0, 0.0, 0.0), 16.0, &opts),
            Err(Error::BqViolation(_))
        ));
    }

    #[test]
    fn verify_4444() {
        let v = mcshane_verify(&q4(), 1e-3, &default_schedule(12), &ExploreOptions::default()).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(v.report.partial_sum.re <= 0.5);
        for w in v.history.windows(2) {
            assert!(w[1].1.re >= w[0].1.re);
        }
    }

    #[test]
    fn psi_sums_on_subtrees() {
        let q = q4();
        assert!((finite_tree_psi_sum(&q, &[vec![]]).unwrap() - 1.0).norm() < 1e-15);
        let edge = vec![vec![], vec![Slot::D]];
        assert!((finite_tree_psi_sum(&q, &edge).unwrap() - 1.0).norm() < 1e-12);
        assert!((finite_tree_psi_sum(&q, &ball(2)).unwrap() - 1.0).norm() < 1e-10);
        let gap = vec![vec![], vec![Slot::A, Slot::B]];
        assert!(matches!(finite_tree_psi_sum(&q, &gap), Err(Error::DisconnectedTree(_))));
        assert!(finite_tree_psi_sum(&q, &[vec![Slot::A]]).is_err());
    }

    #[test]
    fn word_reduction() {
        use Slot::*;
        assert_eq!(reduce_word(&[A, B, B, C]), vec![A, C]);
        assert_eq!(reduce_word(&[A, A]), Vec::<Slot>::new());
        assert_eq!(ball(1).len(), 5);
        assert_eq!(ball(2).len(), 17);
    }
}
