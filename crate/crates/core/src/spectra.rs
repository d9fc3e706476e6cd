//! Simple length spectra, systoles and growth fits.
//!
//! One-sided curves are 3-cells with length `2 arcsinh(a/2)`; two-sided curves
//! are 2-cells with length `2 arccosh((ab - 2)/2)`. Since
//! `|2 sinh(l/2)| <= 2 sinh(|l|/2)` and likewise for `cosh`, enumerating up to
//! those trace bounds finds every curve with `|l| < L`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{one_sided_length, two_sided_length, KleinSequence, MarkoffQuad, Slot, C64};
use crate::tree::{enumerate_cells_with, enumerate_faces_with, reduce_to_sink, CellId, ExploreOptions};

/// Flip limit for the reduction preceding every enumeration.
pub const REDUCE_STEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    OneSided,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum CellRef {
    Cell(CellId),
    Face(CellId, CellId),
}

/// One simple closed curve class. Cell ids are relative to the sink the input
/// was reduced to.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub kind: Sidedness,
    /// `a` for a one-sided curve, `e = ab - 2` for a two-sided one.
    pub trace: C64,
    pub length: C64,
    pub cell: CellRef,
    pub word: Vec<Slot>,
}

fn sink_of(q: &MarkoffQuad, tol: f64) -> Result<MarkoffQuad> {
    let q = q.validated(tol)?;
    Ok(reduce_to_sink(&q, REDUCE_STEPS)?.0)
}

fn sort_entries(v: &mut [SpectrumEntry]) {
    v.sort_by(|x, y| x.length.norm().total_cmp(&y.length.norm()).then_with(|| x.cell.cmp(&y.cell)));
}

fn one_sided_from_sink(sink: &MarkoffQuad, trace_bound: f64, opts: &ExploreOptions) -> Result<Vec<SpectrumEntry>> {
    enumerate_cells_with(sink, trace_bound, opts)?
        .into_iter()
        .map(|c| {
            Ok(SpectrumEntry {
                kind: Sidedness::OneSided,
                trace: c.value,
                length: one_sided_length(c.value)?,
                cell: CellRef::Cell(c.id),
                word: c.word,
            })
        })
        .collect()
}

fn two_sided_from_sink(sink: &MarkoffQuad, product_bound: f64, opts: &ExploreOptions) -> Result<Vec<SpectrumEntry>> {
    enumerate_faces_with(sink, product_bound, opts)?
        .into_iter()
        .map(|f| {
            let e = f.product - 2.0;
            Ok(SpectrumEntry {
                kind: Sidedness::TwoSided,
                trace: e,
                length: two_sided_length(e)?,
                cell: CellRef::Face(f.cells.0, f.cells.1),
                word: f.word,
            })
        })
        .collect()
}

/// One-sided curves with `|l| < max_length`, shortest first.
pub fn one_sided_spectrum(q: &MarkoffQuad, max_length: f64, opts: &ExploreOptions) -> Result<Vec<SpectrumEntry>> {
    if max_length.is_nan() || max_length <= 0.0 {
        return Ok(Vec::new());
    }
    let sink = sink_of(q, opts.tol)?;
    let bound = 2.0 * (max_length / 2.0).sinh();
    let mut v = one_sided_from_sink(&sink, bound, opts)?;
    v.retain(|e| e.length.norm() < max_length);
    sort_entries(&mut v);
    Ok(v)
}

/// Two-sided curves with `|l| < max_length`, shortest first.
pub fn two_sided_spectrum(q: &MarkoffQuad, max_length: f64, opts: &ExploreOptions) -> Result<Vec<SpectrumEntry>> {
    if max_length.is_nan() || max_length <= 0.0 {
        return Ok(Vec::new());
    }
    let sink = sink_of(q, opts.tol)?;
    let bound = 2.0 * (max_length / 2.0).cosh() + 2.0;
    let mut v = two_sided_from_sink(&sink, bound, opts)?;
    v.retain(|e| e.length.norm() < max_length);
    sort_entries(&mut v);
    Ok(v)
}

/// `s(L)`, the number of one-sided curves with `|l| < L`.
pub fn count_s(q: &MarkoffQuad, max_length: f64, opts: &ExploreOptions) -> Result<usize> {
    Ok(one_sided_spectrum(q, max_length, opts)?.len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Systole {
    pub length: C64,
    pub witness: SpectrumEntry,
    pub sink: MarkoffQuad,
}

/// Shortest simple closed curve.
///
/// Candidates are the sink entries, the one-sided curves of trace at most 4
/// and the two-sided curves with `|ab| <= 18`; a sink always has an entry of
/// modulus at most 4 on the Fuchsian locus, which caps the two-sided search.
pub fn systole(q: &MarkoffQuad, max_cells: usize) -> Result<Systole> {
    systole_with(q, &ExploreOptions::with_max_cells(max_cells))
}

pub fn systole_with(q: &MarkoffQuad, opts: &ExploreOptions) -> Result<Systole> {
    let sink = sink_of(q, opts.tol)?;
    let mut candidates: Vec<SpectrumEntry> = Vec::new();
    for s in Slot::ALL {
        candidates.push(SpectrumEntry {
            kind: Sidedness::OneSided,
            trace: sink[s],
            length: one_sided_length(sink[s])?,
            cell: CellRef::Cell(CellId(s.index() as u64)),
            word: Vec::new(),
        });
    }
    candidates.extend(one_sided_from_sink(&sink, 4.0, opts)?);
    candidates.extend(two_sided_from_sink(&sink, 18.0, opts)?);
    // stable: the earliest candidate wins ties, so one-sided beats two-sided
    let witness = candidates
        .into_iter()
        .reduce(|best, c| if c.length.norm() < best.length.norm() { c } else { best })
        .expect("four sink candidates");
    Ok(Systole { length: witness.length, witness, sink })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    /// `(L, s(L))` at every shell, zero counts included.
    pub samples: Vec<(f64, usize)>,
    pub exponent: f64,
    pub intercept_log_eta: f64,
    /// Root mean square of the log-log residuals.
    pub fit_residual: f64,
}

/// Least squares `log s = m log L + c` over the samples with `s > 0`.
pub fn fit_power_law(samples: &[(f64, usize)]) -> Result<GrowthFit> {
    let pts: Vec<(f64, f64)> = samples.iter().filter(|(_, s)| *s > 0).map(|&(l, s)| (l.ln(), (s as f64).ln())).collect();
    if pts.len() < 2 {
        return Err(Error::Domain("fewer than two shells with a nonzero count".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all shells at the same length".into()));
    }
    let m = sxy / sxx;
    let c = my - m * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - m * p.0 - c).powi(2)).sum();
    Ok(GrowthFit { samples: samples.to_vec(), exponent: m, intercept_log_eta: c, fit_residual: (rss / n).sqrt() })
}

/// Geometrically spaced lengths from `lmin` to `lmax` inclusive.
pub fn geometric_shells(lmin: f64, lmax: f64, shells: usize) -> Vec<f64> {
    let r = (lmax / lmin).powf(1.0 / (shells as f64 - 1.0));
    (0..shells).map(|k| if k + 1 == shells { lmax } else { lmin * r.powi(k as i32) }).collect()
}

fn check_window(lmin: f64, lmax: f64, shells: usize) -> Result<()> {
    if !(lmin > 0.0 && lmax > lmin && lmax.is_finite()) {
        return Err(Error::Domain(format!("need 0 < lmin < lmax, got [{lmin}, {lmax}]")));
    }
    if shells < 4 {
        return Err(Error::Domain(format!("need at least 4 shells, got {shells}")));
    }
    Ok(())
}

/// Fits `s(L) ~ L^m` on geometric shells in `[lmin, lmax]`. One enumeration at
/// `lmax` serves every shell.
pub fn growth_exponent(
    q: &MarkoffQuad,
    lmin: f64,
    lmax: f64,
    shells: usize,
    opts: &ExploreOptions,
) -> Result<GrowthFit> {
    check_window(lmin, lmax, shells)?;
    let mut lengths: Vec<f64> = one_sided_spectrum(q, lmax, opts)?.iter().map(|e| e.length.norm()).collect();
    lengths.sort_by(f64::total_cmp);
    let samples: Vec<(f64, usize)> =
        geometric_shells(lmin, lmax, shells).into_iter().map(|l| (l, lengths.partition_point(|&x| x < l))).collect();
    fit_power_law(&samples)
}

/// Lengths `2 arcsinh(a_i)` of the one-sided curves of a punctured Klein
/// bottle, walking the recursion both ways from the seed until every length
/// reaches `max_length`.
pub fn klein_lengths(big_a: C64, a0: C64, a1: C64, max_length: f64, tol: f64) -> Result<Vec<f64>> {
    let seed = KleinSequence::pair_residual(big_a, a0, a1).norm() / (a0 * a1).norm().max(1.0);
    if !seed.is_finite() {
        return Err(Error::NonFinite);
    }
    if seed > tol {
        return Err(Error::InvalidSeed(seed));
    }
    let len = |a: C64| (a.asinh() * 2.0).norm();
    let mut out = vec![len(a0), len(a1)];
    // forward from (a0, a1), then backward from (a1, a0)
    for (mut prev, mut cur) in [(a0, a1), (a1, a0)] {
        for _ in 0..100_000 {
            let next = big_a * cur - prev;
            prev = cur;
            cur = next;
            let l = len(cur);
            if l.is_nan() || l >= max_length {
                break;
            }
            out.push(l);
        }
    }
    out.retain(|&l| l < max_length);
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Growth fit for the Klein-bottle counting function, which is linear.
pub fn klein_growth_exponent(
    big_a: C64,
    a0: C64,
    a1: C64,
    lmin: f64,
    lmax: f64,
    shells: usize,
    tol: f64,
) -> Result<GrowthFit> {
    check_window(lmin, lmax, shells)?;
    let lengths = klein_lengths(big_a, a0, a1, lmax, tol)?;
    let samples: Vec<(f64, usize)> =
        geometric_shells(lmin, lmax, shells).into_iter().map(|l| (l, lengths.partition_point(|&x| x < l))).collect();
    fit_power_law(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q4() -> MarkoffQuad {
        MarkoffQuad::from_real(4.0, 4.0, 4.0, 4.0)
    }

    fn opts() -> ExploreOptions {
        ExploreOptions::default()
    }

    #[test]
    fn one_sided_examples() {
        let v = one_sided_spectrum(&q4(), 3.0, &opts()).unwrap();
        assert_eq!(v.len(), 4);
        assert!(v.iter().all(|e| (e.length.re - 2.0 * 2f64.asinh()).abs() < 1e-14));
        assert!(one_sided_spectrum(&q4(), 2.8, &opts()).unwrap().is_empty());
        let v = one_sided_spectrum(&q4(), 8.0, &opts()).unwrap();
        let t36: Vec<_> = v.iter().filter(|e| e.trace.re == 36.0).collect();
        assert_eq!(t36.len(), 4);
        assert!((t36[0].length.re - 2.0 * 18f64.asinh()).abs() < 1e-13);
        assert_eq!(count_s(&q4(), 7.2, &opts()).unwrap(), 8);
    }

    #[test]
    fn two_sided_examples() {
        let v = two_sided_spectrum(&q4(), 5.5, &opts()).unwrap();
        assert_eq!(v.len(), 6);
        assert!(v.iter().all(|e| e.trace.re == 14.0 && (e.length.re - 2.0 * 7f64.acosh()).abs() < 1e-13));
        assert!(two_sided_spectrum(&q4(), 5.0, &opts()).unwrap().is_empty());
        assert!(two_sided_spectrum(&q4(), 0.0, &opts()).unwrap().is_empty());
    }

    #[test]
    fn systoles() {
        let s = systole(&q4(), 100_000).unwrap();
        assert!((s.length.re - 2.0 * 2f64.asinh()).abs() < 1e-12);
        assert_eq!(s.witness.kind, Sidedness::OneSided);
        let s = systole(&MarkoffQuad::from_real(3.0, 3.0, 6.0, 6.0), 100_000).unwrap();
        assert!((s.length.re - 2.0 * 1.5f64.asinh()).abs() < 1e-12);
        assert_eq!(s.witness.trace.re, 3.0);
        let s = systole(&MarkoffQuad::from_real(1.0, 5.0, 24.0, 30.0), 100_000).unwrap();
        assert!((s.length.re - 2.0 * 0.5f64.asinh()).abs() < 1e-12);
        // a non-reduced start lands on the same answer
        let s = systole(&MarkoffQuad::from_real(484.0, 4.0, 4.0, 36.0), 100_000).unwrap();
        assert!((s.length.re - 2.0 * 2f64.asinh()).abs() < 1e-12);
    }

    #[test]
    fn power_law_fit() {
        let samples: Vec<(f64, usize)> = (1..=6).map(|k| (k as f64, 3 * k * k)).collect();
        let f = fit_power_law(&samples).unwrap();
        assert!((f.exponent - 2.0).abs() < 1e-12 && f.fit_residual < 1e-12);
        let flat = fit_power_law(&[(1.0, 5), (2.0, 5), (4.0, 5), (8.0, 5)]).unwrap();
        assert_eq!(flat.exponent, 0.0);
        assert!(fit_power_law(&[(1.0, 0), (2.0, 5)]).is_err());
    }

    #[test]
    fn klein_is_linear() {
        let c = |x: f64| C64::new(x, 0.0);
        let f = klein_growth_exponent(c(3.0), c(1.0), c(2.0), 20.0, 200.0, 8, 1e-9).unwrap();
        assert!((f.exponent - 1.0).abs() < 0.05, "{}", f.exponent);
    }
}
