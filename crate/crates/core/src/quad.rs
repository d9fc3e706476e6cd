//! Algebra of Markoff quads.
//!
//! A Markoff quad is a point `(a, b, c, d)` of the hypersurface
//! `(a + b + c + d)^2 = abcd` in `C^4`. Its entries are the traces of four
//! pairwise once-intersecting one-sided simple closed curves, each equal to
//! `2 sinh(l/2)` for the complex length `l` of the curve. This module holds the
//! relation itself, flips, quad completion, trace/length conversions, explicit
//! representation matrices and the Markoff-Hurwitz and Klein-bottle
//! identities.

use std::fmt;
use std::ops::{Index, Mul};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default relative tolerance for relation checks.
pub const DEFAULT_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const TWO: C64 = C64::new(2.0, 0.0);

/// One of the four positions of a quad. Displays 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Slot {
    A,
    B,
    C,
    D,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::A, Slot::B, Slot::C, Slot::D];

    /// Zero-based position.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Slot> {
        Slot::ALL.get(i).copied()
    }

    /// Parses the 1-based numbering used in flip words (`1..=4`).
    pub fn from_number(n: u8) -> Option<Slot> {
        match n {
            1..=4 => Slot::from_index(n as usize - 1),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    /// The three other slots, in increasing order.
    pub fn others(self) -> [Slot; 3] {
        let mut out = [Slot::A; 3];
        let mut k = 0;
        for s in Slot::ALL {
            if s != self {
                out[k] = s;
                k += 1;
            }
        }
        out
    }
}

impl From<Slot> for u8 {
    fn from(s: Slot) -> u8 {
        s.number()
    }
}

impl TryFrom<u8> for Slot {
    type Error = String;
    fn try_from(n: u8) -> std::result::Result<Self, String> {
        Slot::from_number(n).ok_or_else(|| format!("slot must be 1..=4, got {n}"))
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// An ordered 4-tuple of complex traces. The relation is not enforced by
/// construction; use [`MarkoffQuad::validated`] at trust boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkoffQuad {
    entries: [C64; 4],
}

impl MarkoffQuad {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        MarkoffQuad { entries: [a, b, c, d] }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn from_entries(entries: [C64; 4]) -> Self {
        MarkoffQuad { entries }
    }

    pub fn entries(&self) -> [C64; 4] {
        self.entries
    }

    pub fn get(&self, slot: Slot) -> C64 {
        self.entries[slot.index()]
    }

    pub fn sum(&self) -> C64 {
        self.entries.iter().sum()
    }

    pub fn product(&self) -> C64 {
        self.entries.iter().product()
    }

    /// Largest entry magnitude.
    pub fn scale(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.is_finite())
    }

    /// True when every entry is real and strictly positive (the Teichmuller
    /// component).
    pub fn is_positive_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0 && z.re > 0.0)
    }

    /// `|(a+b+c+d)^2 - abcd| / max(1, |abcd|)`.
    pub fn residual(&self) -> f64 {
        let s = self.sum();
        let p = self.product();
        (s * s - p).norm() / p.norm().max(1.0)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        self.is_finite() && self.residual() <= tol
    }

    pub fn validated(self, tol: f64) -> Result<Self> {
        if !self.is_finite() {
            return Err(Error::NonFinite);
        }
        let residual = self.residual();
        if residual <= tol {
            Ok(self)
        } else {
            Err(Error::InvalidQuad { residual, tol })
        }
    }

    /// Replaces the entry at `slot` by the other root of the completion
    /// quadratic.
    pub fn flip(&self, slot: Slot) -> Self {
        let mut out = *self;
        out.entries[slot.index()] = self.flipped_value(slot);
        out
    }

    /// The value the entry at `slot` takes after a flip.
    ///
    /// When the old entry is the larger root, the co-root is taken from the
    /// product form `(sum of others)^2 / old`; the additive form cancels badly
    /// there.
    pub fn flipped_value(&self, slot: Slot) -> C64 {
        let old = self.get(slot);
        let [x, y, z] = slot.others().map(|s| self.get(s));
        let s = x + y + z;
        if old != ZERO && old.norm() >= s.norm() {
            s * s / old
        } else {
            x * y * z - TWO * s - old
        }
    }

    pub fn permuted(&self, perm: [Slot; 4]) -> Self {
        MarkoffQuad::from_entries(perm.map(|s| self.get(s)))
    }
}

impl Index<Slot> for MarkoffQuad {
    type Output = C64;
    fn index(&self, slot: Slot) -> &C64 {
        &self.entries[slot.index()]
    }
}

impl fmt::Display for MarkoffQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|z| format_complex(*z)).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Formats a complex number the way the CLI parses it: `x`, `x+yi` or `x-yi`.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Relative residual of the quad relation; see [`MarkoffQuad::residual`].
pub fn verify_quad(q: &MarkoffQuad) -> f64 {
    q.residual()
}

/// Both roots of `x^2 + (2a+2b+2c-abc)x + (a+b+c)^2`, the larger-magnitude
/// root second. On a magnitude tie the lexicographically smaller `(re, im)`
/// comes first.
pub fn complete_quad(a: C64, b: C64, c: C64) -> (C64, C64) {
    let s = a + b + c;
    let lin = TWO * s - a * b * c;
    let constant = s * s;
    let disc = (lin * lin - 4.0 * constant).sqrt();
    // pick the sign that avoids cancellation, recover the other root by Vieta
    let big = if (lin + disc).norm() >= (lin - disc).norm() {
        -(lin + disc) / 2.0
    } else {
        -(lin - disc) / 2.0
    };
    let small = if big == ZERO { ZERO } else { constant / big };
    let (r1, r2) = (small, big);
    let (n1, n2) = (r1.norm(), r2.norm());
    if n1 < n2 {
        (r1, r2)
    } else if n2 < n1 {
        (r2, r1)
    } else if (r1.re, r1.im) <= (r2.re, r2.im) {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

/// Trace `e = ab - 2` of the two-sided curve disjoint from a once-intersecting
/// pair with traces `a`, `b`.
pub fn two_sided_trace(a: C64, b: C64) -> C64 {
    a * b - TWO
}

/// Complex length of a one-sided curve with trace `a = 2 sinh(l/2)`.
///
/// The principal branch is used and then normalised to `Re(l) >= 0`; for
/// traces with negative real part this reports the length of `-a`, which is
/// the same curve under the PSL sign ambiguity.
pub fn one_sided_length(a: C64) -> Result<C64> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if a == ZERO {
        return Err(Error::DegenerateTrace);
    }
    let l = (a / 2.0).asinh() * 2.0;
    Ok(if l.re < 0.0 { -l } else { l })
}

/// Inverse of [`one_sided_length`]: `2 sinh(l/2)`.
pub fn trace_from_length(l: C64) -> C64 {
    (l / 2.0).sinh() * 2.0
}

/// Complex length of a two-sided curve with trace `e = 2 cosh(l/2)`.
pub fn two_sided_length(e: C64) -> Result<C64> {
    if !e.is_finite() {
        return Err(Error::NonFinite);
    }
    if e.im.abs() <= 1e-300 && (-2.0..=2.0).contains(&e.re) {
        return Err(Error::NonHyperbolicTrace(e.re));
    }
    Ok((e / 2.0).acosh() * 2.0)
}

/// Inverse of [`two_sided_length`]: `2 cosh(l/2)`.
pub fn two_sided_trace_from_length(l: C64) -> C64 {
    (l / 2.0).cosh() * 2.0
}

/// A 2x2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix2 {
    pub m: [[C64; 2]; 2],
}

impl Matrix2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Matrix2 { m: [[a, b], [c, d]] }
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::new(k * self.m[0][0], k * self.m[0][1], k * self.m[1][0], k * self.m[1][1])
    }

    /// Adjugate divided by the determinant. Returns `None` for singular input.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == ZERO {
            return None;
        }
        Some(Self::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0]).scale(det.inv()))
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Mul for Matrix2 {
    type Output = Matrix2;
    fn mul(self, rhs: Matrix2) -> Matrix2 {
        let a = &self.m;
        let b = &rhs.m;
        Matrix2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Images of the three free generators under a type-preserving
/// `SL^{±}(2, C)` representation with `det = -1` on each generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Representation {
    pub m1: Matrix2,
    pub m2: Matrix2,
    pub m3: Matrix2,
}

impl Representation {
    pub fn matrices(&self) -> [Matrix2; 3] {
        [self.m1, self.m2, self.m3]
    }

    /// `(a, b, c, d)` read back from the matrices, with `d = tr((M1 M2 M3)^-1)`.
    pub fn induced_quad(&self) -> Option<MarkoffQuad> {
        let prod = self.m1 * self.m2 * self.m3;
        let d = prod.inverse()?.trace();
        Some(MarkoffQuad::new(self.m1.trace(), self.m2.trace(), self.m3.trace(), d))
    }

    /// Largest deviation over all trace/determinant postconditions, relative to
    /// `max(1, |q|)`.
    pub fn max_deviation(&self, q: &MarkoffQuad) -> f64 {
        let one = C64::new(1.0, 0.0);
        let mut worst: f64 = 0.0;
        let scale = q.scale().max(1.0);
        for m in self.matrices() {
            worst = worst.max((m.det() + one).norm());
        }
        for p in [self.m1 * self.m2, self.m2 * self.m3, self.m3 * self.m1] {
            worst = worst.max((p.trace() - TWO).norm());
        }
        match self.induced_quad() {
            Some(r) => {
                for s in Slot::ALL {
                    worst = worst.max((r[s] - q[s]).norm() / scale);
                }
            }
            None => return f64::INFINITY,
        }
        worst
    }
}

fn printed_a_zero(b: C64, c: C64) -> [Matrix2; 3] {
    let (zero, one) = (ZERO, C64::new(1.0, 0.0));
    [
        Matrix2::new(zero, one, one, zero),
        Matrix2::new(b, one, one, zero),
        Matrix2::new(zero, one, one, c),
    ]
}

fn printed_nonzero(a: C64, b: C64, c: C64, d: C64) -> [Matrix2; 3] {
    let k = (a + b + c + d).inv();
    [
        Matrix2::new(a * b, b * (a + c), a * (a + d), a * (a + c + d)).scale(k),
        Matrix2::new(a * b, -b * (b + d), -a * (b + c), b * (b + c + d)).scale(k),
        Matrix2::new(a * b + c * (a + b + c + d), b * (a + c), -a * (b + c), -a * b).scale(k),
    ]
}

/// Explicit matrices realising a Markoff quad.
///
/// The printed nonzero-entry matrices induce the co-root `d'` through
/// `tr((M1 M2 M3)^-1)`; their transposes induce `d`, which is what is returned,
/// under whichever cyclic labelling of the generators rounds best.
/// A zero entry among `a, b, c` uses the zero-trace matrices after a cyclic
/// relabelling of the generators. A zero `d` forces `a + b + c = 0`, where the
/// untransposed matrices evaluated at the co-root `abc` are used instead.
pub fn build_representation(q: &MarkoffQuad, tol: f64) -> Result<Representation> {
    let q = q.validated(tol)?;
    let [a, b, c, d] = q.entries();
    let zero_tol = tol * (1.0 + q.scale());
    let is_zero = |z: C64| z.norm() <= zero_tol;
    let [m1, m2, m3] = if is_zero(a) {
        printed_a_zero(b, c)
    } else if is_zero(b) {
        // rotate (b, c, a) -> generators (n1, n2, n3), then (a, b, c) = (n3, n1, n2)
        let [n1, n2, n3] = printed_a_zero(c, a);
        [n3, n1, n2]
    } else if is_zero(c) {
        let [n1, n2, n3] = printed_a_zero(a, b);
        [n2, n3, n1]
    } else if is_zero(d) {
        printed_nonzero(a, b, c, a * b * c)
    } else {
        // all three cyclic labellings are exact; rounding differs a lot when
        // one entry is small, so keep the best one
        let rotations = [
            printed_nonzero(a, b, c, d).map(|m| m.transpose()),
            {
                let [n1, n2, n3] = printed_nonzero(b, c, a, d).map(|m| m.transpose());
                [n3, n1, n2]
            },
            {
                let [n1, n2, n3] = printed_nonzero(c, a, b, d).map(|m| m.transpose());
                [n2, n3, n1]
            },
        ];
        return Ok(rotations
            .into_iter()
            .map(|[m1, m2, m3]| Representation { m1, m2, m3 })
            .min_by(|x, y| x.max_deviation(&q).total_cmp(&y.max_deviation(&q)))
            .expect("three candidates"));
    };
    Ok(Representation { m1, m2, m3 })
}

/// Residual of Fricke's relation for three matrices with `A0 = A1 A2 A3`,
/// normalised by `max(1, largest monomial magnitude)`.
pub fn fricke_residual(a1: &Matrix2, a2: &Matrix2, a3: &Matrix2) -> f64 {
    let mats = [*a1, *a2, *a3];
    let a0 = *a1 * *a2 * *a3;
    let t0 = a0.trace();
    let tr: [C64; 3] = mats.map(|m| m.trace());
    let det: [C64; 3] = mats.map(|m| m.det());
    let pair_tr = |j: usize, k: usize| (mats[j] * mats[k]).trace();
    let pair_det = |j: usize, k: usize| (mats[j] * mats[k]).det();

    let mut monomials: Vec<C64> = vec![
        t0 * t0,
        tr[0] * tr[1] * tr[2] * t0,
        pair_tr(0, 1) * pair_tr(1, 2) * pair_tr(2, 0),
    ];
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for [i, j, k] in PERMS {
        let tjk = pair_tr(j, k);
        monomials.push(tr[i] * tr[i] * pair_det(j, k) * 0.5);
        monomials.push(-det[i] * tr[j] * tr[k] * tjk * 0.5);
        monomials.push(det[i] * tjk * tjk * 0.5);
        monomials.push(-t0 * tr[i] * tjk * 0.5);
    }
    let lhs = a0.det() * 4.0;
    let rhs: C64 = monomials.iter().sum();
    let scale = monomials
        .iter()
        .map(|z| z.norm())
        .fold(lhs.norm(), f64::max)
        .max(1.0);
    (lhs - rhs).norm() / scale
}

/// Relative residual of `a1^2 + a2^2 + a3^2 + a4^2 = a1 a2 a3 a4`.
pub fn hurwitz_residual(h: [C64; 4]) -> f64 {
    let sq: C64 = h.iter().map(|z| z * z).sum();
    let prod: C64 = h.iter().product();
    (sq - prod).norm() / prod.norm().max(1.0)
}

/// Squares a solution of the `n = 4` Markoff-Hurwitz equation into a quad.
pub fn hurwitz_to_quad(h: [C64; 4], tol: f64) -> Result<MarkoffQuad> {
    if h.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite);
    }
    let r = hurwitz_residual(h);
    if r > tol {
        return Err(Error::InvalidHurwitz(r));
    }
    Ok(MarkoffQuad::from_entries(h.map(|z| z * z)))
}

/// Principal square roots of the entries. This is one representative of the
/// sign orbit; it is not canonical and may need a sign change on one entry to
/// solve the Markoff-Hurwitz equation when the quad is not positive real.
pub fn quad_to_hurwitz(q: &MarkoffQuad) -> [C64; 4] {
    q.entries().map(|z| z.sqrt())
}

/// Traces `a_i = sinh(l_i / 2)` of the one-sided curves of a punctured Klein
/// bottle whose two-sided curve has trace `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct KleinSequence {
    pub two_sided_trace: C64,
    pub terms: Vec<C64>,
    pub lambda_plus: C64,
    pub lambda_minus: C64,
}

impl KleinSequence {
    /// `a_i^2 + a_{i+1}^2 - a_i a_{i+1} A + 1`.
    pub fn pair_residual(big_a: C64, x: C64, y: C64) -> C64 {
        x * x + y * y - x * y * big_a + 1.0
    }

    /// Largest relative residual over consecutive pairs.
    pub fn max_residual(&self) -> f64 {
        self.terms
            .windows(2)
            .map(|w| {
                let r = Self::pair_residual(self.two_sided_trace, w[0], w[1]);
                let scale = (w[0] * w[1]).norm().max(1.0);
                r.norm() / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Extends a seed pair to `n` terms with `a_{i+1} = A a_i - a_{i-1}`.
pub fn klein_sequence(big_a: C64, a0: C64, a1: C64, n: usize, tol: f64) -> Result<KleinSequence> {
    let seed = KleinSequence::pair_residual(big_a, a0, a1).norm() / (a0 * a1).norm().max(1.0);
    if !seed.is_finite() {
        return Err(Error::NonFinite);
    }
    if seed > tol {
        return Err(Error::InvalidSeed(seed));
    }
    let mut terms = Vec::with_capacity(n.max(2));
    terms.push(a0);
    terms.push(a1);
    while terms.len() < n {
        let k = terms.len();
        terms.push(big_a * terms[k - 1] - terms[k - 2]);
    }
    terms.truncate(n.max(2));
    let root = (big_a * big_a - 4.0).sqrt();
    let (r1, r2) = ((big_a + root) / 2.0, (big_a - root) / 2.0);
    let (lambda_plus, lambda_minus) = if r1.norm() >= r2.norm() { (r1, r2) } else { (r2, r1) };
    Ok(KleinSequence { two_sided_trace: big_a, terms, lambda_plus, lambda_minus })
}

/// Exact rational version of [`klein_sequence`]; every consecutive pair is
/// checked against the quadratic relation with no rounding.
pub fn klein_sequence_exact(
    big_a: &BigRational,
    a0: &BigRational,
    a1: &BigRational,
    n: usize,
) -> Result<Vec<BigRational>> {
    let rel = |x: &BigRational, y: &BigRational| x * x + y * y - x * y * big_a + BigRational::one();
    if !rel(a0, a1).is_zero() {
        return Err(Error::InvalidSeed(f64::NAN));
    }
    let mut terms = vec![a0.clone(), a1.clone()];
    while terms.len() < n {
        let k = terms.len();
        let next = big_a * &terms[k - 1] - &terms[k - 2];
        debug_assert!(rel(&terms[k - 1], &next).is_zero());
        terms.push(next);
    }
    terms.truncate(n.max(2));
    Ok(terms)
}
