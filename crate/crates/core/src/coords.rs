//! Coordinates on the Teichmuller component and the mapping class action.
//!
//! Positive real quads are parametrised three ways: by the traces themselves,
//! by six lambda-lengths of an ideal triangulation, and by horocyclic
//! coordinates `H_x = x / (a + b + c + d)`, which fill the open 3-simplex.
//! Uniform points of the simplex are the standard supply of random Fuchsian
//! quads in this crate.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{MarkoffQuad, Slot};

/// Distance from the simplex boundary below which samples are rejected.
pub const SAMPLE_WALL_GAP: f64 = 1e-6;

fn positive_entries(q: &MarkoffQuad) -> Result<[f64; 4]> {
    let e = q.entries();
    for z in e {
        if !z.is_finite() {
            return Err(Error::NonFinite);
        }
        if z.im != 0.0 || z.re <= 0.0 {
            return Err(Error::Domain(format!("entry {z} is not a positive real")));
        }
    }
    Ok(e.map(|z| z.re))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaCoords {
    pub lambda: [f64; 3],
    pub mu: [f64; 3],
}

impl LambdaCoords {
    /// Relative residuals of the three triangle equations
    /// `mu1 mu2 mu3 + mu1 l2 l3 + l1 mu2 l3 + l1 l2 mu3 = l1 l2 mu1 mu2` and
    /// their cyclic shifts.
    pub fn simplex_residuals(&self) -> [f64; 3] {
        let (l, m) = (self.lambda, self.mu);
        [0usize, 1, 2].map(|k| {
            let (i, j, h) = (k, (k + 1) % 3, (k + 2) % 3);
            let lhs = m[i] * m[j] * m[h] + m[i] * l[j] * l[h] + l[i] * m[j] * l[h] + l[i] * l[j] * m[h];
            let rhs = l[i] * l[j] * m[i] * m[j];
            (lhs - rhs).abs() / rhs.abs().max(1.0)
        })
    }
}

/// `(sqrt(bc), sqrt(ac), sqrt(ab), sqrt(ad), sqrt(bd), sqrt(cd))`.
pub fn quad_to_lambda(q: &MarkoffQuad) -> Result<LambdaCoords> {
    let [a, b, c, d] = positive_entries(q)?;
    Ok(LambdaCoords {
        lambda: [(b * c).sqrt(), (a * c).sqrt(), (a * b).sqrt()],
        mu: [(a * d).sqrt(), (b * d).sqrt(), (c * d).sqrt()],
    })
}

pub fn lambda_to_quad(l: &LambdaCoords) -> Result<MarkoffQuad> {
    let all = [l.lambda, l.mu].concat();
    if all.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if all.iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain("lambda-lengths must be positive".into()));
    }
    let [l1, l2, l3] = l.lambda;
    let [m1, m2, _] = l.mu;
    Ok(MarkoffQuad::from_real(l2 * l3 / l1, l1 * l3 / l2, l1 * l2 / l3, m1 * m2 / l3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HorocyclicCoords {
    pub h: [f64; 4],
}

pub fn quad_to_horocyclic(q: &MarkoffQuad) -> Result<HorocyclicCoords> {
    let e = positive_entries(q)?;
    let s: f64 = e.iter().sum();
    Ok(HorocyclicCoords { h: e.map(|x| x / s) })
}

/// `a = sqrt(H_a / (H_b H_c H_d))` and so on.
pub fn horocyclic_to_quad(h: &HorocyclicCoords, tol: f64) -> Result<MarkoffQuad> {
    if h.h.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if h.h.iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain("horocyclic coordinates must be positive".into()));
    }
    let s: f64 = h.h.iter().sum();
    if (s - 1.0).abs() > tol {
        return Err(Error::Domain(format!("horocyclic coordinates sum to {s}, not 1")));
    }
    let p: f64 = h.h.iter().product();
    let e = h.h.map(|x| (x * x / p).sqrt());
    Ok(MarkoffQuad::from_real(e[0], e[1], e[2], e[3]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DomainMembership {
    pub inside: bool,
    /// Which of the walls `H_x = 1/2` the point lies on, within tolerance.
    pub walls: [bool; 4],
}

/// Membership in `{H_x <= 1/2 for all x}`.
pub fn in_fundamental_domain(h: &HorocyclicCoords, tol: f64) -> DomainMembership {
    DomainMembership {
        inside: h.h.iter().all(|&x| x <= 0.5 + tol),
        walls: h.h.map(|x| (x - 0.5).abs() <= tol),
    }
}

/// A uniform point of the open simplex, at least [`SAMPLE_WALL_GAP`] from its
/// boundary.
pub fn sample_horocyclic<R: Rng + ?Sized>(rng: &mut R) -> HorocyclicCoords {
    loop {
        let e: [f64; 4] = [(); 4].map(|_| rng.sample(Exp1));
        let s: f64 = e.iter().sum();
        let h = e.map(|x| x / s);
        if h.iter().all(|&x| x >= SAMPLE_WALL_GAP) {
            return HorocyclicCoords { h };
        }
    }
}

/// A random positive real quad.
pub fn sample_fuchsian_quad<R: Rng + ?Sized>(rng: &mut R) -> MarkoffQuad {
    horocyclic_to_quad(&sample_horocyclic(rng), 1e-9).expect("sampled coordinates are valid")
}

/// One generator of the mapping class action on quads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum McgLetter {
    Flip(Slot),
    /// `(b, a, d, c)`
    Phi1,
    /// `(c, d, a, b)`
    Phi2,
    /// `(d, c, b, a)`
    Phi3,
}

impl McgLetter {
    pub fn apply(self, q: &MarkoffQuad) -> MarkoffQuad {
        use Slot::*;
        match self {
            McgLetter::Flip(s) => q.flip(s),
            McgLetter::Phi1 => q.permuted([B, A, D, C]),
            McgLetter::Phi2 => q.permuted([C, D, A, B]),
            McgLetter::Phi3 => q.permuted([D, C, B, A]),
        }
    }
}

impl fmt::Display for McgLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            McgLetter::Flip(s) => write!(f, "f{s}"),
            McgLetter::Phi1 => write!(f, "phi1"),
            McgLetter::Phi2 => write!(f, "phi2"),
            McgLetter::Phi3 => write!(f, "phi3"),
        }
    }
}

impl FromStr for McgLetter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let bad = || Error::Parse(format!("unknown mapping class letter {s:?}"));
        if let Some(n) = t.strip_prefix("phi").or_else(|| t.strip_prefix("p")).or_else(|| t.strip_prefix("φ")) {
            return match n {
                "1" => Ok(McgLetter::Phi1),
                "2" => Ok(McgLetter::Phi2),
                "3" => Ok(McgLetter::Phi3),
                _ => Err(bad()),
            };
        }
        if let Some(n) = t.strip_prefix('f') {
            let k: u8 = n.parse().map_err(|_| bad())?;
            return Slot::from_number(k).map(McgLetter::Flip).ok_or_else(bad);
        }
        Err(bad())
    }
}

/// A word in the generators, written left to right and applied right to left.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct McgWord(pub Vec<McgLetter>);

impl McgWord {
    pub fn inverse(&self) -> McgWord {
        // every generator is an involution
        McgWord(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for McgWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for McgWord {
    type Err = Error;
    /// Letters separated by spaces, commas or dots, e.g. `phi1 f1 phi1`.
    fn from_str(s: &str) -> Result<Self> {
        s.split(|c: char| c.is_whitespace() || c == ',' || c == '.' || c == '*')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(McgWord)
    }
}

pub fn mcg_apply(w: &McgWord, q: &MarkoffQuad) -> MarkoffQuad {
    w.0.iter().rev().fold(*q, |acc, l| l.apply(&acc))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McgReport {
    pub samples: usize,
    pub relations: Vec<RelationCheck>,
    pub max_deviation: f64,
    pub pass: bool,
}

fn deviation(x: &MarkoffQuad, y: &MarkoffQuad) -> f64 {
    Slot::ALL
        .iter()
        .map(|&s| (x[s] - y[s]).norm() / x[s].norm().max(1.0))
        .fold(0.0, f64::max)
}

/// The relations of the presentation, as pairs of words inducing the same map.
/// `g` and `h` are `phi1` and `phi2`.
pub fn mcg_relations() -> Vec<(&'static str, McgWord, McgWord)> {
    let w = |s: &str| s.parse::<McgWord>().expect("static word");
    vec![
        ("f1^2 = 1", w("f1 f1"), w("")),
        ("f2^2 = 1", w("f2 f2"), w("")),
        ("f3^2 = 1", w("f3 f3"), w("")),
        ("f4^2 = 1", w("f4 f4"), w("")),
        ("g^2 = 1", w("phi1 phi1"), w("")),
        ("h^2 = 1", w("phi2 phi2"), w("")),
        ("gh = hg", w("phi1 phi2"), w("phi2 phi1")),
        ("gh = phi3", w("phi1 phi2"), w("phi3")),
        ("g^-1 f1 g = f2", w("phi1 f1 phi1"), w("f2")),
        ("h^-1 f1 h = f3", w("phi2 f1 phi2"), w("f3")),
        ("g^-1 f3 g = f4", w("phi1 f3 phi1"), w("f4")),
    ]
}

/// Checks every relation on `(4,4,4,4)` and `sample_count - 1` random
/// Fuchsian quads.
pub fn mcg_relations_check<R: Rng + ?Sized>(sample_count: usize, tol: f64, rng: &mut R) -> McgReport {
    let mut quads = vec![MarkoffQuad::from_real(4.0, 4.0, 4.0, 4.0)];
    while quads.len() < sample_count.max(1) {
        quads.push(sample_fuchsian_quad(rng));
    }
    let relations: Vec<RelationCheck> = mcg_relations()
        .into_iter()
        .map(|(name, lhs, rhs)| RelationCheck {
            relation: name.to_string(),
            max_deviation: quads
                .iter()
                .map(|q| deviation(&mcg_apply(&lhs, q), &mcg_apply(&rhs, q)))
                .fold(0.0, f64::max),
        })
        .collect();
    let max_deviation = relations.iter().map(|r| r.max_deviation).fold(0.0, f64::max);
    McgReport { samples: quads.len(), relations, max_deviation, pass: max_deviation <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(a: f64, b: f64, c: f64, d: f64) -> MarkoffQuad {
        MarkoffQuad::from_real(a, b, c, d)
    }

    #[test]
    fn lambda_examples() {
        let l = quad_to_lambda(&q(4.0, 4.0, 4.0, 4.0)).unwrap();
        assert_eq!(l.lambda, [4.0; 3]);
        assert_eq!(l.mu, [4.0; 3]);
        assert_eq!(l.simplex_residuals(), [0.0; 3]);
        let l = quad_to_lambda(&q(1.0, 9.0, 10.0, 10.0)).unwrap();
        assert_eq!(l.lambda, [90f64.sqrt(), 10f64.sqrt(), 3.0]);
        assert_eq!(l.mu, [10f64.sqrt(), 90f64.sqrt(), 10.0]);
        let back = lambda_to_quad(&l).unwrap();
        assert!(deviation(&back, &q(1.0, 9.0, 10.0, 10.0)) < 1e-12);
        assert!(quad_to_lambda(&q(-1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn horocyclic_examples() {
        let h = quad_to_horocyclic(&q(4.0, 4.0, 4.0, 4.0)).unwrap();
        assert_eq!(h.h, [0.25; 4]);
        let edge = HorocyclicCoords { h: [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0] };
        let quad = horocyclic_to_quad(&edge, 1e-9).unwrap();
        let r3 = 3f64.sqrt();
        assert!(deviation(&quad, &q(6.0 * r3, 2.0 * r3, 2.0 * r3, 2.0 * r3)) < 1e-12);
        assert!(quad.residual() < 1e-12);
        let m = in_fundamental_domain(&edge, 1e-9);
        assert!(m.inside && m.walls == [true, false, false, false]);
        let far = quad_to_horocyclic(&q(4.0, 4.0, 4.0, 36.0)).unwrap();
        assert!(!in_fundamental_domain(&far, 1e-9).inside);
        assert!(horocyclic_to_quad(&HorocyclicCoords { h: [0.5, 0.5, 0.5, 0.5] }, 1e-9).is_err());
    }

    #[test]
    fn sampled_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let h = sample_horocyclic(&mut rng);
            let quad = horocyclic_to_quad(&h, 1e-9).unwrap();
            let back = quad_to_horocyclic(&quad).unwrap();
            for i in 0..4 {
                assert!((back.h[i] - h.h[i]).abs() < 1e-12);
            }
            let l = quad_to_lambda(&quad).unwrap();
            assert!(l.simplex_residuals().iter().all(|&r| r < 1e-10));
            assert!(deviation(&lambda_to_quad(&l).unwrap(), &quad) < 1e-12);
        }
    }

    #[test]
    fn words() {
        let w: McgWord = "phi2".parse().unwrap();
        assert_eq!(mcg_apply(&w, &q(1.0, 5.0, 24.0, 30.0)), q(24.0, 30.0, 1.0, 5.0));
        // right to left: flip 4 first, then flip 1
        let w: McgWord = "f1 f4".parse().unwrap();
        assert_eq!(mcg_apply(&w, &q(4.0, 4.0, 4.0, 4.0)), q(484.0, 4.0, 4.0, 36.0));
        assert_eq!(w.to_string(), "f1 f4");
        assert!("f5".parse::<McgWord>().is_err());
        assert!("psi1".parse::<McgWord>().is_err());
    }

    #[test]
    fn relations_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = mcg_relations_check(100, 1e-9, &mut rng);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.samples, 100);
    }
}
