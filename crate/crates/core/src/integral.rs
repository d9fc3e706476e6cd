//! Positive integer Markoff quads in exact arithmetic.
//!
//! Flips preserve integrality because the two roots of the completion
//! quadratic multiply to `(a + b + c)^2`. Every positive integer quad reduces,
//! by flips that strictly decrease its largest entry, to a quad whose largest
//! entry is at most the sum of the other three. The reduced quads are found by
//! a bounded search.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quad::{MarkoffQuad, Slot};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntegerQuad {
    pub entries: [BigUint; 4],
}

impl IntegerQuad {
    pub fn new(entries: [BigUint; 4]) -> Self {
        IntegerQuad { entries }
    }

    pub fn from_u64(a: u64, b: u64, c: u64, d: u64) -> Self {
        IntegerQuad { entries: [a, b, c, d].map(BigUint::from) }
    }

    pub fn get(&self, slot: Slot) -> &BigUint {
        &self.entries[slot.index()]
    }

    pub fn is_valid(&self) -> bool {
        let s: BigUint = self.entries.iter().sum();
        let p: BigUint = self.entries.iter().product();
        &s * &s == p
    }

    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|x| !x.is_zero())
    }

    pub fn sorted(&self) -> Self {
        let mut e = self.entries.clone();
        e.sort();
        IntegerQuad { entries: e }
    }

    pub fn max_entry(&self) -> &BigUint {
        self.entries.iter().max().expect("four entries")
    }

    /// True when the largest entry is at most the sum of the other three.
    pub fn is_reduced(&self) -> bool {
        let s: BigUint = self.entries.iter().sum();
        let m = self.max_entry();
        m + m <= s
    }

    /// Lossy conversion for the floating-point machinery.
    pub fn to_markoff(&self) -> MarkoffQuad {
        let e = self.entries.clone().map(|x| x.to_f64().unwrap_or(f64::INFINITY));
        MarkoffQuad::from_real(e[0], e[1], e[2], e[3])
    }

    /// Entries as `u64` when they all fit.
    pub fn to_u64(&self) -> Option<[u64; 4]> {
        let e = [0, 1, 2, 3].map(|i| self.entries[i].to_u64());
        Some([e[0]?, e[1]?, e[2]?, e[3]?])
    }
}

impl fmt::Display for IntegerQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "{a},{b},{c},{d}")
    }
}

impl FromStr for IntegerQuad {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected four comma-separated integers, got {s:?}")));
        }
        let mut e: [BigUint; 4] = Default::default();
        for (slot, p) in e.iter_mut().zip(parts) {
            *slot = p.parse().map_err(|_| Error::Parse(format!("not a nonnegative integer: {p:?}")))?;
        }
        Ok(IntegerQuad { entries: e })
    }
}

fn check(q: &IntegerQuad) -> Result<()> {
    if !q.is_valid() {
        return Err(Error::Domain(format!("{q} does not satisfy (a+b+c+d)^2 = abcd")));
    }
    Ok(())
}

/// Exact flip. Uses `(sum of others)^2 / old`, which divides exactly.
pub fn int_flip(q: &IntegerQuad, slot: Slot) -> IntegerQuad {
    let old = q.get(slot);
    let others = slot.others().map(|s| q.get(s).clone());
    let s: BigUint = others.iter().sum();
    let new = if old.is_zero() {
        // a zero entry forces the other three to sum to zero
        let p: BigUint = others.iter().product();
        p - (&s + &s)
    } else {
        &s * &s / old
    };
    let mut out = q.clone();
    out.entries[slot.index()] = new;
    out
}

/// Flips the largest entry (lowest slot on ties) while that strictly decreases
/// it. Returns the sorted terminal quad and the slots flipped, in order.
pub fn int_reduce(q: &IntegerQuad) -> Result<(IntegerQuad, Vec<Slot>)> {
    check(q)?;
    if !q.is_positive() {
        return Err(Error::Domain(format!("{q} has a zero entry")));
    }
    let mut cur = q.clone();
    let mut word = Vec::new();
    loop {
        let slot = Slot::ALL
            .into_iter()
            .fold(Slot::A, |best, s| if cur.get(s) > cur.get(best) { s } else { best });
        let s: BigUint = slot.others().iter().map(|o| cur.get(*o)).sum();
        // the co-root s^2/m is smaller than m exactly when s < m
        if &s >= cur.get(slot) {
            return Ok((cur.sorted(), word));
        }
        cur = int_flip(&cur, slot);
        word.push(slot);
    }
}

/// Per-`a` ranges scanned by [`enumerate_fundamental`]: `(a, b_min, b_max,
/// d_max)`.
///
/// For a reduced sorted quad, `c <= d` and `c >= d - a - b` turn the relation
/// into `(K + 2d)^2 >= m (d - K) d` with `m = ab` and `K = a + b`. Taking the
/// smallest `m` and largest `K` over the `b` range bounds `d` for each `a`.
pub fn fundamental_search_bounds() -> Vec<(u64, u64, u64, u64)> {
    (1..=4u64)
        .map(|a| {
            let b_min = a.max(5u64.div_ceil(a));
            let b_max = 36 / a;
            let m = a * b_min;
            let k = a + b_max;
            // largest d with (m - 4) d^2 - (m + 4) K d - K^2 <= 0
            let mut d = 0u64;
            while ((m - 4) * (d + 1) * (d + 1)) as i128 - ((m + 4) * k * (d + 1)) as i128 - (k * k) as i128 <= 0 {
                d += 1;
            }
            (a, b_min, b_max, d)
        })
        .collect()
}

/// All reduced positive integer quads, sorted ascending.
///
/// A reduced quad has its smallest entry at most 4 and `5 <= ab <= 36` for its
/// two smallest entries; with [`fundamental_search_bounds`] and
/// `max(b, d - a - b) <= c <= d` this is a finite scan.
pub fn enumerate_fundamental() -> Vec<IntegerQuad> {
    let mut out = Vec::new();
    for (a, b_min, b_max, d_max) in fundamental_search_bounds() {
        for b in b_min..=b_max {
            if a * b < 5 {
                continue;
            }
            for d in b..=d_max {
                let lo = b.max(d.saturating_sub(a + b));
                for c in lo..=d {
                    let s = a + b + c + d;
                    if s * s == a * b * c * d {
                        out.push(IntegerQuad::from_u64(a, b, c, d));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// The reduced quads, computed once.
pub fn fundamental_table() -> &'static [IntegerQuad] {
    static TABLE: OnceLock<Vec<IntegerQuad>> = OnceLock::new();
    TABLE.get_or_init(enumerate_fundamental)
}

/// The reduced root of `q` and the flips leading there.
pub fn classify(q: &IntegerQuad) -> Result<(IntegerQuad, Vec<Slot>)> {
    let (root, word) = int_reduce(q)?;
    if fundamental_table().contains(&root) {
        Ok((root, word))
    } else {
        Err(Error::NotFundamental(root.to_string()))
    }
}

/// Every positive integer quad with largest entry at most `bound`, as sorted
/// tuples in ascending order.
///
/// Reduction only ever lowers the largest entry, so each such quad is joined
/// to its root by a flip path that stays below `bound`.
pub fn enumerate_integral_below(bound: &BigUint) -> Vec<IntegerQuad> {
    let mut seen: BTreeSet<IntegerQuad> = BTreeSet::new();
    let mut queue = VecDeque::new();
    for root in fundamental_table() {
        if root.max_entry() <= bound && seen.insert(root.clone()) {
            queue.push_back(root.clone());
        }
    }
    while let Some(q) = queue.pop_front() {
        for slot in Slot::ALL {
            let next = int_flip(&q, slot);
            if next.get(slot) > bound {
                continue;
            }
            let key = next.sorted();
            if !seen.contains(&key) {
                seen.insert(key.clone());
                queue.push_back(key);
            }
        }
    }
    seen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iq(a: u64, b: u64, c: u64, d: u64) -> IntegerQuad {
        IntegerQuad::from_u64(a, b, c, d)
    }

    #[test]
    fn flips() {
        assert_eq!(int_flip(&iq(4, 4, 4, 4), Slot::D), iq(4, 4, 4, 36));
        assert_eq!(int_flip(&iq(1, 5, 24, 30), Slot::A), iq(3481, 5, 24, 30));
        let q = iq(3481, 5, 24, 30);
        assert!(q.is_valid());
        assert_eq!(int_flip(&q, Slot::A), iq(1, 5, 24, 30));
        assert_eq!(int_flip(&iq(0, 0, 0, 0), Slot::B), iq(0, 0, 0, 0));
    }

    #[test]
    fn reductions() {
        assert_eq!(int_reduce(&iq(4, 4, 4, 36)).unwrap(), (iq(4, 4, 4, 4), vec![Slot::D]));
        assert_eq!(int_reduce(&iq(3481, 5, 24, 30)).unwrap(), (iq(1, 5, 24, 30), vec![Slot::A]));
        assert_eq!(int_reduce(&iq(2, 5, 5, 8)).unwrap(), (iq(2, 5, 5, 8), vec![]));
        assert!(int_reduce(&iq(1, 1, 1, 1)).is_err());
    }

    #[test]
    fn search_bounds() {
        let b = fundamental_search_bounds();
        assert_eq!(b[0], (1, 5, 36, 337));
        assert_eq!(b[1], (2, 3, 18, 101));
        assert_eq!(b[2], (3, 3, 12, 40));
        assert_eq!(b[3].3, 22);
    }

    #[test]
    fn fundamental_quads() {
        let f = enumerate_fundamental();
        for q in &f {
            assert!(q.is_valid() && q.is_reduced());
            assert_eq!(int_reduce(q).unwrap(), (q.clone(), vec![]));
        }
        let strs: Vec<String> = f.iter().map(|q| q.to_string()).collect();
        assert_eq!(
            strs,
            [
                "1,5,24,30", "1,6,14,21", "1,8,9,18", "1,9,10,10", "2,3,10,15", "2,4,6,12", "2,5,5,8", "3,3,6,6",
                "4,4,4,4"
            ]
        );
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&iq(4, 4, 4, 36)).unwrap().0, iq(4, 4, 4, 4));
        assert_eq!(classify(&iq(3481, 5, 24, 30)).unwrap().0, iq(1, 5, 24, 30));
        assert_eq!(classify(&iq(3, 3, 6, 6)).unwrap(), (iq(3, 3, 6, 6), vec![]));
    }

    #[test]
    fn small_bounds() {
        assert_eq!(enumerate_integral_below(&BigUint::from(4u32)), vec![iq(4, 4, 4, 4)]);
        let b36 = enumerate_integral_below(&BigUint::from(36u32));
        assert!(b36.contains(&iq(4, 4, 4, 36)));
        assert!(b36.contains(&iq(2, 3, 10, 15)));
    }

    #[test]
    fn parse_and_display() {
        let q: IntegerQuad = "1, 5,24,30".parse().unwrap();
        assert_eq!(q, iq(1, 5, 24, 30));
        assert!("1,2,3".parse::<IntegerQuad>().is_err());
        assert!("1,2,3,-4".parse::<IntegerQuad>().is_err());
    }
}
