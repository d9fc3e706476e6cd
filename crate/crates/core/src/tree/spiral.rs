//! Values around a fixed 2-cell.
//!
//! The vertices containing a face `{a, b}` form a bi-infinite path on which
//! the other two entries alternate. The third values `c_n` met along it obey
//! `c_{n+1} = (ab - 2) c_n - c_{n-1} - 2(a + b)`.

use crate::quad::C64;

/// `c_n = A lambda^n + B lambda^-n + K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralClosedForm {
    pub a_coef: C64,
    pub b_coef: C64,
    pub lambda: C64,
    /// The constant `-2(a + b) / (4 - ab)`.
    pub offset: C64,
}

impl SpiralClosedForm {
    pub fn eval(&self, n: i64) -> C64 {
        self.a_coef * self.lambda.powi(n as i32) + self.b_coef * self.lambda.powi(-n as i32) + self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpiralSequence {
    pub a: C64,
    pub b: C64,
    pub n0: i64,
    /// `terms[k]` is `c_{n0 + k}`.
    pub terms: Vec<C64>,
    /// Absent when `ab` is 0 or 4, where the roots of the characteristic
    /// polynomial coincide.
    pub closed_form: Option<SpiralClosedForm>,
}

impl SpiralSequence {
    pub fn n1(&self) -> i64 {
        self.n0 + self.terms.len() as i64 - 1
    }

    pub fn get(&self, n: i64) -> Option<C64> {
        usize::try_from(n - self.n0).ok().and_then(|k| self.terms.get(k)).copied()
    }

    /// Largest `|c_n - closed(n)| / max(1, |c_n|)` over the range.
    pub fn max_closed_form_deviation(&self) -> Option<f64> {
        let cf = self.closed_form?;
        Some(
            self.terms
                .iter()
                .enumerate()
                .map(|(k, c)| (c - cf.eval(self.n0 + k as i64)).norm() / c.norm().max(1.0))
                .fold(0.0, f64::max),
        )
    }

    /// Largest relative residual of the three-term recurrence.
    pub fn max_recurrence_residual(&self) -> f64 {
        let t = self.a * self.b - 2.0;
        let s = (self.a + self.b) * 2.0;
        self.terms
            .windows(3)
            .map(|w| (w[2] - t * w[1] + w[0] + s).norm() / (t * w[1]).norm().max(1.0))
            .fold(0.0, f64::max)
    }
}

const DEGENERATE_TOL: f64 = 1e-12;

/// Iterates the recurrence from `c_0 = c0`, `c_1 = c1` over `[n0, n1]`
/// (extending both ways) and fits the closed form when it exists.
pub fn spiral_sequence(a: C64, b: C64, c0: C64, c1: C64, n0: i64, n1: i64) -> SpiralSequence {
    let (lo, hi) = (n0.min(0), n1.max(1));
    let t = a * b - 2.0;
    let s = (a + b) * 2.0;
    let mut fwd = vec![c0, c1];
    for _ in 1..hi {
        let k = fwd.len();
        fwd.push(t * fwd[k - 1] - fwd[k - 2] - s);
    }
    let mut back = vec![c1, c0];
    for _ in lo..0 {
        let k = back.len();
        back.push(t * back[k - 1] - back[k - 2] - s);
    }
    // assemble c_lo..c_hi, then crop to the request
    let mut all: Vec<C64> = back[2..].iter().rev().copied().collect();
    all.extend(fwd);
    let start = (n0 - lo) as usize;
    let end = (n1 - lo) as usize;
    let terms = if n1 >= n0 { all[start..=end].to_vec() } else { Vec::new() };

    let ab = a * b;
    let closed_form = if ab.norm() <= DEGENERATE_TOL || (ab - 4.0).norm() <= DEGENERATE_TOL {
        None
    } else {
        let lambda = (t + (ab * (ab - 4.0)).sqrt()) / 2.0;
        let offset = -s / (-ab + 4.0);
        let inv = lambda.inv();
        let (u0, u1) = (c0 - offset, c1 - offset);
        // A + B = u0, A lambda + B / lambda = u1
        let a_coef = (u1 - u0 * inv) / (lambda - inv);
        let b_coef = u0 - a_coef;
        Some(SpiralClosedForm { a_coef, b_coef, lambda, offset })
    };
    SpiralSequence { a, b, n0, terms, closed_form }
}
