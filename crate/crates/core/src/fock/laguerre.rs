//! Associated Laguerre polynomials by three-term recurrence.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 math shadows it when std is linked
use num_traits::Float;

/// L_n^k(x).
pub fn laguerre_assoc(n: usize, k: usize, x: f64) -> f64 {
    let mut series = LaguerreSeries::new(k, x);
    let mut value = 1.0;
    for _ in 0..=n {
        value = series.next_value();
    }
    value
}

/// Streams L_0^k(x), L_1^k(x), … without recomputing from scratch.
#[derive(Debug, Clone)]
pub struct LaguerreSeries {
    k: f64,
    x: f64,
    n: usize,
    prev: f64,
    curr: f64,
}

impl LaguerreSeries {
    pub fn new(k: usize, x: f64) -> Self {
        LaguerreSeries { k: k as f64, x, n: 0, prev: 0.0, curr: 0.0 }
    }

    /// Degree of the value returned by the next call.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn next_value(&mut self) -> f64 {
        let n = self.n;
        let next = match n {
            0 => 1.0,
            1 => 1.0 + self.k - self.x,
            _ => {
                let m = (n - 1) as f64;
                ((2.0 * m + 1.0 + self.k - self.x) * self.curr - (m + self.k) * self.prev) / (m + 1.0)
            }
        };
        self.prev = self.curr;
        self.curr = next;
        self.n += 1;
        next
    }
}

/// First degree n with L_n^1(x) ≤ 0, scanning up to `limit` (exclusive).
pub fn first_nonpositive_degree(x: f64, limit: usize) -> Option<usize> {
    let mut series = LaguerreSeries::new(1, x);
    (0..limit).find(|_| series.next_value() <= 0.0)
}

/// Magnitudes f_n = √(n!/(n+k)!)·x^{k/2}·e^{−x/2}·L_n^k(x) for n = 0..count.
///
/// These are the displacement-operator matrix elements up to phase; the
/// prefactor is folded into the recurrence so nothing overflows.
pub(crate) fn scaled_laguerre_column(k: usize, x: f64, count: usize, ln_factorial: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let kf = k as f64;
    let f0 = if k == 0 {
        (-0.5 * x).exp()
    } else if x == 0.0 {
        0.0
    } else {
        let ln_f0 = 0.5 * kf * x.ln() - 0.5 * ln_factorial[k] - 0.5 * x;
        if ln_f0 < -740.0 {
            0.0
        } else {
            ln_f0.exp()
        }
    };
    out.push(f0);
    if count == 1 {
        return out;
    }
    let f1 = f0 * (1.0 + kf - x) / (1.0 + kf).sqrt();
    out.push(f1);
    for n in 1..count - 1 {
        let nf = n as f64;
        let a = (2.0 * nf + 1.0 + kf - x) * ((nf + 1.0) / (nf + kf + 1.0)).sqrt();
        let b = (nf + kf) * (nf * (nf + 1.0) / ((nf + kf) * (nf + kf + 1.0))).sqrt();
        let next = (a * out[n] - b * out[n - 1]) / (nf + 1.0);
        out.push(next);
    }
    out
}

/// ln(n!) for n = 0..=max.
pub(crate) fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=max {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}
