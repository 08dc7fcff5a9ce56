//! Scalar abstraction and log-space combinatorics.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used by every bound computation: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Relative band below 1 inside which a strict "< 1" comparison is
    /// resolved as not satisfied.
    fn guard_band() -> Self;

    /// Converts a count. Counts handled here stay far below 2^53.
    #[inline]
    fn count(x: u64) -> Self {
        Self::from_u64(x).expect("count representable as float")
    }

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable as float")
    }
}

impl Real for f64 {
    #[inline]
    fn guard_band() -> Self {
        1e-12
    }
}

impl Real for f32 {
    // about 80 ulps at 1.0
    #[inline]
    fn guard_band() -> Self {
        1e-5
    }
}

/// `ln(1 - x)` with the `x = 1` endpoint mapped to negative infinity.
#[inline]
pub fn ln_complement<F: Real>(x: F) -> F {
    if x >= F::one() {
        F::neg_infinity()
    } else {
        (-x).ln_1p()
    }
}

/// `log(sum(exp(terms)))`, evaluated in iteration order.
///
/// Empty input and all-`-inf` input give `-inf`.
pub fn log_sum_exp<F: Real, I>(terms: I) -> F
where
    I: IntoIterator<Item = F>,
    I::IntoIter: Clone,
{
    let iter = terms.into_iter();
    let max = iter.clone().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    let sum = iter.fold(F::zero(), |acc, t| acc + (t - max).exp());
    max + sum.ln()
}

/// Log-space "strictly less than" with the scalar's guard band applied to
/// the right-hand side: `exp(lhs) < exp(rhs) * (1 - guard)`.
#[inline]
pub fn log_strictly_less<F: Real>(lhs: F, rhs: F) -> bool {
    if lhs == F::neg_infinity() {
        return rhs > F::neg_infinity();
    }
    lhs < rhs + ln_complement(F::guard_band())
}

/// Table of `ln(i!)` for `i = 0..=n`, built by cumulative summation of
/// `ln(i)`. Binomial arguments here are always exact integers, so the table
/// replaces a log-Gamma evaluation.
#[derive(Debug, Clone)]
pub struct LnFactorials<F> {
    table: Vec<F>,
}

impl<F: Real> LnFactorials<F> {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        table.push(F::zero());
        // accumulate in f64 regardless of F, then narrow
        let mut acc = 0.0f64;
        for i in 1..=n {
            acc += (i as f64).ln();
            table.push(F::lit(acc));
        }
        LnFactorials { table }
    }

    /// Largest `n` the table covers.
    pub fn max_n(&self) -> usize {
        self.table.len() - 1
    }

    #[inline]
    pub fn ln_factorial(&self, n: usize) -> F {
        self.table[n]
    }

    /// `ln C(n, k)`, or `-inf` when `k > n`.
    #[inline]
    pub fn ln_choose(&self, n: usize, k: usize) -> F {
        if k > n {
            return F::neg_infinity();
        }
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exact_choose(n: u64, k: u64) -> u128 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc
    }

    #[test]
    fn ln_choose_matches_exact_integers() {
        let table = LnFactorials::<f64>::new(120);
        for n in 0..=120u64 {
            for k in 0..=n {
                let exact = exact_choose(n, k) as f64;
                let got = table.ln_choose(n as usize, k as usize).exp();
                assert_relative_eq!(got, exact, max_relative = 1e-12);
            }
        }
        assert_eq!(table.ln_choose(3, 4), f64::NEG_INFINITY);
    }

    #[test]
    fn ln_choose_f32() {
        let table = LnFactorials::<f32>::new(30);
        assert_relative_eq!(table.ln_choose(30, 5).exp(), 142506.0, max_relative = 1e-4);
    }

    #[test]
    fn log_sum_exp_basic() {
        let v = [0.0f64.ln(), 2.0f64.ln(), 3.0f64.ln()];
        assert_relative_eq!(log_sum_exp(v.iter().copied()), 5.0f64.ln(), max_relative = 1e-15);
        let empty: [f64; 0] = [];
        assert_eq!(log_sum_exp(empty.iter().copied()), f64::NEG_INFINITY);
    }

    #[test]
    fn strict_comparison_rejects_equality() {
        assert!(!log_strictly_less(0.0f64, 0.0));
        assert!(!log_strictly_less(-1e-14f64, 0.0));
        assert!(log_strictly_less(-1e-9f64, 0.0));
        assert!(log_strictly_less(f64::NEG_INFINITY, 0.0));
        assert!(!log_strictly_less(f64::NEG_INFINITY, f64::NEG_INFINITY));
    }

    #[test]
    fn ln_complement_endpoints() {
        assert_eq!(ln_complement(1.0f64), f64::NEG_INFINITY);
        assert_eq!(ln_complement(0.0f64), 0.0);
        assert_relative_eq!(ln_complement(0.5f64), -(2.0f64.ln()));
    }
}
