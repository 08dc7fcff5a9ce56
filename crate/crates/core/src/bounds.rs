//! First-moment (union bound) upper bounds on the optimal cover size.
//!
//! Pick `k` columns uniformly at random. Row `i` stays uncovered with
//! probability `C(n - d_i, k) / C(n, k) <= (1 - δ_i)^k`; whenever the sum of
//! these probabilities is below one, some `k`-subset covers every row.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::RowProfile;
use crate::num::{ln_complement, log_strictly_less, log_sum_exp, LnFactorials, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FirstMoment,
    Hypergeometric,
    Homogeneous,
    Bonferroni,
    Decomposed,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::FirstMoment => "first-moment",
            Method::Hypergeometric => "hypergeometric",
            Method::Homogeneous => "homogeneous",
            Method::Bonferroni => "bonferroni",
            Method::Decomposed => "decomposed",
        }
    }
}

/// Condition values witnessing a bound: the method's left-hand side
/// (normalised so the condition reads `value < 1`) at `k` and at `k - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct Witness<F> {
    pub at_k: Option<F>,
    pub at_prev: Option<F>,
}

/// A certified (when `sound`) cover cardinality `k`, or `None` when no
/// `k <= n` satisfies the method's condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult<F> {
    pub method: Method,
    pub k: Option<usize>,
    pub witness: Witness<F>,
    pub sound: bool,
}

impl<F: Real> BoundResult<F> {
    /// Builds a result from a log-domain condition, filling the witness.
    pub(crate) fn from_search(method: Method, sound: bool, k: Option<usize>, ln_cond: impl Fn(usize) -> F) -> Self {
        let witness = match k {
            Some(k) => Witness { at_k: Some(ln_cond(k).exp()), at_prev: (k > 1).then(|| ln_cond(k - 1).exp()) },
            None => Witness::default(),
        };
        BoundResult { method, k, witness, sound }
    }
}

/// Smallest `k` in `1..=n` with `exp(ln_cond(k)) < 1`.
///
/// `ln_cond` is expected to be non-increasing, so binary search is used.
/// The answer is confirmed at `k` and `k - 1`; if floating point breaks
/// monotonicity the search falls back to a linear scan.
pub(crate) fn least_k_satisfying<F: Real>(n: usize, ln_cond: impl Fn(usize) -> F) -> Option<usize> {
    let ok = |k: usize| log_strictly_less(ln_cond(k), F::zero());
    if n == 0 || !ok(n) {
        return (1..=n).find(|&k| ok(k));
    }
    let (mut lo, mut hi) = (1usize, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if ok(lo) && (lo == 1 || !ok(lo - 1)) {
        Some(lo)
    } else {
        (1..=n).find(|&k| ok(k))
    }
}

fn check_counts(n: usize, d: usize, k: usize) -> Result<()> {
    if d > n || k > n {
        return Err(Error::invalid(format!("need 0 <= d, k <= n, got n = {n}, d = {d}, k = {k}")));
    }
    Ok(())
}

/// Probability that a uniform `k`-subset of `n` columns misses all `d` ones
/// of a row: `C(n - d, k) / C(n, k)`.
pub fn exact_uncovered_prob<F: Real>(n: usize, d: usize, k: usize) -> Result<F> {
    check_counts(n, d, k)?;
    let table = LnFactorials::<F>::new(n);
    Ok(ln_uncovered(&table, n, d, k).exp())
}

#[inline]
pub(crate) fn ln_uncovered<F: Real>(table: &LnFactorials<F>, n: usize, d: usize, k: usize) -> F {
    table.ln_choose(n - d, k) - table.ln_choose(n, k)
}

/// `ln Σ_l (1 - δ_l)^k`, summed over the density histogram.
pub fn first_moment_ln_condition<F: Real>(profile: &RowProfile, k: usize) -> F {
    let n = F::count(profile.cols() as u64);
    let hist = profile.histogram();
    log_sum_exp(
        hist.iter()
            .map(|&(d, c)| F::count(c as u64).ln() + F::count(k as u64) * ln_complement(F::count(d as u64) / n)),
    )
}

/// Least `k` with `Σ_l (1 - δ_l)^k < 1`.
pub fn first_moment_bound<F: Real>(profile: &RowProfile) -> Result<BoundResult<F>> {
    profile.check_feasible()?;
    let cond = |k| first_moment_ln_condition::<F>(profile, k);
    let k = least_k_satisfying(profile.cols(), cond);
    Ok(BoundResult::from_search(Method::FirstMoment, true, k, cond))
}

/// Least `k` with `Σ_i C(n - d_i, k) / C(n, k) < 1`. Never larger than
/// [`first_moment_bound`] because each term is dominated.
pub fn hypergeometric_first_moment_bound<F: Real>(profile: &RowProfile) -> Result<BoundResult<F>> {
    profile.check_feasible()?;
    let n = profile.cols();
    let table = LnFactorials::<F>::new(n);
    let hist = profile.histogram();
    let cond = |k: usize| {
        log_sum_exp(hist.iter().map(|&(d, c)| F::count(c as u64).ln() + ln_uncovered(&table, n, d, k)))
    };
    let k = least_k_satisfying(n, cond);
    Ok(BoundResult::from_search(Method::Hypergeometric, true, k, cond))
}

/// `log m / |log(1 - δ)|`.
pub fn homogeneous_threshold<F: Real>(m: usize, delta: F) -> Result<F> {
    check_homogeneous(m, delta)?;
    if delta == F::one() {
        return Ok(F::zero());
    }
    Ok(F::count(m as u64).ln() / ln_complement(delta).abs())
}

fn check_homogeneous<F: Real>(m: usize, delta: F) -> Result<()> {
    if m < 1 {
        return Err(Error::invalid("m must be at least 1"));
    }
    if !(delta > F::zero() && delta <= F::one()) {
        return Err(Error::invalid(format!("delta = {delta} outside (0, 1]")));
    }
    Ok(())
}

/// Least integer strictly above [`homogeneous_threshold`].
pub fn homogeneous_bound<F: Real>(m: usize, delta: F) -> Result<usize> {
    let t = homogeneous_threshold(m, delta)?;
    t.floor()
        .to_usize()
        .map(|k| k + 1)
        .ok_or_else(|| Error::invalid(format!("threshold {t} not representable")))
}

/// Certified and literal homogeneous bounds of one matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneousBounds<F> {
    /// Uses the minimum row density; valid cover size.
    pub certified: BoundResult<F>,
    /// Uses the maximum row density, as the closed form is usually quoted;
    /// not a guarantee on heterogeneous matrices.
    pub literal: BoundResult<F>,
}

/// Homogeneous bound with `δ = min_i δ_i` (sound, since then
/// `Σ(1 - δ_l)^k <= m(1 - δ)^k`) and with `δ = max_i δ_i` (literal).
///
/// The certified value is re-checked as `m(1 - δ)^k < 1` and bumped when the
/// floating point threshold lands exactly on an integer.
pub fn homogeneous_bound_certified<F: Real>(profile: &RowProfile) -> Result<HomogeneousBounds<F>> {
    profile.check_feasible()?;
    let (m, n) = (profile.rows(), profile.cols());
    let ln_cond = |delta: F| move |k: usize| F::count(m as u64).ln() + F::count(k as u64) * ln_complement(delta);

    let dmin = profile.min_density::<F>();
    let cond = ln_cond(dmin);
    let mut k = homogeneous_bound(m, dmin)?;
    while !log_strictly_less(cond(k), F::zero()) {
        k += 1;
    }
    let certified = BoundResult::from_search(Method::Homogeneous, true, (k <= n).then_some(k), cond);

    let dmax = profile.max_density::<F>();
    let lk = homogeneous_bound(m, dmax)?;
    let literal = BoundResult::from_search(Method::Homogeneous, false, (lk <= n).then_some(lk), ln_cond(dmax));
    Ok(HomogeneousBounds { certified, literal })
}
