//! Third-order Bonferroni refinement of the first-moment bound.
//!
//! With `B_i` the event that row `i` is missed by a uniform `k`-subset,
//! `P(∪B_i) <= S1 - S2 + S3` where, after multiplying through by `C(n, k)`,
//!
//! ```text
//! S1 = Σ_i       C(n - d_i, k)
//! S2 = Σ_{i<j}   C(n - d_i - d_j + |Γ_ij|, k)
//! S3 = Σ_{i<j<l} C(n - d_i - d_j - d_l + |Γ_ij| + |Γ_il| + |Γ_jl| - |Γ_ijl|, k)
//! ```
//!
//! Each binomial's upper argument is the number of columns where all the
//! rows involved are zero, so the sums only need a histogram of those
//! counts. The histogram is built once and reused for every `k`.

use serde::Serialize;

use crate::bounds::{BoundResult, Method, Witness};
use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;
use crate::num::{ln_complement, log_strictly_less, log_sum_exp, LnFactorials, Real};

/// Default cap on the row count for the `O(m^3)` triple sum.
pub const DEFAULT_ROW_CAP: usize = 2000;

/// Rounded constant usually quoted for the root of `y - y²/2 + y³/6 = 1`.
/// Computations use [`truncated_series_root`] instead.
pub const QUOTED_SERIES_CONSTANT: f64 = 1.56;

/// The three truncated inclusion-exclusion sums at one `k`, in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BonferroniWitness<F> {
    pub k: usize,
    pub s1: F,
    pub s2: F,
    pub s3: F,
    /// `ln C(n, k)`.
    pub rhs: F,
    /// `S1 + S3 < C(n, k) + S2`, with the guard band resolving ties to false.
    pub satisfied: bool,
}

impl<F: Real> BonferroniWitness<F> {
    /// `(S1 - S2 + S3) / C(n, k)`, the upper bound on `P(∪B_i)`.
    pub fn normalized(&self) -> F {
        (self.s1 - self.rhs).exp() - (self.s2 - self.rhs).exp() + (self.s3 - self.rhs).exp()
    }
}

/// Histograms of the binomial upper arguments of `S1`, `S2`, `S3`:
/// `hist[a]` counts the rows, pairs or triples with `a` common zero columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BonferroniSums {
    n: usize,
    singles: Vec<u64>,
    pairs: Vec<u64>,
    triples: Vec<u64>,
}

fn zero_columns(n: usize, sum: i64, what: &str) -> Result<usize> {
    if sum < 0 || sum > n as i64 {
        return Err(Error::Internal(format!("{what} has {sum} common zero columns out of {n}")));
    }
    Ok(sum as usize)
}

impl BonferroniSums {
    pub fn new(matrix: &BinaryMatrix) -> Result<Self> {
        Self::with_row_cap(matrix, DEFAULT_ROW_CAP)
    }

    pub fn with_row_cap(matrix: &BinaryMatrix, cap: usize) -> Result<Self> {
        matrix.check_feasible()?;
        let (m, n) = (matrix.rows(), matrix.cols());
        if m > cap {
            return Err(Error::TooLarge { rows: m, cap });
        }
        let d: Vec<i64> = matrix.row_profile().ones().iter().map(|&x| x as i64).collect();
        let overlaps = matrix.overlap_table();
        let g = |i: usize, j: usize| overlaps.pair(i, j).expect("rows in range") as i64;
        let ni = n as i64;

        let mut singles = vec![0u64; n + 1];
        let mut pairs = vec![0u64; n + 1];
        let mut triples = vec![0u64; n + 1];
        for i in 0..m {
            singles[zero_columns(n, ni - d[i], "a row")?] += 1;
        }
        let mut both = vec![0u64; matrix.stride()];
        for i in 0..m {
            for j in i + 1..m {
                let gij = g(i, j);
                pairs[zero_columns(n, ni - d[i] - d[j] + gij, "a row pair")?] += 1;
                for (w, (a, b)) in both.iter_mut().zip(matrix.row_words(i).iter().zip(matrix.row_words(j))) {
                    *w = a & b;
                }
                for l in j + 1..m {
                    let gijl: i64 =
                        both.iter().zip(matrix.row_words(l)).map(|(a, b)| (a & b).count_ones() as i64).sum();
                    let a = ni - d[i] - d[j] - d[l] + gij + g(i, l) + g(j, l) - gijl;
                    triples[zero_columns(n, a, "a row triple")?] += 1;
                }
            }
        }
        Ok(BonferroniSums { n, singles, pairs, triples })
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn single_histogram(&self) -> &[u64] {
        &self.singles
    }

    pub fn pair_histogram(&self) -> &[u64] {
        &self.pairs
    }

    pub fn triple_histogram(&self) -> &[u64] {
        &self.triples
    }

    fn ln_sum<F: Real>(table: &LnFactorials<F>, hist: &[u64], k: usize) -> F {
        log_sum_exp(
            hist.iter()
                .enumerate()
                .filter(|&(_, &c)| c > 0)
                .map(|(a, &c)| F::count(c).ln() + table.ln_choose(a, k)),
        )
    }

    pub fn witness<F: Real>(&self, table: &LnFactorials<F>, k: usize) -> BonferroniWitness<F> {
        let s1 = Self::ln_sum(table, &self.singles, k);
        let s2 = Self::ln_sum(table, &self.pairs, k);
        let s3 = Self::ln_sum(table, &self.triples, k);
        let rhs = table.ln_choose(self.n, k);
        let lhs = log_sum_exp([s1, s3]);
        let right = log_sum_exp([rhs, s2]);
        BonferroniWitness { k, s1, s2, s3, rhs, satisfied: log_strictly_less(lhs, right) }
    }
}

/// Evaluates the third-order condition at a single `k` in `1..=n`.
pub fn bonferroni_condition<F: Real>(matrix: &BinaryMatrix, k: usize) -> Result<BonferroniWitness<F>> {
    let n = matrix.cols();
    if k < 1 || k > n {
        return Err(Error::OutOfRange(format!("k = {k} outside 1..={n}")));
    }
    let sums = BonferroniSums::new(matrix)?;
    Ok(sums.witness(&LnFactorials::new(n), k))
}

/// Smallest satisfied `k`, scanning upward from 1.
///
/// The truncated series is not a probability and need not be monotone in
/// `k`, so no bisection: the first satisfied `k` is returned and is valid on
/// its own.
pub fn bonferroni_bound<F: Real>(matrix: &BinaryMatrix) -> Result<BoundResult<F>> {
    bonferroni_bound_with_cap(matrix, DEFAULT_ROW_CAP)
}

pub fn bonferroni_bound_with_cap<F: Real>(matrix: &BinaryMatrix, cap: usize) -> Result<BoundResult<F>> {
    let sums = BonferroniSums::with_row_cap(matrix, cap)?;
    let n = matrix.cols();
    let table = LnFactorials::<F>::new(n);
    let k = (1..=n).find(|&k| sums.witness(&table, k).satisfied);
    // the truncated series can go negative, so the witness is stored as is
    let value = |k: usize| sums.witness(&table, k).normalized();
    let witness = match k {
        Some(k) => Witness { at_k: Some(value(k)), at_prev: (k > 1).then(|| value(k - 1)) },
        None => Witness::default(),
    };
    Ok(BoundResult { method: Method::Bonferroni, k, witness, sound: true })
}

/// `y - y²/2 + y³/6`, the third-order truncation of `1 - e^{-y}`.
pub fn truncated_series<F: Real>(y: F) -> F {
    let two = F::lit(2.0);
    let six = F::lit(6.0);
    y - y * y / two + y * y * y / six
}

/// Unique real root of `y - y²/2 + y³/6 = 1`, by bisection on `[0, 2]`.
///
/// The cubic's derivative `1 - y + y²/2` has no real zero, so the root is
/// unique. Bisection stops at width `1e-9` or when the midpoint no longer
/// moves in `F`.
pub fn truncated_series_root<F: Real>() -> F {
    let (mut lo, mut hi) = (F::zero(), F::lit(2.0));
    let tol = F::lit(1e-9);
    while hi - lo > tol {
        let mid = (lo + hi) / F::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if truncated_series(mid) < F::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / F::lit(2.0)
}

/// `(log m - log y*) / |log(1 - δ)|`: the refined threshold for random
/// constant-density matrices, neglecting lower order terms. A diagnostic,
/// not a certified bound.
pub fn constant_density_refined_bound<F: Real>(m: usize, delta: F) -> Result<F> {
    if m < 2 {
        return Err(Error::invalid("m must be at least 2"));
    }
    if !(delta > F::zero() && delta < F::one()) {
        return Err(Error::invalid(format!("delta = {delta} outside (0, 1)")));
    }
    let y = truncated_series_root::<F>();
    Ok((F::count(m as u64).ln() - y.ln()) / ln_complement(delta).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mat(rows: &[&str]) -> BinaryMatrix {
        BinaryMatrix::from_bit_strings(rows).unwrap()
    }

    fn exp_sums(w: &BonferroniWitness<f64>) -> (f64, f64, f64, f64) {
        (w.s1.exp(), w.s2.exp(), w.s3.exp(), w.rhs.exp())
    }

    #[test]
    fn two_disjoint_rows() {
        let a = mat(&["1100", "0011"]);
        let w = bonferroni_condition::<f64>(&a, 2).unwrap();
        let (s1, s2, s3, c) = exp_sums(&w);
        assert_relative_eq!(s1, 2.0, max_relative = 1e-12);
        assert_eq!(s2, 0.0);
        assert_eq!(s3, 0.0);
        assert_relative_eq!(c, 6.0, max_relative = 1e-12);
        assert!(w.satisfied);

        let w = bonferroni_condition::<f64>(&a, 1).unwrap();
        let (s1, s2, _, c) = exp_sums(&w);
        assert_relative_eq!(s1, 4.0, max_relative = 1e-12);
        assert_eq!(s2, 0.0);
        assert_relative_eq!(c, 4.0, max_relative = 1e-12);
        assert!(!w.satisfied);
    }

    #[test]
    fn three_row_chain() {
        let a = mat(&["1100", "0110", "0011"]);
        let w = bonferroni_condition::<f64>(&a, 2).unwrap();
        let (s1, s2, s3, c) = exp_sums(&w);
        assert_relative_eq!(s1, 3.0, max_relative = 1e-12);
        assert_eq!(s2, 0.0);
        assert_eq!(s3, 0.0);
        assert_relative_eq!(c, 6.0, max_relative = 1e-12);
        assert!(w.satisfied);
        assert_eq!(bonferroni_bound::<f64>(&a).unwrap().k, Some(2));
    }

    #[test]
    fn all_ones_and_errors() {
        let a = BinaryMatrix::ones(4, 5).unwrap();
        assert_eq!(bonferroni_bound::<f64>(&a).unwrap().k, Some(1));
        assert!(bonferroni_condition::<f64>(&a, 0).is_err());
        assert!(bonferroni_condition::<f64>(&a, 6).is_err());
        let z = mat(&["10", "00"]);
        assert_eq!(bonferroni_bound::<f64>(&z), Err(Error::Infeasible { row: 2 }));
        let big = BinaryMatrix::ones(5, 2).unwrap();
        assert_eq!(bonferroni_bound_with_cap::<f64>(&big, 4), Err(Error::TooLarge { rows: 5, cap: 4 }));
    }

    #[test]
    fn witness_normalized_matches_sums() {
        let a = mat(&["1100", "0110", "0011", "1001"]);
        let w = bonferroni_condition::<f64>(&a, 2).unwrap();
        let (s1, s2, s3, c) = exp_sums(&w);
        assert_relative_eq!(w.normalized(), (s1 - s2 + s3) / c, max_relative = 1e-12);
    }

    #[test]
    fn series_root() {
        let y: f64 = truncated_series_root();
        assert!(y > 1.590 && y < 1.605, "{y}");
        assert!((truncated_series(y) - 1.0).abs() < 1e-8);
        assert_eq!(truncated_series(0.0f64), 0.0);
        assert!(truncated_series(QUOTED_SERIES_CONSTANT) < 1.0);
        assert_relative_eq!(truncated_series(1.56f64), 0.975936, max_relative = 1e-9);
        let y32: f32 = truncated_series_root();
        assert!((y32 as f64 - y).abs() < 1e-6);
    }

    #[test]
    fn refined_threshold_examples() {
        let y: f64 = truncated_series_root();
        let t = constant_density_refined_bound(1000, 0.5f64).unwrap();
        assert_relative_eq!(t, (1000f64.ln() - y.ln()) / 2f64.ln(), max_relative = 1e-14);
        assert!((t - 9.29).abs() < 0.01, "{t}");
        let t2 = constant_density_refined_bound(2, 0.5f64).unwrap();
        assert!((t2 - 0.325).abs() < 0.001, "{t2}");
        for m in [2usize, 3, 10, 1000, 1_000_000] {
            for d in [0.05f64, 0.3, 0.9] {
                let unrefined = crate::bounds::homogeneous_threshold(m, d).unwrap();
                assert!(constant_density_refined_bound(m, d).unwrap() < unrefined);
            }
        }
        assert!(constant_density_refined_bound(1, 0.5f64).is_err());
        assert!(constant_density_refined_bound(10, 1.0f64).is_err());
    }
}
