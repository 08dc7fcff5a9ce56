//! Two-block decomposition bounds.
//!
//! Split the rows at `r` and the columns at `c` into four blocks
//!
//! ```text
//! | M11 (δ1)  M12 (δ2) |   rows 0..r
//! | M21 (δ3)  M22 (δ4) |   rows r..m
//! ```
//!
//! and draw `k1` columns from the left part and `k2` from the right. A top
//! row is missed with probability at most `(1-δ1)^k1 (1-δ2)^k2`, a bottom row
//! with at most `(1-δ3)^k1 (1-δ4)^k2`, so a cover of size `k1 + k2` exists when
//!
//! ```text
//! r (1-δ1)^k1 (1-δ2)^k2 + (m-r) (1-δ3)^k1 (1-δ4)^k2 < 1.
//! ```
//!
//! Splitting the budget `1` into `α` and `1 - α` turns this into a 2x2 linear
//! system in `(k1, k2)`; the optimal `α` has a closed form.

mod search;

pub use search::{search_split, SplitSearch};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;
use crate::num::{ln_complement, log_strictly_less, log_sum_exp, Real};

/// Densities of the four blocks, top-left, top-right, bottom-left,
/// bottom-right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockDensities<F> {
    pub d1: F,
    pub d2: F,
    pub d3: F,
    pub d4: F,
}

impl<F: Real> BlockDensities<F> {
    pub fn new(d1: F, d2: F, d3: F, d4: F) -> Self {
        BlockDensities { d1, d2, d3, d4 }
    }

    /// `|log(1 - δ)|` for each block.
    fn neg_logs(&self) -> [F; 4] {
        [self.d1, self.d2, self.d3, self.d4].map(|d| ln_complement(d).abs())
    }

    fn check_unit_open(&self) -> Result<()> {
        for (name, d) in [("d1", self.d1), ("d2", self.d2), ("d3", self.d3), ("d4", self.d4)] {
            if !(d >= F::zero() && d < F::one()) {
                return Err(Error::invalid(format!("{name} = {d} outside [0, 1)")));
            }
        }
        Ok(())
    }
}

/// Row-count extremes of one block: `(min, max)` ones over the block's rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockCounts {
    pub min: usize,
    pub max: usize,
    pub width: usize,
}

/// A matrix split at row `r` and column `c`, with block density extremes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDecomposition<F> {
    pub rows: usize,
    pub cols: usize,
    pub split_row: usize,
    pub split_col: usize,
    /// `2r/m - 1`.
    pub mu: F,
    /// `2c/n - 1`.
    pub nu: F,
    /// Block maximum row densities.
    pub max_density: BlockDensities<F>,
    /// Block minimum row densities.
    pub min_density: BlockDensities<F>,
    pub counts: [BlockCounts; 4],
    /// Maximum row density of the whole matrix.
    pub overall_max_density: F,
    /// Diagonal block maxima exceed the overall maximum and off-diagonal
    /// block maxima stay below it.
    pub valid: bool,
}

impl<F: Real> BlockDecomposition<F> {
    pub fn top_rows(&self) -> usize {
        self.split_row
    }

    pub fn bottom_rows(&self) -> usize {
        self.rows - self.split_row
    }

    pub fn left_cols(&self) -> usize {
        self.split_col
    }

    pub fn right_cols(&self) -> usize {
        self.cols - self.split_col
    }
}

/// Splits `matrix` (as given, no permutation) after row `r` and column `c`.
pub fn make_decomposition<F: Real>(matrix: &BinaryMatrix, r: usize, c: usize) -> Result<BlockDecomposition<F>> {
    let (m, n) = (matrix.rows(), matrix.cols());
    if r < 1 || r >= m || c < 1 || c >= n {
        return Err(Error::OutOfRange(format!("split ({r}, {c}) needs 1 <= r < {m} and 1 <= c < {n}")));
    }
    let mut counts = [(usize::MAX, 0usize); 4];
    let mut overall_max = 0usize;
    for i in 0..m {
        let left = matrix.row_ones_in(i, 0..c);
        let right = matrix.row_ones(i) - left;
        overall_max = overall_max.max(left + right);
        let (bl, br) = if i < r { (0, 1) } else { (2, 3) };
        for (b, x) in [(bl, left), (br, right)] {
            counts[b].0 = counts[b].0.min(x);
            counts[b].1 = counts[b].1.max(x);
        }
    }
    let widths = [c, n - c, c, n - c];
    let counts: [BlockCounts; 4] =
        std::array::from_fn(|b| BlockCounts { min: counts[b].0, max: counts[b].1, width: widths[b] });
    let dens = |pick: fn(&BlockCounts) -> usize| -> BlockDensities<F> {
        let d = |b: usize| F::count(pick(&counts[b]) as u64) / F::count(counts[b].width as u64);
        BlockDensities::new(d(0), d(1), d(2), d(3))
    };

    // exact comparisons a/w against overall_max/n by cross-multiplication
    let cmp = |b: usize| (counts[b].max * n).cmp(&(overall_max * counts[b].width));
    use std::cmp::Ordering::{Greater, Less};
    let valid = cmp(0) == Greater && cmp(3) == Greater && cmp(1) == Less && cmp(2) == Less;

    let two = F::lit(2.0);
    Ok(BlockDecomposition {
        rows: m,
        cols: n,
        split_row: r,
        split_col: c,
        mu: two * F::count(r as u64) / F::count(m as u64) - F::one(),
        nu: two * F::count(c as u64) / F::count(n as u64) - F::one(),
        max_density: dens(|b| b.max),
        min_density: dens(|b| b.min),
        counts,
        overall_max_density: F::count(overall_max as u64) / F::count(n as u64),
        valid,
    })
}

/// Budget split minimising `k1 + k2`:
/// `ᾱ = (L4 - L3) / (L4 - L3 + L1 - L2)` with `Li = |log(1 - δi)|`.
pub fn alpha_star<F: Real>(dens: &BlockDensities<F>) -> Result<F> {
    dens.check_unit_open()?;
    let [l1, l2, l3, l4] = dens.neg_logs();
    let num = l4 - l3;
    let other = l1 - l2;
    if !(num > F::zero() && other > F::zero()) {
        return Err(Error::invalid(format!(
            "density ordering violated: need d1 > d2 and d4 > d3, got {:?}",
            (dens.d1, dens.d2, dens.d3, dens.d4)
        )));
    }
    Ok(num / (num + other))
}

/// How the unit budget is split between the two row groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget<F> {
    /// `α = ᾱ`.
    Optimal,
    /// A fixed `α ∈ (0, 1)`.
    Fixed(F),
    /// Independent blocks: each group only needs probability below one,
    /// i.e. `c1 = log(top)`, `c2 = log(bottom)`.
    Independent,
}

/// Real-valued solution of the boundary system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoBlockSolution<F> {
    pub alpha: F,
    pub c1: F,
    pub c2: F,
    /// `Δ = L1 L4 - L2 L3`.
    pub delta_det: F,
    pub k1: F,
    pub k2: F,
}

impl<F: Real> TwoBlockSolution<F> {
    pub fn total(&self) -> F {
        self.k1 + self.k2
    }
}

/// Solves
///
/// ```text
/// k1 L1 + k2 L2 = c1 = |log α|     + log(top)
/// k1 L3 + k2 L4 = c2 = |log(1 - α)| + log(bottom)
/// ```
///
/// where `top` and `bottom` are the row counts `(m/2)(1 ± μ)`.
pub fn solve_two_block<F: Real>(
    top: F,
    bottom: F,
    dens: &BlockDensities<F>,
    budget: Budget<F>,
) -> Result<TwoBlockSolution<F>> {
    dens.check_unit_open()?;
    if !(top > F::zero() && bottom > F::zero()) {
        return Err(Error::invalid("both row groups must be non-empty"));
    }
    let [l1, l2, l3, l4] = dens.neg_logs();
    let delta_det = l1 * l4 - l2 * l3;
    if !(delta_det > F::zero()) {
        return Err(Error::invalid(format!("determinant {delta_det} is not positive")));
    }
    let (alpha, c1, c2) = match budget {
        Budget::Independent => (F::one(), top.ln(), bottom.ln()),
        Budget::Optimal | Budget::Fixed(_) => {
            let alpha = match budget {
                Budget::Fixed(a) => a,
                _ => alpha_star(dens)?,
            };
            if !(alpha > F::zero() && alpha < F::one()) {
                return Err(Error::invalid(format!("alpha = {alpha} outside (0, 1)")));
            }
            (alpha, alpha.ln().abs() + top.ln(), ln_complement(alpha).abs() + bottom.ln())
        }
    };
    let k1 = (c1 * l4 - c2 * l2) / delta_det;
    let k2 = (c2 * l1 - c1 * l3) / delta_det;
    Ok(TwoBlockSolution { alpha, c1, c2, delta_det, k1, k2 })
}

/// Real `k1 + k2` for an `m`-row matrix with row split `μ`.
pub fn two_block_total<F: Real>(m: F, mu: F, dens: &BlockDensities<F>, budget: Budget<F>) -> Result<F> {
    let half = m / F::lit(2.0);
    Ok(solve_two_block(half * (F::one() + mu), half * (F::one() - mu), dens, budget)?.total())
}

/// Which block densities feed the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Block minimum densities: every row's miss probability is dominated,
    /// so the result is a valid cover size.
    Sound,
    /// Block maximum densities, as in the decomposability definition.
    Literal,
}

/// Certified (or literal) cover size from a two-block split.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionBound<F> {
    pub densities: BlockDensities<F>,
    pub alpha: F,
    pub c1: F,
    pub c2: F,
    pub delta_det: F,
    pub k1_real: F,
    pub k2_real: F,
    pub k1: usize,
    pub k2: usize,
    pub total: usize,
    pub sound: bool,
    /// `k1 <= c`, `k2 <= n - c` and the integer condition holds.
    pub feasible: bool,
    /// Computed with the independent-blocks budget (off-diagonal blocks empty).
    pub independent_blocks: bool,
}

impl<F: Real> DecompositionBound<F> {
    pub fn total_real(&self) -> F {
        self.k1_real + self.k2_real
    }
}

fn variant_densities<F: Real>(dec: &BlockDecomposition<F>, variant: Variant) -> BlockDensities<F> {
    match variant {
        Variant::Sound => dec.min_density,
        Variant::Literal => dec.max_density,
    }
}

/// `ln[top (1-δ1)^k1 (1-δ2)^k2]` and the bottom counterpart.
fn ln_group_terms<F: Real>(dec: &BlockDecomposition<F>, dens: &BlockDensities<F>, k1: usize, k2: usize) -> (F, F) {
    let [l1, l2, l3, l4] = [dens.d1, dens.d2, dens.d3, dens.d4].map(ln_complement);
    let (a, b) = (F::count(k1 as u64), F::count(k2 as u64));
    // 0 * (-inf) would be NaN: an empty draw contributes nothing
    let term = |k: F, l: F| if k == F::zero() { F::zero() } else { k * l };
    let top = F::count(dec.top_rows() as u64).ln() + term(a, l1) + term(b, l2);
    let bottom = F::count(dec.bottom_rows() as u64).ln() + term(a, l3) + term(b, l4);
    (top, bottom)
}

fn lift<F: Real>(
    dec: &BlockDecomposition<F>,
    sol: &TwoBlockSolution<F>,
    holds: impl Fn(usize, usize) -> bool,
) -> (usize, usize, bool) {
    let ceil = |x: F| if x > F::zero() { x.ceil().to_usize().unwrap_or(usize::MAX) } else { 0 };
    let (mut k1, mut k2) = (ceil(sol.k1), ceil(sol.k2));
    let (cap1, cap2) = (dec.left_cols(), dec.right_cols());
    loop {
        if k1 > cap1 || k2 > cap2 {
            return (k1, k2, false);
        }
        if holds(k1, k2) {
            return (k1, k2, true);
        }
        // raise the smaller count while its block still has columns
        if (k1 <= k2 && k1 < cap1) || k2 >= cap2 {
            k1 += 1;
        } else {
            k2 += 1;
        }
    }
}

/// Bound from the optimal budget split, lifted to integers and re-checked
/// against the integer condition.
pub fn decomposed_bound<F: Real>(dec: &BlockDecomposition<F>, variant: Variant) -> Result<DecompositionBound<F>> {
    if dec.rows < 3 {
        return Err(Error::invalid("decomposition bounds need at least 3 rows"));
    }
    let dens = variant_densities(dec, variant);
    let (top, bottom) = (F::count(dec.top_rows() as u64), F::count(dec.bottom_rows() as u64));
    let sol = solve_two_block(top, bottom, &dens, Budget::Optimal)?;
    let holds = |k1: usize, k2: usize| {
        let (t, b) = ln_group_terms(dec, &dens, k1, k2);
        log_strictly_less(log_sum_exp([t, b]), F::zero())
    };
    let (k1, k2, feasible) = lift(dec, &sol, holds);
    Ok(DecompositionBound {
        densities: dens,
        alpha: sol.alpha,
        c1: sol.c1,
        c2: sol.c2,
        delta_det: sol.delta_det,
        k1_real: sol.k1,
        k2_real: sol.k2,
        k1,
        k2,
        total: k1 + k2,
        sound: variant == Variant::Sound,
        feasible,
        independent_blocks: false,
    })
}

/// When both off-diagonal blocks are empty the two row groups are missed
/// independently and `P(B ∪ B̃) < 1` iff each group's probability is below
/// one. Returns `None` if an off-diagonal block has a one.
pub fn independent_blocks_bound<F: Real>(
    dec: &BlockDecomposition<F>,
    variant: Variant,
) -> Result<Option<DecompositionBound<F>>> {
    if dec.counts[1].max != 0 || dec.counts[2].max != 0 {
        return Ok(None);
    }
    let dens = variant_densities(dec, variant);
    let (top, bottom) = (F::count(dec.top_rows() as u64), F::count(dec.bottom_rows() as u64));
    let sol = solve_two_block(top, bottom, &dens, Budget::Independent)?;
    let holds = |k1: usize, k2: usize| {
        let (t, b) = ln_group_terms(dec, &dens, k1, k2);
        log_strictly_less(t, F::zero()) && log_strictly_less(b, F::zero())
    };
    let (k1, k2, feasible) = lift(dec, &sol, holds);
    Ok(Some(DecompositionBound {
        densities: dens,
        alpha: sol.alpha,
        c1: sol.c1,
        c2: sol.c2,
        delta_det: sol.delta_det,
        k1_real: sol.k1,
        k2_real: sol.k2,
        k1,
        k2,
        total: k1 + k2,
        sound: variant == Variant::Sound,
        feasible,
        independent_blocks: true,
    }))
}

/// Perfect block decomposition (empty off-diagonal blocks):
/// `log[(m/2)(1+μ)] / |log(1-δ1)| + log[(m/2)(1-μ)] / |log(1-δ4)|`.
pub fn perfect_block_bound<F: Real>(m: usize, mu: F, d1: F, d4: F) -> Result<F> {
    if m < 3 {
        return Err(Error::invalid("m must be at least 3"));
    }
    if !(mu.abs() < F::one()) {
        return Err(Error::invalid(format!("mu = {mu} outside (-1, 1)")));
    }
    for (name, d) in [("d1", d1), ("d4", d4)] {
        if !(d > F::zero() && d < F::one()) {
            return Err(Error::invalid(format!("{name} = {d} outside (0, 1)")));
        }
    }
    let half = F::count(m as u64) / F::lit(2.0);
    Ok((half * (F::one() + mu)).ln() / ln_complement(d1).abs()
        + (half * (F::one() - mu)).ln() / ln_complement(d4).abs())
}

/// Symmetric bordered case `δ1 = δ4 = 2δ - ε`, `δ2 = δ3 = ε`, `μ = ν = 0`:
/// `2 log m / (|log(1 - 2δ + ε)| + |log(1 - ε)|)`.
pub fn symmetric_bordered_bound<F: Real>(m: usize, delta: F, eps: F) -> Result<F> {
    if m < 2 {
        return Err(Error::invalid("m must be at least 2"));
    }
    let half = F::lit(0.5);
    if !(eps >= F::zero() && eps < delta && delta < half) {
        return Err(Error::invalid(format!("need 0 <= eps < delta < 1/2, got eps = {eps}, delta = {delta}")));
    }
    let two = F::lit(2.0);
    let diag = ln_complement(two * delta - eps).abs();
    let off = ln_complement(eps).abs();
    Ok(two * F::count(m as u64).ln() / (diag + off))
}

/// Right-hand side `f(ν)` of the perfect-block comparison with
/// `δ1 = 2δ/(1+ν)`, `δ4 = 2δ/(1-ν)`: `1/|log(1-δ1)| + 1/|log(1-δ4)|`.
pub fn perfect_block_profile<F: Real>(delta: F, nu: F) -> F {
    let two = F::lit(2.0);
    let inv = |d: F| F::one() / ln_complement(d).abs();
    inv(two * delta / (F::one() + nu)) + inv(two * delta / (F::one() - nu))
}
