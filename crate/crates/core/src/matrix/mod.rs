//! Bit-packed 0-1 matrices, row densities and row overlaps.
//!
//! Library indices are 0-based. Instance files and CLI output are 1-based.

mod io;

pub use io::{parse_matrix, serialize_matrix, MatrixFormat};

use crate::error::{Error, Result};
use crate::num::Real;

const WORD: usize = 64;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// An `m x n` 0-1 matrix stored as `m` bit-rows of `ceil(n/64)` words.
///
/// Padding bits past column `n` are always zero, so row popcounts and
/// AND-popcounts need no masking.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    m: usize,
    n: usize,
    stride: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.m, self.n)?;
        for i in 0..self.m {
            let row: String = (0..self.n).map(|j| if self.get(i, j) { '1' } else { '0' }).collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

impl BinaryMatrix {
    /// All-zero matrix. Both dimensions must be positive.
    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid(format!("matrix dimensions must be positive, got {m}x{n}")));
        }
        let stride = words_for(n);
        Ok(BinaryMatrix { m, n, stride, data: vec![0; m * stride] })
    }

    pub fn ones(m: usize, n: usize) -> Result<Self> {
        Self::from_fn(m, n, |_, _| true)
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::from_fn(m, m, |i, j| i == j)
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut out = Self::zeros(m, n)?;
        for i in 0..m {
            for j in 0..n {
                if f(i, j) {
                    out.set(i, j);
                }
            }
        }
        Ok(out)
    }

    /// Builds a matrix from 0-based column lists, one per row.
    pub fn from_row_sets(n: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let mut out = Self::zeros(rows.len(), n)?;
        for (i, cols) in rows.iter().enumerate() {
            for &j in cols {
                if j >= n {
                    return Err(Error::OutOfRange(format!("column {} in a matrix with {n} columns", j + 1)));
                }
                out.set(i, j);
            }
        }
        Ok(out)
    }

    /// Parses rows written as `'0'`/`'1'` strings, e.g. `["1100", "0011"]`.
    pub fn from_bit_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let n = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut out = Self::zeros(rows.len(), n)?;
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::invalid(format!("row {} has length {}, expected {n}", i + 1, r.len())));
            }
            for (j, ch) in r.bytes().enumerate() {
                match ch {
                    b'1' => out.set(i, j),
                    b'0' => {}
                    other => {
                        return Err(Error::invalid(format!("row {}: unexpected character {:?}", i + 1, other as char)))
                    }
                }
            }
        }
        Ok(out)
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize) {
        self.data[i * self.stride + j / WORD] |= 1u64 << (j % WORD);
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.n
    }

    /// Number of `u64` words per row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.m && j < self.n);
        self.data[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// 0-based column indices of the ones in row `i`.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.get(i, j)).collect()
    }

    #[inline]
    pub fn row_ones(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn total_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// First row (0-based) without any one, if any.
    pub fn first_zero_row(&self) -> Option<usize> {
        (0..self.m).find(|&i| self.row_words(i).iter().all(|&w| w == 0))
    }

    /// Fails with [`Error::Infeasible`] naming the first uncoverable row.
    pub fn check_feasible(&self) -> Result<()> {
        match self.first_zero_row() {
            Some(i) => Err(Error::Infeasible { row: i + 1 }),
            None => Ok(()),
        }
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = BinaryMatrix::zeros(self.n, self.m).expect("dimensions already positive");
        for i in 0..self.m {
            for j in 0..self.n {
                if self.get(i, j) {
                    t.set(j, i);
                }
            }
        }
        t
    }

    /// Submatrix of rows `row_range` restricted to columns `col_range`.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Result<BinaryMatrix> {
        if rows.end > self.m || cols.end > self.n {
            return Err(Error::OutOfRange("block exceeds matrix".into()));
        }
        let c0 = cols.start;
        let r0 = rows.start;
        BinaryMatrix::from_fn(rows.len(), cols.len(), |i, j| self.get(r0 + i, c0 + j))
    }

    /// Number of ones of row `i` inside columns `cols`.
    pub fn row_ones_in(&self, i: usize, cols: std::ops::Range<usize>) -> usize {
        cols.filter(|&j| self.get(i, j)).count()
    }

    pub fn row_profile(&self) -> RowProfile {
        RowProfile { n: self.n, ones: (0..self.m).map(|i| self.row_ones(i)).collect() }
    }

    fn check_row(&self, i: usize) -> Result<()> {
        if i >= self.m {
            return Err(Error::OutOfRange(format!("row {} in a matrix with {} rows", i + 1, self.m)));
        }
        Ok(())
    }

    /// `|Γ_ij|`: number of columns where rows `i` and `j` both have a one.
    pub fn pair_overlap(&self, i: usize, j: usize) -> Result<usize> {
        self.check_row(i)?;
        self.check_row(j)?;
        Ok(self.pair_overlap_unchecked(i, j))
    }

    #[inline]
    pub(crate) fn pair_overlap_unchecked(&self, i: usize, j: usize) -> usize {
        self.row_words(i)
            .iter()
            .zip(self.row_words(j))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `|Γ_ijk|`: number of columns where all three rows have a one.
    pub fn triple_overlap(&self, i: usize, j: usize, k: usize) -> Result<usize> {
        self.check_row(i)?;
        self.check_row(j)?;
        self.check_row(k)?;
        Ok(self
            .row_words(i)
            .iter()
            .zip(self.row_words(j))
            .zip(self.row_words(k))
            .map(|((a, b), c)| (a & b & c).count_ones() as usize)
            .sum())
    }

    /// Pairwise overlap counts for all row pairs.
    pub fn overlap_table(&self) -> OverlapTable<'_> {
        let m = self.m;
        let mut pairs = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for i in 0..m {
            for j in i + 1..m {
                pairs.push(self.pair_overlap_unchecked(i, j) as u32);
            }
        }
        OverlapTable { matrix: self, pairs }
    }

    /// `M'[i][j] = M[row_perm[i]][col_perm[j]]`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<BinaryMatrix> {
        check_permutation(row_perm, self.m, "row")?;
        check_permutation(col_perm, self.n, "column")?;
        BinaryMatrix::from_fn(self.m, self.n, |i, j| self.get(row_perm[i], col_perm[j]))
    }
}

fn check_permutation(p: &[usize], len: usize, what: &str) -> Result<()> {
    if p.len() != len {
        return Err(Error::invalid(format!("{what} permutation has length {}, expected {len}", p.len())));
    }
    let mut seen = vec![false; len];
    for &x in p {
        if x >= len || std::mem::replace(&mut seen[x], true) {
            return Err(Error::invalid(format!("{what} permutation is not a permutation of 0..{len}")));
        }
    }
    Ok(())
}

/// Per-row ones counts `d_i` of an `m x n` matrix. Densities `d_i / n` are
/// derived at the point of use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowProfile {
    n: usize,
    ones: Vec<usize>,
}

impl RowProfile {
    /// Profile from explicit counts; every count must be at most `n`.
    pub fn from_counts(n: usize, ones: Vec<usize>) -> Result<Self> {
        if n == 0 || ones.is_empty() {
            return Err(Error::invalid("profile needs positive dimensions"));
        }
        if let Some(&d) = ones.iter().find(|&&d| d > n) {
            return Err(Error::invalid(format!("row count {d} exceeds column count {n}")));
        }
        Ok(RowProfile { n, ones })
    }

    pub fn rows(&self) -> usize {
        self.ones.len()
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn ones(&self) -> &[usize] {
        &self.ones
    }

    pub fn density<F: Real>(&self, i: usize) -> F {
        F::count(self.ones[i] as u64) / F::count(self.n as u64)
    }

    pub fn densities<F: Real>(&self) -> Vec<F> {
        (0..self.rows()).map(|i| self.density(i)).collect()
    }

    pub fn max_ones(&self) -> usize {
        *self.ones.iter().max().expect("non-empty")
    }

    pub fn min_ones(&self) -> usize {
        *self.ones.iter().min().expect("non-empty")
    }

    pub fn max_density<F: Real>(&self) -> F {
        F::count(self.max_ones() as u64) / F::count(self.n as u64)
    }

    pub fn min_density<F: Real>(&self) -> F {
        F::count(self.min_ones() as u64) / F::count(self.n as u64)
    }

    pub fn mean_density<F: Real>(&self) -> F {
        let total: usize = self.ones.iter().sum();
        F::count(total as u64) / (F::count(self.n as u64) * F::count(self.rows() as u64))
    }

    pub fn check_feasible(&self) -> Result<()> {
        match self.ones.iter().position(|&d| d == 0) {
            Some(i) => Err(Error::Infeasible { row: i + 1 }),
            None => Ok(()),
        }
    }

    /// `(d, multiplicity)` pairs in ascending `d`. Every density-only bound
    /// sums over this histogram, so results do not depend on row order.
    pub fn histogram(&self) -> Vec<(usize, usize)> {
        let mut counts = vec![0usize; self.n + 1];
        for &d in &self.ones {
            counts[d] += 1;
        }
        counts.into_iter().enumerate().filter(|&(_, c)| c > 0).collect()
    }
}

/// Pairwise row overlaps `|Γ_ij|` with on-demand triple overlaps.
#[derive(Debug, Clone)]
pub struct OverlapTable<'a> {
    matrix: &'a BinaryMatrix,
    pairs: Vec<u32>,
}

impl OverlapTable<'_> {
    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let m = self.matrix.rows();
        // row-major strict upper triangle
        i * (2 * m - i - 1) / 2 + (j - i - 1)
    }

    /// `|Γ_ij|` for distinct rows, in either argument order.
    pub fn pair(&self, i: usize, j: usize) -> Result<usize> {
        let m = self.matrix.rows();
        if i >= m || j >= m || i == j {
            return Err(Error::OutOfRange(format!("row pair ({}, {}) with {m} rows", i + 1, j + 1)));
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Ok(self.pairs[self.index(a, b)] as usize)
    }

    pub fn triple(&self, i: usize, j: usize, k: usize) -> Result<usize> {
        self.matrix.triple_overlap(i, j, k)
    }

    /// `γ_ij = |Γ_ij| / n`.
    pub fn pair_density<F: Real>(&self, i: usize, j: usize) -> Result<F> {
        Ok(F::count(self.pair(i, j)? as u64) / F::count(self.matrix.cols() as u64))
    }
}
