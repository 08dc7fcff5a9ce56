//! Local search for a two-block row/column bisection.
//!
//! Objective: ones in the diagonal blocks minus ones in the off-diagonal
//! blocks. Given the column sides the objective is separable over rows (and
//! vice versa), so single flips have O(1) gains from maintained counts:
//!
//! * flipping row `i` gains `2 (R_i - L_i)` from top, `2 (L_i - R_i)` from bottom;
//! * flipping column `j` gains `2 (B_j - T_j)` from left, `2 (T_j - B_j)` from right;
//!
//! and a swap of two rows (or two columns) gains the sum of both flips.

use crate::decomp::{make_decomposition, BlockDecomposition};
use crate::error::{Error, Result};
use crate::gen::SeededRng;
use crate::matrix::BinaryMatrix;
use crate::num::Real;

/// Result of [`search_split`]: permutations that bring the chosen halves to
/// the top-left, and the decomposition of the permuted matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSearch<F> {
    /// Row `i` of the permuted matrix is row `row_perm[i]` of the input.
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub split_row: usize,
    pub split_col: usize,
    pub decomposition: BlockDecomposition<F>,
    pub objective: i64,
    pub initial_objective: i64,
}

struct State<'a> {
    rows: &'a BinaryMatrix,
    cols: &'a BinaryMatrix,
    top: Vec<bool>,
    left: Vec<bool>,
    n_top: usize,
    n_left: usize,
    /// ones of each row inside left / right columns
    row_left: Vec<i64>,
    row_right: Vec<i64>,
    /// ones of each column inside top / bottom rows
    col_top: Vec<i64>,
    col_bottom: Vec<i64>,
    objective: i64,
}

impl<'a> State<'a> {
    fn new(rows: &'a BinaryMatrix, cols: &'a BinaryMatrix, top: Vec<bool>, left: Vec<bool>) -> Self {
        let (m, n) = (rows.rows(), rows.cols());
        let mut row_left = vec![0i64; m];
        let mut row_right = vec![0i64; m];
        let mut col_top = vec![0i64; n];
        let mut col_bottom = vec![0i64; n];
        for i in 0..m {
            for j in rows.row_support(i) {
                if left[j] {
                    row_left[i] += 1;
                } else {
                    row_right[i] += 1;
                }
                if top[i] {
                    col_top[j] += 1;
                } else {
                    col_bottom[j] += 1;
                }
            }
        }
        let objective = (0..m)
            .map(|i| if top[i] { row_left[i] - row_right[i] } else { row_right[i] - row_left[i] })
            .sum();
        let n_top = top.iter().filter(|&&t| t).count();
        let n_left = left.iter().filter(|&&l| l).count();
        State { rows, cols, top, left, n_top, n_left, row_left, row_right, col_top, col_bottom, objective }
    }

    fn row_gain(&self, i: usize) -> i64 {
        let d = self.row_right[i] - self.row_left[i];
        if self.top[i] {
            2 * d
        } else {
            -2 * d
        }
    }

    fn col_gain(&self, j: usize) -> i64 {
        let d = self.col_bottom[j] - self.col_top[j];
        if self.left[j] {
            2 * d
        } else {
            -2 * d
        }
    }

    fn flip_row(&mut self, i: usize) {
        self.objective += self.row_gain(i);
        let to_top = !self.top[i];
        self.top[i] = to_top;
        if to_top {
            self.n_top += 1;
        } else {
            self.n_top -= 1;
        }
        for j in self.rows.row_support(i) {
            if to_top {
                self.col_top[j] += 1;
                self.col_bottom[j] -= 1;
            } else {
                self.col_top[j] -= 1;
                self.col_bottom[j] += 1;
            }
        }
    }

    fn flip_col(&mut self, j: usize) {
        self.objective += self.col_gain(j);
        let to_left = !self.left[j];
        self.left[j] = to_left;
        if to_left {
            self.n_left += 1;
        } else {
            self.n_left -= 1;
        }
        for i in self.cols.row_support(j) {
            if to_left {
                self.row_left[i] += 1;
                self.row_right[i] -= 1;
            } else {
                self.row_left[i] -= 1;
                self.row_right[i] += 1;
            }
        }
    }

    /// Tries to improve via row `i`: a single flip if it keeps both sides
    /// non-empty, otherwise a swap with a random row from the other side.
    fn try_row(&mut self, i: usize, rng: &mut SeededRng) -> bool {
        let m = self.top.len();
        let g = self.row_gain(i);
        let side_size = if self.top[i] { self.n_top } else { m - self.n_top };
        if g > 0 && side_size > 1 {
            self.flip_row(i);
            return true;
        }
        let other: Vec<usize> = (0..m).filter(|&x| self.top[x] != self.top[i]).collect();
        let partner = other[rng.below(other.len() as u64) as usize];
        // flips of distinct rows do not interact
        if g + self.row_gain(partner) > 0 {
            self.flip_row(i);
            self.flip_row(partner);
            return true;
        }
        false
    }

    fn try_col(&mut self, j: usize, rng: &mut SeededRng) -> bool {
        let n = self.left.len();
        let g = self.col_gain(j);
        let side_size = if self.left[j] { self.n_left } else { n - self.n_left };
        if g > 0 && side_size > 1 {
            self.flip_col(j);
            return true;
        }
        let other: Vec<usize> = (0..n).filter(|&x| self.left[x] != self.left[j]).collect();
        let partner = other[rng.below(other.len() as u64) as usize];
        if g + self.col_gain(partner) > 0 {
            self.flip_col(j);
            self.flip_col(partner);
            return true;
        }
        false
    }
}

fn random_halves(len: usize, rng: &mut SeededRng) -> Vec<bool> {
    let mut idx: Vec<usize> = (0..len).collect();
    rng.shuffle(&mut idx);
    let mut side = vec![false; len];
    for &i in &idx[..len / 2] {
        side[i] = true;
    }
    side
}

/// Seeded local search for a split with dense diagonal blocks.
///
/// Starts from a random balanced bisection of rows and columns; each unit of
/// `effort` examines one random row or column and applies an improving flip
/// or swap. After `m + n` consecutive failed attempts the search restarts
/// from a fresh bisection. The best assignment seen (strictly improving on
/// the first one) is returned.
pub fn search_split<F: Real>(matrix: &BinaryMatrix, effort: usize, seed: u64) -> Result<SplitSearch<F>> {
    let (m, n) = (matrix.rows(), matrix.cols());
    if m < 2 || n < 2 {
        return Err(Error::invalid(format!("split search needs at least 2x2, got {m}x{n}")));
    }
    let transposed = matrix.transpose();
    let mut rng = SeededRng::new(seed);

    let top = random_halves(m, &mut rng);
    let left = random_halves(n, &mut rng);
    let mut state = State::new(matrix, &transposed, top, left);
    let initial_objective = state.objective;
    let mut best = (state.objective, state.top.clone(), state.left.clone());

    let mut stale = 0usize;
    for _ in 0..effort {
        let pick = rng.below((m + n) as u64) as usize;
        let improved = if pick < m { state.try_row(pick, &mut rng) } else { state.try_col(pick - m, &mut rng) };
        if improved {
            stale = 0;
            if state.objective > best.0 {
                best = (state.objective, state.top.clone(), state.left.clone());
            }
        } else {
            stale += 1;
            if stale >= m + n {
                let top = random_halves(m, &mut rng);
                let left = random_halves(n, &mut rng);
                state = State::new(matrix, &transposed, top, left);
                if state.objective > best.0 {
                    best = (state.objective, state.top.clone(), state.left.clone());
                }
                stale = 0;
            }
        }
    }

    let (objective, top, left) = best;
    let row_perm: Vec<usize> = (0..m).filter(|&i| top[i]).chain((0..m).filter(|&i| !top[i])).collect();
    let col_perm: Vec<usize> = (0..n).filter(|&j| left[j]).chain((0..n).filter(|&j| !left[j])).collect();
    let split_row = top.iter().filter(|&&t| t).count();
    let split_col = left.iter().filter(|&&l| l).count();
    let permuted = matrix.permute(&row_perm, &col_perm)?;
    let decomposition = make_decomposition(&permuted, split_row, split_col)?;
    Ok(SplitSearch { row_perm, col_perm, split_row, split_col, decomposition, objective, initial_objective })
}
