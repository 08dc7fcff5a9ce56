//! Greedy and exact set cover solvers used to check the bounds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::BinaryMatrix;

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Greedy,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    /// Heuristic answer, no optimality claim.
    Heuristic,
    /// Search completed: the cover is optimal (or infeasibility is certain).
    Proved,
    /// Node budget hit; the cover is the best found.
    BudgetExhausted,
}

/// Selected columns (0-based, ascending).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverSolution {
    pub columns: Vec<usize>,
    pub feasible: bool,
    pub method: SolveMethod,
    pub status: SolveStatus,
    /// Branch-and-bound nodes visited (0 for greedy).
    pub nodes: u64,
}

impl CoverSolution {
    pub fn size(&self) -> usize {
        self.columns.len()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.columns.iter().map(|j| j + 1).collect()
    }
}

fn is_empty(words: &[u64]) -> bool {
    words.iter().all(|&w| w == 0)
}

fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// Row bitset with every row set.
fn all_rows(m: usize) -> Vec<u64> {
    let mut words = vec![u64::MAX; m.div_ceil(64)];
    if !m.is_multiple_of(64) {
        *words.last_mut().expect("m >= 1") = (1u64 << (m % 64)) - 1;
    }
    words
}

/// True iff every row has a one in some selected column (0-based).
pub fn verify_cover(matrix: &BinaryMatrix, columns: &[usize]) -> Result<bool> {
    let n = matrix.cols();
    if let Some(&j) = columns.iter().find(|&&j| j >= n) {
        return Err(Error::OutOfRange(format!("column {} in a matrix with {n} columns", j + 1)));
    }
    let mut selected = vec![0u64; matrix.stride()];
    for &j in columns {
        selected[j / 64] |= 1 << (j % 64);
    }
    Ok((0..matrix.rows()).all(|i| and_count(matrix.row_words(i), &selected) > 0))
}

/// Repeatedly takes the column covering the most uncovered rows, lowest
/// index on ties. Stops when nothing more can be covered.
pub fn greedy_cover(matrix: &BinaryMatrix) -> CoverSolution {
    let cols = matrix.transpose();
    let mut uncovered = all_rows(matrix.rows());
    let mut chosen = Vec::new();
    while !is_empty(&uncovered) {
        let (best, gain) = (0..cols.rows())
            .map(|j| (j, and_count(cols.row_words(j), &uncovered)))
            .fold((0, 0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if gain == 0 {
            break;
        }
        chosen.push(best);
        for (u, c) in uncovered.iter_mut().zip(cols.row_words(best)) {
            *u &= !c;
        }
    }
    let feasible = is_empty(&uncovered);
    chosen.sort_unstable();
    CoverSolution { columns: chosen, feasible, method: SolveMethod::Greedy, status: SolveStatus::Heuristic, nodes: 0 }
}

struct Search<'a> {
    rows: &'a BinaryMatrix,
    cols: BinaryMatrix,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    best: Vec<usize>,
}

impl Search<'_> {
    fn dfs(&mut self, uncovered: &[u64], chosen: &mut Vec<usize>) {
        if self.exhausted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        // the uncovered row with the fewest covering columns
        let mut pivot: Option<(usize, usize)> = None;
        for (w, &word) in uncovered.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let i = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let d = self.rows.row_ones(i);
                if pivot.is_none_or(|(_, best)| d < best) {
                    pivot = Some((i, d));
                }
            }
        }
        let Some((row, _)) = pivot else {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        };
        if chosen.len() + 1 >= self.best.len() {
            return;
        }
        let mut candidates: Vec<(usize, usize)> = self
            .rows
            .row_support(row)
            .into_iter()
            .map(|j| (j, and_count(self.cols.row_words(j), uncovered)))
            .collect();
        candidates.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (j, _) in candidates {
            let next: Vec<u64> = uncovered.iter().zip(self.cols.row_words(j)).map(|(u, c)| u & !c).collect();
            chosen.push(j);
            self.dfs(&next, chosen);
            chosen.pop();
            if self.exhausted || chosen.len() + 1 >= self.best.len() {
                return;
            }
        }
    }
}

/// Depth-first branch and bound seeded with the greedy cover.
///
/// Branches on the uncovered row with the fewest covering columns, trying
/// its columns by decreasing coverage; prunes once one more column cannot
/// beat the incumbent. Hitting `node_budget` returns the incumbent with
/// [`SolveStatus::BudgetExhausted`].
pub fn exact_cover(matrix: &BinaryMatrix, node_budget: u64) -> CoverSolution {
    if matrix.first_zero_row().is_some() {
        return CoverSolution {
            columns: Vec::new(),
            feasible: false,
            method: SolveMethod::Exact,
            status: SolveStatus::Proved,
            nodes: 0,
        };
    }
    let greedy = greedy_cover(matrix);
    let mut search = Search {
        rows: matrix,
        cols: matrix.transpose(),
        budget: node_budget,
        nodes: 0,
        exhausted: false,
        best: greedy.columns,
    };
    let mut chosen = Vec::new();
    search.dfs(&all_rows(matrix.rows()), &mut chosen);
    let mut columns = search.best;
    columns.sort_unstable();
    CoverSolution {
        columns,
        feasible: true,
        method: SolveMethod::Exact,
        status: if search.exhausted { SolveStatus::BudgetExhausted } else { SolveStatus::Proved },
        nodes: search.nodes.min(node_budget),
    }
}
