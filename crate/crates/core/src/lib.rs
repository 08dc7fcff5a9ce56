//! Upper bounds on the optimal size of a unit-cost set cover, computed from
//! the 0-1 matrix alone.
//!
//! Rows are elements, columns are sets. The bound families:
//!
//! * [`bounds`]: first moment (union bound) over random `k`-subsets, its
//!   hypergeometric form and the homogeneous closed form;
//! * [`refine`]: the third-order Bonferroni refinement;
//! * [`decomp`]: two-block decompositions and a split search.
//!
//! [`solve`] provides greedy and exact covers to check them, [`gen`] seeded
//! instance generators and [`experiment`] a batch harness.
//!
//! Numerical routines are generic over [`num::Real`] (`f64` and `f32`); the
//! aliases below fix `f64`.
//!
//! ```
//! use scpbound::{first_moment_bound, BinaryMatrix};
//!
//! let a = BinaryMatrix::from_bit_strings(&["1100", "0110", "0011"]).unwrap();
//! let b = first_moment_bound::<f64>(&a.row_profile()).unwrap();
//! assert_eq!(b.k, Some(2));
//! ```

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod decomp;
pub mod error;
pub mod experiment;
pub mod gen;
pub mod matrix;
pub mod num;
pub mod refine;
pub mod solve;

pub use bounds::{
    exact_uncovered_prob, first_moment_bound, homogeneous_bound, homogeneous_bound_certified, homogeneous_threshold,
    hypergeometric_first_moment_bound, Method,
};
pub use decomp::{
    decomposed_bound, independent_blocks_bound, make_decomposition, search_split, Budget, Variant,
};
pub use error::{Error, Result};
pub use gen::{BlockParams, GenSpec, Model};
pub use matrix::{parse_matrix, serialize_matrix, BinaryMatrix, MatrixFormat, RowProfile};
pub use num::Real;
pub use refine::{bonferroni_bound, constant_density_refined_bound, truncated_series_root};
pub use solve::{exact_cover, greedy_cover, verify_cover, CoverSolution, SolveStatus};

pub type BoundResult = bounds::BoundResult<f64>;
pub type HomogeneousBounds = bounds::HomogeneousBounds<f64>;
pub type BonferroniWitness = refine::BonferroniWitness<f64>;
pub type BlockDensities = decomp::BlockDensities<f64>;
pub type BlockDecomposition = decomp::BlockDecomposition<f64>;
pub type DecompositionBound = decomp::DecompositionBound<f64>;
pub type TwoBlockSolution = decomp::TwoBlockSolution<f64>;
pub type SplitSearch = decomp::SplitSearch<f64>;

/// Single-precision counterparts.
pub mod f32 {
    pub type BoundResult = crate::bounds::BoundResult<f32>;
    pub type BonferroniWitness = crate::refine::BonferroniWitness<f32>;
    pub type BlockDecomposition = crate::decomp::BlockDecomposition<f32>;
    pub type DecompositionBound = crate::decomp::DecompositionBound<f32>;
}
