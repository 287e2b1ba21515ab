//! Deterministic numeric substrate: second-order jets, small dense linear
//! algebra and seeded sampling.

mod jet;
mod linalg;
mod sampler;

pub use jet::{dot, Jet2};
pub use linalg::{
    commutator, expm, frobenius, frobenius_dot, orthonormalize_matrices, rank_nullspace, signature,
    sym_eigen, sym_eigen_pairs, DenseMatrix, DenseVector, RankNullspace, DEFAULT_RANK_TOL,
};
pub use sampler::{Exclusion, SeededSampler};
