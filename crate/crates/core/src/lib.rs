//! Jacobi-type rotation algorithms for low-rank orthogonal approximation of
//! symmetric tensors.
//!
//! Given a symmetric tensor `A` of order `d` and dimension `n`, the
//! algorithms search for an orthogonal `Q` maximizing
//! `f(Q) = Σ_{k<p} A(Q)_{k…k}²`. The first `p` columns of the maximizer span
//! the best rank-`p` orthogonal approximation `Σ σ_k u_k^{⊗d}`.

pub mod algorithms;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod geometry;
pub mod givens;
pub mod io;
pub mod orderings;
pub mod poly;
pub mod svg;
pub mod tensor;

pub use algorithms::{
    extract_result, hosvd_init, run, run_general, run_jacobi_g, run_jlroa, run_shopm, run_slroat, ApproximationResult,
    Init, IterationRecord, IterationTrace, OrderingRule, RunConfig, StopReason,
};
pub use error::{Error, Result};
pub use geometry::{cost_f, diagnostics, lambda_matrix, DiagnosticReport, GradientMatrix};
pub use givens::{givens, solve_pair, PairClass, PairKind, RotationSolution};
pub use orderings::{cyclic_ordering, random_ordering, PairOrdering};
pub use tensor::{contract_all, random_symmetric, OrthoMatrix, StiefelMatrix, SymTensor};
