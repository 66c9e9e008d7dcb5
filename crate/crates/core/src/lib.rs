//! Krylov solvers for least-squares and least-norm problems with
//! cheap, adaptive, numerically reliable error-norm estimates.
//!
//! The library provides:
//!
//! * CSR sparse kernels and Matrix Market I/O ([`sparse`], [`market`]);
//! * the adaptive lower-bound estimator of the solver error norm,
//!   driven by per-iteration increments ([`estimate`]);
//! * CG, CGLS, LSQR, CGNE, and CRAIG, each instrumented with the
//!   estimator ([`solvers`]);
//! * split-preconditioned variants with Jacobi and IC(0) factors
//!   ([`precond`]);
//! * a dense SVD ground-truth engine for desk-scale verification
//!   ([`oracle`]).
//!
//! ```
//! use krylest::{cgls_solve, generate_rhs, ProblemKind, SolverConfig, SparseMatrix};
//!
//! let a = SparseMatrix::from_dense(3, 2, &[1.0, 0.0, 0.0, 2.0, 1.0, 1.0])?;
//! let inst = generate_rhs(&a, ProblemKind::LeastSquares, 7)?;
//! let cfg = SolverConfig { max_iter: 50, ..SolverConfig::default() };
//! let (x, trace) = cgls_solve(&a, &inst.rhs, None, &cfg)?;
//! assert_eq!(x.len(), 2);
//! // Each accepted event bounds the squared error of iterate `ell`
//! // from below by the increments summed through iteration `k`.
//! for ev in &trace.events {
//!     assert!(ev.estimate >= 0.0 && ev.k >= ev.ell);
//! }
//! # Ok::<(), krylest::Error>(())
//! ```

pub mod error;
pub mod estimate;
pub mod market;
pub mod oracle;
pub mod precond;
pub mod problem;
pub mod rng;
pub mod solvers;
pub mod sparse;
pub mod synthetic;
pub mod vector;

pub use error::{Error, Result};
pub use estimate::{check_stopping, upper_bound, DeltaBuffer, EstimateEvent};
pub use market::{load_matrix_market, load_vector_market, write_matrix_market, write_vector_market};
pub use oracle::{
    detect_plateau, hs_relative_error, ideal_delay, min_norm_solve, oracle_report,
    true_error_trajectory, IdealDelay, NormKind, OracleReport,
};
pub use precond::{
    build_ic0, build_jacobi, gram_matrix, pcgls_solve, pcgne_solve, pcraig_solve, plsqr_solve,
    GramSide, PrecondKind, SplitPreconditioner,
};
pub use problem::{generate_rhs, generating_solution, ProblemInstance, ProblemKind};
pub use solvers::{
    cg_solve, cgls_solve, cgne_solve, craig_solve, golub_kahan_step, lsqr_solve, BidiagState,
    CoeffLog, GkStep, LinearOperator, SolverConfig, SolverKind, SolverTrace, Termination,
};
pub use sparse::{mat_vec, mat_vec_transpose, SparseMatrix};
pub use synthetic::SyntheticSpec;
pub use vector::{dot, norm2, DenseVector};
