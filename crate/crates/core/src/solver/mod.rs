//! Periodic finite-difference discretisation of `Lu − λu` on `[0,1)^d`, a
//! restarted GMRES solver, and numerical probes of the associated estimates.

pub mod agmon;
pub mod fourier;
pub mod grid;
pub mod krylov;
pub mod operator;
pub mod probes;

use thiserror::Error;

use crate::fields::FieldError;

pub use agmon::{agmon_convergence, agmon_lift_check, lift_weight, lift_weight_floor, AgmonConvergence, AgmonReport, Cutoff};
pub use grid::{gradient_norm, hessian_norm, pointwise_norm, GridFunction, Shape};
pub use krylov::{gmres, relative_residual, solve, solve_with, Preconditioner, PreconditionerKind, SolveOptions, SolveReport};
pub use operator::{discretize, SparseOperator};
pub use probes::{
    apriori_probe, bump_polynomial_corpus, fourier_mode, implied_constant, interpolation_probe,
    local_estimate_probe, pointwise_bound_probe, principal_part, random_smooth_corpus,
    rotated_hessian, smooth_random_rhs, AprioriReport, AprioriSweep, InterpolationReport,
    LocalEstimateReport, PointwiseBoundReport,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("operator has {operator} rows but the grid function has {rhs} values")]
    ResolutionMismatch { operator: usize, rhs: usize },
    #[error("exponent p = {0} must be at least 1")]
    InvalidExponent(f64),
    #[error("lambda must be nonnegative, got {0}")]
    NegativeLambda(f64),
    #[error("lambda = {lambda} is below the invertibility threshold {threshold}")]
    BelowSolveThreshold { lambda: f64, threshold: f64 },
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("lifted grid of {requested} points exceeds the cap of {cap}")]
    MemoryCap { requested: usize, cap: usize },
    #[error("direction map is not a rigid motion: {0}")]
    NotRigid(String),
    #[error("non-finite value")]
    NonFinite,
    #[error("shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub type Result<T> = std::result::Result<T, SolverError>;
