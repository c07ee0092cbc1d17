//! Verification laboratory for elliptic equations with variably partially VMO
//! coefficients.
//!
//! The crate is organised bottom-up:
//!
//! * [`dyadic`]: finite atom spaces, filtrations of partitions, conditional
//!   averages, stopping times and the dyadic maximal function.
//! * [`sharp`]: premise checkers and the distribution / `L_p` inequalities of
//!   the partial Fefferman–Stein theorem, plus seeded triple generators.
//! * [`fields`]: the oscillating example coefficient, matrix embeddings and
//!   reference fields.
//! * [`oscillation`]: one-directional oscillation of coefficient fields over
//!   squares and balls, direction search and the example-field bound.
//! * [`solver`]: periodic finite-difference discretisation of `Lu - λu`,
//!   a restarted GMRES solver and numerical probes of the a priori estimate.
//!
//! Inner loops run on rayon when the `parallel` feature is enabled (default)
//! and sequentially otherwise.

pub mod dyadic;
pub mod exec;
pub mod fields;
pub mod fs_suite;
pub mod oscillation;
pub mod sharp;
pub mod solver;

pub use dyadic::{AtomSpace, PartitionFiltration, StoppingTimeMap, WeightedFunction};
pub use fields::{MatrixField, ScalarField};
pub use oscillation::{DirectionMap, OneDProfile, OscillationReport, Region};
pub use solver::{GridFunction, SparseOperator};
