//! Gauss-Newton for nonlinear least squares, with a priori convergence
//! certificates built from majorant functions and audits of every certified
//! bound along the computed trajectory.
//!
//! The pieces, bottom up:
//!
//! - [`linalg`]: SVD-based pseudoinverse, projectors and perturbation checks
//! - [`majorant`]: majorant models and certificates (`t*`, rate)
//! - [`scalar`]: the majorizing scalar sequence
//! - [`solver`]: the iteration itself, with the audit
//! - [`problems`]: built-in test problems and constant estimators
//! - [`auto`]: certificates from estimated constants
//! - [`report`] and [`cli`]: JSON/CSV reports and the `mgn` command

pub mod auto;
pub mod check;
pub mod cli;
pub mod linalg;
pub mod majorant;
pub mod problems;
pub mod report;
pub(crate) mod sampling;
pub mod scalar;
pub mod solver;

pub use check::{CheckResult, CheckStatus};
pub use linalg::{Matrix, Vector};
pub use majorant::{Certificate, MajorantModel, Refusal};
pub use solver::{solve, Problem, SolveOptions, SolveReport, SolveStatus};
