//! Brownian driving paths, projected Gramian (Malliavin) matrices and empirical support
//! checks for the controlled Galerkin systems of `galerkin_solvers`.
//!
//! The control directions `sigma_k` play the role of the noise directions: the random
//! dynamics is `phi_t(u, V)` with `V` a Brownian path.

pub mod brownian;
pub mod gramian;
pub mod malliavin;
pub mod support;

pub use brownian::{sample_brownian, BrownianStream};
pub use galerkin_solvers::{NoisePath, PathKind};
pub use gramian::{gramian, gramian_monotonicity, EigenReport, GramianMatrix, MonotonicityReport};
pub use malliavin::{malliavin_derivative, malliavin_quadrature};
pub use support::{empirical_support, Histogram, SupportReport};

use galerkin_solvers::SolverError;
use mode_algebra::TrigMode;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StochasticError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("mode {0} is not in the truncated basis")]
    UnknownMode(TrigMode),
    #[error("trajectory exploded at t = {time}")]
    Exploded { time: f64 },
    #[error("i/o: {0}")]
    Io(String),
}
