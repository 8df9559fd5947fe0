//! Spectral Galerkin truncations of four controlled PDEs.
//!
//! * reaction-diffusion `u_t = kappa u_xx + f(u) + sigma.V'` on `[0, pi]`, Dirichlet;
//! * 2D Navier-Stokes in vorticity form on the torus;
//! * 2D Boussinesq, controls acting on the temperature;
//! * 3D Euler in polarized velocity modes.
//!
//! States live on the box `|k|_inf <= N`. Flows are integrated with a Lawson RK4 step;
//! tangent flows differentiate that step exactly, so the group property and finite-difference
//! checks hold to roundoff rather than to truncation error.

pub mod engines;
pub mod export;
pub mod field;
pub mod monitor;
pub mod params;
pub mod path;
pub mod solver;

pub use export::{read_binary, write_binary, write_csv, BinaryRecord};
pub use field::{mode_weight, SpectralField};
pub use monitor::{reaction_sup, EnvelopeReport};
pub use params::{ForceTerm, ModelParams, SolverOptions};
pub use path::{NoisePath, PathKind};
pub use solver::{Solver, Trajectory};

use mode_algebra::TrigMode;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SolverError {
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),
    #[error("state has {got} coefficients, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("state or trajectory belongs to a different model, cutoff or parameter set")]
    Space,
    #[error("mode {0} is not in the truncated basis")]
    UnknownMode(TrigMode),
    #[error("{got} control amplitudes given, expected {expected}")]
    ControlLength { expected: usize, got: usize },
    #[error("negative time {0}")]
    NegativeTime(f64),
    #[error("solution exploded at t = {time}")]
    Exploded { time: f64 },
    #[error("state became non-finite at t = {time}")]
    NonFinite { time: f64 },
    #[error("bad path: {0}")]
    BadPath(String),
    #[error("path ends at {have} but {needed} was requested")]
    PathTooShort { needed: f64, have: f64 },
    #[error("interval [{s}, {t}] is outside the trajectory [0, {end}]")]
    OutsideTrajectory { s: f64, t: f64, end: f64 },
    #[error("base trajectory exploded at t = {time}")]
    BaseExploded { time: f64 },
    #[error("i/o: {0}")]
    Io(String),
    #[error("bad record: {0}")]
    Format(String),
}
