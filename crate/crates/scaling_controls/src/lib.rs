//! Executable versions of the two scaling limits (ray bursts and bracket bursts), their
//! convergence sweeps, reachability synthesis over a certified subspace chain, exact-time
//! padding by the pinball strategy and exact projection control by damped fixed-point iteration.

pub mod aversion;
pub mod boussinesq;
pub mod bursts;
pub mod envelope;
pub mod reach;
pub mod scaling;
pub mod schedule;

pub use aversion::{blowup_aversion, forcing_cancellation, AversionReport};
pub use boussinesq::{commutator_composition, commutator_target, gamma_conjugation, gamma_flow};
pub use bursts::{
    bracket_burst, bracket_limit, burst_params, control_amplitudes, degree, inner_scale, ray_burst, ray_limit,
    ScalingKind, ScalingSchedule, BURST_STEPS,
};
pub use envelope::{ComparisonEnvelope, EnvelopeCheck};
pub use reach::{
    control_chain, exact_projection_control, pinball_exact_time, synthesize_reach, PinballInfo, ReachOptions, ReachPlan,
    ReplayOutcome,
};
pub use scaling::{fit_slope, verify_scaling, ScalingCase, ScalingRow, ScalingTable};
pub use schedule::ControlSchedule;

use galerkin_solvers::SolverError;
use mode_algebra::ModelKind;
use saturation_engine::SaturationError;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ControlError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Saturation(#[from] SaturationError),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("direction is not a combination of the control directions")]
    NotInControlSpan,
    #[error("expected model {expected:?}, got {got:?}")]
    WrongModel { expected: ModelKind, got: ModelKind },
    #[error("target is {residual:.3e} away from the certified span (allowed {allowed:.3e})")]
    OutsideSpan { residual: f64, allowed: f64 },
    #[error("target needs chain level {level}; only levels 0 and 1 are synthesized")]
    RecursionDepth { level: usize },
    #[error("lambda cap {cap:e} reached; best error {best_error:.3e} at lambda {best_lambda:e}")]
    LambdaCap { cap: f64, best_error: f64, best_lambda: f64 },
    #[error("free flow leaves the target ball after {sigma:.3e} <= dt = {dt:.3e}")]
    DwellTooShort { sigma: f64, dt: f64 },
    #[error("padded schedule misses the target: error {error:.3e} >= {eps:.3e}")]
    PinballMissed { error: f64, eps: f64 },
    #[error("retargeting bursts do not fit in the remaining time {remaining:.3e}")]
    NoTimeLeft { remaining: f64 },
    #[error("fixed-point iteration did not converge; residual history {history:?}")]
    NoConvergence { history: Vec<f64> },
    #[error("projection converged but the global error {error:.3e} >= {eps:.3e}")]
    GlobalMiss { error: f64, eps: f64 },
    #[error("plan parameters hash to {actual}, plan records {recorded}")]
    HashMismatch { recorded: String, actual: String },
    #[error("bad plan encoding: {0}")]
    Format(String),
}
