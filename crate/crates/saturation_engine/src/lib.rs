//! Saturation of control directions under a model nonlinearity.
//!
//! A seed subspace `X_0` of control directions is enlarged level by level with the images of
//! the leading multilinear term, `X_{k+1} = X_k + span{ N_M(h_1, ..., h_M) : h_i in X_k }`,
//! restricted to a box of lattice frequencies. The chain certifies Hoermander-type coverage
//! up to the cutoff. For 3D Euler the frequency-level closure under admissible moves is
//! also available.

pub mod chain;
pub mod escape;
pub mod hoermander;
pub mod moves;

pub use chain::{iterate_span, polarization_equivalence, SubspaceChain};
pub use escape::{axis_double_brackets, euler_axis_escape_check};
pub use hoermander::{check_hoermander, seed_modes, HoermanderReport};
pub use moves::{admissible, determining_modes, MoveGraph};

use mode_algebra::{ModeError, TrigMode, WaveVector};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SaturationError {
    #[error("seed mode {0} lies outside the cutoff box")]
    OutsideCutoff(TrigMode),
    #[error("seed mode {0} does not belong to the model's phase space")]
    WrongField(TrigMode),
    #[error("self-image of the frequency family {0} does not vanish; cancellation structure violated")]
    Cancellation(WaveVector),
    #[error("frequency {0} lies outside the cutoff box")]
    FrequencyOutsideCutoff(WaveVector),
    #[error("controlled set is empty")]
    EmptyControlSet,
    #[error("controlled set is missing the axis direction {0}")]
    MissingAxis(WaveVector),
    #[error(transparent)]
    Mode(#[from] ModeError),
}
