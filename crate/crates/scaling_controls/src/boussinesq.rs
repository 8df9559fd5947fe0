//! Explicit Boussinesq maps `Gamma_t^{alpha sigma_j^l} U0 = U0 + t alpha (g d_x e; kappa Lap e - b(xi0, e))`.

use galerkin_solvers::{ModelParams, Solver, SpectralField};
use mode_algebra::{dx, theta_bracket_vec, transport, within_cutoff, CoeffVec, Field, ModelKind, Parity, TrigMode, WaveVector};

use crate::ControlError;

fn require_boussinesq(model: ModelKind) -> Result<(), ControlError> {
    if model != ModelKind::Boussinesq {
        return Err(ControlError::WrongModel { expected: ModelKind::Boussinesq, got: model });
    }
    Ok(())
}

fn truncated(v: &CoeffVec, cutoff: u32) -> CoeffVec {
    v.iter().filter(|(m, _)| within_cutoff(m, cutoff)).map(|(m, c)| (*m, *c)).collect()
}

fn temperature(j: WaveVector, l: Parity) -> Result<CoeffVec, ControlError> {
    let m = TrigMode::new(j, l, Field::Temperature, None).map_err(|e| ControlError::InvalidArgument(e.to_string()))?;
    Ok(CoeffVec::unit(m))
}

/// `Gamma_t^{alpha sigma_j^l} U0`, evaluated in closed form.
pub fn gamma_flow(
    params: &ModelParams,
    u0: &SpectralField,
    alpha: f64,
    j: WaveVector,
    l: Parity,
    t: f64,
) -> Result<SpectralField, ControlError> {
    require_boussinesq(params.model)?;
    let e = temperature(j, l)?;
    let (xi0, _) = u0.to_coeffs().partition(|m| m.field == Field::Vorticity);
    let mut inc = dx(&e, Field::Vorticity).scaled(params.gravity);
    inc.add_scaled(-params.kappa * j.norm2() as f64, &e);
    inc.add_scaled(-1.0, &transport(&xi0, &e, Field::Temperature));
    let inc = SpectralField::from_coeffs(u0.model, u0.cutoff, &truncated(&inc, u0.cutoff))?;
    let mut u = u0.clone();
    u.add_scaled(t * alpha, &inc);
    Ok(u)
}

/// `rho^{-lambda^2 phi}_{1/lambda} Phi^0_{t/lambda} rho^{lambda^2 phi}_{1/lambda} U0` with
/// `phi = alpha e_j^l` on the temperature, rays applied exactly.
pub fn gamma_conjugation(
    solver: &Solver,
    u0: &SpectralField,
    alpha: f64,
    j: WaveVector,
    l: Parity,
    t: f64,
    lambda: f64,
) -> Result<SpectralField, ControlError> {
    require_boussinesq(solver.params().model)?;
    let phi = SpectralField::from_coeffs(u0.model, u0.cutoff, &temperature(j, l)?.scaled(alpha))?;
    let mut u = u0.clone();
    u.add_scaled(lambda, &phi);
    let mut u = solver.flow_constant(&u, &vec![0.0; solver.n_controls()], t / lambda)?;
    u.add_scaled(-lambda, &phi);
    Ok(u)
}

/// `Gamma^{-alpha sigma_k^n}_t Gamma^{-beta sigma_j^l}_t Gamma^{alpha sigma_k^n}_t Gamma^{beta sigma_j^l}_t U0`.
#[allow(clippy::too_many_arguments)]
pub fn commutator_composition(
    params: &ModelParams,
    u0: &SpectralField,
    alpha: f64,
    beta: f64,
    (j, l): (WaveVector, Parity),
    (k, n): (WaveVector, Parity),
    t: f64,
) -> Result<SpectralField, ControlError> {
    let u1 = gamma_flow(params, u0, beta, j, l, t)?;
    let u2 = gamma_flow(params, &u1, alpha, k, n, t)?;
    let u3 = gamma_flow(params, &u2, -beta, j, l, t)?;
    gamma_flow(params, &u3, -alpha, k, n, t)
}

/// `U0 + t^2 alpha beta g (0; b(d_x e_k, e_j) - b(d_x e_j, e_k))`, from the symbolic bracket.
#[allow(clippy::too_many_arguments)]
pub fn commutator_target(
    params: &ModelParams,
    u0: &SpectralField,
    alpha: f64,
    beta: f64,
    (j, l): (WaveVector, Parity),
    (k, n): (WaveVector, Parity),
    t: f64,
) -> Result<SpectralField, ControlError> {
    require_boussinesq(params.model)?;
    let br = theta_bracket_vec(params.gravity, &temperature(j, l)?, &temperature(k, n)?);
    let br = SpectralField::from_coeffs(u0.model, u0.cutoff, &truncated(&br, u0.cutoff))?;
    let mut u = u0.clone();
    u.add_scaled(t * t * alpha * beta, &br);
    Ok(u)
}
