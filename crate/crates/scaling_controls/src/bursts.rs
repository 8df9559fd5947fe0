//! Ray bursts `Phi^{lambda h}_{t/lambda}` and bracket bursts
//! `rho^{-lambda^2 g}_{1/lambda} Phi^0_{t/lambda^M} rho^{lambda^2 g}_{1/lambda}`, the outer
//! rays realized by inner ray bursts of scale `mu`.

use galerkin_solvers::{ModelParams, Solver, SolverOptions, SpectralField};
use mode_algebra::within_cutoff;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{ControlError, ControlSchedule};

/// Steps per burst segment.
pub const BURST_STEPS: usize = 64;

/// Copy of `p` whose solver resolves every segment with at least [`BURST_STEPS`] steps.
pub fn burst_params(p: &ModelParams) -> ModelParams {
    let solver = SolverOptions { min_steps: p.solver.min_steps.max(BURST_STEPS), ..p.solver.clone() };
    p.clone().with_solver(solver)
}

/// Degree `M` of the leading nonlinearity (1 for linear reaction-diffusion).
pub fn degree(solver: &Solver) -> usize {
    solver.params().nonlinearity().map_or(1, |n| n.degree())
}

/// Inner scale used for the outer rays of a bracket burst: `mu = lambda^M`.
pub fn inner_scale(lambda: f64, degree: usize) -> f64 {
    lambda.powi(degree as i32)
}

/// Amplitudes `alpha` with `sum alpha_k sigma_k = h`.
pub fn control_amplitudes(solver: &Solver, h: &SpectralField) -> Result<Vec<f64>, ControlError> {
    let k = solver.n_controls();
    if k == 0 {
        return if h.coeffs.iter().all(|c| *c == 0.0) { Ok(Vec::new()) } else { Err(ControlError::NotInControlSpan) };
    }
    let cols: Vec<SpectralField> = (0..k).map(|i| solver.sigma(i)).collect();
    let a = DMatrix::from_fn(solver.dim(), k, |r, c| cols[c].coeffs[r]);
    let b = DVector::from_column_slice(&h.coeffs);
    let x = a.clone().svd(true, true).solve(&b, 1e-12).map_err(|e| ControlError::InvalidArgument(e.to_string()))?;
    let res = (&a * &x - &b).norm();
    if res > 1e-10 * b.norm().max(1.0) {
        return Err(ControlError::NotInControlSpan);
    }
    Ok(x.iter().copied().collect())
}

/// `u0 + t sigma.h`, the ray semigroup.
pub fn ray_limit(solver: &Solver, u0: &SpectralField, h: &[f64], t: f64) -> Result<SpectralField, ControlError> {
    let mut u = u0.clone();
    u.add_scaled(t, &solver.control_field(h)?);
    Ok(u)
}

/// `u0 - t P_N N_M(sigma.g)`, computed symbolically.
pub fn bracket_limit(solver: &Solver, u0: &SpectralField, g: &[f64], t: f64) -> Result<SpectralField, ControlError> {
    let Some(nl) = solver.params().nonlinearity() else {
        return Ok(u0.clone());
    };
    let gv = solver.control_field(g)?.to_coeffs();
    let cutoff = solver.params().cutoff;
    let img: mode_algebra::CoeffVec = nl.diagonal(&gv).iter().filter(|(m, _)| within_cutoff(m, cutoff)).map(|(m, c)| (*m, *c)).collect();
    let mut u = u0.clone();
    u.add_scaled(-t, &SpectralField::from_coeffs(u0.model, u0.cutoff, &img)?);
    Ok(u)
}

fn check_scales(t: f64, lambda: f64) -> Result<(), ControlError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(ControlError::InvalidArgument(format!("nominal time must be positive, got {t}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ControlError::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// One segment of length `t/lambda` with amplitudes `lambda h`.
pub fn ray_burst(h: &[f64], t: f64, lambda: f64) -> Result<ControlSchedule, ControlError> {
    check_scales(t, lambda)?;
    ControlSchedule::new(vec![(t / lambda, h.iter().map(|x| lambda * x).collect())])
}

/// Ray burst toward `lambda^2 g` over `1/lambda` (inner scale `mu`), free flow for `t/lambda^M`,
/// and the reverse ray burst. Displaces the state by `lambda g` and back.
pub fn bracket_burst(degree: usize, g: &[f64], t: f64, lambda: f64, mu: f64) -> Result<ControlSchedule, ControlError> {
    check_scales(t, lambda)?;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(ControlError::InvalidArgument(format!("inner scale must be positive, got {mu}")));
    }
    let up: Vec<f64> = g.iter().map(|x| lambda * lambda * x).collect();
    let mut s = ray_burst(&up, 1.0 / lambda, mu)?;
    s.push_dwell(t / lambda.powi(degree as i32), g.len())?;
    let down: Vec<f64> = up.iter().map(|x| -x).collect();
    s.extend(&ray_burst(&down, 1.0 / lambda, mu)?)?;
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingKind {
    RayBurst,
    BracketBurst,
    GammaConjugation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSchedule {
    pub lambda: f64,
    pub kind: ScalingKind,
    /// Amplitudes over the control basis.
    pub direction: Vec<f64>,
    pub t: f64,
}

impl ScalingSchedule {
    pub fn new(kind: ScalingKind, direction: Vec<f64>, t: f64, lambda: f64) -> Result<Self, ControlError> {
        if !(lambda >= 1.0) {
            return Err(ControlError::InvalidArgument(format!("lambda must be at least 1, got {lambda}")));
        }
        check_scales(t, lambda)?;
        Ok(Self { lambda, kind, direction, t })
    }

    /// Control schedule realizing the burst; gamma conjugations use exact rays and have none.
    pub fn schedule(&self, solver: &Solver) -> Result<ControlSchedule, ControlError> {
        match self.kind {
            ScalingKind::RayBurst => ray_burst(&self.direction, self.t, self.lambda),
            ScalingKind::BracketBurst => {
                let m = degree(solver);
                bracket_burst(m, &self.direction, self.t, self.lambda, inner_scale(self.lambda, m))
            }
            ScalingKind::GammaConjugation => {
                Err(ControlError::InvalidArgument("gamma conjugations are not control schedules".into()))
            }
        }
    }

    /// The scaling limit the burst approximates.
    pub fn limit(&self, solver: &Solver, u0: &SpectralField) -> Result<SpectralField, ControlError> {
        match self.kind {
            ScalingKind::RayBurst => ray_limit(solver, u0, &self.direction, self.t),
            ScalingKind::BracketBurst => bracket_limit(solver, u0, &self.direction, self.t),
            ScalingKind::GammaConjugation => {
                Err(ControlError::InvalidArgument("use gamma_flow for gamma conjugations".into()))
            }
        }
    }
}
