//! Euler blow-up aversion: a forcing concentrated on controlled modes is cancelled by a
//! constant low-mode control, and the controlled run stays below the gradient guard.

use galerkin_solvers::{ModelParams, Solver, SpectralField, Trajectory};
use mode_algebra::ModelKind;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{ControlError, ControlSchedule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AversionReport {
    pub horizon: f64,
    pub guard: f64,
    pub uncontrolled_blowup: Option<f64>,
    pub uncontrolled_max_grad: f64,
    pub controlled_blowup: Option<f64>,
    pub controlled_max_grad: f64,
    pub schedule: ControlSchedule,
}

impl AversionReport {
    pub fn averted(&self) -> bool {
        self.uncontrolled_blowup.is_some() && self.controlled_blowup.is_none() && self.controlled_max_grad < self.guard
    }
}

/// Constant control `-P_sigma f` held for `t`: least-squares cancellation of the forcing.
pub fn forcing_cancellation(solver: &Solver, t: f64) -> Result<ControlSchedule, ControlError> {
    let k = solver.n_controls();
    let f = solver.background_force();
    let alpha = if k == 0 {
        Vec::new()
    } else {
        let cols: Vec<SpectralField> = (0..k).map(|i| solver.sigma(i)).collect();
        let a = DMatrix::from_fn(solver.dim(), k, |r, c| cols[c].coeffs[r]);
        let x = a.svd(true, true).solve(&DVector::from_column_slice(&f.coeffs), 1e-12).map_err(|e| ControlError::InvalidArgument(e.to_string()))?;
        x.iter().map(|c| -c).collect()
    };
    let mut s = ControlSchedule::empty();
    s.push(t, alpha)?;
    Ok(s)
}

fn max_grad(solver: &Solver, tr: &Trajectory) -> f64 {
    tr.states.iter().map(|s| solver.grad_bound(s)).fold(0.0, f64::max)
}

pub fn blowup_aversion(params: &ModelParams, u0: &SpectralField, horizon: f64) -> Result<AversionReport, ControlError> {
    if params.model != ModelKind::Euler3d {
        return Err(ControlError::WrongModel { expected: ModelKind::Euler3d, got: params.model });
    }
    let solver = Solver::new(params.clone())?;
    let k = solver.n_controls();
    let free = solver.trajectory_segments(u0, &[(horizon, vec![0.0; k])])?;
    let schedule = forcing_cancellation(&solver, horizon)?;
    let ctrl = solver.trajectory_segments(u0, &schedule.segments)?;
    Ok(AversionReport {
        horizon,
        guard: params.solver.guard,
        uncontrolled_blowup: free.blowup_time,
        uncontrolled_max_grad: max_grad(&solver, &free),
        controlled_blowup: ctrl.blowup_time,
        controlled_max_grad: max_grad(&solver, &ctrl),
        schedule,
    })
}
