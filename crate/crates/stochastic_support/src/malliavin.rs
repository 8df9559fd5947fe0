//! `D_w phi_t(u, V) H = sum_k int_0^t J_{s,t} sigma_k dH_k/ds ds`.

use galerkin_solvers::{mode_weight, NoisePath, Solver, SpectralField};
use mode_algebra::TrigMode;

use crate::gramian::{adjoint_nodes, mode_indices, sigma_matrix, unit_columns};
use crate::StochasticError;

fn check_direction(solver: &Solver, h: &NoisePath, t: f64) -> Result<(), StochasticError> {
    if h.dim() != solver.n_controls() {
        return Err(StochasticError::InvalidArgument(format!(
            "direction has {} components, expected {}",
            h.dim(),
            solver.n_controls()
        )));
    }
    if h.end_time() < t * (1.0 - 1e-12) {
        return Err(StochasticError::InvalidArgument(format!("direction ends at {} before t = {t}", h.end_time())));
    }
    Ok(())
}

/// Forced linearization along the base trajectory of `phi_.(u0, V)`, started from 0.
pub fn malliavin_derivative(
    solver: &Solver,
    u0: &SpectralField,
    path: &NoisePath,
    t: f64,
    h: &NoisePath,
) -> Result<SpectralField, StochasticError> {
    check_direction(solver, h, t)?;
    let tr = solver.trajectory(u0, path, t)?;
    if let Some(time) = tr.blowup_time {
        return Err(StochasticError::Exploded { time });
    }
    Ok(solver.tangent_flow_forced(&tr, 0.0, t, &solver.zero(), h)?)
}

/// Composite Simpson weights on `n` equal intervals of unit length (3/8 rule on the last
/// three intervals when `n` is odd, trapezoid when `n = 1`).
pub(crate) fn simpson_weights(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    match n {
        0 => {}
        1 => {
            w[0] = 0.5;
            w[1] = 0.5;
        }
        _ => {
            let even = if n % 2 == 0 { n } else { n - 3 };
            for i in (0..even).step_by(2) {
                w[i] += 1.0 / 3.0;
                w[i + 1] += 4.0 / 3.0;
                w[i + 2] += 1.0 / 3.0;
            }
            if n % 2 == 1 {
                for (j, c) in [3.0, 9.0, 9.0, 3.0].iter().enumerate() {
                    w[even + j] += c / 8.0;
                }
            }
        }
    }
    w
}

/// `<D_w phi_t H, e_i>` for the listed modes, assembled from the adjoint:
/// `sum_k int_0^t <J_{s,t} sigma_k, e_i> dH_k/ds ds` by composite Simpson on each run of equal
/// steps with constant `dH/ds`.
pub fn malliavin_quadrature(
    solver: &Solver,
    u0: &SpectralField,
    path: &NoisePath,
    t: f64,
    h: &NoisePath,
    modes: &[TrigMode],
) -> Result<Vec<f64>, StochasticError> {
    check_direction(solver, h, t)?;
    let idx = mode_indices(solver, modes)?;
    let tr = solver.trajectory(u0, path, t)?;
    let zs = adjoint_nodes(solver, &tr, unit_columns(solver, &idx))?;
    let w = mode_weight(solver.params().model);
    let sig = sigma_matrix(solver);
    let steps = tr.times.len().saturating_sub(1);
    let mut out = vec![0.0; idx.len()];
    let mut i = 0;
    while i < steps {
        let len = tr.times[i + 1] - tr.times[i];
        let slope = h.slope_at(tr.times[i] + 0.5 * len);
        let mut j = i + 1;
        while j < steps {
            let l = tr.times[j + 1] - tr.times[j];
            if (l - len).abs() > 1e-12 * len || h.slope_at(tr.times[j] + 0.5 * l) != slope {
                break;
            }
            j += 1;
        }
        let span = tr.times[j] - tr.times[i];
        let weights = simpson_weights(j - i);
        let hdot = nalgebra::DVector::from_vec(slope);
        for (q, wq) in weights.iter().enumerate() {
            // <J sigma_k, e_c> = w sigma_k^T Z
            let g = zs[i + q].tr_mul(&(&sig * &hdot)) * w;
            for (o, x) in out.iter_mut().zip(g.iter()) {
                *o += wq * span / (j - i) as f64 * x;
            }
        }
        i = j;
    }
    Ok(out)
}
