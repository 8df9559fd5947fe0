//! `M_t^pi`: `<M xi, rho> = sum_k int_0^t <J_{s,t} sigma_k, xi> <J_{s,t} sigma_k, rho> ds`
//! restricted to an orthonormal family `e_i` of basis functions.
//!
//! `Z(s) = J_{s,t}^T E` solves `dZ/d(t-s) = A(u(s))^T Z` backwards from `Z(t) = E`, so one
//! backward sweep over the recorded trajectory yields the integrand at every node.

use galerkin_solvers::{mode_weight, NoisePath, Solver, SpectralField, Trajectory};
use mode_algebra::TrigMode;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::StochasticError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramianMatrix {
    pub modes: Vec<TrigMode>,
    /// Row-major `m x m`.
    pub entries: Vec<Vec<f64>>,
    pub t: f64,
    /// Largest quadrature step used.
    pub dt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub t: f64,
    pub modes: Vec<String>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// `1e-10 * trace / m`.
    pub threshold: f64,
    pub nondegenerate: bool,
    pub symmetric: bool,
    pub psd: bool,
}

impl GramianMatrix {
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let m = self.dim();
        DMatrix::from_fn(m, m, |i, j| self.entries[i][j])
    }

    pub fn get(&self, a: &TrigMode, b: &TrigMode) -> Option<f64> {
        let i = self.modes.iter().position(|m| m == a)?;
        let j = self.modes.iter().position(|m| m == b)?;
        Some(self.entries[i][j])
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[i][i]).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_asymmetry(&self) -> f64 {
        let m = self.dim();
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..i {
                worst = worst.max((self.entries[i][j] - self.entries[j][i]).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self) -> bool {
        self.max_asymmetry() <= 1e-12 * self.trace().abs().max(1.0)
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -1e-10
    }

    /// Scale-aware threshold `1e-10 * trace / m`.
    pub fn threshold(&self) -> f64 {
        if self.dim() == 0 {
            0.0
        } else {
            1e-10 * self.trace() / self.dim() as f64
        }
    }

    pub fn nondegenerate(&self) -> bool {
        self.dim() > 0 && self.trace() > 0.0 && self.min_eigenvalue() > self.threshold()
    }

    pub fn report(&self) -> EigenReport {
        let ev = self.eigenvalues();
        EigenReport {
            t: self.t,
            modes: self.modes.iter().map(|m| m.to_string()).collect(),
            min_eigenvalue: ev.first().copied().unwrap_or(0.0),
            eigenvalues: ev,
            trace: self.trace(),
            threshold: self.threshold(),
            nondegenerate: self.nondegenerate(),
            symmetric: self.is_symmetric(),
            psd: self.is_psd(),
        }
    }

    pub fn to_csv_string(&self) -> String {
        let labels: Vec<String> = self.modes.iter().map(|m| format!("\"{m}\"")).collect();
        let mut s = format!("mode,{}\n", labels.join(","));
        for (l, row) in labels.iter().zip(&self.entries) {
            let vals: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            s.push_str(&format!("{l},{}\n", vals.join(",")));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), StochasticError> {
        std::fs::write(path, self.to_csv_string()).map_err(|e| StochasticError::Io(format!("{}: {e}", path.display())))
    }
}

pub(crate) fn mode_indices(solver: &Solver, modes: &[TrigMode]) -> Result<Vec<usize>, StochasticError> {
    let all = solver.modes();
    modes.iter().map(|m| all.binary_search(m).map_err(|_| StochasticError::UnknownMode(*m))).collect()
}

/// `Z(t) = E` whose columns are the orthonormal basis functions of the listed modes.
pub(crate) fn unit_columns(solver: &Solver, idx: &[usize]) -> DMatrix<f64> {
    let w = mode_weight(solver.params().model);
    let mut e = DMatrix::zeros(solver.dim(), idx.len());
    for (c, &i) in idx.iter().enumerate() {
        e[(i, c)] += 1.0 / w.sqrt();
    }
    e
}

/// `n x K` matrix of control directions.
pub(crate) fn sigma_matrix(solver: &Solver) -> DMatrix<f64> {
    let n = solver.dim();
    let cols: Vec<SpectralField> = (0..solver.n_controls()).map(|k| solver.sigma(k)).collect();
    DMatrix::from_fn(n, cols.len(), |i, k| cols[k].coeffs[i])
}

fn scale_rows(m: &DMatrix<f64>, e: &[f64]) -> DMatrix<f64> {
    let mut r = m.clone();
    for (i, mut row) in r.row_iter_mut().enumerate() {
        row *= e[i];
    }
    r
}

/// `Z(t_i) = J_{t_i,t}^T Z(t)` at every node of the trajectory, by a backward Lawson RK4 sweep
/// with the same integrating factor as the forward solver.
pub(crate) fn adjoint_nodes(
    solver: &Solver,
    tr: &Trajectory,
    z_end: DMatrix<f64>,
) -> Result<Vec<DMatrix<f64>>, StochasticError> {
    if let Some(time) = tr.blowup_time {
        return Err(StochasticError::Exploded { time });
    }
    let n = solver.dim();
    let decay = solver.linear_decay();
    // transpose of the nonlinear part of the Jacobian
    let g = |u: &SpectralField| -> Result<DMatrix<f64>, StochasticError> {
        let cols = solver.jacobian_columns(u)?;
        Ok(DMatrix::from_fn(n, n, |i, j| cols[i][j] + if i == j { decay[i] } else { 0.0 }))
    };
    let nodes = tr.times.len();
    let mut out = vec![DMatrix::zeros(0, 0); nodes];
    out[nodes - 1] = z_end;
    let mut g_next = g(&tr.states[nodes - 1])?;
    for i in (0..nodes - 1).rev() {
        let h = tr.times[i + 1] - tr.times[i];
        let mid = solver.advance(&tr.states[i], &tr.controls[i], 0.5 * h)?;
        let g_mid = g(&mid)?;
        let g_prev = g(&tr.states[i])?;
        let e: Vec<f64> = decay.iter().map(|d| (-d * h).exp()).collect();
        let e2: Vec<f64> = decay.iter().map(|d| (-d * h * 0.5).exp()).collect();
        let z = &out[i + 1];
        let k1 = &g_next * z;
        let k2 = &g_mid * scale_rows(&(z + &k1 * (0.5 * h)), &e2);
        let k3 = &g_mid * (scale_rows(z, &e2) + &k2 * (0.5 * h));
        let k4 = &g_prev * (scale_rows(z, &e) + scale_rows(&k3, &e2) * h);
        let z_new = scale_rows(z, &e) + (scale_rows(&k1, &e) + scale_rows(&(k2 + k3), &e2) * 2.0 + k4) * (h / 6.0);
        if z_new.iter().any(|x| !x.is_finite()) {
            return Err(StochasticError::Exploded { time: tr.times[i] });
        }
        out[i] = z_new;
        g_next = g_prev;
    }
    Ok(out)
}

/// Gramian along a recorded trajectory ending at the time of interest.
pub fn gramian_along(solver: &Solver, tr: &Trajectory, modes: &[TrigMode]) -> Result<GramianMatrix, StochasticError> {
    let idx = mode_indices(solver, modes)?;
    let m = idx.len();
    let w = mode_weight(solver.params().model);
    let sig = sigma_matrix(solver);
    let zs = adjoint_nodes(solver, tr, unit_columns(solver, &idx))?;
    let mut acc = DMatrix::<f64>::zeros(m, m);
    let mut dt = 0.0f64;
    for i in 0..tr.times.len().saturating_sub(1) {
        let h = tr.times[i + 1] - tr.times[i];
        dt = dt.max(h);
        for j in [i, i + 1] {
            let q = sig.tr_mul(&zs[j]) * w;
            acc += q.tr_mul(&q) * (0.5 * h);
        }
    }
    Ok(GramianMatrix {
        modes: modes.to_vec(),
        entries: (0..m).map(|i| (0..m).map(|j| acc[(i, j)]).collect()).collect(),
        t: tr.end_time(),
        dt,
    })
}

/// `M_t^pi(u0, V)` by trapezoidal quadrature on the solver's step grid.
pub fn gramian(
    solver: &Solver,
    u0: &SpectralField,
    path: &NoisePath,
    t: f64,
    modes: &[TrigMode],
) -> Result<GramianMatrix, StochasticError> {
    let tr = solver.trajectory(u0, path, t)?;
    gramian_along(solver, &tr, modes)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub t: f64,
    pub s: f64,
    pub lambda_min_t: f64,
    pub lambda_min_ts: f64,
    pub threshold_t: f64,
    pub threshold_ts: f64,
    pub nondegenerate_t: bool,
    pub nondegenerate_ts: bool,
    /// Non-degenerate at `t` but degenerate at `t + s`.
    pub violation: bool,
}

/// Compares `M_t^pi` and `M_{t+s}^pi` along the same path.
pub fn gramian_monotonicity(
    solver: &Solver,
    u0: &SpectralField,
    path: &NoisePath,
    t: f64,
    s: f64,
    modes: &[TrigMode],
) -> Result<MonotonicityReport, StochasticError> {
    if !(s >= 0.0) {
        return Err(StochasticError::InvalidArgument(format!("extension s must be non-negative, got {s}")));
    }
    let a = gramian(solver, u0, path, t, modes)?;
    let b = gramian(solver, u0, path, t + s, modes)?;
    let (nd_t, nd_ts) = (a.nondegenerate(), b.nondegenerate());
    Ok(MonotonicityReport {
        t,
        s,
        lambda_min_t: a.min_eigenvalue(),
        lambda_min_ts: b.min_eigenvalue(),
        threshold_t: a.threshold(),
        threshold_ts: b.threshold(),
        nondegenerate_t: nd_t,
        nondegenerate_ts: nd_ts,
        violation: nd_t && !nd_ts,
    })
}
