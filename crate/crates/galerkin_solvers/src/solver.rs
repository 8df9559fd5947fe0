//! Lawson (integrating-factor) RK4 on `du/dt = -D u + R(u) + f + sum alpha_k sigma_k`,
//! with `D` the diagonal linear part.
//!
//! For Euler (`D = 0`) this is classical RK4; its step is additionally capped by
//! `cfl / ||grad u||_inf` and the gradient bound doubles as the blow-up guard.

use mode_algebra::{lattice_modes, Field, ModelKind, TrigMode};
use serde::{Deserialize, Serialize};

use crate::engines::{euler::EulerEngine, fluid2d::Fluid2dEngine, rd::RdEngine, Engine};
use crate::{ModelParams, NoisePath, SolverError, SpectralField};

pub struct Solver {
    pub(crate) params: ModelParams,
    pub(crate) modes: Vec<TrigMode>,
    pub(crate) decay: Vec<f64>,
    pub(crate) force: Vec<f64>,
    pub(crate) sigma: Vec<Vec<(usize, f64)>>,
    engine: Box<dyn Engine>,
    hash: String,
}

/// Recorded solve: one state per step boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub model: ModelKind,
    pub cutoff: u32,
    pub params_hash: String,
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    /// Control amplitudes used on `[times[i], times[i+1]]`.
    pub controls: Vec<Vec<f64>>,
    /// Set iff the Euler gradient guard tripped; the trajectory stops there.
    pub blowup_time: Option<f64>,
}

impl Trajectory {
    pub fn blowup_flag(&self) -> bool {
        self.blowup_time.is_some()
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("trajectory has a start")
    }

    pub fn final_state(&self) -> &SpectralField {
        self.states.last().expect("trajectory has a start")
    }

    /// Index of the step containing `t` (the last step for `t = end`).
    pub fn step_index(&self, t: f64) -> usize {
        let j = self.times.partition_point(|&x| x <= t);
        j.saturating_sub(1).min(self.times.len().saturating_sub(2))
    }
}

struct Run {
    state: Vec<f64>,
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    controls: Vec<Vec<f64>>,
    blowup: Option<f64>,
}

/// Relative slack when snapping times onto step boundaries.
const SNAP: f64 = 1e-12;

impl Solver {
    pub fn new(params: ModelParams) -> Result<Self, SolverError> {
        params.validate().map_err(SolverError::InvalidParams)?;
        let modes = lattice_modes(params.model, params.cutoff);
        let index = |m: &TrigMode| modes.binary_search(m).map_err(|_| SolverError::UnknownMode(*m));
        let decay = modes
            .iter()
            .map(|m| {
                let k2 = m.k.norm2() as f64;
                match m.field {
                    Field::RdScalar => params.kappa * k2,
                    Field::Vorticity => params.nu * k2,
                    Field::Temperature => params.kappa * k2,
                    Field::Velocity => 0.0,
                }
            })
            .collect();
        let mut force = vec![0.0; modes.len()];
        for f in &params.force {
            force[index(&f.mode)?] += f.value;
        }
        let sigma = params.control_basis.iter().map(|s| Ok(vec![(index(s)?, 1.0)])).collect::<Result<_, SolverError>>()?;
        let engine: Box<dyn Engine> = match params.model {
            ModelKind::Rd => Box::new(RdEngine::new(params.cutoff as usize, &params.rd_coeffs)),
            ModelKind::Nse2d => Box::new(Fluid2dEngine::new(&modes, params.cutoff, false, 0.0)),
            ModelKind::Boussinesq => Box::new(Fluid2dEngine::new(&modes, params.cutoff, true, params.gravity)),
            ModelKind::Euler3d => Box::new(EulerEngine::new(&modes, params.cutoff)),
        };
        let hash = params.params_hash();
        Ok(Self { params, modes, decay, force, sigma, engine, hash })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn params_hash(&self) -> &str {
        &self.hash
    }

    pub fn modes(&self) -> &[TrigMode] {
        &self.modes
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn n_controls(&self) -> usize {
        self.sigma.len()
    }

    pub fn zero(&self) -> SpectralField {
        self.wrap(vec![0.0; self.dim()])
    }

    pub fn wrap(&self, coeffs: Vec<f64>) -> SpectralField {
        SpectralField { model: self.params.model, cutoff: self.params.cutoff, coeffs }
    }

    /// `sum alpha_k sigma_k`.
    pub fn control_field(&self, alpha: &[f64]) -> Result<SpectralField, SolverError> {
        self.check_controls(alpha)?;
        let mut v = vec![0.0; self.dim()];
        self.add_controls(&mut v, alpha);
        Ok(self.wrap(v))
    }

    /// The `k`-th control direction.
    pub fn sigma(&self, k: usize) -> SpectralField {
        let mut v = vec![0.0; self.dim()];
        for &(i, c) in &self.sigma[k] {
            v[i] += c;
        }
        self.wrap(v)
    }

    pub fn background_force(&self) -> SpectralField {
        self.wrap(self.force.clone())
    }

    fn add_controls(&self, v: &mut [f64], alpha: &[f64]) {
        for (s, a) in self.sigma.iter().zip(alpha) {
            for &(i, c) in s {
                v[i] += a * c;
            }
        }
    }

    fn check_state(&self, u: &SpectralField) -> Result<(), SolverError> {
        if u.model != self.params.model || u.cutoff != self.params.cutoff {
            return Err(SolverError::Space);
        }
        if u.coeffs.len() != self.dim() {
            return Err(SolverError::Length { expected: self.dim(), got: u.coeffs.len() });
        }
        Ok(())
    }

    fn check_controls(&self, alpha: &[f64]) -> Result<(), SolverError> {
        if alpha.len() != self.sigma.len() {
            return Err(SolverError::ControlLength { expected: self.sigma.len(), got: alpha.len() });
        }
        Ok(())
    }

    /// Constant source `f + sum alpha_k sigma_k`.
    pub(crate) fn source(&self, alpha: &[f64]) -> Vec<f64> {
        let mut c = self.force.clone();
        self.add_controls(&mut c, alpha);
        c
    }

    /// `-L u - N(u) + f + sum alpha_k sigma_k`.
    pub fn tendency(&self, u: &SpectralField, alpha: &[f64]) -> Result<SpectralField, SolverError> {
        self.check_state(u)?;
        self.check_controls(alpha)?;
        let mut r = self.engine.reaction(&u.coeffs);
        let c = self.source(alpha);
        for i in 0..r.len() {
            r[i] += c[i] - self.decay[i] * u.coeffs[i];
        }
        Ok(self.wrap(r))
    }

    /// `N(u)` in the convention `du/dt + Lu + N(u) = f + sigma.alpha`.
    ///
    /// For reaction-diffusion this is `-P f(u)`; for Boussinesq it includes `-g d_x theta`.
    pub fn nonlinear_term(&self, u: &SpectralField) -> Result<SpectralField, SolverError> {
        self.check_state(u)?;
        Ok(self.wrap(self.engine.reaction(&u.coeffs).into_iter().map(|x| -x).collect()))
    }

    /// Derivative of the tendency at `u` in direction `v`.
    pub fn jvp(&self, u: &SpectralField, v: &SpectralField) -> Result<SpectralField, SolverError> {
        self.check_state(u)?;
        self.check_state(v)?;
        let mut r = self.engine.reaction_jvp(&u.coeffs, &v.coeffs);
        for i in 0..r.len() {
            r[i] -= self.decay[i] * v.coeffs[i];
        }
        Ok(self.wrap(r))
    }

    /// Columns `A e_j` of the tendency's Jacobian at `u`.
    pub fn jacobian_columns(&self, u: &SpectralField) -> Result<Vec<Vec<f64>>, SolverError> {
        self.check_state(u)?;
        let n = self.dim();
        Ok((0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let mut col = self.engine.reaction_jvp(&u.coeffs, &e);
                col[j] -= self.decay[j];
                col
            })
            .collect())
    }

    /// Diagonal of the linear operator `L` in mode order.
    pub fn linear_decay(&self) -> &[f64] {
        &self.decay
    }

    pub fn grad_bound(&self, u: &SpectralField) -> f64 {
        self.engine.grad_bound(&u.coeffs)
    }

    fn factors(&self, h: f64) -> (Vec<f64>, Vec<f64>) {
        (self.decay.iter().map(|d| (-d * h).exp()).collect(), self.decay.iter().map(|d| (-d * h * 0.5).exp()).collect())
    }

    fn rhs(&self, u: &[f64], c: &[f64]) -> Vec<f64> {
        let mut r = self.engine.reaction(u);
        for (x, ci) in r.iter_mut().zip(c) {
            *x += ci;
        }
        r
    }

    /// One Lawson step; returns the new state and the stage states `u2, u3, u4`.
    fn lawson(&self, a: &[f64], h: f64, c: &[f64]) -> (Vec<f64>, [Vec<f64>; 3]) {
        let (e, e2) = self.factors(h);
        let n = a.len();
        let k1 = self.rhs(a, c);
        let u2: Vec<f64> = (0..n).map(|i| e2[i] * (a[i] + 0.5 * h * k1[i])).collect();
        let k2 = self.rhs(&u2, c);
        let u3: Vec<f64> = (0..n).map(|i| e2[i] * a[i] + 0.5 * h * k2[i]).collect();
        let k3 = self.rhs(&u3, c);
        let u4: Vec<f64> = (0..n).map(|i| e[i] * a[i] + h * e2[i] * k3[i]).collect();
        let k4 = self.rhs(&u4, c);
        let out = (0..n)
            .map(|i| e[i] * a[i] + h / 6.0 * (e[i] * k1[i] + 2.0 * e2[i] * (k2[i] + k3[i]) + k4[i]))
            .collect();
        (out, [u2, u3, u4])
    }

    /// Exact derivative of the Lawson step map in `(a, c)` along `(da, dc)`.
    fn lawson_tangent(&self, a: &[f64], h: f64, c: &[f64], da: &[f64], dc: Option<&[f64]>) -> Vec<f64> {
        let (_, [u2, u3, u4]) = self.lawson(a, h, c);
        let (e, e2) = self.factors(h);
        let n = a.len();
        let dr = |u: &[f64], v: &[f64]| {
            let mut r = self.engine.reaction_jvp(u, v);
            if let Some(dc) = dc {
                for (x, d) in r.iter_mut().zip(dc) {
                    *x += d;
                }
            }
            r
        };
        let k1 = dr(a, da);
        let d2: Vec<f64> = (0..n).map(|i| e2[i] * (da[i] + 0.5 * h * k1[i])).collect();
        let k2 = dr(&u2, &d2);
        let d3: Vec<f64> = (0..n).map(|i| e2[i] * da[i] + 0.5 * h * k2[i]).collect();
        let k3 = dr(&u3, &d3);
        let d4: Vec<f64> = (0..n).map(|i| e[i] * da[i] + h * e2[i] * k3[i]).collect();
        let k4 = dr(&u4, &d4);
        (0..n).map(|i| e[i] * da[i] + h / 6.0 * (e[i] * k1[i] + 2.0 * e2[i] * (k2[i] + k3[i]) + k4[i])).collect()
    }

    /// Single step of length `h` with constant amplitudes.
    pub fn advance(&self, u: &SpectralField, alpha: &[f64], h: f64) -> Result<SpectralField, SolverError> {
        self.check_state(u)?;
        self.check_controls(alpha)?;
        Ok(self.wrap(self.lawson(&u.coeffs, h, &self.source(alpha)).0))
    }

    fn run(&self, u0: &[f64], segs: &[(f64, Vec<f64>)], record: bool) -> Result<Run, SolverError> {
        let opts = &self.params.solver;
        let euler = self.params.model == ModelKind::Euler3d;
        let mut run = Run { state: u0.to_vec(), times: vec![0.0], states: Vec::new(), controls: Vec::new(), blowup: None };
        if record {
            run.states.push(u0.to_vec());
        }
        let mut t0 = 0.0;
        for (len, alpha) in segs {
            let c = self.source(alpha);
            let push = |run: &mut Run, t: f64, state: Vec<f64>| {
                if !state.iter().all(|x| x.is_finite()) {
                    return Err(SolverError::NonFinite { time: t });
                }
                if record {
                    run.times.push(t);
                    run.states.push(state.clone());
                    run.controls.push(alpha.clone());
                }
                run.state = state;
                Ok(())
            };
            if euler {
                let mut done = 0.0;
                let cap = (len / opts.min_steps as f64).min(opts.dt);
                while done < *len {
                    let g = self.engine.grad_bound(&run.state);
                    if !(g <= opts.guard) {
                        run.blowup = Some(t0 + done);
                        return Ok(run);
                    }
                    let mut h = cap.min(opts.cfl / g.max(f64::MIN_POSITIVE));
                    let rest = len - done;
                    if h >= rest * (1.0 - SNAP) {
                        h = rest;
                    }
                    let next = self.lawson(&run.state, h, &c).0;
                    done = if h == rest { *len } else { done + h };
                    push(&mut run, t0 + done, next)?;
                }
            } else {
                let n = ((len / opts.dt) * (1.0 - SNAP)).ceil().max(opts.min_steps as f64) as usize;
                let h = len / n as f64;
                for i in 0..n {
                    let next = self.lawson(&run.state, h, &c).0;
                    let t = if i + 1 == n { t0 + len } else { t0 + (i + 1) as f64 * h };
                    push(&mut run, t, next)?;
                }
            }
            t0 += len;
        }
        if euler && !(self.engine.grad_bound(&run.state) <= opts.guard) {
            run.blowup = Some(t0);
        }
        if !record {
            run.times.clear();
        }
        Ok(run)
    }

    fn finish(&self, run: Run) -> Result<SpectralField, SolverError> {
        match run.blowup {
            Some(time) => Err(SolverError::Exploded { time }),
            None => Ok(self.wrap(run.state)),
        }
    }

    fn check_segments(&self, segs: &[(f64, Vec<f64>)]) -> Result<(), SolverError> {
        for (len, alpha) in segs {
            if !(*len >= 0.0) {
                return Err(SolverError::NegativeTime(*len));
            }
            self.check_controls(alpha)?;
        }
        Ok(())
    }

    /// `Phi_t^{alpha.sigma} u0`.
    pub fn flow_constant(&self, u0: &SpectralField, alpha: &[f64], t: f64) -> Result<SpectralField, SolverError> {
        self.check_state(u0)?;
        self.check_controls(alpha)?;
        if !(t >= 0.0) {
            return Err(SolverError::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(u0.clone());
        }
        self.finish(self.run(&u0.coeffs, &[(t, alpha.to_vec())], false)?)
    }

    /// Consecutive constant-amplitude pieces `(duration, alpha)`.
    pub fn flow_segments(&self, u0: &SpectralField, segs: &[(f64, Vec<f64>)]) -> Result<SpectralField, SolverError> {
        self.check_state(u0)?;
        self.check_segments(segs)?;
        let segs: Vec<_> = segs.iter().filter(|s| s.0 > 0.0).cloned().collect();
        self.finish(self.run(&u0.coeffs, &segs, false)?)
    }

    /// `phi_t(u0, V)`.
    ///
    /// On each knot interval `V` has constant slope, so `v = u - sigma.V` and `u` obey
    /// the same step-by-step update; `u` is integrated directly.
    pub fn flow_path(&self, u0: &SpectralField, path: &NoisePath, t: f64) -> Result<SpectralField, SolverError> {
        if !(t >= 0.0) {
            return Err(SolverError::NegativeTime(t));
        }
        if t == 0.0 {
            self.check_state(u0)?;
            return Ok(u0.clone());
        }
        self.flow_segments(u0, &path.segments_until(t)?)
    }

    pub fn trajectory_segments(&self, u0: &SpectralField, segs: &[(f64, Vec<f64>)]) -> Result<Trajectory, SolverError> {
        self.check_state(u0)?;
        self.check_segments(segs)?;
        let segs: Vec<_> = segs.iter().filter(|s| s.0 > 0.0).cloned().collect();
        let run = self.run(&u0.coeffs, &segs, true)?;
        Ok(Trajectory {
            model: self.params.model,
            cutoff: self.params.cutoff,
            params_hash: self.hash.clone(),
            times: run.times,
            states: run.states.into_iter().map(|s| self.wrap(s)).collect(),
            controls: run.controls,
            blowup_time: run.blowup,
        })
    }

    /// Recorded solve of `phi_.(u0, V)` on `[0, t]`.
    pub fn trajectory(&self, u0: &SpectralField, path: &NoisePath, t: f64) -> Result<Trajectory, SolverError> {
        if !(t >= 0.0) {
            return Err(SolverError::NegativeTime(t));
        }
        let segs = if t == 0.0 { Vec::new() } else { path.segments_until(t)? };
        self.trajectory_segments(u0, &segs)
    }

    /// Re-runs the step plan of `base` from another initial state.
    pub fn replay(&self, base: &Trajectory, u0: &SpectralField) -> Result<SpectralField, SolverError> {
        self.check_state(u0)?;
        let mut u = u0.coeffs.clone();
        for (i, alpha) in base.controls.iter().enumerate() {
            let h = base.times[i + 1] - base.times[i];
            u = self.lawson(&u, h, &self.source(alpha)).0;
            if !u.iter().all(|x| x.is_finite()) {
                return Err(SolverError::NonFinite { time: base.times[i + 1] });
            }
        }
        Ok(self.wrap(u))
    }

    /// Walks `[s, t]` along the base steps, calling `f(base_state, h, step, start_time)`.
    /// Partial steps at either end start from a base state recomputed at `s`.
    fn substeps(
        &self,
        base: &Trajectory,
        s: f64,
        t: f64,
        mut f: impl FnMut(&[f64], f64, usize, f64),
    ) -> Result<(), SolverError> {
        let end = base.end_time();
        if let Some(time) = base.blowup_time {
            if t > time - SNAP * time.max(1.0) && t > 0.0 {
                return Err(SolverError::BaseExploded { time });
            }
        }
        let eps = SNAP * end.max(1.0);
        if !(0.0..=t).contains(&s) || t > end + eps {
            return Err(SolverError::OutsideTrajectory { s, t, end });
        }
        if t - s <= eps {
            return Ok(());
        }
        let mut i = base.step_index(s + eps);
        let mut cur = s;
        let mut state: Vec<f64> = if (base.times[i] - s).abs() <= eps {
            cur = base.times[i];
            base.states[i].coeffs.clone()
        } else {
            let c = self.source(&base.controls[i]);
            self.lawson(&base.states[i].coeffs, s - base.times[i], &c).0
        };
        loop {
            let b = base.times[i + 1];
            if t < b - eps {
                f(&state, t - cur, i, cur);
                return Ok(());
            }
            f(&state, b - cur, i, cur);
            cur = b;
            if t - cur <= eps || i + 2 >= base.times.len() {
                return Ok(());
            }
            i += 1;
            state = base.states[i].coeffs.clone();
        }
    }

    /// `J_{s,t} xi0`: the linearized flow along the recorded base trajectory.
    pub fn tangent_flow(&self, base: &Trajectory, s: f64, t: f64, xi0: &SpectralField) -> Result<SpectralField, SolverError> {
        self.linearized(base, s, t, xi0, None)
    }

    /// Linearization forced by `sum_k sigma_k dH_k/dt` (the Malliavin derivative in direction `H`).
    pub fn tangent_flow_forced(
        &self,
        base: &Trajectory,
        s: f64,
        t: f64,
        xi0: &SpectralField,
        forcing: &NoisePath,
    ) -> Result<SpectralField, SolverError> {
        if forcing.dim() != self.n_controls() {
            return Err(SolverError::ControlLength { expected: self.n_controls(), got: forcing.dim() });
        }
        self.linearized(base, s, t, xi0, Some(forcing))
    }

    fn linearized(
        &self,
        base: &Trajectory,
        s: f64,
        t: f64,
        xi0: &SpectralField,
        forcing: Option<&NoisePath>,
    ) -> Result<SpectralField, SolverError> {
        self.check_state(xi0)?;
        if base.params_hash != self.hash {
            return Err(SolverError::Space);
        }
        let mut d = xi0.coeffs.clone();
        self.substeps(base, s, t, |a, h, i, start| {
            let c = self.source(&base.controls[i]);
            let dc = forcing.map(|p| {
                let mut v = vec![0.0; self.dim()];
                self.add_controls(&mut v, &p.slope_at(start + 0.5 * h));
                v
            });
            d = self.lawson_tangent(a, h, &c, &d, dc.as_deref());
        })?;
        Ok(self.wrap(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mode_algebra::{CoeffVec, Parity};

    #[test]
    fn rd_linear_tendency_is_eigenvalue() {
        let p = ModelParams::rd(4, 0.7, vec![0.0, 0.3], &[1]);
        let s = Solver::new(p).unwrap();
        let u = SpectralField::from_coeffs(ModelKind::Rd, 4, &CoeffVec::unit(TrigMode::rd(1))).unwrap();
        let r = s.tendency(&u, &[0.0]).unwrap();
        assert!((r.coeffs[0] - (-0.7 + 0.3)).abs() < 1e-15);
        assert!(r.coeffs[1..].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn zero_everything_has_zero_tendency() {
        for p in [
            ModelParams::nse2d(3, 0.1, &[[1, 0]]),
            ModelParams::boussinesq(3, 0.1, 0.1, 1.0, &[[1, 0]]),
            ModelParams::euler3d(2, &[[1, 0, 0]]),
            ModelParams::rd(5, 1.0, vec![0.0, 1.0, 0.0, -1.0], &[1]),
        ] {
            let s = Solver::new(p).unwrap();
            let z = vec![0.0; s.n_controls()];
            assert!(s.tendency(&s.zero(), &z).unwrap().coeffs.iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn nse_single_mode_has_no_nonlinear_part() {
        let s = Solver::new(ModelParams::nse2d(4, 0.1, &[[1, 0]])).unwrap();
        let u = SpectralField::from_coeffs(ModelKind::Nse2d, 4, &CoeffVec::unit(TrigMode::vorticity(2, 1, Parity::Sin)))
            .unwrap();
        assert!(s.nonlinear_term(&u).unwrap().coeffs.iter().all(|x| x.abs() < 1e-14));
    }

    #[test]
    fn zero_time_returns_input_and_negative_time_is_rejected() {
        let s = Solver::new(ModelParams::nse2d(2, 0.1, &[[1, 0]])).unwrap();
        let mut u = s.zero();
        u.coeffs[3] = 1.0;
        assert_eq!(s.flow_constant(&u, &[1.0, 1.0], 0.0).unwrap(), u);
        assert_eq!(s.flow_constant(&u, &[1.0, 1.0], -1.0), Err(SolverError::NegativeTime(-1.0)));
        assert!(matches!(s.flow_constant(&u, &[1.0], 1.0), Err(SolverError::ControlLength { .. })));
    }

    #[test]
    fn heat_mode_decays_exactly() {
        let s = Solver::new(ModelParams::rd(3, 0.5, vec![0.0, 0.0], &[1])).unwrap();
        let mut u = s.zero();
        u.coeffs[1] = 2.0;
        let v = s.flow_constant(&u, &[0.0], 0.8).unwrap();
        assert!((v.coeffs[1] - 2.0 * (-0.5 * 4.0 * 0.8f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn euler_guard_trips_on_huge_data() {
        let mut p = ModelParams::euler3d(2, &[[1, 0, 0]]);
        p.solver.guard = 10.0;
        let s = Solver::new(p).unwrap();
        let mut u = s.zero();
        u.coeffs[0] = 100.0;
        assert!(matches!(s.flow_constant(&u, &[0.0; 4], 0.1), Err(SolverError::Exploded { time }) if time == 0.0));
        let tr = s.trajectory(&u, &NoisePath::zero(4, 0.1), 0.1).unwrap();
        assert!(tr.blowup_flag());
        assert!(matches!(s.tangent_flow(&tr, 0.0, 0.05, &u), Err(SolverError::BaseExploded { .. })));
    }
}
