//! Reachability plans built from level-0 (ray) and level-1 (bracket) bursts.
//!
//! A displacement `d = v - u0` is split as `sigma.a + sum_g c_g D(g)` with
//! `D(g) = -P_N N_M(sigma.g)`; the bracket burst of `s g` over nominal time `tau` moves the
//! state by `tau s^M D(g)`. Bursts run back to back, each with nominal time `delta t / n`.

use galerkin_solvers::{mode_weight, ModelParams, Solver, SolverError, SpectralField};
use mode_algebra::{SpanSet, TrigMode};
use nalgebra::{DMatrix, DVector};
use saturation_engine::{iterate_span, SubspaceChain};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::bursts::{bracket_burst, bracket_limit, burst_params, degree, inner_scale, ray_burst};
use crate::{ControlError, ControlSchedule};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReachOptions {
    pub lambda_start: f64,
    pub lambda_cap: f64,
    /// Share of the horizon given to bursts.
    pub delta: f64,
    pub proj_tol: f64,
    pub max_iters: usize,
    pub theta: f64,
}

impl Default for ReachOptions {
    fn default() -> Self {
        Self { lambda_start: 1e2, lambda_cap: 1e8, delta: 0.1, proj_tol: 1e-8, max_iters: 50, theta: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinballInfo {
    pub relaxed_time: f64,
    pub relaxed_lambda: f64,
    /// Calibrated dwell length.
    pub sigma: f64,
    pub retarget_lambdas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachPlan {
    /// Parameters the schedule was solved with (burst-resolving solver options).
    pub params: ModelParams,
    pub params_hash: String,
    pub u0: SpectralField,
    pub v: SpectralField,
    pub t: f64,
    pub eps: f64,
    pub schedule: ControlSchedule,
    /// Measured `||Phi u0 - v||`.
    pub achieved_error: f64,
    pub lambda: f64,
    pub pinball: Option<PinballInfo>,
    pub projection_modes: Option<Vec<TrigMode>>,
    pub projection_error: Option<f64>,
    pub fixed_point_iterations: Option<usize>,
    pub iteration_history: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub final_state: SpectralField,
    pub achieved_error: f64,
    pub projection_error: Option<f64>,
}

impl ReachPlan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plans serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, ControlError> {
        serde_json::from_str(s).map_err(|e| ControlError::Format(e.to_string()))
    }

    /// Re-solves the stored schedule on a fresh solver.
    pub fn replay(&self) -> Result<ReplayOutcome, ControlError> {
        let actual = self.params.params_hash();
        if actual != self.params_hash {
            return Err(ControlError::HashMismatch { recorded: self.params_hash.clone(), actual });
        }
        let solver = Solver::new(self.params.clone())?;
        self.schedule.validate(solver.n_controls())?;
        let end = self.schedule.flow(&solver, &self.u0)?;
        let projection_error = match &self.projection_modes {
            Some(m) => Some(projected_distance(&solver, &end, &self.v, &indices(&solver, m)?)),
            None => None,
        };
        Ok(ReplayOutcome { achieved_error: end.dist(&self.v), final_state: end, projection_error })
    }
}

/// Saturation chain seeded by the control directions; linear models get the seed alone.
pub fn control_chain(params: &ModelParams, depth: usize) -> Result<SubspaceChain, ControlError> {
    let seed = SpanSet::from_modes(params.control_basis.iter().copied());
    match params.nonlinearity() {
        Some(nl) => Ok(iterate_span(&seed, &nl, depth, params.cutoff)?),
        None => Ok(SubspaceChain {
            model: params.model,
            cutoff: params.cutoff,
            levels: vec![seed],
            stabilized: true,
            discarded: BTreeSet::new(),
        }),
    }
}

fn indices(solver: &Solver, modes: &[TrigMode]) -> Result<Vec<usize>, ControlError> {
    modes
        .iter()
        .map(|m| solver.modes().binary_search(m).map_err(|_| ControlError::Solver(SolverError::UnknownMode(*m))))
        .collect()
}

fn projected_distance(solver: &Solver, a: &SpectralField, b: &SpectralField, idx: &[usize]) -> f64 {
    let w = mode_weight(solver.params().model);
    (w * idx.iter().map(|&i| (a.coeffs[i] - b.coeffs[i]).powi(2)).sum::<f64>()).sqrt()
}

/// Non-negative least squares (Lawson-Hanson).
fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.norm().max(1.0) * b.norm().max(1.0);
    let solve = |passive: &[bool]| -> DVector<f64> {
        let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let sub = DMatrix::from_fn(a.nrows(), cols.len(), |r, c| a[(r, cols[c])]);
        let zs = sub.svd(true, true).solve(b, 1e-14).expect("svd with vectors");
        let mut z = DVector::zeros(n);
        for (c, &j) in cols.iter().enumerate() {
            z[j] = zs[c];
        }
        z
    };
    for _ in 0..3 * n + 10 {
        let w = a.transpose() * (b - a * &x);
        let Some(j) = (0..n).filter(|&j| !passive[j] && w[j] > tol).max_by(|&p, &q| w[p].total_cmp(&w[q])) else {
            break;
        };
        passive[j] = true;
        loop {
            let z = solve(&passive);
            if (0..n).filter(|&i| passive[i]).all(|i| z[i] > 0.0) {
                x = z;
                break;
            }
            let mut alpha = f64::INFINITY;
            for i in (0..n).filter(|&i| passive[i] && z[i] <= 0.0) {
                alpha = alpha.min(x[i] / (x[i] - z[i]));
            }
            x += (z - &x) * alpha;
            for i in 0..n {
                if passive[i] && x[i] <= 1e-15 {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
        }
    }
    x
}

/// Level-0 and level-1 directions available to the synthesizer.
struct Dictionary {
    degree: usize,
    k: usize,
    sigma: DMatrix<f64>,
    /// Bracket generators `g` (amplitude vectors with entries in {-1, 0, 1}).
    generators: Vec<Vec<f64>>,
    /// `D(g)` with the control-span component removed.
    reduced: DMatrix<f64>,
    /// Full `D(g)`.
    full: DMatrix<f64>,
}

struct Decomposition {
    rays: Vec<f64>,
    brackets: Vec<f64>,
    residual: f64,
}

fn generators(k: usize, support: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<f64>, usize)> = vec![(0, vec![0.0; k], 0)];
    while let Some((next, g, used)) = stack.pop() {
        if used > 0 {
            out.push(g.clone());
        }
        if used == support {
            continue;
        }
        for i in next..k {
            for s in [1.0, -1.0] {
                if used == 0 && s < 0.0 {
                    continue;
                }
                let mut h = g.clone();
                h[i] = s;
                stack.push((i + 1, h, used + 1));
            }
        }
    }
    out.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    out
}

impl Dictionary {
    fn new(solver: &Solver) -> Result<Self, ControlError> {
        let n = solver.dim();
        let k = solver.n_controls();
        let m = degree(solver);
        let sig_cols: Vec<SpectralField> = (0..k).map(|i| solver.sigma(i)).collect();
        let sigma = DMatrix::from_fn(n, k, |r, c| sig_cols[c].coeffs[r]);
        let gens = if m > 1 && k > 0 { generators(k, m.min(k).min(if k > 8 { 2 } else { 3 })) } else { Vec::new() };
        let zero = solver.zero();
        let mut full = DMatrix::zeros(n, gens.len());
        for (c, g) in gens.iter().enumerate() {
            let d = bracket_limit(solver, &zero, g, 1.0)?;
            for r in 0..n {
                full[(r, c)] = d.coeffs[r];
            }
        }
        let reduced = if k > 0 { &full - &sigma * Self::ls(&sigma, &full) } else { full.clone() };
        Ok(Self { degree: m, k, sigma, generators: gens, reduced, full })
    }

    fn ls(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        a.clone().svd(true, true).solve(b, 1e-12).expect("svd with vectors")
    }

    fn decompose(&self, d: &SpectralField) -> Decomposition {
        let b = DMatrix::from_column_slice(d.coeffs.len(), 1, &d.coeffs);
        let mut rays = if self.k > 0 { Self::ls(&self.sigma, &b) } else { DMatrix::zeros(0, 1) };
        let r = if self.k > 0 { &b - &self.sigma * &rays } else { b.clone() };
        let c = if self.generators.is_empty() {
            DMatrix::zeros(0, 1)
        } else if self.degree % 2 == 1 {
            let rn = r.norm();
            Self::ls(&self.reduced, &r).map(|x| if rn == 0.0 { 0.0 } else { x })
        } else {
            let rv = DVector::from_column_slice(r.as_slice());
            let x = nnls(&self.reduced, &rv);
            DMatrix::from_column_slice(x.len(), 1, x.as_slice())
        };
        let residual_vec = &r - &self.reduced * &c;
        if self.k > 0 && !self.generators.is_empty() {
            rays -= Self::ls(&self.sigma, &(&self.full * &c));
        }
        let w = mode_weight(d.model);
        Decomposition {
            rays: rays.iter().copied().collect(),
            brackets: c.iter().copied().collect(),
            residual: w.sqrt() * residual_vec.norm(),
        }
    }

    fn n_bursts(&self) -> usize {
        1 + self.generators.len()
    }

    /// Ray burst then one bracket burst per generator, each with nominal time `tau`.
    fn schedule(&self, dec: &Decomposition, tau: f64, lambda: f64) -> Result<ControlSchedule, ControlError> {
        let h: Vec<f64> = dec.rays.iter().map(|a| a / tau).collect();
        let mut s = if self.k > 0 { ray_burst(&h, tau, lambda)? } else { ControlSchedule::empty() };
        let m = self.degree;
        for (g, c) in self.generators.iter().zip(&dec.brackets) {
            let q = c / tau;
            let scale = q.signum() * q.abs().powf(1.0 / m as f64);
            let gs: Vec<f64> = g.iter().map(|x| scale * x).collect();
            s.extend(&bracket_burst(m, &gs, tau, lambda, inner_scale(lambda, m))?)?;
        }
        Ok(s)
    }
}

/// Checks that `d` lies within `allowed` of the chain, and within level 1.
fn check_chain(chain: &SubspaceChain, d: &SpectralField, allowed: f64) -> Result<(), ControlError> {
    let w = mode_weight(d.model).sqrt();
    let dv = d.to_coeffs();
    let dist = |s: &SpanSet| w * s.residual(&dv).norm2();
    let top = dist(chain.top());
    if top > allowed {
        return Err(ControlError::OutsideSpan { residual: top, allowed });
    }
    if chain.levels.len() > 2 && dist(chain.level(1)) > allowed {
        let level = (2..chain.levels.len()).find(|&l| dist(chain.level(l)) <= allowed).unwrap_or(chain.levels.len() - 1);
        return Err(ControlError::RecursionDepth { level });
    }
    Ok(())
}

struct Synth {
    solver: Solver,
    dict: Dictionary,
    opts: ReachOptions,
}

impl Synth {
    fn new(params: &ModelParams, opts: &ReachOptions) -> Result<Self, ControlError> {
        let solver = Solver::new(burst_params(params))?;
        let dict = Dictionary::new(&solver)?;
        Ok(Self { solver, dict, opts: opts.clone() })
    }

    fn burst_block(&self, from: &SpectralField, to: &SpectralField, nominal: f64, lambda: f64) -> Result<ControlSchedule, ControlError> {
        let d = to.sub(from);
        let dec = self.dict.decompose(&d);
        self.dict.schedule(&dec, self.opts.delta * nominal / self.dict.n_bursts() as f64, lambda)
    }

    /// Doubles lambda until the bursts land within `eps`; returns the schedule, lambda and error.
    fn search(
        &self,
        from: &SpectralField,
        to: &SpectralField,
        nominal: f64,
        eps: f64,
    ) -> Result<(ControlSchedule, f64, f64, SpectralField), ControlError> {
        let mut lambda = self.opts.lambda_start;
        let mut best = (f64::INFINITY, lambda);
        while lambda <= self.opts.lambda_cap {
            let s = self.burst_block(from, to, nominal, lambda)?;
            match s.flow(&self.solver, from) {
                Ok(end) => {
                    let err = end.dist(to);
                    if err < eps {
                        return Ok((s, lambda, err, end));
                    }
                    if err < best.0 {
                        best = (err, lambda);
                    }
                }
                Err(SolverError::Exploded { .. } | SolverError::NonFinite { .. }) => {}
                Err(e) => return Err(e.into()),
            }
            lambda *= 2.0;
        }
        Err(ControlError::LambdaCap { cap: self.opts.lambda_cap, best_error: best.0, best_lambda: best.1 })
    }

    fn plan(&self, u0: &SpectralField, v: &SpectralField, t: f64, eps: f64, schedule: ControlSchedule, lambda: f64, err: f64) -> ReachPlan {
        ReachPlan {
            params: self.solver.params().clone(),
            params_hash: self.solver.params_hash().to_string(),
            u0: u0.clone(),
            v: v.clone(),
            t,
            eps,
            schedule,
            achieved_error: err,
            lambda,
            pinball: None,
            projection_modes: None,
            projection_error: None,
            fixed_point_iterations: None,
            iteration_history: Vec::new(),
        }
    }

    /// Pads `relaxed` (from `u0`, aimed at `target`) to total time `t`: dwell `sigma`, retarget,
    /// repeat, and a final dwell shorter than `sigma`. With `lambdas` given the retargets reuse them.
    fn pad(
        &self,
        u0: &SpectralField,
        target: &SpectralField,
        relaxed: &ControlSchedule,
        t: f64,
        sigma: f64,
        eps: f64,
        lambdas: Option<&[f64]>,
    ) -> Result<(ControlSchedule, Vec<f64>, SpectralField), ControlError> {
        let k = self.solver.n_controls();
        let mut sched = relaxed.clone();
        let mut x = relaxed.flow(&self.solver, u0)?;
        let mut used = Vec::new();
        loop {
            let rem = t - sched.duration_sum();
            let out_of_retargets = lambdas.is_some_and(|l| used.len() == l.len());
            if rem <= sigma || out_of_retargets {
                if rem > 1e-14 * t.max(1.0) {
                    sched.push_dwell(rem, k)?;
                    x = self.solver.flow_constant(&x, &vec![0.0; k], rem)?;
                }
                return Ok((sched, used, x));
            }
            sched.push_dwell(sigma, k)?;
            x = self.solver.flow_constant(&x, &vec![0.0; k], sigma)?;
            let (block, lambda) = match lambdas {
                Some(l) => (self.burst_block(&x, target, sigma, l[used.len()])?, l[used.len()]),
                None => {
                    let (b, l, _, _) = self.search(&x, target, sigma, eps / 4.0)?;
                    (b, l)
                }
            };
            if sched.duration_sum() + block.duration_sum() >= t {
                return Err(ControlError::NoTimeLeft { remaining: t - sched.duration_sum() });
            }
            x = block.flow(&self.solver, &x)?;
            sched.extend(&block)?;
            used.push(lambda);
        }
    }

    /// First time the free flow from `v` leaves `B(v, eps/2)`, capped at `horizon`.
    fn calibrate(&self, v: &SpectralField, horizon: f64, eps: f64) -> Result<f64, ControlError> {
        let k = self.solver.n_controls();
        let tr = self.solver.trajectory_segments(v, &[(horizon, vec![0.0; k])])?;
        let mut sigma = horizon;
        for (i, s) in tr.states.iter().enumerate() {
            if s.dist(v) > eps / 2.0 {
                sigma = tr.times[i.saturating_sub(1)];
                break;
            }
        }
        let dt = self.solver.params().solver.dt;
        if sigma <= dt && sigma < horizon {
            return Err(ControlError::DwellTooShort { sigma, dt });
        }
        Ok(sigma)
    }
}

fn check_inputs(params: &ModelParams, u0: &SpectralField, v: &SpectralField, t: f64, eps: f64) -> Result<(), ControlError> {
    if u0.model != params.model || u0.cutoff != params.cutoff || !u0.same_space(v) {
        return Err(ControlError::Solver(SolverError::Space));
    }
    if !(t > 0.0 && t.is_finite()) || !(eps > 0.0) {
        return Err(ControlError::InvalidArgument(format!("need t > 0 and eps > 0, got t = {t}, eps = {eps}")));
    }
    Ok(())
}

/// Relaxed-time plan from `u0` into `B(v, eps)` using bursts of total nominal time `delta t`.
pub fn synthesize_reach(
    params: &ModelParams,
    u0: &SpectralField,
    v: &SpectralField,
    t: f64,
    eps: f64,
    chain: &SubspaceChain,
    opts: &ReachOptions,
) -> Result<ReachPlan, ControlError> {
    check_inputs(params, u0, v, t, eps)?;
    let syn = Synth::new(params, opts)?;
    let d = v.sub(u0);
    if d.coeffs.iter().all(|c| *c == 0.0) {
        return Ok(syn.plan(u0, v, t, eps, ControlSchedule::empty(), 0.0, 0.0));
    }
    check_chain(chain, &d, eps / 2.0)?;
    let dec = syn.dict.decompose(&d);
    if dec.residual > eps / 2.0 {
        return Err(ControlError::OutsideSpan { residual: dec.residual, allowed: eps / 2.0 });
    }
    let (s, lambda, err, _) = syn.search(u0, v, t, eps)?;
    Ok(syn.plan(u0, v, t, eps, s, lambda, err))
}

/// Pads a relaxed plan to total time exactly `t`, ending in `B(v, eps)`.
pub fn pinball_exact_time(
    relaxed: &ReachPlan,
    t: f64,
    eps: f64,
    opts: &ReachOptions,
) -> Result<ReachPlan, ControlError> {
    let s = relaxed.schedule.duration_sum();
    if (s - t).abs() <= 1e-12 * t.max(1.0) {
        return Ok(relaxed.clone());
    }
    if s > t {
        return Err(ControlError::InvalidArgument(format!("relaxed plan takes {s} > t = {t}")));
    }
    let syn = Synth::new(&relaxed.params, opts)?;
    let sigma = syn.calibrate(&relaxed.v, t - s, eps)?;
    let (sched, lambdas, _) = syn.pad(&relaxed.u0, &relaxed.v, &relaxed.schedule, t, sigma, eps, None)?;
    let end = sched.flow(&syn.solver, &relaxed.u0)?;
    let error = end.dist(&relaxed.v);
    if error >= eps {
        return Err(ControlError::PinballMissed { error, eps });
    }
    let mut plan = syn.plan(&relaxed.u0, &relaxed.v, t, eps, sched, relaxed.lambda, error);
    plan.pinball = Some(PinballInfo { relaxed_time: s, relaxed_lambda: relaxed.lambda, sigma, retarget_lambdas: lambdas });
    Ok(plan)
}

/// Exact-time plan with `pi(Phi u0) = pi(v)` to `proj_tol` and global error below `eps`.
///
/// Iterates `w <- w + theta (pi(v) - pi(Phi[plan for v + w] u0))` with the plan structure
/// (lambdas, dwell lengths) frozen after the first synthesis, halving `theta` whenever the
/// residual grows.
#[allow(clippy::too_many_arguments)]
pub fn exact_projection_control(
    params: &ModelParams,
    u0: &SpectralField,
    v: &SpectralField,
    t: f64,
    eps: f64,
    modes: &[TrigMode],
    chain: &SubspaceChain,
    opts: &ReachOptions,
) -> Result<ReachPlan, ControlError> {
    let relaxed = synthesize_reach(params, u0, v, t, eps / 4.0, chain, opts)?;
    let padded = pinball_exact_time(&relaxed, t, eps, opts)?;
    let syn = Synth::new(params, opts)?;
    let idx = indices(&syn.solver, modes)?;
    let info = padded.pinball.clone();
    let build = |w: &[f64]| -> Result<(ControlSchedule, SpectralField), ControlError> {
        let mut target = v.clone();
        for (&i, x) in idx.iter().zip(w) {
            target.coeffs[i] += x;
        }
        let Some(info) = &info else {
            let s = if relaxed.schedule.is_empty() {
                ControlSchedule::empty()
            } else {
                syn.burst_block(u0, &target, t, relaxed.lambda)?
            };
            let end = s.flow(&syn.solver, u0)?;
            return Ok((s, end));
        };
        let rel = syn.burst_block(u0, &target, t, info.relaxed_lambda)?;
        let (s, _, end) = syn.pad(u0, &target, &rel, t, info.sigma, eps, Some(&info.retarget_lambdas))?;
        Ok((s, end))
    };
    let w_norm = mode_weight(params.model).sqrt();
    let residual = |end: &SpectralField| -> Vec<f64> { idx.iter().map(|&i| v.coeffs[i] - end.coeffs[i]).collect() };
    let norm = |r: &[f64]| w_norm * r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut w = vec![0.0; idx.len()];
    let (mut sched, mut end) = build(&w)?;
    let mut r = residual(&end);
    let mut history = vec![norm(&r)];
    let mut theta = opts.theta;
    let mut iterations = 0;
    while norm(&r) >= opts.proj_tol {
        if iterations >= opts.max_iters || theta < 1e-6 {
            return Err(ControlError::NoConvergence { history });
        }
        let trial: Vec<f64> = w.iter().zip(&r).map(|(a, b)| a + theta * b).collect();
        let (s, e) = build(&trial)?;
        let rt = residual(&e);
        if norm(&rt) > norm(&r) {
            theta *= 0.5;
            continue;
        }
        iterations += 1;
        w = trial;
        sched = s;
        end = e;
        r = rt;
        history.push(norm(&r));
    }
    let error = end.dist(v);
    if error >= eps {
        return Err(ControlError::GlobalMiss { error, eps });
    }
    let mut plan = syn.plan(u0, v, t, eps, sched, padded.lambda, error);
    plan.pinball = info;
    plan.projection_modes = Some(modes.to_vec());
    plan.projection_error = Some(norm(&r));
    plan.fixed_point_iterations = Some(iterations);
    plan.iteration_history = history;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_cover_signed_supports() {
        let g = generators(2, 2);
        assert_eq!(g, vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![1.0, -1.0], vec![0.0, 1.0]]);
        assert_eq!(generators(4, 3).len(), 4 + 6 * 2 + 4 * 4);
    }

    #[test]
    fn nnls_matches_unconstrained_when_feasible() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_column_slice(&[1.0, 2.0, 3.0]);
        let x = nnls(&a, &b);
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
        let x = nnls(&a, &DVector::from_column_slice(&[-1.0, 2.0, 1.0]));
        assert_eq!(x[0], 0.0);
        assert!((x[1] - 1.5).abs() < 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn nnls_satisfies_kkt(vals in proptest::collection::vec(-2.0f64..2.0, 12), rhs in proptest::collection::vec(-2.0f64..2.0, 4)) {
            let a = DMatrix::from_row_slice(4, 3, &vals);
            let b = DVector::from_column_slice(&rhs);
            let x = nnls(&a, &b);
            let g = a.transpose() * (&b - &a * &x);
            for j in 0..3 {
                proptest::prop_assert!(x[j] >= 0.0);
                proptest::prop_assert!(g[j] <= 1e-9);
                if x[j] > 0.0 {
                    proptest::prop_assert!(g[j].abs() <= 1e-9);
                }
            }
        }
    }
}
