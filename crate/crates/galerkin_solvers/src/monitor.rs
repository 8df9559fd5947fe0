//! A priori energy envelopes evaluated along recorded trajectories.
//!
//! Each envelope integrates a Grönwall inequality step by step, with the source
//! `G = f + sum alpha_k sigma_k` frozen on each step:
//!
//! * reaction-diffusion: `y = ||u||^2`, `y' <= a y + C` with `a = 1 - 2 kappa`,
//!   `C = 2 pi K0 + ||G||^2` and `K0 = sup_s s f(s)` (Poincaré constant 1 on `[0, pi]`);
//!   the `+1` in `a` and `||G||^2` in `C` come from Young's inequality and are dropped when `G = 0`;
//! * NSE: `||xi||' <= -nu ||xi|| + ||G||` (transport is skew, `|k| >= 1`);
//! * Boussinesq: the same for `theta` with `kappa`, then for `xi` with the extra source
//!   `g N sup ||theta||` (Bernstein: `||d_x theta|| <= N ||theta||` on the box);
//! * Euler: `||u||' <= ||G||`.

use mode_algebra::{Field, ModelKind};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{field::mode_weight, Solver, Trajectory};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub model: ModelKind,
    /// `max_t ||u(t)|| / envelope(t)`, with `0/0 = 0`.
    pub max_ratio: f64,
    pub worst_time: f64,
    /// `(t, ||u(t)||, envelope(t))`; Boussinesq reports the worse of the two components.
    pub samples: Vec<(f64, f64, f64)>,
    /// Ratio at most `1 + 10 tol`.
    pub within_envelope: bool,
}

/// `y(t)` for `y' = a y + c`, `y(0) = y0`.
fn linear_growth(y0: f64, a: f64, c: f64, t: f64) -> f64 {
    if a == 0.0 {
        y0 + c * t
    } else {
        y0 * (a * t).exp() + c * (a * t).exp_m1() / a
    }
}

/// `sup_s s f(s)` for `f(s) = sum b_p s^p` with a negative leading odd-degree term.
pub fn reaction_sup(b: &[f64]) -> f64 {
    let g = |s: f64| s * b.iter().rev().fold(0.0, |acc, c| acc * s + c);
    let lead = b.last().copied().unwrap_or(0.0);
    if b.len() < 3 || lead >= 0.0 {
        return f64::INFINITY;
    }
    // all critical points lie inside the Cauchy bound of s f(s)
    let r = 1.0 + b.iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let n = 20_000;
    let mut best = (0.0, g(0.0));
    for i in 0..=n {
        let s = -r + 2.0 * r * i as f64 / n as f64;
        let v = g(s);
        if v > best.1 {
            best = (s, v);
        }
    }
    // golden-section refinement around the best sample
    let h = 2.0 * r / n as f64;
    let (mut lo, mut hi) = (best.0 - h, best.0 + h);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if g(x1) > g(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let top = g(0.5 * (lo + hi)).max(best.1);
    top + 1e-12 * top.abs().max(1.0)
}

impl Solver {
    fn source_norm(&self, alpha: &[f64], field: Option<Field>) -> f64 {
        let c = self.source(alpha);
        let w = mode_weight(self.params.model);
        let s: f64 = self
            .modes
            .iter()
            .zip(&c)
            .filter(|(m, _)| field.is_none_or(|f| m.field == f))
            .map(|(_, x)| x * x)
            .sum();
        (w * s).sqrt()
    }

    pub fn energy_monitor(&self, tr: &Trajectory) -> EnvelopeReport {
        let p = &self.params;
        let mut samples = Vec::with_capacity(tr.times.len());
        let push = |samples: &mut Vec<(f64, f64, f64)>, t: f64, n: f64, e: f64| samples.push((t, n, e));
        match p.model {
            ModelKind::Rd => {
                let linear = p.rd_coeffs.len() <= 2;
                let b0 = p.rd_coeffs.first().copied().unwrap_or(0.0);
                let b1 = p.rd_coeffs.get(1).copied().unwrap_or(0.0);
                let k0 = if linear { 0.0 } else { reaction_sup(&p.rd_coeffs) };
                let mut y = tr.states[0].l2_norm().powi(2);
                push(&mut samples, 0.0, y.sqrt(), y.sqrt());
                for i in 0..tr.controls.len() {
                    let h = tr.times[i + 1] - tr.times[i];
                    let g = self.source_norm(&tr.controls[i], None);
                    let young = if g > 0.0 { 1.0 } else { 0.0 };
                    let (a, c) = if linear {
                        // 2<u, b0> <= y + pi b0^2
                        let yb = if b0 != 0.0 { 1.0 } else { 0.0 };
                        (-2.0 * p.kappa + 2.0 * b1 + young + yb, PI * b0 * b0 + g * g)
                    } else {
                        (young - 2.0 * p.kappa, 2.0 * PI * k0 + g * g)
                    };
                    y = linear_growth(y, a, c, h);
                    push(&mut samples, tr.times[i + 1], tr.states[i + 1].l2_norm(), y.sqrt());
                }
            }
            ModelKind::Nse2d | ModelKind::Euler3d => {
                let nu = if p.model == ModelKind::Nse2d { p.nu } else { 0.0 };
                let mut e = tr.states[0].l2_norm();
                push(&mut samples, 0.0, e, e);
                for i in 0..tr.controls.len() {
                    let h = tr.times[i + 1] - tr.times[i];
                    e = linear_growth(e, -nu, self.source_norm(&tr.controls[i], None), h);
                    push(&mut samples, tr.times[i + 1], tr.states[i + 1].l2_norm(), e);
                }
            }
            ModelKind::Boussinesq => {
                let bern = p.gravity * p.cutoff as f64;
                let (mut et, mut ex) =
                    (tr.states[0].component_norm(Field::Temperature), tr.states[0].component_norm(Field::Vorticity));
                let worse = |s: &crate::SpectralField, ex: f64, et: f64| {
                    let (nx, nt) = (s.component_norm(Field::Vorticity), s.component_norm(Field::Temperature));
                    if ratio(nx, ex) >= ratio(nt, et) {
                        (nx, ex)
                    } else {
                        (nt, et)
                    }
                };
                let (n, e) = worse(&tr.states[0], ex, et);
                push(&mut samples, 0.0, n, e);
                for i in 0..tr.controls.len() {
                    let h = tr.times[i + 1] - tr.times[i];
                    let gt = self.source_norm(&tr.controls[i], Some(Field::Temperature));
                    let gx = self.source_norm(&tr.controls[i], Some(Field::Vorticity));
                    let et_next = linear_growth(et, -p.kappa, gt, h);
                    let sup_t = et.max(et_next);
                    ex = linear_growth(ex, -p.nu, gx + bern * sup_t, h);
                    et = et_next;
                    let (n, e) = worse(&tr.states[i + 1], ex, et);
                    push(&mut samples, tr.times[i + 1], n, e);
                }
            }
        }
        let (mut max_ratio, mut worst_time) = (0.0, 0.0);
        for &(t, n, e) in &samples {
            let r = ratio(n, e);
            if r > max_ratio {
                max_ratio = r;
                worst_time = t;
            }
        }
        EnvelopeReport {
            model: p.model,
            max_ratio,
            worst_time,
            samples,
            within_envelope: max_ratio <= 1.0 + 10.0 * p.solver.tol,
        }
    }
}

fn ratio(n: f64, e: f64) -> f64 {
    if n == 0.0 {
        0.0
    } else {
        n / e
    }
}
