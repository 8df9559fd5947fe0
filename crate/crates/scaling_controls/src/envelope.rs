//! Comparison envelope for `x' <= (c0/lambda)(x^p + kappa0)`:
//! `x(t) <= x0 R + kappa0 (R - 1)` with `R = R_lambda(t, x0 + kappa0)` up to `T_star(x0 + kappa0)`.

use serde::{Deserialize, Serialize};

use crate::ControlError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEnvelope {
    pub c0: f64,
    pub kappa0: f64,
    pub p: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub x0: f64,
    pub t_end: f64,
    /// `max x(t) / bound(t)` over the integration nodes (0 when both vanish).
    pub max_ratio: f64,
    pub below: bool,
}

impl ComparisonEnvelope {
    pub fn new(c0: f64, kappa0: f64, p: f64, lambda: f64) -> Result<Self, ControlError> {
        let mut errs = Vec::new();
        if !(c0 > 0.0) {
            errs.push(format!("c0 must be positive, got {c0}"));
        }
        if !(kappa0 >= 0.0) {
            errs.push(format!("kappa0 must be non-negative, got {kappa0}"));
        }
        if !(p > 1.0) {
            errs.push(format!("p must exceed 1, got {p}"));
        }
        if !(lambda > 0.0) {
            errs.push(format!("lambda must be positive, got {lambda}"));
        }
        if !errs.is_empty() {
            return Err(ControlError::InvalidArgument(errs.join("; ")));
        }
        Ok(Self { c0, kappa0, p, lambda })
    }

    /// `lambda / (2 c0 (p-1) gamma^{p-1})`.
    pub fn t_star(&self, gamma: f64) -> f64 {
        self.lambda / (2.0 * self.c0 * (self.p - 1.0) * gamma.powf(self.p - 1.0))
    }

    /// `(1 - 2 c0 (p-1) gamma^{p-1} t / lambda)^{-1/(p-1)}`, infinite from `T_star` on.
    pub fn r(&self, t: f64, gamma: f64) -> f64 {
        let base = 1.0 - 2.0 * self.c0 * (self.p - 1.0) * gamma.powf(self.p - 1.0) * t / self.lambda;
        if base <= 0.0 {
            f64::INFINITY
        } else {
            base.powf(-1.0 / (self.p - 1.0))
        }
    }

    pub fn bound(&self, t: f64, x0: f64) -> f64 {
        let r = self.r(t, x0 + self.kappa0);
        x0 * r + self.kappa0 * (r - 1.0)
    }

    /// RK4 for the extremal equation `x' = (c0/lambda)(x^p + kappa0)` on `[0, t_end]`.
    pub fn integrate(&self, x0: f64, t_end: f64, steps: usize) -> Vec<(f64, f64)> {
        let f = |x: f64| self.c0 / self.lambda * (x.max(0.0).powf(self.p) + self.kappa0);
        let h = t_end / steps as f64;
        let mut out = Vec::with_capacity(steps + 1);
        let mut x = x0;
        out.push((0.0, x));
        for i in 0..steps {
            let k1 = f(x);
            let k2 = f(x + 0.5 * h * k1);
            let k3 = f(x + 0.5 * h * k2);
            let k4 = f(x + h * k3);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            out.push(((i + 1) as f64 * h, x));
        }
        out
    }

    /// Integrates up to `frac * T_star(x0 + kappa0)` and compares with the bound.
    pub fn check(&self, x0: f64, frac: f64, steps: usize) -> EnvelopeCheck {
        let gamma = x0 + self.kappa0;
        let t_end = if gamma > 0.0 { frac * self.t_star(gamma) } else { 1.0 };
        let mut max_ratio = 0.0f64;
        let mut below = true;
        for (t, x) in self.integrate(x0, t_end, steps) {
            let b = self.bound(t, x0);
            if x > b * (1.0 + 1e-12) + 1e-300 {
                below = false;
            }
            if b > 0.0 {
                max_ratio = max_ratio.max(x / b);
            }
        }
        EnvelopeCheck { x0, t_end, max_ratio, below }
    }
}
