//! Reaction term `P_N f(u)` on `[0, pi]` with Dirichlet sine modes, projected exactly.
//!
//! `u` is expanded in exponentials, powers are exact convolutions, and the even
//! part of `f(u)` (a cosine series) is projected on `sin(mx)` with the closed-form
//! integrals `int_0^pi cos(jx) sin(mx) dx = m (1 - (-1)^{m+j}) / (m^2 - j^2)`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::Engine;

pub struct RdEngine {
    n: usize,
    coeffs: Vec<f64>,
    /// `(2/pi) int cos(jx) sin(mx)` for `m = 1..=n`, `j = 0..=deg n`.
    cos_weights: Vec<Vec<f64>>,
}

/// Exponential coefficients on `[-h, h]`, stored with offset `h`.
#[derive(Clone)]
struct Exp(Vec<Complex64>);

impl Exp {
    fn half(&self) -> usize {
        self.0.len() / 2
    }

    fn mul(&self, o: &Exp) -> Exp {
        let mut out = vec![Complex64::default(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if *a == Complex64::default() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Exp(out)
    }

    fn add_scaled(&mut self, s: f64, o: &Exp) {
        if o.0.len() > self.0.len() {
            let pad = o.half() - self.half();
            let mut v = vec![Complex64::default(); o.0.len()];
            v[pad..pad + self.0.len()].copy_from_slice(&self.0);
            self.0 = v;
        }
        let off = self.half() - o.half();
        for (i, b) in o.0.iter().enumerate() {
            self.0[off + i] += b * s;
        }
    }
}

impl RdEngine {
    pub fn new(n: usize, coeffs: &[f64]) -> Self {
        let deg = coeffs.len().saturating_sub(1).max(1);
        let jmax = deg * n;
        let cos_weights = (1..=n)
            .map(|m| {
                (0..=jmax)
                    .map(|j| {
                        if j == m || (m + j) % 2 == 0 {
                            0.0
                        } else {
                            let (m, j) = (m as f64, j as f64);
                            2.0 / PI * 2.0 * m / (m * m - j * j)
                        }
                    })
                    .collect()
            })
            .collect();
        Self { n, coeffs: coeffs.to_vec(), cos_weights }
    }

    fn expand(&self, u: &[f64]) -> Exp {
        let n = self.n;
        let mut v = vec![Complex64::default(); 2 * n + 1];
        for (i, &c) in u.iter().enumerate() {
            let k = i + 1;
            v[n + k] += Complex64::new(0.0, -0.5 * c);
            v[n - k] += Complex64::new(0.0, 0.5 * c);
        }
        Exp(v)
    }

    /// `sum_p w_p u^p` as exponentials.
    fn poly(&self, u: &Exp, w: &[f64]) -> Exp {
        let mut acc = Exp(vec![Complex64::new(w.first().copied().unwrap_or(0.0), 0.0)]);
        let mut pow = Exp(vec![Complex64::new(1.0, 0.0)]);
        for &b in w.iter().skip(1) {
            pow = pow.mul(u);
            if b != 0.0 {
                acc.add_scaled(b, &pow);
            }
        }
        acc
    }

    /// Coefficients of `sin(mx)`, `m = 1..=n`, in the `L2(0, pi)` projection of a real `g`.
    fn project(&self, g: &Exp) -> Vec<f64> {
        let h = g.half();
        (1..=self.n)
            .map(|m| {
                let sin_m = if m <= h { -2.0 * g.0[h + m].im } else { 0.0 };
                let w = &self.cos_weights[m - 1];
                let mut s = sin_m;
                for j in 0..=h.min(w.len() - 1) {
                    let a = if j == 0 { g.0[h].re } else { 2.0 * g.0[h + j].re };
                    s += a * w[j];
                }
                s
            })
            .collect()
    }

    fn derivative_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().enumerate().skip(1).map(|(p, b)| p as f64 * b).collect()
    }
}

impl Engine for RdEngine {
    fn reaction(&self, u: &[f64]) -> Vec<f64> {
        let e = self.expand(u);
        self.project(&self.poly(&e, &self.coeffs))
    }

    fn reaction_jvp(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let fp = self.poly(&self.expand(u), &self.derivative_coeffs());
        self.project(&fp.mul(&self.expand(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_reaction_is_diagonal() {
        let e = RdEngine::new(4, &[0.0, 2.0]);
        assert_eq!(e.reaction(&[1.0, 0.0, -3.0, 0.0]), vec![2.0, 0.0, -6.0, 0.0]);
    }

    #[test]
    fn constant_source_projects_on_odd_modes() {
        // 1 = (4/pi) sum_{m odd} sin(mx)/m
        let e = RdEngine::new(5, &[1.0]);
        let r = e.reaction(&[0.0; 5]);
        for (i, x) in r.iter().enumerate() {
            let m = (i + 1) as f64;
            let expect = if (i + 1) % 2 == 1 { 4.0 / (PI * m) } else { 0.0 };
            assert!((x - expect).abs() < 1e-14, "m={m}");
        }
    }

    #[test]
    fn cube_of_a_single_sine() {
        // sin^3 x = (3 sin x - sin 3x)/4
        let e = RdEngine::new(3, &[0.0, 0.0, 0.0, 1.0]);
        let r = e.reaction(&[1.0, 0.0, 0.0]);
        assert!((r[0] - 0.75).abs() < 1e-15 && r[1].abs() < 1e-15 && (r[2] + 0.25).abs() < 1e-15);
    }
}
