//! State-dependent explicit parts of the four vector fields.
//!
//! Every engine returns `R(u)`, the right-hand side without the diagonal linear
//! part and without constant forcing, and its derivative `DR(u) v`.

pub mod euler;
pub mod fluid2d;
pub mod rd;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub trait Engine: Send + Sync {
    fn reaction(&self, u: &[f64]) -> Vec<f64>;
    fn reaction_jvp(&self, u: &[f64], v: &[f64]) -> Vec<f64>;
    /// Upper bound on `||grad u||_inf`; only the Euler engine guards on it.
    fn grad_bound(&self, _u: &[f64]) -> f64 {
        0.0
    }
}

/// Complex `m^d` grid with unnormalized transforms along every axis.
///
/// `inverse` maps coefficients `c_q` to values `sum_q c_q e^{i q.x}` at
/// `x = 2 pi n / m`; `forward` maps values back to `m^d c_q`.
pub(crate) struct FftGrid {
    pub m: usize,
    pub d: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FftGrid {
    pub fn new(m: usize, d: usize) -> Self {
        let mut p = FftPlanner::new();
        Self { m, d, fwd: p.plan_fft_forward(m), inv: p.plan_fft_inverse(m) }
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn index(&self, k: &[i32]) -> usize {
        let m = self.m as i32;
        k.iter().fold(0usize, |acc, &c| acc * self.m + c.rem_euclid(m) as usize)
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        vec![Complex64::default(); self.len()]
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.fwd);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.inv);
    }

    fn run(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        // last axis is contiguous
        fft.process(buf);
        let mut line = vec![Complex64::default(); m];
        for axis in 0..self.d - 1 {
            let stride = m.pow((self.d - 1 - axis) as u32);
            let outer = m.pow(axis as u32);
            for o in 0..outer {
                for inner in 0..stride {
                    let base = o * stride * m + inner;
                    for (i, z) in line.iter_mut().enumerate() {
                        *z = buf[base + i * stride];
                    }
                    fft.process(&mut line);
                    for (i, z) in line.iter().enumerate() {
                        buf[base + i * stride] = *z;
                    }
                }
            }
        }
    }

    /// Values of a real field from its coefficients (consumes the buffer).
    pub fn to_phys(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.inverse(&mut spec);
        spec.into_iter().map(|z| z.re).collect()
    }

    /// Coefficients `c_q` of a real field from its values.
    pub fn to_spec(&self, phys: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = phys.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward(&mut buf);
        let s = 1.0 / self.len() as f64;
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }
}

/// Grid size for which products of two box-`n` fields are alias free on the box.
pub(crate) fn padded_size(n: u32) -> usize {
    3 * n as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip_recovers_coefficients() {
        for d in [1, 2, 3] {
            let g = FftGrid::new(7, d);
            let mut spec = g.zeros();
            let k: Vec<i32> = (0..d as i32).map(|i| i + 1).collect();
            let nk: Vec<i32> = k.iter().map(|c| -c).collect();
            spec[g.index(&k)] = Complex64::new(0.5, -0.25);
            spec[g.index(&nk)] = Complex64::new(0.5, 0.25);
            let phys = g.to_phys(spec.clone());
            let back = g.to_spec(&phys);
            for (a, b) in spec.iter().zip(&back) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn inverse_evaluates_exponentials() {
        let g = FftGrid::new(5, 2);
        let mut spec = g.zeros();
        spec[g.index(&[1, -2])] = Complex64::new(1.0, 0.0);
        let mut buf = spec.clone();
        g.inverse(&mut buf);
        let h = 2.0 * std::f64::consts::PI / 5.0;
        let (i, j) = (3usize, 4usize);
        let expect = Complex64::from_polar(1.0, h * (i as f64 - 2.0 * j as f64));
        assert!((buf[i * 5 + j] - expect).norm() < 1e-13);
    }
}
