//! Euler transport `P_N P(u.grad u)` in rotational form `P(omega x u)` on a padded grid.
//!
//! Velocity modes are `2 a_l cos(k.x)` / `2 a_l sin(k.x)`; projecting a physical
//! amplitude on `a_0, a_1` is the Leray projection.

use mode_algebra::mode::{cross, FRAME_NORM2};
use mode_algebra::{Parity, PolarizationFrame, TrigMode};
use num_complex::Complex64;
use std::f64::consts::PI;

use super::{padded_size, Engine, FftGrid};

struct Slot {
    k: [f64; 3],
    norm: f64,
    pos: usize,
    neg: usize,
    frame: [[f64; 3]; 2],
    /// `idx[l][parity]`.
    idx: [[usize; 2]; 2],
}

pub struct EulerEngine {
    grid: FftGrid,
    slots: Vec<Slot>,
    dim: usize,
}

type Vec3 = [Vec<f64>; 3];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

impl EulerEngine {
    pub fn new(modes: &[TrigMode], cutoff: u32) -> Self {
        let grid = FftGrid::new(padded_size(cutoff), 3);
        let mut ks: Vec<_> = modes.iter().map(|m| m.k).collect();
        ks.dedup();
        let slots = ks
            .into_iter()
            .map(|k| {
                let idx = [0u8, 1].map(|l| {
                    [Parity::Cos, Parity::Sin].map(|p| {
                        let c = k.padded();
                        modes.binary_search(&TrigMode::velocity(c, l, p)).expect("lattice mode present")
                    })
                });
                Slot {
                    k: k.as_f64(),
                    norm: (k.norm2() as f64).sqrt(),
                    pos: grid.index(k.coords()),
                    neg: grid.index(k.neg().coords()),
                    frame: PolarizationFrame::for_k(k).a,
                    idx,
                }
            })
            .collect();
        Self { grid, slots, dim: modes.len() }
    }

    /// Complex amplitude vector `c_k` with `u = sum c_k e^{ik.x}`.
    fn amplitude(s: &Slot, u: &[f64]) -> [Complex64; 3] {
        let mut c = [Complex64::default(); 3];
        for l in 0..2 {
            let z = Complex64::new(u[s.idx[l][0]], -u[s.idx[l][1]]);
            for (ci, a) in c.iter_mut().zip(s.frame[l]) {
                *ci += z * a;
            }
        }
        c
    }

    /// Physical velocity and vorticity.
    fn fields(&self, u: &[f64]) -> (Vec3, Vec3) {
        let mut vel = [self.grid.zeros(), self.grid.zeros(), self.grid.zeros()];
        let mut vort = [self.grid.zeros(), self.grid.zeros(), self.grid.zeros()];
        for s in &self.slots {
            let c = Self::amplitude(s, u);
            if c.iter().all(|z| *z == Complex64::default()) {
                continue;
            }
            // omega_hat = i k x c
            let w = [
                I * (s.k[1] * c[2] - s.k[2] * c[1]),
                I * (s.k[2] * c[0] - s.k[0] * c[2]),
                I * (s.k[0] * c[1] - s.k[1] * c[0]),
            ];
            for d in 0..3 {
                vel[d][s.pos] += c[d];
                vel[d][s.neg] += c[d].conj();
                vort[d][s.pos] += w[d];
                vort[d][s.neg] += w[d].conj();
            }
        }
        (vel.map(|b| self.grid.to_phys(b)), vort.map(|b| self.grid.to_phys(b)))
    }

    fn cross_into(acc: &mut Vec3, a: &Vec3, b: &Vec3) {
        for i in 0..acc[0].len() {
            let c = cross([a[0][i], a[1][i], a[2][i]], [b[0][i], b[1][i], b[2][i]]);
            for d in 0..3 {
                acc[d][i] += c[d];
            }
        }
    }

    /// `scale * P_N P(phys)` in mode coordinates.
    fn project(&self, phys: &Vec3, scale: f64) -> Vec<f64> {
        let spec = [0, 1, 2].map(|d| self.grid.to_spec(&phys[d]));
        let mut out = vec![0.0; self.dim];
        for s in &self.slots {
            let w = [spec[0][s.pos], spec[1][s.pos], spec[2][s.pos]];
            for l in 0..2 {
                let a = s.frame[l];
                let re: f64 = (0..3).map(|d| w[d].re * a[d]).sum();
                let im: f64 = (0..3).map(|d| w[d].im * a[d]).sum();
                out[s.idx[l][0]] = scale * re / FRAME_NORM2;
                out[s.idx[l][1]] = -scale * im / FRAME_NORM2;
            }
        }
        out
    }

    fn zeros3(&self) -> Vec3 {
        let n = self.grid.len();
        [vec![0.0; n], vec![0.0; n], vec![0.0; n]]
    }
}

impl Engine for EulerEngine {
    fn reaction(&self, u: &[f64]) -> Vec<f64> {
        let (vel, vort) = self.fields(u);
        let mut p = self.zeros3();
        Self::cross_into(&mut p, &vort, &vel);
        self.project(&p, -1.0)
    }

    fn reaction_jvp(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let (vu, wu) = self.fields(u);
        let (vv, wv) = self.fields(v);
        let mut p = self.zeros3();
        Self::cross_into(&mut p, &wu, &vv);
        Self::cross_into(&mut p, &wv, &vu);
        self.project(&p, -1.0)
    }

    /// `sum |k| |A| |2a|` over modes, with `|2a| = 1/sqrt(pi)`.
    fn grad_bound(&self, u: &[f64]) -> f64 {
        let amp = 1.0 / PI.sqrt();
        self.slots.iter().map(|s| s.norm * s.idx.iter().flatten().map(|&i| u[i].abs()).sum::<f64>() * amp).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mode_algebra::{euler_bilinear_vec, lattice_modes, CoeffVec, ModelKind};

    #[test]
    fn matches_closed_form_transport() {
        let modes = lattice_modes(ModelKind::Euler3d, 2);
        let e = EulerEngine::new(&modes, 2);
        let u: Vec<f64> = (0..modes.len()).map(|i| ((i * 13 % 17) as f64 - 8.0) / 9.0).collect();
        let cv: CoeffVec = modes.iter().zip(&u).map(|(m, c)| (*m, *c)).collect();
        let sym = euler_bilinear_vec(&cv, &cv).scaled(0.5);
        let r = e.reaction(&u);
        for (m, x) in modes.iter().zip(&r) {
            assert!((x + sym.get(m)).abs() < 1e-11, "{m}: {x} vs {}", -sym.get(m));
        }
    }
}
