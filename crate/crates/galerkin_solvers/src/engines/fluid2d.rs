//! Vorticity transport on the 2D torus (NSE) and the Boussinesq pair `(xi, theta)`.
//!
//! Products are formed on a `3N+1` grid, so the box-truncated result equals the exact
//! truncated convolution up to roundoff.

use mode_algebra::{Field, Parity, TrigMode};
use num_complex::Complex64;

use super::{padded_size, Engine, FftGrid};

struct Slot {
    k: [f64; 2],
    n2: f64,
    pos: usize,
    neg: usize,
    /// `[cos, sin]` indices of the vorticity and temperature coefficients.
    xi: [usize; 2],
    theta: Option<[usize; 2]>,
}

pub struct Fluid2dEngine {
    grid: FftGrid,
    slots: Vec<Slot>,
    dim: usize,
    gravity: f64,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

impl Fluid2dEngine {
    /// `modes` is the sorted lattice basis; `boussinesq` selects the coupled system.
    pub fn new(modes: &[TrigMode], cutoff: u32, boussinesq: bool, gravity: f64) -> Self {
        let grid = FftGrid::new(padded_size(cutoff), 2);
        let find = |k, p, f| {
            modes
                .binary_search(&TrigMode { k, parity: p, field: f, polarization: None })
                .expect("lattice mode present")
        };
        let mut ks: Vec<_> = modes.iter().map(|m| m.k).collect();
        ks.dedup();
        let slots = ks
            .into_iter()
            .map(|k| {
                let c = k.coords();
                Slot {
                    k: [c[0] as f64, c[1] as f64],
                    n2: k.norm2() as f64,
                    pos: grid.index(c),
                    neg: grid.index(k.neg().coords()),
                    xi: [find(k, Parity::Cos, Field::Vorticity), find(k, Parity::Sin, Field::Vorticity)],
                    theta: boussinesq
                        .then(|| [find(k, Parity::Cos, Field::Temperature), find(k, Parity::Sin, Field::Temperature)]),
                }
            })
            .collect();
        Self { grid, slots, dim: modes.len(), gravity }
    }

    /// Physical values of the fields `mult(k) * c_k` for each multiplier, from one component.
    fn fields<const K: usize>(&self, u: &[f64], theta: bool, mult: [&dyn Fn(&Slot) -> Complex64; K]) -> [Vec<f64>; K] {
        mult.map(|f| {
            let mut spec = self.grid.zeros();
            for s in &self.slots {
                let idx = if theta { s.theta.expect("temperature component") } else { s.xi };
                let c = Complex64::new(0.5 * u[idx[0]], -0.5 * u[idx[1]]);
                if c == Complex64::default() {
                    continue;
                }
                let z = f(s) * c;
                spec[s.pos] += z;
                spec[s.neg] += z.conj();
            }
            self.grid.to_phys(spec)
        })
    }

    /// Velocity `K * xi` (Biot-Savart, `u_hat = -i k_perp xi_hat / |k|^2`).
    fn velocity(&self, u: &[f64]) -> [Vec<f64>; 2] {
        self.fields(u, false, [&|s: &Slot| I * (s.k[1] / s.n2), &|s: &Slot| -I * (s.k[0] / s.n2)])
    }

    fn gradient(&self, u: &[f64], theta: bool) -> [Vec<f64>; 2] {
        self.fields(u, theta, [&|s: &Slot| I * s.k[0], &|s: &Slot| I * s.k[1]])
    }

    /// Adds `scale * P_N(phys)` into the given component of `out`.
    fn deposit(&self, out: &mut [f64], phys: &[f64], theta: bool, scale: f64) {
        let spec = self.grid.to_spec(phys);
        for s in &self.slots {
            let idx = if theta { s.theta.expect("temperature component") } else { s.xi };
            let z = spec[s.pos];
            out[idx[0]] += scale * 2.0 * z.re;
            out[idx[1]] -= scale * 2.0 * z.im;
        }
    }

    fn dot(a: &[Vec<f64>; 2], b: &[Vec<f64>; 2]) -> Vec<f64> {
        a[0].iter().zip(&a[1]).zip(b[0].iter().zip(&b[1])).map(|((x0, x1), (y0, y1))| x0 * y0 + x1 * y1).collect()
    }

    fn dot_sum(a: &[Vec<f64>; 2], b: &[Vec<f64>; 2], c: &[Vec<f64>; 2], d: &[Vec<f64>; 2]) -> Vec<f64> {
        let mut r = Self::dot(a, b);
        for (x, y) in r.iter_mut().zip(Self::dot(c, d)) {
            *x += y;
        }
        r
    }

    /// `g d_x theta` added into the vorticity slots.
    fn buoyancy(&self, out: &mut [f64], v: &[f64]) {
        if self.gravity == 0.0 {
            return;
        }
        for s in &self.slots {
            if let Some(t) = s.theta {
                // d_x cos(k.x) = -k1 sin, d_x sin(k.x) = k1 cos
                out[s.xi[0]] += self.gravity * s.k[0] * v[t[1]];
                out[s.xi[1]] -= self.gravity * s.k[0] * v[t[0]];
            }
        }
    }

    fn coupled(&self) -> bool {
        self.slots.first().is_some_and(|s| s.theta.is_some())
    }
}

impl Engine for Fluid2dEngine {
    fn reaction(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        let vel = self.velocity(u);
        self.deposit(&mut out, &Self::dot(&vel, &self.gradient(u, false)), false, -1.0);
        if self.coupled() {
            self.deposit(&mut out, &Self::dot(&vel, &self.gradient(u, true)), true, -1.0);
            self.buoyancy(&mut out, u);
        }
        out
    }

    fn reaction_jvp(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        let (vu, vv) = (self.velocity(u), self.velocity(v));
        let p = Self::dot_sum(&vv, &self.gradient(u, false), &vu, &self.gradient(v, false));
        self.deposit(&mut out, &p, false, -1.0);
        if self.coupled() {
            let p = Self::dot_sum(&vv, &self.gradient(u, true), &vu, &self.gradient(v, true));
            self.deposit(&mut out, &p, true, -1.0);
            self.buoyancy(&mut out, v);
        }
        out
    }
}
