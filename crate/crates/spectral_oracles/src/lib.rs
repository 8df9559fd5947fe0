//! Brute-force reference evaluators for tests.
//!
//! Fields are sampled on physical grids fine enough to be alias-free, products are taken
//! pointwise, and coefficients are recovered by discrete quadrature. Nothing here shares
//! code with the symbolic expansions it is used to check, apart from the polarization
//! frame convention for velocity modes.

use mode_algebra::{CoeffVec, Field, Parity, PolarizationFrame};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Physical coordinates: (wave vector, parity 0=cos/1=sin, component).
///
/// For scalar fields the component is a field code; for velocity it is x/y/z.
pub type Key = (Vec<i32>, u8, u8);
pub type PhysVec = BTreeMap<Key, f64>;

fn field_code(f: Field) -> u8 {
    match f {
        Field::RdScalar => 0,
        Field::Vorticity => 1,
        Field::Temperature => 2,
        Field::Velocity => 3,
    }
}

/// Scalar-mode coefficients keyed physically.
pub fn scalar_to_phys(v: &CoeffVec) -> PhysVec {
    let mut out = PhysVec::new();
    for (m, c) in v.iter() {
        *out.entry((m.k.coords().to_vec(), m.parity.index() as u8, field_code(m.field))).or_default() += c;
    }
    out
}

/// Velocity-mode coefficients turned into physical cos/sin amplitude vectors.
pub fn velocity_to_phys(v: &CoeffVec) -> PhysVec {
    let mut out = PhysVec::new();
    for (m, c) in v.iter() {
        let a = PolarizationFrame::for_k(m.k).a[m.polarization.unwrap() as usize];
        for (i, ai) in a.iter().enumerate() {
            *out.entry((m.k.coords().to_vec(), m.parity.index() as u8, i as u8)).or_default() += 2.0 * c * ai;
        }
    }
    out
}

// ---------------------------------------------------------------- 1D sine products

fn eval_sine(v: &CoeffVec, x: f64) -> f64 {
    v.iter().map(|(m, c)| c * (m.k.coords()[0] as f64 * x).sin()).sum()
}

fn max_freq(vs: &[&CoeffVec]) -> i32 {
    vs.iter().flat_map(|v| v.modes().map(|m| m.k.linf() as i32)).max().unwrap_or(0)
}

/// `lead * h_1 ... h_p` projected on `sin(mx)`, `m = 1..=mmax`, by uniform quadrature of the
/// odd 2 pi-periodic extension.
pub fn rd_product(lead: f64, hs: &[&CoeffVec], mmax: i32) -> PhysVec {
    let deg = hs.len() as i32 * max_freq(hs) + mmax;
    let n = (2 * deg + 8) as usize;
    let xs: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| lead * hs.iter().map(|h| eval_sine(h, x)).product::<f64>()).collect();
    let mut out = PhysVec::new();
    for m in 1..=mmax {
        // (2/pi) int_0^pi g sin = (1/pi) int_0^{2pi} g sin = 2 mean(g sin)
        let c: f64 = 2.0 * xs.iter().zip(&vals).map(|(x, g)| g * (m as f64 * x).sin()).sum::<f64>() / n as f64;
        if c.abs() > 1e-13 {
            out.insert((vec![m], 1, 0), c);
        }
    }
    out
}

/// Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = 0.5 * (b - a) * z + 0.5 * (b + a);
        ws[i] = (b - a) / ((1.0 - z * z) * dp * dp);
    }
    (xs, ws)
}

/// Galerkin projection of `f(u) = sum_p coeffs[p] u^p` on `sin(mx)`, `m = 1..=n`, for
/// `u = sum_k u[k-1] sin(kx)` on `[0, pi]`, by Gauss-Legendre quadrature.
pub fn rd_reaction_projection(u: &[f64], coeffs: &[f64], nodes: usize) -> Vec<f64> {
    let (xs, ws) = gauss_legendre(nodes, 0.0, PI);
    let n = u.len();
    let mut out = vec![0.0; n];
    for (x, w) in xs.iter().zip(&ws) {
        let ux: f64 = u.iter().enumerate().map(|(k, c)| c * ((k + 1) as f64 * x).sin()).sum();
        let fx: f64 = coeffs.iter().enumerate().map(|(p, b)| b * ux.powi(p as i32)).sum();
        for (m, o) in out.iter_mut().enumerate() {
            *o += w * fx * ((m + 1) as f64 * x).sin() * 2.0 / PI;
        }
    }
    out
}

// ---------------------------------------------------------------- 2D transport

struct Grid2 {
    n: usize,
    pts: Vec<(f64, f64)>,
}

impl Grid2 {
    fn new(n: usize) -> Self {
        let h = 2.0 * PI / n as f64;
        let pts = (0..n * n).map(|i| ((i / n) as f64 * h, (i % n) as f64 * h)).collect();
        Self { n, pts }
    }
}

fn trig(p: Parity, t: f64) -> (f64, f64) {
    // value and derivative w.r.t. the phase
    match p {
        Parity::Cos => (t.cos(), -t.sin()),
        Parity::Sin => (t.sin(), t.cos()),
    }
}

/// Value, gradient, Biot-Savart velocity (div-free, curl = value) and the x-derivative of
/// that velocity, for a 2D scalar field.
fn sample2(v: &CoeffVec, x: f64, y: f64) -> (f64, [f64; 2], [f64; 2], [f64; 2]) {
    let (mut val, mut grad, mut vel, mut vel_dx) = (0.0, [0.0; 2], [0.0; 2], [0.0; 2]);
    for (m, c) in v.iter() {
        let k = m.k.coords();
        let (k1, k2) = (k[0] as f64, k[1] as f64);
        let t = k1 * x + k2 * y;
        let (f, df) = trig(m.parity, t);
        val += c * f;
        grad[0] += c * k1 * df;
        grad[1] += c * k2 * df;
        // stream function psi with lap psi = value: psi = -c f / |k|^2; velocity = (-psi_y, psi_x)
        let n2 = k1 * k1 + k2 * k2;
        vel[0] += c * k2 * df / n2;
        vel[1] += -c * k1 * df / n2;
        vel_dx[0] += -c * k2 * k1 * f / n2;
        vel_dx[1] += c * k1 * k1 * f / n2;
    }
    (val, grad, vel, vel_dx)
}

fn project2(vals: &[f64], g: &Grid2, qmax: i32, code: u8) -> PhysVec {
    // separable DFT: first along y for every x row, then along x
    let n = g.n;
    let h = 2.0 * PI / n as f64;
    let nq = (2 * qmax + 1) as usize;
    let ey: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..nq).map(|iq| Complex64::from_polar(1.0, -((iq as i32 - qmax) as f64) * j as f64 * h)).collect())
        .collect();
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); nq]; n];
    for i in 0..n {
        for j in 0..n {
            let f = vals[i * n + j];
            for iq in 0..nq {
                rows[i][iq] += f * ey[j][iq];
            }
        }
    }
    let mut out = PhysVec::new();
    let nn = (n * n) as f64;
    for q1 in 0..=qmax {
        for q2 in -qmax..=qmax {
            if q1 == 0 && q2 <= 0 {
                continue;
            }
            let iq = (q2 + qmax) as usize;
            let hat: Complex64 =
                (0..n).map(|i| rows[i][iq] * Complex64::from_polar(1.0, -(q1 as f64) * i as f64 * h)).sum::<Complex64>() / nn;
            for (p, c) in [(0u8, 2.0 * hat.re), (1u8, -2.0 * hat.im)] {
                if c.abs() > 1e-13 {
                    out.insert((vec![q1, q2], p, code), c);
                }
            }
        }
    }
    out
}

/// `(K * a) . grad b` projected on 2D modes, labelled with field `out`.
pub fn transport_2d(a: &CoeffVec, b: &CoeffVec, out: Field) -> PhysVec {
    let qmax = max_freq(&[a, b]) * 2;
    let g = Grid2::new((3 * qmax + 4) as usize);
    let vals: Vec<f64> = g
        .pts
        .iter()
        .map(|&(x, y)| {
            let (_, _, u, _) = sample2(a, x, y);
            let (_, gb, _, _) = sample2(b, x, y);
            u[0] * gb[0] + u[1] * gb[1]
        })
        .collect();
    project2(&vals, &g, qmax, field_code(out))
}

/// Curl of the Biot-Savart velocity of `a`, projected back (should reproduce `a`).
pub fn curl_of_velocity(a: &CoeffVec) -> PhysVec {
    let qmax = max_freq(&[a]);
    let g = Grid2::new((3 * qmax + 4) as usize);
    let h = 1e-5;
    let vals: Vec<f64> = g
        .pts
        .iter()
        .map(|&(x, y)| {
            let up = sample2(a, x + h, y).2;
            let um = sample2(a, x - h, y).2;
            let vp = sample2(a, x, y + h).2;
            let vm = sample2(a, x, y - h).2;
            (up[1] - um[1]) / (2.0 * h) - (vp[0] - vm[0]) / (2.0 * h)
        })
        .collect();
    project2(&vals, &g, qmax, field_code(Field::Vorticity))
}

fn add(a: &mut PhysVec, s: f64, b: &PhysVec) {
    for (k, v) in b {
        *a.entry(k.clone()).or_default() += s * v;
    }
}

/// Symmetrized vorticity nonlinearity.
pub fn nse_symmetric(a: &CoeffVec, b: &CoeffVec) -> PhysVec {
    let mut r = transport_2d(a, b, Field::Vorticity);
    add(&mut r, 1.0, &transport_2d(b, a, Field::Vorticity));
    r.values_mut().for_each(|x| *x *= 0.5);
    r
}

/// `g [ b(d_x psi, phi) - b(d_x phi, psi) ]` for temperature directions.
pub fn theta_bracket(gravity: f64, phi: &CoeffVec, psi: &CoeffVec) -> PhysVec {
    let qmax = max_freq(&[phi, psi]) * 2;
    let g = Grid2::new((3 * qmax + 4) as usize);
    let vals: Vec<f64> = g
        .pts
        .iter()
        .map(|&(x, y)| {
            let (_, gphi, _, u_dphi) = sample2(phi, x, y);
            let (_, gpsi, _, u_dpsi) = sample2(psi, x, y);
            gravity * ((u_dpsi[0] * gphi[0] + u_dpsi[1] * gphi[1]) - (u_dphi[0] * gpsi[0] + u_dphi[1] * gpsi[1]))
        })
        .collect();
    project2(&vals, &g, qmax, field_code(Field::Temperature))
}

/// `(K*a).grad b + (K*b).grad a` for vorticity directions.
pub fn vorticity_bracket(a: &CoeffVec, b: &CoeffVec) -> PhysVec {
    let mut r = transport_2d(a, b, Field::Vorticity);
    add(&mut r, 1.0, &transport_2d(b, a, Field::Vorticity));
    r
}

// ---------------------------------------------------------------- 3D Euler

/// Value and Jacobian (`jac[i][j] = d_j f_i`) of a velocity combination at `x`.
fn sample3(v: &CoeffVec, x: [f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let (mut val, mut jac) = ([0.0; 3], [[0.0; 3]; 3]);
    for (m, c) in v.iter() {
        let a = PolarizationFrame::for_k(m.k).a[m.polarization.unwrap() as usize];
        let k = m.k.as_f64();
        let t = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
        let (f, df) = trig(m.parity, t);
        for i in 0..3 {
            val[i] += 2.0 * c * a[i] * f;
            for j in 0..3 {
                jac[i][j] += 2.0 * c * a[i] * k[j] * df;
            }
        }
    }
    (val, jac)
}

/// `P(f.grad g + g.grad f)` by grid quadrature and a discrete Leray projection.
pub fn euler_b(f: &CoeffVec, g: &CoeffVec) -> PhysVec {
    let qmax = max_freq(&[f, g]) * 2;
    let n = (2 * qmax + 2) as usize;
    let h = 2.0 * PI / n as f64;
    let nq = (2 * qmax + 1) as usize;
    let e: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..nq).map(|iq| Complex64::from_polar(1.0, -((iq as i32 - qmax) as f64) * j as f64 * h)).collect())
        .collect();
    // partial transforms over z, then y, then x
    let zero = Complex64::new(0.0, 0.0);
    let mut tz = vec![[zero; 3]; n * n * nq];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let x = [i as f64 * h, j as f64 * h, l as f64 * h];
                let (fv, fj) = sample3(f, x);
                let (gv, gj) = sample3(g, x);
                let w: [f64; 3] = std::array::from_fn(|c| (0..3).map(|d| fv[d] * gj[c][d] + gv[d] * fj[c][d]).sum());
                for iq in 0..nq {
                    for c in 0..3 {
                        tz[(i * n + j) * nq + iq][c] += w[c] * e[l][iq];
                    }
                }
            }
        }
    }
    let mut tyz = vec![[zero; 3]; n * nq * nq];
    for i in 0..n {
        for j in 0..n {
            for i2 in 0..nq {
                for i3 in 0..nq {
                    let src = tz[(i * n + j) * nq + i3];
                    for c in 0..3 {
                        tyz[(i * nq + i2) * nq + i3][c] += src[c] * e[j][i2];
                    }
                }
            }
        }
    }
    let nn = (n * n * n) as f64;
    let mut out = PhysVec::new();
    for q1 in 0..=qmax {
        for q2 in -qmax..=qmax {
            for q3 in -qmax..=qmax {
                let q = [q1, q2, q3];
                let first = q.iter().find(|&&c| c != 0);
                if first.is_none_or(|&c| c < 0) {
                    continue;
                }
                let (i2, i3) = ((q2 + qmax) as usize, (q3 + qmax) as usize);
                let mut hat = [zero; 3];
                for i in 0..n {
                    let src = tyz[(i * nq + i2) * nq + i3];
                    let ph = e[i][(q1 + qmax) as usize];
                    for c in 0..3 {
                        hat[c] += src[c] * ph / nn;
                    }
                }
                push_leray(&mut out, q, hat);
            }
        }
    }
    out
}

fn push_leray(out: &mut PhysVec, q: [i32; 3], mut hat: [Complex64; 3]) {
    let qf = q.map(|c| c as f64);
    let q2n: f64 = qf.iter().map(|c| c * c).sum();
    let d: Complex64 = (0..3).map(|c| hat[c] * qf[c]).sum();
    for c in 0..3 {
        hat[c] -= d * qf[c] / q2n;
    }
    for c in 0..3 {
        for (p, v) in [(0u8, 2.0 * hat[c].re), (1u8, -2.0 * hat[c].im)] {
            if v.abs() > 1e-13 {
                *out.entry((q.to_vec(), p, c as u8)).or_default() += v;
            }
        }
    }
}

type Spectrum = BTreeMap<[i32; 3], [Complex64; 3]>;

fn velocity_spectrum(v: &CoeffVec) -> Spectrum {
    let mut s = Spectrum::new();
    let zero = Complex64::new(0.0, 0.0);
    for (m, c) in v.iter() {
        let a = PolarizationFrame::for_k(m.k).a[m.polarization.unwrap() as usize];
        // cos t = (e^{it} + e^{-it})/2, sin t = (e^{it} - e^{-it})/(2i)
        let w = match m.parity {
            Parity::Cos => Complex64::new(*c, 0.0),
            Parity::Sin => Complex64::new(0.0, -*c),
        };
        let k = m.k.padded();
        let e = s.entry(k).or_insert([zero; 3]);
        for i in 0..3 {
            e[i] += w * a[i];
        }
        let e = s.entry(k.map(|x| -x)).or_insert([zero; 3]);
        for i in 0..3 {
            e[i] += w.conj() * a[i];
        }
    }
    s
}

/// Complex spectrum of a physical velocity given by cos/sin amplitude vectors.
fn phys_spectrum(v: &PhysVec) -> Spectrum {
    let mut s = Spectrum::new();
    let zero = Complex64::new(0.0, 0.0);
    for ((q, p, c), amp) in v {
        let k = [q[0], q[1], q[2]];
        // amp cos t -> amp/2 at +-k; amp sin t -> -i amp/2 at k, i amp/2 at -k
        let w = if *p == 0 { Complex64::new(0.5 * amp, 0.0) } else { Complex64::new(0.0, -0.5 * amp) };
        s.entry(k).or_insert([zero; 3])[*c as usize] += w;
        s.entry(k.map(|x| -x)).or_insert([zero; 3])[*c as usize] += w.conj();
    }
    s
}

fn convolve_b(sf: &Spectrum, sg: &Spectrum) -> PhysVec {
    let zero = Complex64::new(0.0, 0.0);
    let mut acc = Spectrum::new();
    for (x, y) in [(sf, sg), (sg, sf)] {
        for (p, up) in x {
            for (r, vr) in y {
                let q = [p[0] + r[0], p[1] + r[1], p[2] + r[2]];
                if q == [0, 0, 0] {
                    continue;
                }
                // (u . grad) v with grad e^{ir.x} = i r e^{ir.x}
                let adv: Complex64 = (0..3).map(|d| up[d] * Complex64::new(0.0, r[d] as f64)).sum();
                let e = acc.entry(q).or_insert([zero; 3]);
                for c in 0..3 {
                    e[c] += adv * vr[c];
                }
            }
        }
    }
    let mut out = PhysVec::new();
    for (q, hat) in acc {
        let first = q.iter().find(|&&c| c != 0).copied().unwrap_or(0);
        if first > 0 {
            push_leray(&mut out, q, hat);
        }
    }
    out
}

/// `P(f.grad g + g.grad f)` for velocities given physically (see `velocity_to_phys`).
pub fn euler_b_phys(f: &PhysVec, g: &PhysVec) -> PhysVec {
    convolve_b(&phys_spectrum(f), &phys_spectrum(g))
}

/// `P(f.grad g + g.grad f)` by direct convolution of complex exponential coefficients.
///
/// Independent of the grid: every pair of exponentials is multiplied out and the Leray
/// projection is applied at each output frequency.
pub fn euler_b_fourier(f: &CoeffVec, g: &CoeffVec) -> PhysVec {
    convolve_b(&velocity_spectrum(f), &velocity_spectrum(g))
}

// ---------------------------------------------------------------- span comparison

/// Numerical rank of a set of physical vectors (SVD, relative tolerance).
pub fn rank(vs: &[PhysVec], tol: f64) -> usize {
    let keys: Vec<&Key> = {
        let mut ks: Vec<&Key> = vs.iter().flat_map(|v| v.keys()).collect();
        ks.sort();
        ks.dedup();
        ks
    };
    if vs.is_empty() || keys.is_empty() {
        return 0;
    }
    let m = DMatrix::from_fn(vs.len(), keys.len(), |i, j| vs[i].get(keys[j]).copied().unwrap_or(0.0));
    let sv = m.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * top.max(1.0)).count()
}

/// Span equality via `rank(A) = rank(B) = rank(A u B)`.
pub fn same_span(a: &[PhysVec], b: &[PhysVec], tol: f64) -> bool {
    let ra = rank(a, tol);
    let rb = rank(b, tol);
    let mut ab = a.to_vec();
    ab.extend_from_slice(b);
    ra == rb && rank(&ab, tol) == ra
}

/// Max absolute difference between two physical vectors.
pub fn max_diff(a: &PhysVec, b: &PhysVec) -> f64 {
    let mut d: f64 = 0.0;
    for (k, v) in a {
        d = d.max((v - b.get(k).copied().unwrap_or(0.0)).abs());
    }
    for (k, v) in b {
        if !a.contains_key(k) {
            d = d.max(v.abs());
        }
    }
    d
}

/// Whether two single vectors span the same line (both negligible, or parallel).
pub fn same_line(a: &PhysVec, b: &PhysVec, tol: f64) -> bool {
    let dot = |x: &PhysVec, y: &PhysVec| -> f64 { x.iter().map(|(k, v)| v * y.get(k).copied().unwrap_or(0.0)).sum() };
    let (na, nb) = (dot(a, a).sqrt(), dot(b, b).sqrt());
    let scale = na.max(nb).max(1.0);
    if na <= tol * scale || nb <= tol * scale {
        return na <= tol * scale && nb <= tol * scale;
    }
    let s = dot(a, b) / (nb * nb);
    let mut r = a.clone();
    add(&mut r, -s, b);
    dot(&r, &r).sqrt() <= tol * scale
}
