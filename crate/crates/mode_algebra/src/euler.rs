//! Closed-form action of the Euler transport term `B(f, g) = P(f.grad g + g.grad f)`
//! on polarized velocity modes.

use crate::coeff::CoeffVec;
use crate::mode::{dot3, Field, Parity, PolarizationFrame, TrigMode};
use crate::span::SpanSet;
use crate::wave::WaveVector;
use crate::ModeError;
use std::f64::consts::PI;

fn frame_vec(m: &TrigMode) -> [f64; 3] {
    PolarizationFrame::for_k(m.k).a[m.polarization.expect("velocity mode") as usize]
}

/// Adds `v * Re(i^power e^{-i q.x})` to `out`, expressed in the polarized basis at `q`.
fn deposit(out: &mut CoeffVec, q: WaveVector, v: [f64; 3], power: usize) {
    if q.is_zero() {
        return;
    }
    let (parity, mut sign) = match power % 4 {
        0 => (Parity::Cos, 1.0),
        1 => (Parity::Sin, 1.0),
        2 => (Parity::Cos, -1.0),
        _ => (Parity::Sin, -1.0),
    };
    let q = if q.is_canonical() {
        q
    } else {
        if parity == Parity::Sin {
            sign = -sign;
        }
        q.neg()
    };
    let frame = PolarizationFrame::for_k(q);
    for (l, a) in frame.a.iter().enumerate() {
        // basis vector is 2 a (cos|sin); coefficient = v.a / (2 |a|^2) = 2 pi v.a
        let c = 2.0 * PI * dot3(v, *a) * sign;
        if c != 0.0 {
            out.add(TrigMode { k: q, parity, field: Field::Velocity, polarization: Some(l as u8) }, c);
        }
    }
}

/// `B(e_{k,l1,m1}, e_{j,l2,m2})` via the r/s coefficient vectors:
/// `-2 r Re(i^{m1+m2+1} e^{-i(k+j).x}) + 2 (-1)^{m2} s Re(i^{m1+m2+1} e^{-i(k-j).x})`.
pub fn euler_pair(m1: &TrigMode, m2: &TrigMode) -> CoeffVec {
    let mut out = CoeffVec::new();
    if m1.k == m2.k {
        return out;
    }
    let (k, j) = (m1.k.as_f64(), m2.k.as_f64());
    let (a, b) = (frame_vec(m1), frame_vec(m2));
    let (aj, bk) = (dot3(a, j), dot3(b, k));
    let power = m1.parity.index() + m2.parity.index() + 1;

    let qp = m1.k.add(&m2.k);
    if !qp.is_zero() {
        let q = qp.as_f64();
        let n2 = qp.norm2() as f64;
        let r: [f64; 3] = std::array::from_fn(|i| aj * (b[i] - bk / n2 * q[i]) + bk * (a[i] - aj / n2 * q[i]));
        deposit(&mut out, qp, r.map(|x| -2.0 * x), power);
    }
    let qm = m1.k.sub(&m2.k);
    if !qm.is_zero() {
        let q = qm.as_f64();
        let n2 = qm.norm2() as f64;
        let s: [f64; 3] = std::array::from_fn(|i| aj * (b[i] - bk / n2 * q[i]) - bk * (a[i] + aj / n2 * q[i]));
        let sgn = if m2.parity == Parity::Sin { -2.0 } else { 2.0 };
        deposit(&mut out, qm, s.map(|x| sgn * x), power);
    }
    out.cleaned(1e-15)
}

/// Bilinear extension of [`euler_pair`].
pub fn euler_bilinear_vec(f: &CoeffVec, g: &CoeffVec) -> CoeffVec {
    let mut out = CoeffVec::new();
    for (m1, c1) in f.iter() {
        for (m2, c2) in g.iter() {
            out.add_scaled(c1 * c2, &euler_pair(m1, m2));
        }
    }
    out.cleaned(1e-15)
}

/// Span of `B(m1, m2)`.
pub fn euler_bilinear(m1: TrigMode, m2: TrigMode) -> Result<SpanSet, ModeError> {
    for m in [&m1, &m2] {
        if m.field != Field::Velocity {
            return Err(ModeError::BadMode(format!("expected a velocity mode, got {m}")));
        }
    }
    let mut s = SpanSet::new();
    s.insert(&euler_pair(&m1, &m2));
    Ok(s)
}

/// The four modes `F_k` at one frequency.
pub fn family(k: [i32; 3]) -> Vec<TrigMode> {
    let mut v = Vec::with_capacity(4);
    for l in 0..2 {
        for p in [Parity::Cos, Parity::Sin] {
            v.push(TrigMode::velocity(k, l, p));
        }
    }
    v
}
