//! Transport nonlinearities on the two-dimensional torus: vorticity advection and
//! the Boussinesq temperature/vorticity brackets.

use num_complex::Complex64;
use std::collections::HashMap;

use crate::coeff::CoeffVec;
use crate::mode::{Field, Parity, TrigMode};
use crate::span::SpanSet;
use crate::wave::WaveVector;
use crate::ModeError;

/// Complex exponential coefficients of a real combination of 2D cos/sin modes.
pub(crate) fn exponentials(v: &CoeffVec) -> Vec<(WaveVector, Complex64)> {
    let mut out = Vec::with_capacity(2 * v.len());
    for (m, &c) in v.iter() {
        let z = match m.parity {
            Parity::Cos => Complex64::new(0.5 * c, 0.0),
            Parity::Sin => Complex64::new(0.0, -0.5 * c),
        };
        out.push((m.k, z));
        out.push((m.k.neg(), z.conj()));
    }
    out
}

/// Real modes of `field` from conjugate-symmetric exponential coefficients.
pub(crate) fn to_real(acc: &HashMap<WaveVector, Complex64>, field: Field) -> CoeffVec {
    let mut out = CoeffVec::new();
    for (q, z) in acc {
        if !q.is_canonical() {
            continue;
        }
        let (cm, sm) = (
            TrigMode { k: *q, parity: Parity::Cos, field, polarization: None },
            TrigMode { k: *q, parity: Parity::Sin, field, polarization: None },
        );
        if z.re != 0.0 {
            out.add(cm, 2.0 * z.re);
        }
        if z.im != 0.0 {
            out.add(sm, -2.0 * z.im);
        }
    }
    out.cleaned(1e-15)
}

/// `(K * a) . grad b`, where `K` is the Biot-Savart kernel (`u_hat = -i k_perp a_hat / |k|^2`).
///
/// Field tags of the inputs are ignored; the output carries `out`.
pub fn transport(a: &CoeffVec, b: &CoeffVec, out: Field) -> CoeffVec {
    let ea = exponentials(a);
    let eb = exponentials(b);
    let mut acc: HashMap<WaveVector, Complex64> = HashMap::new();
    for (k, za) in &ea {
        let kk = k.coords();
        let n2 = k.norm2() as f64;
        for (j, zb) in &eb {
            let q = k.add(j);
            if q.is_zero() {
                continue;
            }
            let jj = j.coords();
            let perp_dot = (-(kk[1] as i64) * jj[0] as i64 + kk[0] as i64 * jj[1] as i64) as f64;
            if perp_dot == 0.0 {
                continue;
            }
            *acc.entry(q).or_default() += za * zb * (perp_dot / n2);
        }
    }
    to_real(&acc, out)
}

/// `d/dx` of a combination of 2D scalar modes, relabelled as `out`.
pub fn dx(v: &CoeffVec, out: Field) -> CoeffVec {
    let mut r = CoeffVec::new();
    for (m, &c) in v.iter() {
        let k1 = m.k.coords()[0] as f64;
        if k1 == 0.0 {
            continue;
        }
        let (p, s) = match m.parity {
            Parity::Cos => (Parity::Sin, -k1),
            Parity::Sin => (Parity::Cos, k1),
        };
        r.add(TrigMode { k: m.k, parity: p, field: out, polarization: None }, s * c);
    }
    r
}

/// Symmetrized vorticity nonlinearity `(1/2)[(K*a).grad b + (K*b).grad a]`.
pub fn nse_bilinear_vec(a: &CoeffVec, b: &CoeffVec) -> CoeffVec {
    let mut r = transport(a, b, Field::Vorticity);
    r.add_scaled(1.0, &transport(b, a, Field::Vorticity));
    r.scaled(0.5).cleaned(1e-15)
}

fn require(m: &TrigMode, f: Field) -> Result<(), ModeError> {
    if m.field != f {
        return Err(ModeError::BadMode(format!("expected a {f:?} mode, got {m}")));
    }
    Ok(())
}

fn span_of(v: CoeffVec) -> SpanSet {
    let mut s = SpanSet::new();
    s.insert(&v);
    s
}

/// Span of the symmetrized vorticity image of two modes.
pub fn nse_bilinear(m1: TrigMode, m2: TrigMode) -> Result<SpanSet, ModeError> {
    require(&m1, Field::Vorticity)?;
    require(&m2, Field::Vorticity)?;
    Ok(span_of(nse_bilinear_vec(&CoeffVec::unit(m1), &CoeffVec::unit(m2))))
}

/// `g [ b(d_x psi, phi) - b(d_x phi, psi) ]` for temperature directions `phi` (the `j` slot)
/// and `psi` (the `k` slot), with `b(xi, theta) = (K*xi).grad theta`.
pub fn theta_bracket_vec(gravity: f64, phi: &CoeffVec, psi: &CoeffVec) -> CoeffVec {
    let mut r = transport(&dx(psi, Field::Vorticity), phi, Field::Temperature);
    r.add_scaled(-1.0, &transport(&dx(phi, Field::Vorticity), psi, Field::Temperature));
    r.scaled(gravity).cleaned(1e-15)
}

/// `(K*a).grad b + (K*b).grad a` for vorticity directions.
pub fn vorticity_bracket_vec(a: &CoeffVec, b: &CoeffVec) -> CoeffVec {
    nse_bilinear_vec(a, b).scaled(2.0)
}

/// Temperature bracket of `e_j^l` and `e_k^n`.
pub fn boussinesq_theta_bracket(j: WaveVector, l: Parity, k: WaveVector, n: Parity) -> Result<SpanSet, ModeError> {
    let phi = CoeffVec::unit(TrigMode::new(j, l, Field::Temperature, None)?);
    let psi = CoeffVec::unit(TrigMode::new(k, n, Field::Temperature, None)?);
    Ok(span_of(theta_bracket_vec(1.0, &phi, &psi)))
}

/// Vorticity bracket of `e_k^l` and `e_j^n`.
pub fn boussinesq_vorticity_bracket(k: WaveVector, l: Parity, j: WaveVector, n: Parity) -> Result<SpanSet, ModeError> {
    let a = CoeffVec::unit(TrigMode::new(k, l, Field::Vorticity, None)?);
    let b = CoeffVec::unit(TrigMode::new(j, n, Field::Vorticity, None)?);
    Ok(span_of(vorticity_bracket_vec(&a, &b)))
}

/// Symmetrized Boussinesq transport `B_s(U, V)` on `(xi, theta)` pairs.
pub fn boussinesq_bilinear_vec(u: &CoeffVec, v: &CoeffVec) -> CoeffVec {
    let (xu, tu) = u.partition(|m| m.field == Field::Vorticity);
    let (xv, tv) = v.partition(|m| m.field == Field::Vorticity);
    let mut r = transport(&xu, &xv, Field::Vorticity);
    r.add_scaled(1.0, &transport(&xv, &xu, Field::Vorticity));
    r.add_scaled(1.0, &transport(&xu, &tv, Field::Temperature));
    r.add_scaled(1.0, &transport(&xv, &tu, Field::Temperature));
    r.scaled(0.5).cleaned(1e-15)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Parity::*;

    #[test]
    fn single_mode_self_image_vanishes() {
        for p in [Cos, Sin] {
            let s = nse_bilinear(TrigMode::vorticity(2, -1, p), TrigMode::vorticity(2, -1, p)).unwrap();
            assert_eq!(s.dim(), 0);
        }
        let v = nse_bilinear_vec(&CoeffVec::unit(TrigMode::vorticity(1, 1, Cos)), &CoeffVec::unit(TrigMode::vorticity(1, 1, Sin)));
        assert!(v.is_empty());
    }

    #[test]
    fn collinear_pair_vanishes() {
        let s = nse_bilinear(TrigMode::vorticity(1, 0, Cos), TrigMode::vorticity(2, 0, Cos)).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn generic_pair_lands_on_sum_and_difference() {
        let v = nse_bilinear_vec(&CoeffVec::unit(TrigMode::vorticity(1, 0, Sin)), &CoeffVec::unit(TrigMode::vorticity(1, 1, Sin)));
        let ks: std::collections::BTreeSet<_> = v.modes().map(|m| m.k).collect();
        assert!(!v.is_empty());
        assert!(ks.iter().all(|k| *k == WaveVector::d2(2, 1) || *k == WaveVector::d2(0, 1)));
    }

    #[test]
    fn theta_bracket_is_antisymmetric_and_bilinear() {
        let a = CoeffVec::from_pairs([(TrigMode::temperature(1, 0, Sin), 0.7), (TrigMode::temperature(1, 2, Cos), -0.2)]);
        let b = CoeffVec::from_pairs([(TrigMode::temperature(0, 1, Sin), 1.3)]);
        let x = theta_bracket_vec(2.0, &a, &b);
        let mut y = theta_bracket_vec(2.0, &b, &a);
        y.add_scaled(1.0, &x);
        assert!(y.norm_inf() < 1e-14);
        let z = theta_bracket_vec(2.0, &a.scaled(3.0), &b.scaled(-0.5));
        let mut d = z.clone();
        d.add_scaled(1.5, &x);
        assert!(d.norm_inf() < 1e-13);
        assert!(theta_bracket_vec(1.0, &a, &a).norm_inf() < 1e-14);
    }

    #[test]
    fn theta_bracket_axis_pair() {
        let s = boussinesq_theta_bracket(WaveVector::d2(1, 0), Sin, WaveVector::d2(0, 1), Sin).unwrap();
        assert_eq!(s.dim(), 1);
        let ks: std::collections::BTreeSet<_> = s.modes().iter().map(|m| m.k).collect();
        assert_eq!(ks.into_iter().collect::<Vec<_>>(), vec![WaveVector::d2(1, -1), WaveVector::d2(1, 1)]);
    }

    #[test]
    fn vorticity_bracket_symmetric() {
        let k = WaveVector::d2(1, 0);
        let j = WaveVector::d2(1, 1);
        let a = boussinesq_vorticity_bracket(k, Sin, j, Sin).unwrap();
        let b = boussinesq_vorticity_bracket(j, Sin, k, Sin).unwrap();
        assert!(a.same_span(&b));
        assert_eq!(a.dim(), 1);
        assert_eq!(boussinesq_vorticity_bracket(k, Cos, k, Cos).unwrap().dim(), 0);
    }

    #[test]
    fn vorticity_bracket_vanishes_for_equal_lengths() {
        // the symmetric bracket carries a factor (1/|k|^2 - 1/|j|^2)
        let s = boussinesq_vorticity_bracket(WaveVector::d2(1, 0), Sin, WaveVector::d2(0, 1), Sin).unwrap();
        assert_eq!(s.dim(), 0);
        let s = boussinesq_vorticity_bracket(WaveVector::d2(1, 1), Cos, WaveVector::d2(1, -1), Sin).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn dx_of_y_mode_is_zero() {
        assert!(dx(&CoeffVec::unit(TrigMode::temperature(0, 3, Cos)), Field::Vorticity).is_empty());
    }
}
