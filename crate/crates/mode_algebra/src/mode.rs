//! Trigonometric basis directions and the polarization frames of velocity modes.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use crate::wave::{canonical, WaveVector};
use crate::ModeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    RdScalar,
    Vorticity,
    Temperature,
    Velocity,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn index(self) -> usize {
        match self {
            Parity::Cos => 0,
            Parity::Sin => 1,
        }
    }

    pub fn from_index(m: usize) -> Self {
        if m % 2 == 0 {
            Parity::Cos
        } else {
            Parity::Sin
        }
    }

    pub fn other(self) -> Self {
        match self {
            Parity::Cos => Parity::Sin,
            Parity::Sin => Parity::Cos,
        }
    }
}

/// One real trigonometric basis direction.
///
/// Velocity modes are `2 a_k^(l) cos(k.x)` or `2 a_k^(l) sin(k.x)` with the frame
/// from [`PolarizationFrame::for_k`]; scalar modes are plain `cos(k.x)` / `sin(k.x)`,
/// and reaction-diffusion modes are `sin(kx)` on `[0, pi]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrigMode {
    pub k: WaveVector,
    pub parity: Parity,
    pub field: Field,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<u8>,
}

impl TrigMode {
    pub fn new(k: WaveVector, parity: Parity, field: Field, polarization: Option<u8>) -> Result<Self, ModeError> {
        let m = Self { k, parity, field, polarization };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ModeError> {
        if !self.k.is_canonical() {
            return Err(ModeError::NotCanonical(self.k));
        }
        let dim = self.k.dim();
        match self.field {
            Field::RdScalar => {
                if dim != 1 || self.parity != Parity::Sin || self.polarization.is_some() {
                    return Err(ModeError::BadMode(format!("reaction-diffusion mode must be 1D sine: {self}")));
                }
            }
            Field::Vorticity | Field::Temperature => {
                if dim != 2 || self.polarization.is_some() {
                    return Err(ModeError::BadMode(format!("scalar 2D mode expected: {self}")));
                }
            }
            Field::Velocity => {
                if dim != 3 || !matches!(self.polarization, Some(0) | Some(1)) {
                    return Err(ModeError::BadMode(format!("velocity mode needs 3D k and polarization 0/1: {self}")));
                }
            }
        }
        Ok(())
    }

    /// `sin(kx)` on `[0, pi]`.
    pub fn rd(k: i32) -> Self {
        Self::new(WaveVector::d1(k), Parity::Sin, Field::RdScalar, None).expect("rd mode needs k >= 1")
    }

    pub fn vorticity(k1: i32, k2: i32, parity: Parity) -> Self {
        Self::new(WaveVector::d2(k1, k2), parity, Field::Vorticity, None).expect("canonical 2D wave vector")
    }

    pub fn temperature(k1: i32, k2: i32, parity: Parity) -> Self {
        Self::new(WaveVector::d2(k1, k2), parity, Field::Temperature, None).expect("canonical 2D wave vector")
    }

    pub fn velocity(k: [i32; 3], l: u8, parity: Parity) -> Self {
        Self::new(WaveVector::new(&k), parity, Field::Velocity, Some(l)).expect("canonical 3D wave vector")
    }

    /// Mode for an arbitrary nonzero `k`, with the sign picked up by canonicalization.
    pub fn signed(k: WaveVector, parity: Parity, field: Field, polarization: Option<u8>) -> Result<(Self, f64), ModeError> {
        let (kc, s) = canonical(k)?;
        let sign = if parity == Parity::Sin { s as f64 } else { 1.0 };
        Ok((Self::new(kc, parity, field, polarization)?, sign))
    }

    /// Squared L2 norm of the basis function on its domain.
    pub fn l2_weight(&self) -> f64 {
        match self.field {
            Field::RdScalar => PI / 2.0,
            Field::Vorticity | Field::Temperature => 2.0 * PI * PI,
            // |2a|^2 = 1/pi times the mean of cos^2 over (2 pi)^3.
            Field::Velocity => 4.0 * PI * PI,
        }
    }

    fn key(&self) -> (i64, WaveVector, Field, Parity, Option<u8>) {
        (self.k.norm2(), self.k, self.field, self.parity, self.polarization)
    }
}

impl Ord for TrigMode {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl PartialOrd for TrigMode {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for TrigMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = match self.parity {
            Parity::Cos => "cos",
            Parity::Sin => "sin",
        };
        let fld = match self.field {
            Field::RdScalar => "u",
            Field::Vorticity => "xi",
            Field::Temperature => "theta",
            Field::Velocity => "vel",
        };
        match self.polarization {
            Some(l) => write!(f, "{fld}{l}:{p}{}", self.k),
            None => write!(f, "{fld}:{p}{}", self.k),
        }
    }
}

impl fmt::Debug for TrigMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Squared length of each frame vector.
pub const FRAME_NORM2: f64 = 1.0 / (4.0 * PI);

/// Orthogonal frame `a0, a1` of the plane perpendicular to `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarizationFrame {
    pub k: WaveVector,
    pub a: [[f64; 3]; 2],
}

impl PolarizationFrame {
    /// `a0 = k x e`, `a1 = k x a0`, normalized to `|a|^2 = 1/(4 pi)`, with
    /// `e = z` unless `k` is parallel to `z`, in which case `e = x`.
    pub fn for_k(k: WaveVector) -> Self {
        assert_eq!(k.dim(), 3, "polarization frames are three dimensional");
        let kf = k.as_f64();
        let c = k.padded();
        let e = if c[0] == 0 && c[1] == 0 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
        let scale = FRAME_NORM2.sqrt();
        let a0 = normalize(cross(kf, e), scale);
        let a1 = normalize(cross(kf, a0), scale);
        Self { k, a: [a0, a1] }
    }
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn normalize(v: [f64; 3], len: f64) -> [f64; 3] {
    let n = dot3(v, v).sqrt();
    [v[0] / n * len, v[1] / n * len, v[2] / n * len]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rd_modes_must_be_sine() {
        assert!(TrigMode::new(WaveVector::d1(2), Parity::Cos, Field::RdScalar, None).is_err());
        assert!(TrigMode::new(WaveVector::d1(-2), Parity::Sin, Field::RdScalar, None).is_err());
    }

    #[test]
    fn polarization_only_on_velocity() {
        assert!(TrigMode::new(WaveVector::d2(1, 0), Parity::Sin, Field::Vorticity, Some(0)).is_err());
        assert!(TrigMode::new(WaveVector::d3(1, 0, 0), Parity::Sin, Field::Velocity, None).is_err());
    }

    #[test]
    fn signed_sine_flips() {
        let (m, s) = TrigMode::signed(WaveVector::d2(-1, 2), Parity::Sin, Field::Vorticity, None).unwrap();
        assert_eq!(m.k, WaveVector::d2(1, -2));
        assert_eq!(s, -1.0);
        let (_, s) = TrigMode::signed(WaveVector::d2(-1, 2), Parity::Cos, Field::Vorticity, None).unwrap();
        assert_eq!(s, 1.0);
    }

    #[test]
    fn ordering_by_norm_first() {
        let a = TrigMode::vorticity(2, 0, Parity::Cos);
        let b = TrigMode::vorticity(1, 1, Parity::Sin);
        assert!(b < a);
        assert!(TrigMode::vorticity(1, 1, Parity::Cos) < b);
    }

    #[test]
    fn frames_satisfy_constraints() {
        for k in [[1, 0, 0], [0, 0, 1], [0, 0, 3], [1, 1, 1], [2, -1, 3], [0, 1, -2]] {
            let f = PolarizationFrame::for_k(WaveVector::new(&k));
            let kf = WaveVector::new(&k).as_f64();
            for a in f.a {
                assert!(dot3(a, kf).abs() < 1e-14);
                assert!((dot3(a, a) - FRAME_NORM2).abs() < 1e-14);
            }
            assert!(dot3(f.a[0], f.a[1]).abs() < 1e-14);
        }
    }
}
