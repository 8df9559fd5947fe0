//! Integer lattice frequencies.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

use crate::ModeError;

/// A lattice frequency of dimension 1, 2 or 3.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<i32>", try_from = "Vec<i32>")]
pub struct WaveVector {
    dim: u8,
    c: [i32; 3],
}

impl WaveVector {
    /// Panics unless `coords` has length 1, 2 or 3.
    pub fn new(coords: &[i32]) -> Self {
        Self::try_new(coords).expect("wave vector dimension must be 1, 2 or 3")
    }

    pub fn try_new(coords: &[i32]) -> Result<Self, ModeError> {
        if coords.is_empty() || coords.len() > 3 {
            return Err(ModeError::Dimension(coords.len()));
        }
        let mut c = [0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self { dim: coords.len() as u8, c })
    }

    pub fn d1(k: i32) -> Self {
        Self::new(&[k])
    }

    pub fn d2(k1: i32, k2: i32) -> Self {
        Self::new(&[k1, k2])
    }

    pub fn d3(k1: i32, k2: i32, k3: i32) -> Self {
        Self::new(&[k1, k2, k3])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i32] {
        &self.c[..self.dim as usize]
    }

    /// Coordinates padded with zeros to length three.
    pub fn padded(&self) -> [i32; 3] {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c == [0; 3]
    }

    pub fn norm2(&self) -> i64 {
        self.c.iter().map(|&x| (x as i64) * (x as i64)).sum()
    }

    pub fn linf(&self) -> u32 {
        self.c.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn dot(&self, o: &Self) -> i64 {
        self.c.iter().zip(o.c.iter()).map(|(&a, &b)| a as i64 * b as i64).sum()
    }

    pub fn neg(&self) -> Self {
        Self { dim: self.dim, c: [-self.c[0], -self.c[1], -self.c[2]] }
    }

    pub fn add(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        Self { dim: self.dim, c: [self.c[0] + o.c[0], self.c[1] + o.c[1], self.c[2] + o.c[2]] }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn as_f64(&self) -> [f64; 3] {
        [self.c[0] as f64, self.c[1] as f64, self.c[2] as f64]
    }

    /// True when the first nonzero coordinate is positive.
    pub fn is_canonical(&self) -> bool {
        match self.c.iter().find(|&&x| x != 0) {
            Some(&x) => x > 0,
            None => false,
        }
    }

    /// Linear independence of two vectors (cross product nonzero).
    pub fn independent_of(&self, o: &Self) -> bool {
        let a = self.c.map(|x| x as i64);
        let b = o.c.map(|x| x as i64);
        a[1] * b[2] - a[2] * b[1] != 0 || a[2] * b[0] - a[0] * b[2] != 0 || a[0] * b[1] - a[1] * b[0] != 0
    }
}

/// Canonical representative of `k` up to sign, and the sign that was applied.
///
/// A sine mode picks up the returned sign; a cosine mode does not.
pub fn canonical(k: WaveVector) -> Result<(WaveVector, i8), ModeError> {
    if k.is_zero() {
        return Err(ModeError::ZeroWaveVector);
    }
    if k.is_canonical() {
        Ok((k, 1))
    } else {
        Ok((k.neg(), -1))
    }
}

impl Ord for WaveVector {
    fn cmp(&self, o: &Self) -> Ordering {
        self.dim.cmp(&o.dim).then(self.c.cmp(&o.c))
    }
}

impl PartialOrd for WaveVector {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Debug for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for WaveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl From<WaveVector> for Vec<i32> {
    fn from(k: WaveVector) -> Self {
        k.coords().to_vec()
    }
}

impl TryFrom<Vec<i32>> for WaveVector {
    type Error = ModeError;
    fn try_from(v: Vec<i32>) -> Result<Self, Self::Error> {
        Self::try_new(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_flips_leading_negative() {
        assert_eq!(canonical(WaveVector::d2(-1, 2)).unwrap(), (WaveVector::d2(1, -2), -1));
        assert_eq!(canonical(WaveVector::d2(0, 3)).unwrap(), (WaveVector::d2(0, 3), 1));
        assert_eq!(canonical(WaveVector::d3(0, -1, 0)).unwrap(), (WaveVector::d3(0, 1, 0), -1));
    }

    #[test]
    fn zero_is_rejected() {
        assert!(matches!(canonical(WaveVector::d2(0, 0)), Err(ModeError::ZeroWaveVector)));
    }

    #[test]
    fn independence() {
        let a = WaveVector::d3(1, 1, 1);
        assert!(a.independent_of(&WaveVector::d3(1, 0, 0)));
        assert!(!a.independent_of(&WaveVector::d3(-2, -2, -2)));
        assert!(!WaveVector::d2(1, 0).independent_of(&WaveVector::d2(2, 0)));
    }
}
