//! Sparse real coefficient vectors over trigonometric modes.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::mode::TrigMode;

/// Entries smaller than this are dropped when a vector is cleaned.
pub const ZERO_TOL: f64 = 1e-14;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoeffVec(BTreeMap<TrigMode, f64>);

impl CoeffVec {
    pub fn new() -> Self {
        Self(BTreeMap::new())
    }

    pub fn unit(m: TrigMode) -> Self {
        let mut v = Self::new();
        v.add(m, 1.0);
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (TrigMode, f64)>>(it: I) -> Self {
        let mut v = Self::new();
        for (m, c) in it {
            v.add(m, c);
        }
        v
    }

    pub fn add(&mut self, m: TrigMode, c: f64) {
        *self.0.entry(m).or_insert(0.0) += c;
    }

    pub fn get(&self, m: &TrigMode) -> f64 {
        self.0.get(m).copied().unwrap_or(0.0)
    }

    pub fn add_scaled(&mut self, s: f64, o: &CoeffVec) {
        for (m, c) in &o.0 {
            self.add(*m, s * c);
        }
    }

    pub fn scaled(&self, s: f64) -> CoeffVec {
        Self(self.0.iter().map(|(m, c)| (*m, s * c)).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TrigMode, &f64)> {
        self.0.iter()
    }

    pub fn modes(&self) -> impl Iterator<Item = &TrigMode> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    pub fn norm2(&self) -> f64 {
        self.0.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn dot(&self, o: &CoeffVec) -> f64 {
        self.0.iter().map(|(m, c)| c * o.get(m)).sum()
    }

    /// Drops entries below `tol` relative to the largest entry.
    pub fn cleaned(mut self, tol: f64) -> CoeffVec {
        let cut = tol * self.norm_inf();
        self.0.retain(|_, c| c.abs() > cut);
        self
    }

    /// Splits into the part accepted by `keep` and the rest.
    pub fn partition(&self, keep: impl Fn(&TrigMode) -> bool) -> (CoeffVec, CoeffVec) {
        let (a, b): (BTreeMap<_, _>, BTreeMap<_, _>) = self.0.iter().map(|(m, c)| (*m, *c)).partition(|(m, _)| keep(m));
        (Self(a), Self(b))
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.norm_inf() <= tol
    }
}

impl FromIterator<(TrigMode, f64)> for CoeffVec {
    fn from_iter<T: IntoIterator<Item = (TrigMode, f64)>>(iter: T) -> Self {
        Self::from_pairs(iter)
    }
}
