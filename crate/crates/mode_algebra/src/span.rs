//! Finite-dimensional subspaces spanned by coefficient vectors, kept in reduced row-echelon form.

use serde::{Serialize, Serializer};
use std::collections::HashMap;

use crate::coeff::CoeffVec;
use crate::mode::TrigMode;

/// Pivot tolerance for span reduction, relative to the max-norm of the vector being reduced.
pub const PIVOT_TOL: f64 = 1e-10;

/// Relative tolerance for treating two candidate pivots as tied.
const TIE_TOL: f64 = 1e-9;

/// Subspace with a reduced row-echelon basis.
///
/// Every basis row has a 1 at its own pivot and a 0 at every other row's pivot.
/// Pivots are the largest-magnitude entry of the reduced vector; near-ties go to the
/// smallest mode in the mode order.
#[derive(Clone, Debug)]
pub struct SpanSet {
    universe: Vec<TrigMode>,
    index: HashMap<TrigMode, usize>,
    rows: Vec<Vec<f64>>,
    pivots: Vec<usize>,
    pivot_row: HashMap<usize, usize>,
    tol: f64,
}

impl Default for SpanSet {
    fn default() -> Self {
        Self::new()
    }
}

impl SpanSet {
    pub fn new() -> Self {
        Self::with_tol(PIVOT_TOL)
    }

    pub fn with_tol(tol: f64) -> Self {
        Self {
            universe: Vec::new(),
            index: HashMap::new(),
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: HashMap::new(),
            tol,
        }
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a CoeffVec>>(vs: I) -> Self {
        let mut s = Self::new();
        for v in vs {
            s.insert(v);
        }
        s
    }

    /// Span of unit vectors on the given modes.
    pub fn from_modes<I: IntoIterator<Item = TrigMode>>(ms: I) -> Self {
        let mut s = Self::new();
        for m in ms {
            s.insert(&CoeffVec::unit(m));
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    fn slot(&mut self, m: TrigMode) -> usize {
        if let Some(&i) = self.index.get(&m) {
            return i;
        }
        let i = self.universe.len();
        self.universe.push(m);
        self.index.insert(m, i);
        for r in &mut self.rows {
            r.push(0.0);
        }
        i
    }

    /// Reduces `v / |v|_inf` against the basis; returns the dense residual and the scale,
    /// or `None` if `v` touches modes unknown to the span (then the residual is `v` itself).
    fn reduce_dense(&self, v: &CoeffVec) -> Option<(Vec<f64>, f64)> {
        let scale = v.norm_inf();
        let mut w = vec![0.0; self.universe.len()];
        for (m, c) in v.iter() {
            w[*self.index.get(m)?] = c / scale;
        }
        for m in v.modes() {
            let i = self.index[m];
            if let Some(&r) = self.pivot_row.get(&i) {
                let c = w[i];
                if c != 0.0 {
                    for (x, y) in w.iter_mut().zip(&self.rows[r]) {
                        *x -= c * y;
                    }
                    w[i] = 0.0;
                }
            }
        }
        Some((w, scale))
    }

    /// Component of `v` outside the span (in the original scale of `v`).
    pub fn residual(&self, v: &CoeffVec) -> CoeffVec {
        if v.is_empty() || v.norm_inf() == 0.0 {
            return CoeffVec::new();
        }
        match self.reduce_dense(v) {
            None => {
                // Unknown modes cannot be cancelled; reduce the known part only.
                let (known, unknown) = v.partition(|m| self.index.contains_key(m));
                let mut r = self.residual(&known);
                r.add_scaled(1.0, &unknown);
                r
            }
            Some((w, scale)) => w
                .iter()
                .enumerate()
                .filter(|(_, x)| **x != 0.0)
                .map(|(i, x)| (self.universe[i], x * scale))
                .collect(),
        }
    }

    /// Membership to pivot tolerance (relative to the max-norm of `v`).
    pub fn contains(&self, v: &CoeffVec) -> bool {
        let s = v.norm_inf();
        if s == 0.0 {
            return true;
        }
        match self.reduce_dense(v) {
            None => {
                let (_, unknown) = v.partition(|m| self.index.contains_key(m));
                if unknown.norm_inf() > self.tol * s {
                    return false;
                }
                let (known, _) = v.partition(|m| self.index.contains_key(m));
                self.residual(&known).norm_inf() <= self.tol * s
            }
            Some((w, _)) => w.iter().all(|x| x.abs() <= self.tol),
        }
    }

    pub fn contains_mode(&self, m: TrigMode) -> bool {
        self.contains(&CoeffVec::unit(m))
    }

    /// Adds `v`; returns true when the dimension grew.
    pub fn insert(&mut self, v: &CoeffVec) -> bool {
        let s = v.norm_inf();
        if s == 0.0 || !s.is_finite() {
            return false;
        }
        for m in v.modes() {
            self.slot(*m);
        }
        let (mut w, _) = self.reduce_dense(v).expect("modes registered above");
        let big = w.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if big <= self.tol {
            return false;
        }
        let mut p = usize::MAX;
        for (i, x) in w.iter().enumerate() {
            if x.abs() >= big * (1.0 - TIE_TOL) && (p == usize::MAX || self.universe[i] < self.universe[p]) {
                p = i;
            }
        }
        let piv = w[p];
        for x in &mut w {
            *x /= piv;
            if x.abs() < 1e-16 {
                *x = 0.0;
            }
        }
        w[p] = 1.0;
        for r in &mut self.rows {
            let c = r[p];
            if c != 0.0 {
                for (x, y) in r.iter_mut().zip(&w) {
                    *x -= c * y;
                }
                r[p] = 0.0;
            }
        }
        self.pivot_row.insert(p, self.rows.len());
        self.pivots.push(p);
        self.rows.push(w);
        true
    }

    /// Inserts every vector; returns how many raised the dimension.
    pub fn extend<'a, I: IntoIterator<Item = &'a CoeffVec>>(&mut self, vs: I) -> usize {
        vs.into_iter().filter(|v| self.insert(v)).count()
    }

    /// Basis rows, ordered by pivot mode.
    pub fn basis(&self) -> Vec<CoeffVec> {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&r| self.universe[self.pivots[r]]);
        order
            .into_iter()
            .map(|r| {
                self.rows[r]
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| **x != 0.0)
                    .map(|(i, x)| (self.universe[i], *x))
                    .collect()
            })
            .collect()
    }

    /// Basis rows in insertion order, starting at row `start`.
    ///
    /// Pivots never move once chosen, so the rows added after a snapshot of dimension
    /// `start` complete any basis of that snapshot to a basis of the current span.
    pub fn basis_from(&self, start: usize) -> Vec<CoeffVec> {
        self.rows[start.min(self.rows.len())..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, x)| (self.universe[i], *x)).collect())
            .collect()
    }

    pub fn pivot_modes(&self) -> Vec<TrigMode> {
        let mut p: Vec<TrigMode> = self.pivots.iter().map(|&i| self.universe[i]).collect();
        p.sort();
        p
    }

    /// Modes appearing in the basis, in mode order.
    pub fn modes(&self) -> Vec<TrigMode> {
        let mut out: Vec<TrigMode> = (0..self.universe.len())
            .filter(|&i| self.rows.iter().any(|r| r[i] != 0.0))
            .map(|i| self.universe[i])
            .collect();
        out.sort();
        out
    }

    pub fn is_subspace_of(&self, o: &SpanSet) -> bool {
        self.basis().iter().all(|b| o.contains(b))
    }

    pub fn same_span(&self, o: &SpanSet) -> bool {
        self.dim() == o.dim() && self.is_subspace_of(o)
    }

    pub fn union(&self, o: &SpanSet) -> SpanSet {
        let mut s = self.clone();
        for b in o.basis() {
            s.insert(&b);
        }
        s
    }
}

#[derive(Serialize)]
struct SpanRecord {
    modes: Vec<TrigMode>,
    basis: Vec<Vec<(TrigMode, f64)>>,
    dim: usize,
}

impl Serialize for SpanSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SpanRecord {
            modes: self.modes(),
            basis: self.basis().into_iter().map(|b| b.iter().map(|(m, c)| (*m, *c)).collect()).collect(),
            dim: self.dim(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::Parity;

    fn m(k: i32) -> TrigMode {
        TrigMode::rd(k)
    }

    #[test]
    fn insert_and_membership() {
        let mut s = SpanSet::new();
        let a = CoeffVec::from_pairs([(m(1), 1.0), (m(2), 2.0)]);
        let b = CoeffVec::from_pairs([(m(2), 1.0), (m(3), -1.0)]);
        assert!(s.insert(&a));
        assert!(s.insert(&b));
        assert!(!s.insert(&a));
        let mut c = a.clone();
        c.add_scaled(-3.5, &b);
        assert!(s.contains(&c));
        assert!(!s.contains(&CoeffVec::unit(m(3))));
        assert!(!s.contains(&CoeffVec::unit(m(4))));
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn basis_is_reduced() {
        let mut s = SpanSet::new();
        s.insert(&CoeffVec::from_pairs([(m(1), 1.0), (m(2), 1.0)]));
        s.insert(&CoeffVec::from_pairs([(m(1), 1.0), (m(2), -1.0), (m(3), 0.5)]));
        let piv = s.pivot_modes();
        for b in s.basis() {
            let ones = piv.iter().filter(|p| (b.get(p) - 1.0).abs() < 1e-15).count();
            let zeros = piv.iter().filter(|p| b.get(p) == 0.0).count();
            assert_eq!(ones, 1);
            assert_eq!(zeros, piv.len() - 1);
        }
    }

    #[test]
    fn same_span_ignores_basis_choice() {
        let x = TrigMode::vorticity(1, 0, Parity::Cos);
        let y = TrigMode::vorticity(1, 0, Parity::Sin);
        let a = SpanSet::from_vectors(&[CoeffVec::from_pairs([(x, 1.0), (y, 1.0)]), CoeffVec::from_pairs([(x, 1.0), (y, -1.0)])]);
        let b = SpanSet::from_modes([x, y]);
        assert!(a.same_span(&b));
    }

    #[test]
    fn empty_span() {
        let s = SpanSet::new();
        assert_eq!(s.dim(), 0);
        assert!(s.contains(&CoeffVec::new()));
        assert!(!s.contains(&CoeffVec::unit(m(1))));
    }
}
