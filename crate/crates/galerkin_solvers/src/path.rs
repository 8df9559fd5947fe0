use serde::{Deserialize, Serialize};

use crate::SolverError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Brownian,
    CameronMartin,
    PiecewiseLinearControl,
}

/// Continuous path `V: [0, T] -> R^d` with `V(0) = 0`, linear between knots.
///
/// On each knot interval the control amplitude is the slope of `V`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    pub kind: PathKind,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// Knots closer than this (relative to the horizon) are treated as equal.
const KNOT_EPS: f64 = 1e-12;

impl NoisePath {
    pub fn new(kind: PathKind, times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self, SolverError> {
        let bad = |s: &str| Err(SolverError::BadPath(s.to_string()));
        if times.is_empty() || times.len() != values.len() {
            return bad("times and values must be non-empty and of equal length");
        }
        if times[0] != 0.0 {
            return bad("paths start at time 0");
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("knot times must be strictly increasing");
        }
        let d = values[0].len();
        if values.iter().any(|v| v.len() != d) {
            return bad("all values must have the same dimension");
        }
        if values[0].iter().any(|x| *x != 0.0) {
            return bad("V(0) must vanish");
        }
        if values.iter().flatten().any(|x| !x.is_finite()) {
            return bad("values must be finite");
        }
        Ok(Self { kind, times, values })
    }

    /// `V = 0` on `[0, t]`.
    pub fn zero(dim: usize, t: f64) -> Self {
        Self::linear(&vec![0.0; dim], t)
    }

    /// `V(s) = s alpha` on `[0, t]`.
    pub fn linear(alpha: &[f64], t: f64) -> Self {
        let end = alpha.iter().map(|a| a * t).collect();
        Self { kind: PathKind::PiecewiseLinearControl, times: vec![0.0, t], values: vec![vec![0.0; alpha.len()], end] }
    }

    /// Path whose slope is `amp` for `dur` on consecutive intervals.
    pub fn from_segments(segments: &[(f64, Vec<f64>)]) -> Result<Self, SolverError> {
        let d = segments.first().map(|s| s.1.len()).unwrap_or(0);
        let mut times = vec![0.0];
        let mut values = vec![vec![0.0; d]];
        let mut t = 0.0;
        for (dur, amp) in segments {
            if !(*dur > 0.0) || amp.len() != d {
                return Err(SolverError::BadPath("segments need positive durations and equal dimensions".into()));
            }
            t += dur;
            let prev = values.last().unwrap();
            let v: Vec<f64> = prev.iter().zip(amp).map(|(p, a)| p + a * dur).collect();
            times.push(t);
            values.push(v);
        }
        Self::new(PathKind::PiecewiseLinearControl, times, values)
    }

    /// Uniform grid `0, dt, 2 dt, ...`.
    pub fn uniform(kind: PathKind, dt: f64, values: Vec<Vec<f64>>) -> Result<Self, SolverError> {
        let times = (0..values.len()).map(|i| i as f64 * dt).collect();
        Self::new(kind, times, values)
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    fn interval(&self, t: f64) -> usize {
        // index j with times[j] <= t < times[j+1], clamped to the last interval
        let j = self.times.partition_point(|&x| x <= t);
        j.saturating_sub(1).min(self.times.len().saturating_sub(2))
    }

    pub fn value_at(&self, t: f64) -> Vec<f64> {
        if self.times.len() == 1 {
            return self.values[0].clone();
        }
        let j = self.interval(t);
        let (t0, t1) = (self.times[j], self.times[j + 1]);
        let w = (t - t0) / (t1 - t0);
        self.values[j].iter().zip(&self.values[j + 1]).map(|(a, b)| a + w * (b - a)).collect()
    }

    /// Slope on the knot interval containing `t`.
    pub fn slope_at(&self, t: f64) -> Vec<f64> {
        if self.times.len() == 1 {
            return vec![0.0; self.dim()];
        }
        let j = self.interval(t);
        self.slope(j)
    }

    fn slope(&self, j: usize) -> Vec<f64> {
        let len = self.times[j + 1] - self.times[j];
        self.values[j].iter().zip(&self.values[j + 1]).map(|(a, b)| (b - a) / len).collect()
    }

    /// `(duration, slope)` pieces covering `[0, t]`.
    pub fn segments_until(&self, t: f64) -> Result<Vec<(f64, Vec<f64>)>, SolverError> {
        let end = self.end_time();
        if t > end * (1.0 + KNOT_EPS) + KNOT_EPS {
            return Err(SolverError::PathTooShort { needed: t, have: end });
        }
        let mut out = Vec::new();
        for j in 0..self.times.len().saturating_sub(1) {
            let (a, b) = (self.times[j], self.times[j + 1].min(t));
            if b - a > KNOT_EPS * t.max(1.0) {
                out.push((b - a, self.slope(j)));
            }
            if self.times[j + 1] >= t {
                break;
            }
        }
        Ok(out)
    }

    /// `theta_s V (r) = V(s + r) - V(s)` on `[0, T - s]`.
    pub fn shift(&self, s: f64) -> Result<NoisePath, SolverError> {
        let end = self.end_time();
        if !(0.0..end).contains(&s) {
            return Err(SolverError::PathTooShort { needed: s, have: end });
        }
        let vs = self.value_at(s);
        let mut times = vec![0.0];
        let mut values = vec![vec![0.0; self.dim()]];
        for (t, v) in self.times.iter().zip(&self.values) {
            if *t - s > KNOT_EPS * end.max(1.0) {
                times.push(t - s);
                values.push(v.iter().zip(&vs).map(|(a, b)| a - b).collect());
            }
        }
        Self::new(self.kind, times, values)
    }

    /// Restriction to `[0, t]`.
    pub fn truncate(&self, t: f64) -> Result<NoisePath, SolverError> {
        let segs = self.segments_until(t)?;
        let mut p = Self::from_segments(&segs)?;
        p.kind = self.kind;
        Ok(p)
    }

    /// `V + eps W` on the union of both knot sets (common horizon).
    pub fn add_scaled(&self, eps: f64, w: &NoisePath) -> Result<NoisePath, SolverError> {
        if w.dim() != self.dim() {
            return Err(SolverError::BadPath("paths have different dimensions".into()));
        }
        let end = self.end_time().min(w.end_time());
        let mut times: Vec<f64> = self.times.iter().chain(&w.times).copied().filter(|t| *t <= end).collect();
        times.sort_by(f64::total_cmp);
        times.dedup_by(|a, b| (*a - *b).abs() <= KNOT_EPS * end.max(1.0));
        let values = times
            .iter()
            .map(|&t| self.value_at(t).iter().zip(w.value_at(t)).map(|(a, b)| a + eps * b).collect())
            .collect();
        Self::new(self.kind, times, values)
    }

    /// Sup-norm distance sampled at the union of knots (exact for piecewise-linear paths).
    pub fn sup_distance(&self, w: &NoisePath) -> f64 {
        let end = self.end_time().min(w.end_time());
        self.times
            .iter()
            .chain(&w.times)
            .filter(|t| **t <= end)
            .map(|&t| {
                self.value_at(t).iter().zip(w.value_at(t)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segments_reproduce_slopes() {
        let p = NoisePath::from_segments(&[(0.5, vec![1.0, -2.0]), (0.25, vec![4.0, 0.0])]).unwrap();
        assert_eq!(p.end_time(), 0.75);
        assert_eq!(p.value_at(0.75), vec![1.5, -1.0]);
        let s = p.segments_until(0.6).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s[1].0 - 0.1).abs() < 1e-15);
        assert_eq!(s[1].1, vec![4.0, 0.0]);
    }

    #[test]
    fn shift_subtracts_the_base_value() {
        let p = NoisePath::from_segments(&[(1.0, vec![2.0]), (1.0, vec![-1.0])]).unwrap();
        let q = p.shift(0.5).unwrap();
        assert_eq!(q.values[0], vec![0.0]);
        assert!((q.value_at(1.5)[0] - (p.value_at(2.0)[0] - p.value_at(0.5)[0])).abs() < 1e-15);
        assert_eq!(q.end_time(), 1.5);
    }

    #[test]
    fn rejects_nonzero_start_and_unsorted_times() {
        assert!(NoisePath::new(PathKind::Brownian, vec![0.0, 1.0], vec![vec![1.0], vec![0.0]]).is_err());
        assert!(NoisePath::new(PathKind::Brownian, vec![0.0, 0.0], vec![vec![0.0], vec![0.0]]).is_err());
        assert!(NoisePath::linear(&[1.0], 1.0).segments_until(2.0).is_err());
    }

    #[test]
    fn sum_of_paths_uses_both_grids() {
        let a = NoisePath::linear(&[1.0], 1.0);
        let b = NoisePath::from_segments(&[(0.5, vec![1.0]), (0.5, vec![-1.0])]).unwrap();
        let c = a.add_scaled(2.0, &b).unwrap();
        assert_eq!(c.times, vec![0.0, 0.5, 1.0]);
        assert_eq!(c.value_at(0.5), vec![1.5]);
        assert!((a.sup_distance(&c) - 1.0).abs() < 1e-15);
    }
}
