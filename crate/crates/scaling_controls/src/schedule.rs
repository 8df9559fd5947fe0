use galerkin_solvers::{Solver, SolverError, SpectralField};
use serde::{Deserialize, Serialize};

use crate::ControlError;

/// Piecewise-constant amplitudes over the control basis.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ControlSchedule {
    /// `(duration, amplitudes)`.
    pub segments: Vec<(f64, Vec<f64>)>,
    pub total_time: f64,
}

impl ControlSchedule {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(segments: Vec<(f64, Vec<f64>)>) -> Result<Self, ControlError> {
        let mut s = Self::empty();
        for (d, a) in segments {
            s.push(d, a)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, duration: f64, amplitudes: Vec<f64>) -> Result<(), ControlError> {
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(ControlError::InvalidSchedule(format!("duration {duration} is not positive")));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(ControlError::InvalidSchedule("non-finite amplitude".into()));
        }
        if let Some((_, a)) = self.segments.first() {
            if a.len() != amplitudes.len() {
                return Err(ControlError::InvalidSchedule(format!(
                    "segment has {} amplitudes, expected {}",
                    amplitudes.len(),
                    a.len()
                )));
            }
        }
        self.segments.push((duration, amplitudes));
        self.total_time = self.duration_sum();
        Ok(())
    }

    /// Free flow for `duration`.
    pub fn push_dwell(&mut self, duration: f64, n_controls: usize) -> Result<(), ControlError> {
        self.push(duration, vec![0.0; n_controls])
    }

    pub fn extend(&mut self, o: &ControlSchedule) -> Result<(), ControlError> {
        for (d, a) in &o.segments {
            self.push(*d, a.clone())?;
        }
        Ok(())
    }

    pub fn duration_sum(&self) -> f64 {
        self.segments.iter().map(|s| s.0).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    /// Durations positive, amplitudes finite, `total_time` equal to the sum to `1e-12`.
    pub fn validate(&self, n_controls: usize) -> Result<(), ControlError> {
        for (d, a) in &self.segments {
            if !(*d > 0.0 && d.is_finite()) || a.iter().any(|x| !x.is_finite()) || a.len() != n_controls {
                return Err(ControlError::InvalidSchedule(format!("bad segment ({d}, {a:?})")));
            }
        }
        if (self.duration_sum() - self.total_time).abs() > 1e-12 * self.total_time.max(1.0) {
            return Err(ControlError::InvalidSchedule("total_time disagrees with the segment durations".into()));
        }
        Ok(())
    }

    pub fn flow(&self, solver: &Solver, u0: &SpectralField) -> Result<SpectralField, SolverError> {
        solver.flow_segments(u0, &self.segments)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_segments() {
        let mut s = ControlSchedule::empty();
        assert!(s.push(0.0, vec![1.0]).is_err());
        assert!(s.push(1.0, vec![f64::NAN]).is_err());
        s.push(0.5, vec![1.0]).unwrap();
        assert!(s.push(0.5, vec![1.0, 2.0]).is_err());
        s.push_dwell(0.25, 1).unwrap();
        assert_eq!(s.total_time, 0.75);
        s.validate(1).unwrap();
        assert!(s.validate(2).is_err());
    }
}
