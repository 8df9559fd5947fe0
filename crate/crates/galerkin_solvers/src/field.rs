use mode_algebra::{lattice_modes, CoeffVec, Field, ModelKind, TrigMode};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::SolverError;

/// Truncated coefficient state of one model, indexed by [`lattice_modes`].
///
/// Boussinesq states hold vorticity and temperature modes side by side; the
/// mode order interleaves them per frequency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    pub model: ModelKind,
    pub cutoff: u32,
    pub coeffs: Vec<f64>,
}

/// Squared L2 norm of every basis function of a model (all equal).
pub fn mode_weight(model: ModelKind) -> f64 {
    match model {
        ModelKind::Rd => PI / 2.0,
        ModelKind::Nse2d | ModelKind::Boussinesq => 2.0 * PI * PI,
        ModelKind::Euler3d => 4.0 * PI * PI,
    }
}

impl SpectralField {
    pub fn zeros(model: ModelKind, cutoff: u32) -> Self {
        let n = lattice_modes(model, cutoff).len();
        Self { model, cutoff, coeffs: vec![0.0; n] }
    }

    pub fn from_vec(model: ModelKind, cutoff: u32, coeffs: Vec<f64>) -> Result<Self, SolverError> {
        let n = lattice_modes(model, cutoff).len();
        if coeffs.len() != n {
            return Err(SolverError::Length { expected: n, got: coeffs.len() });
        }
        Ok(Self { model, cutoff, coeffs })
    }

    /// Rejects modes outside the truncated basis.
    pub fn from_coeffs(model: ModelKind, cutoff: u32, v: &CoeffVec) -> Result<Self, SolverError> {
        let modes = lattice_modes(model, cutoff);
        let mut coeffs = vec![0.0; modes.len()];
        for (m, &c) in v.iter() {
            let i = modes.binary_search(m).map_err(|_| SolverError::UnknownMode(*m))?;
            coeffs[i] += c;
        }
        Ok(Self { model, cutoff, coeffs })
    }

    pub fn modes(&self) -> Vec<TrigMode> {
        lattice_modes(self.model, self.cutoff)
    }

    pub fn to_coeffs(&self) -> CoeffVec {
        self.modes().into_iter().zip(&self.coeffs).filter(|(_, c)| **c != 0.0).map(|(m, c)| (m, *c)).collect()
    }

    pub fn get(&self, m: &TrigMode) -> f64 {
        self.modes().binary_search(m).map(|i| self.coeffs[i]).unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn same_space(&self, o: &SpectralField) -> bool {
        self.model == o.model && self.cutoff == o.cutoff && self.coeffs.len() == o.coeffs.len()
    }

    pub fn l2_norm(&self) -> f64 {
        (mode_weight(self.model) * self.coeffs.iter().map(|c| c * c).sum::<f64>()).sqrt()
    }

    pub fn l2_dot(&self, o: &SpectralField) -> f64 {
        mode_weight(self.model) * self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `(sum w |k|^{2m} c^2)^{1/2}`; the fluid fields are mean free so this is a norm.
    pub fn hm_norm(&self, m: u32) -> f64 {
        let w = mode_weight(self.model);
        let s: f64 = self
            .modes()
            .iter()
            .zip(&self.coeffs)
            .map(|(md, c)| (md.k.norm2() as f64).powi(m as i32) * c * c)
            .sum();
        (w * s).sqrt()
    }

    /// L2 norm of one component (vorticity or temperature for Boussinesq).
    pub fn component_norm(&self, field: Field) -> f64 {
        let w = mode_weight(self.model);
        let s: f64 = self.modes().iter().zip(&self.coeffs).filter(|(m, _)| m.field == field).map(|(_, c)| c * c).sum();
        (w * s).sqrt()
    }

    /// Copy with every mode of other components zeroed.
    pub fn component(&self, field: Field) -> SpectralField {
        let coeffs = self.modes().iter().zip(&self.coeffs).map(|(m, c)| if m.field == field { *c } else { 0.0 }).collect();
        Self { model: self.model, cutoff: self.cutoff, coeffs }
    }

    pub fn add_scaled(&mut self, s: f64, o: &SpectralField) {
        assert!(self.same_space(o), "fields live on different spaces");
        for (a, b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += s * b;
        }
    }

    pub fn scaled(&self, s: f64) -> SpectralField {
        Self { model: self.model, cutoff: self.cutoff, coeffs: self.coeffs.iter().map(|c| s * c).collect() }
    }

    /// `self - o`.
    pub fn sub(&self, o: &SpectralField) -> SpectralField {
        let mut r = self.clone();
        r.add_scaled(-1.0, o);
        r
    }

    pub fn dist(&self, o: &SpectralField) -> f64 {
        self.sub(o).l2_norm()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mode_algebra::Parity;

    #[test]
    fn round_trip_through_coeff_vec() {
        let v = CoeffVec::from_pairs([
            (TrigMode::temperature(1, 0, Parity::Cos), 1.5),
            (TrigMode::vorticity(0, 2, Parity::Sin), -0.25),
        ]);
        let f = SpectralField::from_coeffs(ModelKind::Boussinesq, 2, &v).unwrap();
        assert_eq!(f.to_coeffs(), v);
        assert_eq!(f.component_norm(Field::Temperature), (2.0 * PI * PI).sqrt() * 1.5);
    }

    #[test]
    fn rejects_modes_outside_the_box() {
        let v = CoeffVec::unit(TrigMode::rd(9));
        assert_eq!(
            SpectralField::from_coeffs(ModelKind::Rd, 8, &v),
            Err(SolverError::UnknownMode(TrigMode::rd(9)))
        );
    }

    #[test]
    fn sobolev_norm_weights_frequencies() {
        let v = CoeffVec::unit(TrigMode::vorticity(1, 2, Parity::Cos));
        let f = SpectralField::from_coeffs(ModelKind::Nse2d, 2, &v).unwrap();
        assert!((f.hm_norm(2) - 5.0 * f.l2_norm()).abs() < 1e-12);
        assert_eq!(f.hm_norm(0), f.l2_norm());
    }
}
