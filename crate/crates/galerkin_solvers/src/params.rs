use mode_algebra::{lattice_modes, within_cutoff, Field, ModelKind, Nonlinearity, Parity, TrigMode, WaveVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Integrator settings. Part of the parameter hash so replays are exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Largest step; segments are split into `max(min_steps, ceil(len/dt))` equal steps.
    pub dt: f64,
    pub min_steps: usize,
    /// Integrator tolerance that "within tolerance" contracts are measured against.
    pub tol: f64,
    /// Euler only: steps are capped by `cfl / ||grad u||_inf`.
    pub cfl: f64,
    /// Euler only: `||grad u||_inf` above this trips the blow-up guard.
    pub guard: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { dt: 1e-3, min_steps: 1, tol: 1e-9, cfl: 0.5, guard: 1e6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceTerm {
    pub mode: TrigMode,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub model: ModelKind,
    pub cutoff: u32,
    /// Viscosity (NSE, Boussinesq; zero for Euler).
    #[serde(default)]
    pub nu: f64,
    /// Diffusivity (reaction-diffusion, Boussinesq temperature).
    #[serde(default)]
    pub kappa: f64,
    /// Buoyancy coupling (Boussinesq).
    #[serde(default)]
    pub gravity: f64,
    /// `b_0, ..., b_{2n-1}` of the reaction term `f(u) = sum b_k u^k`.
    #[serde(default)]
    pub rd_coeffs: Vec<f64>,
    #[serde(default)]
    pub force: Vec<ForceTerm>,
    pub control_basis: Vec<TrigMode>,
    #[serde(default)]
    pub solver: SolverOptions,
}

fn modes_at(ks: &[WaveVector], model: ModelKind) -> Vec<TrigMode> {
    let mut out = Vec::new();
    for k in ks {
        let c = k.coords();
        match model {
            ModelKind::Rd => out.push(TrigMode::rd(c[0])),
            ModelKind::Nse2d => out.extend([Parity::Cos, Parity::Sin].map(|p| TrigMode::vorticity(c[0], c[1], p))),
            ModelKind::Boussinesq => out.extend([Parity::Cos, Parity::Sin].map(|p| TrigMode::temperature(c[0], c[1], p))),
            ModelKind::Euler3d => out.extend(mode_algebra::family(k.padded())),
        }
    }
    out
}

impl ModelParams {
    /// Reaction-diffusion `u_t = kappa u_xx + f(u) + sigma.V'` with controls `sin(kx)`, `k in z`.
    pub fn rd(cutoff: u32, kappa: f64, rd_coeffs: Vec<f64>, z: &[i32]) -> Self {
        let ks: Vec<WaveVector> = z.iter().map(|&k| WaveVector::d1(k)).collect();
        Self {
            model: ModelKind::Rd,
            cutoff,
            nu: 0.0,
            kappa,
            gravity: 0.0,
            rd_coeffs,
            force: Vec::new(),
            control_basis: modes_at(&ks, ModelKind::Rd),
            solver: SolverOptions::default(),
        }
    }

    /// Vorticity NSE with `cos`/`sin` controls on each `k in z`.
    pub fn nse2d(cutoff: u32, nu: f64, z: &[[i32; 2]]) -> Self {
        let ks: Vec<WaveVector> = z.iter().map(|k| WaveVector::d2(k[0], k[1])).collect();
        Self {
            model: ModelKind::Nse2d,
            cutoff,
            nu,
            kappa: 0.0,
            gravity: 0.0,
            rd_coeffs: Vec::new(),
            force: Vec::new(),
            control_basis: modes_at(&ks, ModelKind::Nse2d),
            solver: SolverOptions::default(),
        }
    }

    /// Boussinesq with temperature controls on each `k in z`.
    pub fn boussinesq(cutoff: u32, nu: f64, kappa: f64, gravity: f64, z: &[[i32; 2]]) -> Self {
        let ks: Vec<WaveVector> = z.iter().map(|k| WaveVector::d2(k[0], k[1])).collect();
        Self {
            model: ModelKind::Boussinesq,
            cutoff,
            nu,
            kappa,
            gravity,
            rd_coeffs: Vec::new(),
            force: Vec::new(),
            control_basis: modes_at(&ks, ModelKind::Boussinesq),
            solver: SolverOptions::default(),
        }
    }

    /// Euler with the full families `F_k`, `k in z`, as controls.
    pub fn euler3d(cutoff: u32, z: &[[i32; 3]]) -> Self {
        let ks: Vec<WaveVector> = z.iter().map(|k| WaveVector::new(k)).collect();
        Self {
            model: ModelKind::Euler3d,
            cutoff,
            nu: 0.0,
            kappa: 0.0,
            gravity: 0.0,
            rd_coeffs: Vec::new(),
            force: Vec::new(),
            control_basis: modes_at(&ks, ModelKind::Euler3d),
            solver: SolverOptions::default(),
        }
    }

    pub fn with_force(mut self, force: Vec<(TrigMode, f64)>) -> Self {
        self.force = force.into_iter().map(|(mode, value)| ForceTerm { mode, value }).collect();
        self
    }

    pub fn with_solver(mut self, solver: SolverOptions) -> Self {
        self.solver = solver;
        self
    }

    /// Every violated constraint, as `"field: reason"`.
    pub fn validate(&self) -> Result<(), Vec<String>> {
        let mut errs = Vec::new();
        let m = self.model;
        if self.cutoff < 1 {
            errs.push("cutoff: must be ≥ 1".to_string());
        }
        for (name, v) in [("nu", self.nu), ("kappa", self.kappa), ("gravity", self.gravity)] {
            if !(v >= 0.0 && v.is_finite()) {
                errs.push(format!("{name}: must be finite and ≥ 0"));
            }
        }
        match m {
            ModelKind::Rd => {
                let d = self.rd_coeffs.len();
                if self.kappa <= 0.0 {
                    errs.push("kappa: must be > 0 for reaction-diffusion".into());
                }
                if d > 2 {
                    if d % 2 != 0 {
                        errs.push(format!("rd_coeffs: degree {} is even; the leading term must have odd degree", d - 1));
                    } else if !(self.rd_coeffs[d - 1] < 0.0) {
                        errs.push("rd_coeffs: leading coefficient must be strictly negative".into());
                    }
                }
                if self.rd_coeffs.iter().any(|b| !b.is_finite()) {
                    errs.push("rd_coeffs: must be finite".into());
                }
            }
            ModelKind::Nse2d => {}
            ModelKind::Boussinesq => {}
            ModelKind::Euler3d => {
                if self.nu != 0.0 {
                    errs.push("nu: must be 0 for Euler".into());
                }
            }
        }
        let allowed = |mode: &TrigMode, control: bool| -> bool {
            mode.validate().is_ok()
                && mode.k.dim() == m.dim()
                && match m {
                    ModelKind::Rd => mode.field == Field::RdScalar,
                    ModelKind::Nse2d => mode.field == Field::Vorticity,
                    ModelKind::Boussinesq => {
                        mode.field == Field::Temperature || (!control && mode.field == Field::Vorticity)
                    }
                    ModelKind::Euler3d => mode.field == Field::Velocity,
                }
        };
        for (i, s) in self.control_basis.iter().enumerate() {
            if !allowed(s, true) {
                errs.push(format!("control_basis[{i}]: {s} is not a control direction of this model"));
            } else if !within_cutoff(s, self.cutoff) {
                errs.push(format!("control_basis[{i}]: {s} lies outside the cutoff"));
            }
        }
        for (i, f) in self.force.iter().enumerate() {
            if !allowed(&f.mode, false) {
                errs.push(format!("force[{i}]: {} is not a mode of this model", f.mode));
            } else if !within_cutoff(&f.mode, self.cutoff) {
                errs.push(format!("force[{i}]: {} lies outside the cutoff", f.mode));
            }
            if !f.value.is_finite() {
                errs.push(format!("force[{i}]: value must be finite"));
            }
        }
        let s = &self.solver;
        if !(s.dt > 0.0 && s.dt.is_finite()) {
            errs.push("solver.dt: must be > 0".into());
        }
        if s.min_steps == 0 {
            errs.push("solver.min_steps: must be ≥ 1".into());
        }
        if !(s.tol > 0.0) {
            errs.push("solver.tol: must be > 0".into());
        }
        if !(s.cfl > 0.0) {
            errs.push("solver.cfl: must be > 0".into());
        }
        if !(s.guard > 0.0) {
            errs.push("solver.guard: must be > 0".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Galerkin basis, in mode order.
    pub fn modes(&self) -> Vec<TrigMode> {
        lattice_modes(self.model, self.cutoff)
    }

    /// Leading multilinear part, in the convention `du/dt + Lu + N(u) = ...`.
    ///
    /// Linear reaction terms have no nonlinearity; `None` is returned.
    pub fn nonlinearity(&self) -> Option<Nonlinearity> {
        match self.model {
            ModelKind::Rd => {
                let d = self.rd_coeffs.len();
                if d <= 2 {
                    None
                } else {
                    Nonlinearity::rd(d - 1, self.rd_coeffs[d - 1]).ok()
                }
            }
            ModelKind::Nse2d => Some(Nonlinearity::Nse2d),
            ModelKind::Boussinesq => Some(Nonlinearity::Boussinesq),
            ModelKind::Euler3d => Some(Nonlinearity::Euler3d),
        }
    }

    /// SHA-256 of the canonical JSON encoding, lower-case hex.
    pub fn params_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("params serialize");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        assert!(ModelParams::rd(16, 1.0, vec![0.0, 1.0, 0.0, -1.0], &[1, 2]).validate().is_ok());
        assert!(ModelParams::nse2d(8, 0.1, &[[1, 0], [1, 1]]).validate().is_ok());
        assert!(ModelParams::boussinesq(6, 0.1, 0.1, 1.0, &[[1, 0], [0, 1]]).validate().is_ok());
        assert!(ModelParams::euler3d(4, &[[1, 0, 0], [0, 1, 0], [0, 0, 1]]).validate().is_ok());
    }

    #[test]
    fn all_errors_reported() {
        let mut p = ModelParams::rd(4, 0.0, vec![0.0, 1.0, 0.0, 1.0], &[1, 5]);
        p.solver.dt = 0.0;
        let errs = p.validate().unwrap_err();
        assert!(errs.iter().any(|e| e.starts_with("kappa")));
        assert!(errs.iter().any(|e| e.starts_with("rd_coeffs")));
        assert!(errs.iter().any(|e| e.starts_with("control_basis[1]")));
        assert!(errs.iter().any(|e| e.starts_with("solver.dt")));
    }

    #[test]
    fn euler_requires_zero_viscosity() {
        let mut p = ModelParams::euler3d(2, &[[1, 0, 0]]);
        p.nu = 0.1;
        assert!(p.validate().is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let p = ModelParams::nse2d(4, 0.1, &[[1, 0]]);
        assert_eq!(p.params_hash(), p.clone().params_hash());
        assert_eq!(p.params_hash().len(), 64);
        let mut q = p.clone();
        q.nu = 0.2;
        assert_ne!(p.params_hash(), q.params_hash());
    }

    #[test]
    fn json_round_trip() {
        let p = ModelParams::boussinesq(3, 0.1, 0.2, 1.0, &[[1, 0]])
            .with_force(vec![(TrigMode::temperature(1, 1, Parity::Cos), 0.5)]);
        let back: ModelParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, back);
    }
}
