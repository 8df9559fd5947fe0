//! Exact action of the four model nonlinearities (cubic-type reaction, 2D vorticity
//! transport, Boussinesq transport, 3D Euler transport) on trigonometric basis directions.
//!
//! Everything here is a pure function of its inputs. Coefficients are `f64`; spans are
//! reduced with the pivot tolerance [`span::PIVOT_TOL`].

pub mod coeff;
pub mod euler;
pub mod fluid2d;
pub mod mode;
pub mod rd;
pub mod span;
pub mod wave;

pub use coeff::CoeffVec;
pub use euler::{euler_bilinear, euler_bilinear_vec, euler_pair, family};
pub use fluid2d::{
    boussinesq_bilinear_vec, boussinesq_theta_bracket, boussinesq_vorticity_bracket, dx, nse_bilinear, nse_bilinear_vec,
    theta_bracket_vec, transport, vorticity_bracket_vec,
};
pub use mode::{Field, Parity, PolarizationFrame, TrigMode};
pub use rd::{rd_multilinear, rd_product_span, sine_product};
pub use span::{SpanSet, PIVOT_TOL};
pub use wave::{canonical, WaveVector};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModeError {
    #[error("zero wave vector is not a valid mode")]
    ZeroWaveVector,
    #[error("wave vector {0} is not in canonical form")]
    NotCanonical(WaveVector),
    #[error("wave vectors must have dimension 1, 2 or 3, got {0}")]
    Dimension(usize),
    #[error("{0}")]
    BadMode(String),
    #[error("reaction term must have odd degree, got {0}")]
    EvenDegree(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Rd,
    Nse2d,
    Boussinesq,
    Euler3d,
}

impl ModelKind {
    pub fn dim(self) -> usize {
        match self {
            ModelKind::Rd => 1,
            ModelKind::Nse2d | ModelKind::Boussinesq => 2,
            ModelKind::Euler3d => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Rd => "rd",
            ModelKind::Nse2d => "nse2d",
            ModelKind::Boussinesq => "boussinesq",
            ModelKind::Euler3d => "euler3d",
        }
    }
}

/// All canonical wave vectors of dimension `d` with every coordinate in `[-n, n]`.
pub fn canonical_box(d: usize, n: u32) -> Vec<WaveVector> {
    let n = n as i32;
    let mut out = Vec::new();
    match d {
        1 => out.extend((1..=n).map(WaveVector::d1)),
        2 => {
            for a in -n..=n {
                for b in -n..=n {
                    let k = WaveVector::d2(a, b);
                    if k.is_canonical() {
                        out.push(k);
                    }
                }
            }
        }
        3 => {
            for a in -n..=n {
                for b in -n..=n {
                    for c in -n..=n {
                        let k = WaveVector::d3(a, b, c);
                        if k.is_canonical() {
                            out.push(k);
                        }
                    }
                }
            }
        }
        _ => panic!("unsupported dimension {d}"),
    }
    out.sort_by_key(|k| (k.norm2(), *k));
    out
}

/// Every basis mode of `model` inside the cutoff box, in mode order.
pub fn lattice_modes(model: ModelKind, cutoff: u32) -> Vec<TrigMode> {
    let mut out = Vec::new();
    for k in canonical_box(model.dim(), cutoff) {
        match model {
            ModelKind::Rd => out.push(TrigMode { k, parity: Parity::Sin, field: Field::RdScalar, polarization: None }),
            ModelKind::Nse2d | ModelKind::Boussinesq => {
                let fields: &[Field] =
                    if model == ModelKind::Nse2d { &[Field::Vorticity] } else { &[Field::Vorticity, Field::Temperature] };
                for &field in fields {
                    for parity in [Parity::Cos, Parity::Sin] {
                        out.push(TrigMode { k, parity, field, polarization: None });
                    }
                }
            }
            ModelKind::Euler3d => {
                for l in 0..2u8 {
                    for parity in [Parity::Cos, Parity::Sin] {
                        out.push(TrigMode { k, parity, field: Field::Velocity, polarization: Some(l) });
                    }
                }
            }
        }
    }
    out.sort();
    out
}

pub fn within_cutoff(m: &TrigMode, cutoff: u32) -> bool {
    m.k.linf() <= cutoff
}

/// Leading multilinear part `N_M` of a model nonlinearity, in the sign convention
/// `du/dt + Lu + N(u) = ...` (so for reaction-diffusion `N_M = -b_{2n-1} v^{2n-1}`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Nonlinearity {
    Rd { degree: usize, lead: f64 },
    Nse2d,
    Boussinesq,
    Euler3d,
}

impl Nonlinearity {
    pub fn rd(degree: usize, lead: f64) -> Result<Self, ModeError> {
        if degree % 2 == 0 {
            return Err(ModeError::EvenDegree(degree));
        }
        Ok(Nonlinearity::Rd { degree, lead })
    }

    pub fn model(&self) -> ModelKind {
        match self {
            Nonlinearity::Rd { .. } => ModelKind::Rd,
            Nonlinearity::Nse2d => ModelKind::Nse2d,
            Nonlinearity::Boussinesq => ModelKind::Boussinesq,
            Nonlinearity::Euler3d => ModelKind::Euler3d,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            Nonlinearity::Rd { degree, .. } => *degree,
            _ => 2,
        }
    }

    /// Symmetric multilinear form `N_M(h_1, ..., h_M)`; `hs.len()` must equal the degree.
    pub fn multilinear(&self, hs: &[&CoeffVec]) -> CoeffVec {
        assert_eq!(hs.len(), self.degree(), "wrong number of arguments");
        match self {
            Nonlinearity::Rd { lead, .. } => rd_multilinear(-lead, hs),
            Nonlinearity::Nse2d => nse_bilinear_vec(hs[0], hs[1]),
            Nonlinearity::Boussinesq => boussinesq_bilinear_vec(hs[0], hs[1]),
            // P(f.grad g) symmetrized is half of B(f, g)
            Nonlinearity::Euler3d => euler_bilinear_vec(hs[0], hs[1]).scaled(0.5),
        }
    }

    /// `N_M(g) = N_M(g, ..., g)`.
    pub fn diagonal(&self, g: &CoeffVec) -> CoeffVec {
        let hs = vec![g; self.degree()];
        self.multilinear(&hs)
    }
}

/// `span{ N_M(g, ..., g, h) }`, by exact multilinear expansion.
pub fn polarize(nl: &Nonlinearity, g: &CoeffVec, h: &CoeffVec) -> SpanSet {
    let mut hs = vec![g; nl.degree() - 1];
    hs.push(h);
    let mut s = SpanSet::new();
    s.insert(&nl.multilinear(&hs));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice_modes(ModelKind::Rd, 32).len(), 32);
        // (2N+1)^2 - 1 nonzero vectors, half canonical, two parities
        assert_eq!(lattice_modes(ModelKind::Nse2d, 8).len(), 288);
        assert_eq!(lattice_modes(ModelKind::Boussinesq, 6).len(), 2 * 168);
        assert_eq!(lattice_modes(ModelKind::Euler3d, 2).len(), 4 * 62);
    }

    #[test]
    fn polarize_diagonal_case() {
        let nl = Nonlinearity::rd(3, -1.0).unwrap();
        let g = CoeffVec::from_pairs([(TrigMode::rd(1), 1.0), (TrigMode::rd(2), 0.5)]);
        let s = polarize(&nl, &g, &g);
        assert!(s.contains(&nl.diagonal(&g)));
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn polarize_cross_checks_product_span() {
        let nl = Nonlinearity::rd(3, -1.0).unwrap();
        let s = polarize(&nl, &CoeffVec::unit(TrigMode::rd(1)), &CoeffVec::unit(TrigMode::rd(2)));
        let full = rd_product_span(&[TrigMode::rd(1), TrigMode::rd(2)], 3).unwrap();
        assert!(s.is_subspace_of(&full));
        let expected = CoeffVec::from_pairs([(TrigMode::rd(2), 0.5), (TrigMode::rd(4), -0.25)]);
        assert!(s.contains(&expected));
    }

    #[test]
    fn polarize_bilinear_is_symmetrized() {
        let nl = Nonlinearity::Nse2d;
        let a = CoeffVec::unit(TrigMode::vorticity(1, 0, Parity::Sin));
        let b = CoeffVec::unit(TrigMode::vorticity(1, 1, Parity::Cos));
        assert!(polarize(&nl, &a, &b).same_span(&polarize(&nl, &b, &a)));
        assert!(polarize(&nl, &a, &b).contains(&nse_bilinear_vec(&a, &b)));
    }

    #[test]
    fn boussinesq_transport_splits_fields() {
        let xi = CoeffVec::unit(TrigMode::vorticity(1, 0, Parity::Sin));
        let th = CoeffVec::unit(TrigMode::temperature(0, 1, Parity::Cos));
        let mut u = xi.clone();
        u.add_scaled(1.0, &th);
        let v = Nonlinearity::Boussinesq.diagonal(&u);
        let (vx, vt) = v.partition(|m| m.field == Field::Vorticity);
        assert!(vx.is_empty());
        let mut d = vt;
        d.add_scaled(-1.0, &transport(&xi, &th, Field::Temperature));
        assert!(d.norm_inf() < 1e-14);
    }
}
