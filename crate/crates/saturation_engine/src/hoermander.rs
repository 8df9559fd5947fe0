//! Coverage reports for a controlled set of frequencies.

use mode_algebra::{canonical, family, lattice_modes, ModelKind, Nonlinearity, Parity, SpanSet, TrigMode, WaveVector};
use serde::Serialize;

use crate::chain::iterate_span;
use crate::SaturationError;

#[derive(Clone, Debug, Serialize)]
pub struct HoermanderReport {
    pub model: ModelKind,
    pub seed: Vec<WaveVector>,
    pub cutoff: u32,
    /// First level covering the box, or the last level computed.
    pub depth: usize,
    pub level_dims: Vec<usize>,
    pub covered: SpanSet,
    pub covered_modes: Vec<TrigMode>,
    pub missing: Vec<TrigMode>,
    pub discarded: Vec<TrigMode>,
    pub satisfied_up_to_cutoff: bool,
}

impl HoermanderReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Control directions attached to each controlled frequency.
///
/// Reaction-diffusion: `sin(kx)`. NSE: vorticity `cos`/`sin`. Boussinesq: temperature
/// `cos`/`sin` (the noise enters the temperature equation). Euler: the whole family `F_k`.
pub fn seed_modes(model: ModelKind, z: &[WaveVector]) -> Result<Vec<TrigMode>, SaturationError> {
    let mut out = Vec::new();
    for &k in z {
        let (k, _) = canonical(k)?;
        if k.dim() != model.dim() {
            return Err(mode_algebra::ModeError::Dimension(k.dim()).into());
        }
        match model {
            ModelKind::Rd => out.push(TrigMode::rd(k.coords()[0])),
            ModelKind::Nse2d => {
                let c = k.coords();
                out.extend([Parity::Cos, Parity::Sin].map(|p| TrigMode::vorticity(c[0], c[1], p)));
            }
            ModelKind::Boussinesq => {
                let c = k.coords();
                out.extend([Parity::Cos, Parity::Sin].map(|p| TrigMode::temperature(c[0], c[1], p)));
            }
            ModelKind::Euler3d => out.extend(family(k.padded())),
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Iterates the chain seeded by `z` and lists the box modes it fails to reach.
pub fn check_hoermander(
    z: &[WaveVector],
    nl: &Nonlinearity,
    cutoff: u32,
    max_depth: usize,
) -> Result<HoermanderReport, SaturationError> {
    if z.is_empty() {
        return Err(SaturationError::EmptyControlSet);
    }
    let seed = SpanSet::from_modes(seed_modes(nl.model(), z)?);
    let chain = iterate_span(&seed, nl, max_depth, cutoff)?;
    let lattice = lattice_modes(nl.model(), cutoff);
    let top = chain.top();
    let (covered_modes, missing): (Vec<TrigMode>, Vec<TrigMode>) = lattice.iter().partition(|m| top.contains_mode(**m));
    let depth = chain.levels.iter().position(|l| l.dim() == lattice.len()).unwrap_or(chain.levels.len() - 1);
    let mut seed_list: Vec<WaveVector> = z.iter().filter_map(|k| canonical(*k).ok().map(|c| c.0)).collect();
    seed_list.sort();
    seed_list.dedup();
    Ok(HoermanderReport {
        model: nl.model(),
        seed: seed_list,
        cutoff,
        depth,
        level_dims: chain.dims(),
        covered: top.clone(),
        satisfied_up_to_cutoff: missing.is_empty(),
        covered_modes,
        missing,
        discarded: chain.discarded.into_iter().collect(),
    })
}
