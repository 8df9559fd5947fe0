//! Monte Carlo estimate of `P_t(u0, {u : ||pi(u) - pi(v)|| < delta})`.

use galerkin_solvers::{mode_weight, Solver, SpectralField};
use mode_algebra::TrigMode;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::BrownianStream;
use crate::gramian::mode_indices;
use crate::StochasticError;

const BINS: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub mode: TrigMode,
    /// `BINS + 1` edges spanning the observed range.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub t: f64,
    pub delta: f64,
    pub n_samples: usize,
    pub hits: usize,
    /// Samples whose solve failed; counted as misses.
    pub exploded: usize,
    pub frequency: f64,
    /// Distance of each sample's projection to `pi(v)`, in sample order.
    pub distances: Vec<f64>,
    pub histograms: Vec<Histogram>,
}

impl SupportReport {
    pub fn histogram_csv(&self) -> String {
        let mut s = String::from("mode,lower,upper,count\n");
        for h in &self.histograms {
            for (b, c) in h.counts.iter().enumerate() {
                s.push_str(&format!("\"{}\",{:.16e},{:.16e},{c}\n", h.mode, h.edges[b], h.edges[b + 1]));
            }
        }
        s
    }
}

/// Runs `n_samples` Brownian paths (sampled every `noise_dt`) from `u0` to time `t` and
/// counts endpoints whose projection on `modes` lies within `delta` of that of `v`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_support(
    solver: &Solver,
    u0: &SpectralField,
    t: f64,
    v: &SpectralField,
    modes: &[TrigMode],
    delta: f64,
    n_samples: usize,
    seed: u64,
    noise_dt: f64,
) -> Result<SupportReport, StochasticError> {
    if !(delta >= 0.0) {
        return Err(StochasticError::InvalidArgument(format!("delta must be non-negative, got {delta}")));
    }
    if !v.same_space(u0) {
        return Err(StochasticError::InvalidArgument("target lives on a different space".into()));
    }
    let idx = mode_indices(solver, modes)?;
    let stream = BrownianStream::new(seed);
    let sw = mode_weight(solver.params().model).sqrt();
    let runs: Vec<Result<Option<Vec<f64>>, StochasticError>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|k| {
            let path = stream.path(solver.n_controls(), noise_dt, t, k)?;
            Ok(solver.flow_path(u0, &path, t).ok().map(|u| idx.iter().map(|&i| u.coeffs[i]).collect()))
        })
        .collect();
    let mut projections = Vec::with_capacity(n_samples);
    for r in runs {
        projections.push(r?);
    }
    let target: Vec<f64> = idx.iter().map(|&i| v.coeffs[i]).collect();
    let distances: Vec<f64> = projections
        .iter()
        .map(|p| match p {
            Some(p) => sw * p.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt(),
            None => f64::INFINITY,
        })
        .collect();
    let exploded = projections.iter().filter(|p| p.is_none()).count();
    let hits = projections.iter().zip(&distances).filter(|(p, d)| p.is_some() && **d <= delta).count();
    let histograms = modes
        .iter()
        .enumerate()
        .map(|(c, m)| {
            let xs: Vec<f64> = projections.iter().flatten().map(|p| p[c]).collect();
            histogram(*m, &xs)
        })
        .collect();
    Ok(SupportReport {
        t,
        delta,
        n_samples,
        hits,
        exploded,
        frequency: if n_samples == 0 { 0.0 } else { hits as f64 / n_samples as f64 },
        distances,
        histograms,
    })
}

fn histogram(mode: TrigMode, xs: &[f64]) -> Histogram {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if xs.is_empty() {
        return Histogram { mode, edges: Vec::new(), counts: Vec::new() };
    }
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let width = (hi - lo) / BINS as f64;
    let edges = (0..=BINS).map(|b| if b == BINS { hi } else { lo + b as f64 * width }).collect();
    let mut counts = vec![0u64; BINS];
    for x in xs {
        let b = (((x - lo) / width) as usize).min(BINS - 1);
        counts[b] += 1;
    }
    Histogram { mode, edges, counts }
}
