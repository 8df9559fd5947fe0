use galerkin_solvers::{NoisePath, PathKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::StochasticError;

/// Counter-style Gaussian streams: the draws of `(sample, component)` depend only on
/// `(seed, sample, component)`, never on the order in which samples are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BrownianStream {
    pub seed: u64,
}

impl BrownianStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    fn rng(&self, sample: u64, component: u64) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&sample.to_le_bytes());
        key[16..24].copy_from_slice(&component.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }

    /// Brownian path on `[0, t]` sampled every `dt` (the last interval may be shorter).
    pub fn path(&self, dim: usize, dt: f64, t: f64, sample: u64) -> Result<NoisePath, StochasticError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(StochasticError::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(StochasticError::InvalidArgument(format!("horizon must be positive, got {t}")));
        }
        let n = ((t / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let times: Vec<f64> = (0..=n).map(|i| if i == n { t } else { i as f64 * dt }).collect();
        let mut values = vec![vec![0.0; dim]; n + 1];
        for c in 0..dim {
            let mut rng = self.rng(sample, c as u64);
            for i in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                values[i + 1][c] = values[i][c] + (times[i + 1] - times[i]).sqrt() * z;
            }
        }
        Ok(NoisePath::new(PathKind::Brownian, times, values)?)
    }
}

/// One Brownian path of dimension `dim` on `[0, t]`; sample index 0 of the stream `seed`.
pub fn sample_brownian(dim: usize, dt: f64, t: f64, seed: u64) -> Result<NoisePath, StochasticError> {
    BrownianStream::new(seed).path(dim, dt, t, 0)
}
