use galerkin_solvers::{Solver, SolverError, SpectralField};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{ControlError, ScalingKind, ScalingSchedule};

/// One initial state and one direction (amplitudes over the control basis).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCase {
    pub u0: SpectralField,
    pub direction: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub lambda: f64,
    /// Sup over the cases; `None` when some case exploded.
    pub error: Option<f64>,
    pub exploded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingTable {
    pub kind: ScalingKind,
    pub t: f64,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log error` against `log lambda` over non-exploded rows.
    pub slope: Option<f64>,
    /// Errors strictly decrease along the non-exploded rows.
    pub monotone: bool,
}

impl ScalingTable {
    /// Two-column `lambda error` lines for plotting; exploded rows are skipped.
    pub fn to_columns(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            if let Some(e) = r.error {
                s.push_str(&format!("{:.16e} {:.16e}\n", r.lambda, e));
            }
        }
        s
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn is_geometric(l: &[f64]) -> bool {
    let r = l[1] / l[0];
    r > 1.0 && l.windows(2).all(|w| ((w[1] / w[0]) / r - 1.0).abs() < 1e-9)
}

/// Sup error of a burst family against its scaling limit along a geometric `lambda` grid.
pub fn verify_scaling(
    solver: &Solver,
    kind: ScalingKind,
    cases: &[ScalingCase],
    t: f64,
    lambdas: &[f64],
) -> Result<ScalingTable, ControlError> {
    if lambdas.len() < 3 || !is_geometric(lambdas) {
        return Err(ControlError::InvalidArgument("lambda grid must be increasing geometric with at least 3 points".into()));
    }
    if kind == ScalingKind::GammaConjugation {
        return Err(ControlError::InvalidArgument("gamma conjugations are swept with gamma_conjugation".into()));
    }
    let rows: Vec<Result<ScalingRow, ControlError>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let mut worst = 0.0f64;
            for c in cases {
                let s = ScalingSchedule::new(kind, c.direction.clone(), t, lambda)?;
                let target = s.limit(solver, &c.u0)?;
                match s.schedule(solver)?.flow(solver, &c.u0) {
                    Ok(u) => worst = worst.max(u.dist(&target)),
                    Err(SolverError::Exploded { .. } | SolverError::NonFinite { .. }) => {
                        return Ok(ScalingRow { lambda, error: None, exploded: true })
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(ScalingRow { lambda, error: Some(worst), exploded: false })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| r.error.filter(|e| *e > 0.0).map(|e| (r.lambda.ln(), e.ln()))).collect();
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let errs: Vec<f64> = rows.iter().filter_map(|r| r.error).collect();
    Ok(ScalingTable {
        kind,
        t,
        slope: fit_slope(&x, &y),
        monotone: errs.windows(2).all(|w| w[1] < w[0]),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x: Vec<f64> = [1.0f64, 10.0, 100.0].iter().map(|v| v.ln()).collect();
        let y: Vec<f64> = [1.0f64, 10.0, 100.0].iter().map(|v| (3.0 * v.powf(-0.5)).ln()).collect();
        assert!((fit_slope(&x, &y).unwrap() + 0.5).abs() < 1e-12);
        assert_eq!(fit_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn grid_must_be_geometric() {
        assert!(is_geometric(&[1e2, 1e3, 1e4]));
        assert!(!is_geometric(&[1e2, 1e3, 2e3]));
    }
}
