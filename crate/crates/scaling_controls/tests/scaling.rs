use galerkin_solvers::{ModelParams, Solver, SpectralField};
use mode_algebra::{ModelKind, Parity, WaveVector};
use scaling_controls::{
    burst_params, commutator_composition, commutator_target, gamma_conjugation, gamma_flow, verify_scaling,
    ComparisonEnvelope, ScalingCase, ScalingKind, ScalingSchedule,
};

fn pseudo_field(model: ModelKind, cutoff: u32, seed: usize, amp: f64) -> SpectralField {
    let mut u = SpectralField::zeros(model, cutoff);
    let modes = u.modes();
    for (i, c) in u.coeffs.iter_mut().enumerate() {
        let decay = 1.0 / (1.0 + modes[i].k.norm2() as f64);
        *c = amp * decay * ((((i + 3) * (seed + 5) * 7919) % 101) as f64 / 50.0 - 1.0);
    }
    u
}

#[test]
fn rd_ray_burst_error_decays() {
    let p = burst_params(&ModelParams::rd(32, 0.1, vec![0.0, 0.0, 0.0, -1.0], &[1, 2]));
    let s = Solver::new(p).unwrap();
    let cases: Vec<ScalingCase> = (0..5)
        .map(|i| ScalingCase { u0: pseudo_field(ModelKind::Rd, 32, i, 0.5), direction: vec![1.0 - 0.3 * i as f64, 0.5 + 0.1 * i as f64] })
        .collect();
    let table = verify_scaling(&s, ScalingKind::RayBurst, &cases, 1.0, &[1e2, 1e3, 1e4, 1e5]).unwrap();
    assert!(table.monotone, "{table:?}");
    assert!(table.slope.unwrap() <= -0.4, "{table:?}");
}

#[test]
fn nse_bracket_burst_converges_to_symbolic_limit() {
    let p = burst_params(&ModelParams::nse2d(8, 0.1, &[[1, 0], [1, 1]]));
    let s = Solver::new(p).unwrap();
    let u0 = pseudo_field(ModelKind::Nse2d, 8, 1, 0.3);
    let g = vec![1.0, 0.0, 0.7, 0.0];
    let cases = [ScalingCase { u0: u0.clone(), direction: g.clone() }];
    let t0 = std::time::Instant::now();
    let table = verify_scaling(&s, ScalingKind::BracketBurst, &cases, 0.5, &[10.0, 1e2, 1e3, 1e4]).unwrap();
    eprintln!("{:?} {table:?}", t0.elapsed());
    let target = ScalingSchedule::new(ScalingKind::BracketBurst, g, 0.5, 1.0).unwrap().limit(&s, &u0).unwrap();
    let shift = target.dist(&u0);
    assert!(shift > 1e-3);
    assert!(table.monotone, "{table:?}");
    assert!(table.rows.last().unwrap().error.unwrap() < 1e-2 * shift, "{table:?}");
}

#[test]
fn single_mode_bracket_vanishes_for_nse() {
    let s = Solver::new(ModelParams::nse2d(8, 0.1, &[[1, 0], [1, 1]])).unwrap();
    let u0 = pseudo_field(ModelKind::Nse2d, 8, 2, 0.3);
    let lim = ScalingSchedule::new(ScalingKind::BracketBurst, vec![0.0, 0.0, 1.0, 0.0], 1.0, 1.0).unwrap().limit(&s, &u0).unwrap();
    assert!(lim.dist(&u0) < 1e-14);
}

fn waves(max: i32) -> Vec<WaveVector> {
    let mut out = Vec::new();
    for a in -max..=max {
        for b in -max..=max {
            let w = WaveVector::d2(a, b);
            if (a, b) != (0, 0) && a * a + b * b <= max * max && w.is_canonical() {
                out.push(w);
            }
        }
    }
    out
}

#[test]
fn boussinesq_commutator_is_exact() {
    let p = ModelParams::boussinesq(8, 0.1, 0.2, 1.5, &[[1, 0], [0, 1]]);
    let u0 = pseudo_field(ModelKind::Boussinesq, 8, 3, 0.4);
    let ws = waves(4);
    let mut worst = 0.0f64;
    for &j in &ws {
        for &k in &ws {
            for l in [Parity::Cos, Parity::Sin] {
                for n in [Parity::Cos, Parity::Sin] {
                    let a = commutator_composition(&p, &u0, 0.7, -1.3, (j, l), (k, n), 0.6).unwrap();
                    let b = commutator_target(&p, &u0, 0.7, -1.3, (j, l), (k, n), 0.6).unwrap();
                    worst = worst.max(a.dist(&b));
                }
            }
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn gamma_conjugation_approaches_gamma_flow() {
    let p = burst_params(&ModelParams::boussinesq(6, 0.1, 0.2, 1.5, &[[1, 0], [0, 1]]));
    let s = Solver::new(p.clone()).unwrap();
    let u0 = pseudo_field(ModelKind::Boussinesq, 6, 4, 0.4);
    let j = WaveVector::d2(1, 0);
    let target = gamma_flow(&p, &u0, 0.8, j, Parity::Sin, 0.5).unwrap();
    let errs: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&l| gamma_conjugation(&s, &u0, 0.8, j, Parity::Sin, 0.5, l).unwrap().dist(&target))
        .collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 1e-2 * target.dist(&u0), "{errs:?}");
}

#[test]
fn envelope_dominates_integrated_comparison() {
    for p in [2.0, 3.0, 6.0] {
        for kappa0 in [0.0, 1.0] {
            for lambda in [10.0, 1e3] {
                let env = ComparisonEnvelope::new(1.0, kappa0, p, lambda).unwrap();
                for x0 in [0.0, 0.1, 0.5, 1.0] {
                    if x0 + kappa0 == 0.0 {
                        continue;
                    }
                    let c = env.check(x0, 0.9, 20_000);
                    assert!(c.below, "p {p} k {kappa0} l {lambda} x0 {x0}: {c:?}");
                }
            }
        }
    }
}
