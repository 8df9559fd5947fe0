use galerkin_solvers::{ModelParams, NoisePath, PathKind, Solver, SolverOptions, SpectralField};
use mode_algebra::{
    boussinesq_bilinear_vec, dx, euler_bilinear_vec, CoeffVec, Field, ModelKind, Parity, PolarizationFrame, TrigMode,
};
use proptest::prelude::*;
use spectral_oracles as oracle;

const TOL: f64 = 1e-9;

/// Deterministic pseudo-random numbers in [-1, 1).
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((self.0 >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }
}

/// Random state whose amplitudes decay like `|k|^{-2}`.
fn random_state(s: &Solver, seed: u64, scale: f64) -> SpectralField {
    let mut r = Lcg(seed);
    let coeffs = s.modes().iter().map(|m| scale * r.next() / m.k.norm2() as f64).collect();
    s.wrap(coeffs)
}

fn as_coeffs(s: &Solver, u: &SpectralField) -> CoeffVec {
    s.modes().iter().zip(&u.coeffs).map(|(m, c)| (*m, *c)).collect()
}

fn nse() -> Solver {
    Solver::new(ModelParams::nse2d(4, 0.05, &[[1, 0], [1, 1]]).with_force(vec![(TrigMode::vorticity(1, 2, Parity::Sin), 0.3)]))
        .unwrap()
}

fn boussinesq() -> Solver {
    Solver::new(ModelParams::boussinesq(3, 0.05, 0.08, 1.0, &[[1, 0], [0, 1]])).unwrap()
}

fn rd() -> Solver {
    Solver::new(ModelParams::rd(12, 0.2, vec![0.1, 1.0, 0.3, -1.0], &[1, 2])).unwrap()
}

fn euler() -> Solver {
    Solver::new(ModelParams::euler3d(2, &[[1, 0, 0], [0, 1, 0], [0, 0, 1]])).unwrap()
}

fn all_models() -> Vec<(Solver, f64)> {
    vec![(rd(), 1.0), (nse(), 1.0), (boussinesq(), 1.0), (euler(), 0.3)]
}

#[test]
fn rd_reaction_matches_quadrature() {
    let s = rd();
    for seed in 0..5 {
        let u = random_state(&s, seed, 2.0);
        let n = s.nonlinear_term(&u).unwrap();
        let q = oracle::rd_reaction_projection(&u.coeffs, &s.params().rd_coeffs, 400);
        for (a, b) in n.coeffs.iter().zip(&q) {
            assert!((a + b).abs() < 1e-12, "{a} vs {}", -b);
        }
    }
}

#[test]
fn rd_even_degree_terms_match_quadrature() {
    let s = Solver::new(ModelParams::rd(10, 1.0, vec![-0.7, 0.4, 1.3, 0.2, 0.5, -2.0], &[1])).unwrap();
    let u = random_state(&s, 42, 1.5);
    let n = s.nonlinear_term(&u).unwrap();
    let q = oracle::rd_reaction_projection(&u.coeffs, &s.params().rd_coeffs, 400);
    for (a, b) in n.coeffs.iter().zip(&q) {
        assert!((a + b).abs() < 1e-12);
    }
}

#[test]
fn euler_transport_matches_direct_convolution() {
    let s = Solver::new(ModelParams::euler3d(3, &[[1, 0, 0]])).unwrap();
    let u = random_state(&s, 3, 1.0);
    let cv = as_coeffs(&s, &u);
    let direct = euler_bilinear_vec(&cv, &cv).scaled(0.5);
    let n = s.nonlinear_term(&u).unwrap();
    for (m, x) in s.modes().iter().zip(&n.coeffs) {
        assert!((x - direct.get(m)).abs() < 1e-11, "{m}");
    }
}

#[test]
fn boussinesq_tendency_matches_symbolic_terms() {
    let s = boussinesq();
    let u = random_state(&s, 9, 1.0);
    let cv = as_coeffs(&s, &u);
    let (_, theta) = cv.partition(|m| m.field == Field::Vorticity);
    let mut expect = boussinesq_bilinear_vec(&cv, &cv).scaled(-1.0);
    expect.add_scaled(s.params().gravity, &dx(&theta, Field::Vorticity));
    let n = s.nonlinear_term(&u).unwrap();
    for (m, x) in s.modes().iter().zip(&n.coeffs) {
        assert!((x + expect.get(m)).abs() < 1e-12, "{m}");
    }
}

#[test]
fn semigroup_law_holds() {
    for (s, scale) in all_models() {
        let u0 = random_state(&s, 11, scale);
        let alpha: Vec<f64> = (0..s.n_controls()).map(|i| 0.5 - 0.3 * i as f64).collect();
        let a = s.flow_constant(&s.flow_constant(&u0, &alpha, 0.3).unwrap(), &alpha, 0.2).unwrap();
        let b = s.flow_constant(&u0, &alpha, 0.5).unwrap();
        assert!(a.dist(&b) < 10.0 * TOL, "{:?}: {}", s.params().model, a.dist(&b));
    }
}

fn random_path(s: &Solver, seed: u64, t: f64, pieces: usize) -> NoisePath {
    let mut r = Lcg(seed);
    let segs: Vec<(f64, Vec<f64>)> =
        (0..pieces).map(|_| (t / pieces as f64, (0..s.n_controls()).map(|_| 2.0 * r.next()).collect())).collect();
    NoisePath::from_segments(&segs).unwrap()
}

#[test]
fn cocycle_identity_holds() {
    for (s, scale) in all_models() {
        let u0 = random_state(&s, 5, scale);
        let v = random_path(&s, 17, 1.0, 8);
        let whole = s.flow_path(&u0, &v, 1.0).unwrap();
        // grid-aligned and interior shift points
        for shift in [0.375, 0.3] {
            let mid = s.flow_path(&u0, &v, shift).unwrap();
            let rest = s.flow_path(&mid, &v.shift(shift).unwrap(), 1.0 - shift).unwrap();
            assert!(rest.dist(&whole) < 10.0 * TOL, "{:?} s={shift}: {}", s.params().model, rest.dist(&whole));
        }
    }
}

#[test]
fn linear_path_equals_constant_control() {
    for (s, scale) in all_models() {
        let u0 = random_state(&s, 6, scale);
        let alpha: Vec<f64> = (0..s.n_controls()).map(|i| 1.0 - 0.25 * i as f64).collect();
        let a = s.flow_path(&u0, &NoisePath::linear(&alpha, 0.7), 0.7).unwrap();
        let b = s.flow_constant(&u0, &alpha, 0.7).unwrap();
        assert!(a.dist(&b) < TOL);
        let z = s.flow_path(&u0, &NoisePath::zero(s.n_controls(), 0.7), 0.7).unwrap();
        assert_eq!(z, s.flow_constant(&u0, &vec![0.0; s.n_controls()], 0.7).unwrap());
    }
}

#[test]
fn tangent_flow_group_property() {
    let mut r = Lcg(99);
    for (s, scale) in all_models() {
        let u0 = random_state(&s, 8, scale);
        let v = random_path(&s, 23, 1.0, 5);
        let base = s.trajectory(&u0, &v, 1.0).unwrap();
        let xi = random_state(&s, 31, 1.0);
        assert!(s.tangent_flow(&base, 0.2, 0.9, &s.zero()).unwrap().coeffs.iter().all(|x| *x == 0.0));
        for _ in 0..3 {
            let mut p = [r.next().abs(), r.next().abs(), r.next().abs()];
            p.sort_by(f64::total_cmp);
            let [a, b, c] = p;
            let direct = s.tangent_flow(&base, a, c, &xi).unwrap();
            let split = s.tangent_flow(&base, b, c, &s.tangent_flow(&base, a, b, &xi).unwrap()).unwrap();
            let rel = direct.dist(&split) / direct.l2_norm().max(1.0);
            assert!(rel < 10.0 * TOL, "{:?} ({a},{b},{c}): {rel}", s.params().model);
        }
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn tangent_flow_matches_finite_differences_to_first_order() {
    for (s, scale) in all_models() {
        let u0 = random_state(&s, 12, scale);
        let v = random_path(&s, 4, 0.5, 4);
        let base = s.trajectory(&u0, &v, 0.5).unwrap();
        let xi = random_state(&s, 13, 1.0);
        let j = s.tangent_flow(&base, 0.0, 0.5, &xi).unwrap();
        let end = base.final_state();
        let eps = [4e-2, 2e-2, 1e-2, 5e-3];
        let errs: Vec<f64> = eps
            .iter()
            .map(|&e| {
                let mut p = u0.clone();
                p.add_scaled(e, &xi);
                let fd = s.replay(&base, &p).unwrap().sub(end).scaled(1.0 / e);
                fd.dist(&j)
            })
            .collect();
        let k = slope(&eps, &errs);
        assert!((k - 1.0).abs() < 0.15, "{:?}: slope {k}, errors {errs:?}", s.params().model);
    }
}

#[test]
fn euler_conserves_energy_without_forcing() {
    let s = euler();
    let u0 = random_state(&s, 21, 0.5);
    let tr = s.trajectory(&u0, &NoisePath::zero(s.n_controls(), 1.0), 1.0).unwrap();
    let e0 = u0.l2_norm();
    let drift = tr.states.iter().map(|u| (u.l2_norm() - e0).abs() / e0).fold(0.0, f64::max);
    assert!(drift < TOL, "relative energy drift {drift}");
}

#[test]
fn euler_states_are_divergence_free() {
    let s = euler();
    let u0 = random_state(&s, 2, 0.5);
    let v = random_path(&s, 1, 0.2, 2);
    let tr = s.trajectory(&u0, &v, 0.2).unwrap();
    for st in &tr.states {
        for (m, c) in s.modes().iter().zip(&st.coeffs) {
            let a = PolarizationFrame::for_k(m.k).a[m.polarization.unwrap() as usize];
            let k = m.k.as_f64();
            let div: f64 = (0..3).map(|i| 2.0 * a[i] * c * k[i]).sum();
            assert!(div.abs() < 1e-12);
        }
        assert!(st.is_finite());
    }
}

#[test]
fn refinement_shows_fourth_order() {
    for (s0, scale) in [(nse(), 2.0), (rd(), 1.5), (boussinesq(), 2.0)] {
        let base = s0.params().clone();
        let u0 = random_state(&s0, 77, scale);
        let alpha: Vec<f64> = (0..s0.n_controls()).map(|i| 0.7 + 0.1 * i as f64).collect();
        let run = |dt: f64| {
            let p = base.clone().with_solver(SolverOptions { dt, ..Default::default() });
            Solver::new(p).unwrap().flow_constant(&u0, &alpha, 1.0).unwrap()
        };
        let reference = run(1.0 / 640.0);
        let dts = [0.1, 0.05, 0.025];
        let errs: Vec<f64> = dts.iter().map(|&dt| run(dt).dist(&reference)).collect();
        let k = slope(&dts, &errs);
        assert!((k - 4.0).abs() <= 0.3, "{:?}: slope {k}, errors {errs:?}", base.model);
    }
}

#[test]
fn rd_energy_stays_inside_envelope() {
    let s = rd();
    for seed in 0..4 {
        let u0 = random_state(&s, seed, 3.0);
        let v = random_path(&s, seed + 100, 2.0, 6);
        let tr = s.trajectory(&u0, &v, 2.0).unwrap();
        let r = s.energy_monitor(&tr);
        assert!(r.within_envelope && r.max_ratio <= 1.0, "ratio {}", r.max_ratio);
        assert!(r.max_ratio > 0.0);
    }
}

#[test]
fn fluid_energy_stays_inside_envelope() {
    for (s, scale) in [(nse(), 2.0), (boussinesq(), 2.0), (euler(), 0.3)] {
        let u0 = random_state(&s, 3, scale);
        let v = random_path(&s, 8, 1.0, 4);
        let r = s.energy_monitor(&s.trajectory(&u0, &v, 1.0).unwrap());
        assert!(r.within_envelope, "{:?}: ratio {}", s.params().model, r.max_ratio);
    }
}

#[test]
fn trajectory_export_round_trips() {
    let s = boussinesq();
    let tr = s.trajectory(&random_state(&s, 1, 1.0), &random_path(&s, 2, 0.05, 2), 0.05).unwrap();
    let mut buf = Vec::new();
    galerkin_solvers::write_binary(&tr, &mut buf).unwrap();
    let rec = galerkin_solvers::read_binary(buf.as_slice()).unwrap();
    assert_eq!(rec.model, ModelKind::Boussinesq);
    assert_eq!(rec.cutoff, 3);
    assert_eq!(rec.coeffs.last().unwrap(), &tr.final_state().coeffs);
}

#[test]
fn brownian_kind_paths_flow_like_controls() {
    let s = nse();
    let vals: Vec<Vec<f64>> = (0..5).map(|i| vec![0.1 * i as f64, -0.05 * (i * i) as f64, 0.0, 0.2 * i as f64]).collect();
    let p = NoisePath::uniform(PathKind::Brownian, 0.1, vals).unwrap();
    let u0 = random_state(&s, 4, 1.0);
    let a = s.flow_path(&u0, &p, 0.4).unwrap();
    let b = s.flow_segments(&u0, &p.segments_until(0.4).unwrap()).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Perturbing `V` by `delta` in sup norm moves the endpoint by at most `L delta`.
    #[test]
    fn flow_path_is_lipschitz_in_the_path(seed in 0u64..1000, delta in 1e-4f64..1e-2) {
        let s = nse();
        let u0 = random_state(&s, seed, 1.0);
        let v = random_path(&s, seed + 1, 0.5, 4);
        let w = random_path(&s, seed + 2, 0.5, 4);
        let sup = w.sup_distance(&NoisePath::zero(s.n_controls(), 0.5)).max(1e-12);
        let pert = v.add_scaled(delta / sup, &w).unwrap();
        let d = s.flow_path(&u0, &pert, 0.5).unwrap().dist(&s.flow_path(&u0, &v, 0.5).unwrap());
        prop_assert!(d <= 200.0 * delta, "{} vs {}", d, delta);
    }

    #[test]
    fn nse_transport_is_energy_neutral(seed in 0u64..10_000) {
        let s = Solver::new(ModelParams::nse2d(4, 0.0, &[[1, 0]])).unwrap();
        let u = random_state(&s, seed, 1.0);
        let n = s.nonlinear_term(&u).unwrap();
        prop_assert!(n.l2_dot(&u).abs() < 1e-12 * (1.0 + n.l2_norm() * u.l2_norm()));
    }

    #[test]
    fn rd_projection_matches_quadrature(seed in 0u64..10_000, b in prop::collection::vec(-2.0f64..2.0, 1..5)) {
        let mut coeffs = b.clone();
        if coeffs.len() % 2 == 1 { coeffs.push(0.0); }
        coeffs.push(0.0);
        coeffs.push(-1.0);
        let s = Solver::new(ModelParams::rd(6, 1.0, coeffs.clone(), &[1])).unwrap();
        let u = random_state(&s, seed, 1.0);
        let q = oracle::rd_reaction_projection(&u.coeffs, &coeffs, 300);
        let n = s.nonlinear_term(&u).unwrap();
        for (a, b) in n.coeffs.iter().zip(&q) {
            prop_assert!((a + b).abs() < 1e-11);
        }
    }
}

#[test]
fn heat_flow_with_control_matches_closed_form() {
    // u_k(t) = e^{-kappa k^2 t} u_k(0) + alpha (1 - e^{-kappa k^2 t}) / (kappa k^2)
    let s = Solver::new(ModelParams::rd(4, 0.3, vec![], &[2])).unwrap();
    let mut u0 = s.zero();
    u0.coeffs[1] = 0.5;
    let u = s.flow_constant(&u0, &[1.2], 0.9).unwrap();
    let l = 0.3 * 4.0;
    let expect = (-l * 0.9f64).exp() * 0.5 + 1.2 * (1.0 - (-l * 0.9f64).exp()) / l;
    assert!((u.coeffs[1] - expect).abs() < 1e-12);
    let field = s.control_field(&[1.0]).unwrap();
    assert_eq!(field.get(&TrigMode::rd(2)), 1.0);
}
