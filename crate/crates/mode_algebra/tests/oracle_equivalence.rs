//! Symbolic images against brute-force physical-space evaluation.

use mode_algebra::fluid2d::{
    boussinesq_bilinear_vec, nse_bilinear_vec, theta_bracket_vec, transport, vorticity_bracket_vec,
};
use mode_algebra::euler::{euler_bilinear_vec, euler_pair};
use mode_algebra::rd::{multisets, rd_multilinear, rd_product_span};
use mode_algebra::{lattice_modes, CoeffVec, Field, ModelKind, Parity, TrigMode};
use proptest::prelude::*;
use spectral_oracles as oracle;

fn close(a: &oracle::PhysVec, b: &oracle::PhysVec, tol: f64) -> bool {
    oracle::max_diff(a, b) < tol
}

#[test]
fn rd_products_match_quadrature() {
    let modes: Vec<CoeffVec> = (1..=4).map(|k| CoeffVec::unit(TrigMode::rd(k))).collect();
    for deg in [1usize, 3, 5] {
        for ms in multisets(4, deg) {
            let hs: Vec<&CoeffVec> = ms.iter().map(|&i| &modes[i]).collect();
            let sym = oracle::scalar_to_phys(&rd_multilinear(1.5, &hs));
            let num = oracle::rd_product(1.5, &hs, 4 * deg as i32 + 1);
            assert!(close(&sym, &num, 1e-12), "degree {deg} inputs {ms:?}");
        }
    }
}

#[test]
fn rd_product_span_matches_quadrature_span() {
    for a in 1..=4 {
        for b in a..=4 {
            let inputs = [TrigMode::rd(a), TrigMode::rd(b)];
            let sym = rd_product_span(&inputs, 3).unwrap();
            let sym_phys: Vec<_> = sym.basis().iter().map(oracle::scalar_to_phys).collect();
            let units: Vec<CoeffVec> = inputs.iter().map(|m| CoeffVec::unit(*m)).collect();
            let num: Vec<_> = multisets(2, 3)
                .iter()
                .map(|ms| {
                    let hs: Vec<&CoeffVec> = ms.iter().map(|&i| &units[i]).collect();
                    oracle::rd_product(1.0, &hs, 16)
                })
                .collect();
            assert!(oracle::same_span(&sym_phys, &num, 1e-10), "pair ({a},{b})");
        }
    }
}

#[test]
fn biot_savart_velocity_has_the_right_curl() {
    for m in lattice_modes(ModelKind::Nse2d, 2) {
        let v = CoeffVec::unit(m);
        assert!(close(&oracle::curl_of_velocity(&v), &oracle::scalar_to_phys(&v), 1e-6), "{m}");
    }
}

#[test]
fn nse_images_match_grid_on_every_pair_up_to_frequency_four() {
    let modes = lattice_modes(ModelKind::Nse2d, 4);
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i..] {
            let (ua, ub) = (CoeffVec::unit(*a), CoeffVec::unit(*b));
            let sym = oracle::scalar_to_phys(&nse_bilinear_vec(&ua, &ub));
            let num = oracle::nse_symmetric(&ua, &ub);
            assert!(close(&sym, &num, 1e-10), "{a} x {b}");
        }
    }
}

#[test]
fn one_sided_transport_matches_grid() {
    let modes = lattice_modes(ModelKind::Nse2d, 2);
    for a in &modes {
        for b in &modes {
            let (ua, ub) = (CoeffVec::unit(*a), CoeffVec::unit(*b));
            let sym = oracle::scalar_to_phys(&transport(&ua, &ub, Field::Vorticity));
            assert!(close(&sym, &oracle::transport_2d(&ua, &ub, Field::Vorticity), 1e-10), "{a} -> {b}");
        }
    }
}

#[test]
fn boussinesq_images_match_grid() {
    let modes = lattice_modes(ModelKind::Boussinesq, 3);
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i..] {
            let (ua, ub) = (CoeffVec::unit(*a), CoeffVec::unit(*b));
            let sym = oracle::scalar_to_phys(&boussinesq_bilinear_vec(&ua, &ub));
            let mut num = oracle::PhysVec::new();
            for (x, y) in [(&ua, &ub), (&ub, &ua)] {
                if x.modes().all(|m| m.field == Field::Vorticity) {
                    let out = y.modes().next().unwrap().field;
                    for (k, v) in oracle::transport_2d(x, y, out) {
                        *num.entry(k).or_default() += 0.5 * v;
                    }
                }
            }
            assert!(close(&sym, &num, 1e-10), "{a} x {b}");
        }
    }
}

#[test]
fn brackets_match_grid() {
    let xi = lattice_modes(ModelKind::Nse2d, 3);
    let theta: Vec<TrigMode> = xi.iter().map(|m| TrigMode::temperature(m.k.coords()[0], m.k.coords()[1], m.parity)).collect();
    for (i, a) in theta.iter().enumerate() {
        for b in &theta[i + 1..] {
            let (ua, ub) = (CoeffVec::unit(*a), CoeffVec::unit(*b));
            let sym = oracle::scalar_to_phys(&theta_bracket_vec(2.0, &ua, &ub));
            assert!(close(&sym, &oracle::theta_bracket(2.0, &ua, &ub), 1e-10), "theta {a} x {b}");
        }
    }
    for (i, a) in xi.iter().enumerate() {
        for b in &xi[i..] {
            let (ua, ub) = (CoeffVec::unit(*a), CoeffVec::unit(*b));
            let sym = oracle::scalar_to_phys(&vorticity_bracket_vec(&ua, &ub));
            assert!(close(&sym, &oracle::vorticity_bracket(&ua, &ub), 1e-10), "xi {a} x {b}");
        }
    }
}

#[test]
fn euler_closed_form_matches_convolution_on_small_box() {
    let modes = lattice_modes(ModelKind::Euler3d, 2);
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i..] {
            let sym = oracle::velocity_to_phys(&euler_pair(a, b));
            let num = oracle::euler_b_fourier(&CoeffVec::unit(*a), &CoeffVec::unit(*b));
            assert!(close(&sym, &num, 1e-10), "{a} x {b}");
        }
    }
}

/// Deterministic pseudo-random picks so failures are reproducible.
fn picks(n: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut s = seed;
    (0..count)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 33) as usize) % n
        })
        .collect()
}

#[test]
fn euler_matches_grid_on_random_pairs() {
    let modes = lattice_modes(ModelKind::Euler3d, 4);
    let (ia, ib) = (picks(modes.len(), 20, 7), picks(modes.len(), 20, 11));
    for (a, b) in ia.iter().zip(&ib) {
        let (ua, ub) = (CoeffVec::unit(modes[*a]), CoeffVec::unit(modes[*b]));
        let sym = oracle::velocity_to_phys(&euler_bilinear_vec(&ua, &ub));
        let grid = oracle::euler_b(&ua, &ub);
        assert!(close(&sym, &grid, 1e-10), "{} x {}", modes[*a], modes[*b]);
        assert!(close(&grid, &oracle::euler_b_fourier(&ua, &ub), 1e-10));
    }
}

fn nse_combo(coefs: &[f64]) -> CoeffVec {
    let modes = lattice_modes(ModelKind::Nse2d, 2);
    CoeffVec::from_pairs(modes.into_iter().zip(coefs.iter().copied()))
}

fn euler_combo(coefs: &[f64]) -> CoeffVec {
    let modes = lattice_modes(ModelKind::Euler3d, 1);
    CoeffVec::from_pairs(modes.into_iter().zip(coefs.iter().copied()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rd_products_stay_in_sine_modes(c in prop::collection::vec(-2.0f64..2.0, 3), d in prop::collection::vec(-2.0f64..2.0, 3)) {
        let g = CoeffVec::from_pairs((1..=3).map(TrigMode::rd).zip(c));
        let h = CoeffVec::from_pairs((1..=3).map(TrigMode::rd).zip(d));
        let img = rd_multilinear(1.0, &[&g, &g, &h]);
        prop_assert!(img.modes().all(|m| m.field == Field::RdScalar && m.parity == Parity::Sin));
        let sym = oracle::scalar_to_phys(&img);
        prop_assert!(close(&sym, &oracle::rd_product(1.0, &[&g, &g, &h], 12), 1e-10));
    }

    #[test]
    fn nse_form_is_bilinear_and_symmetric(
        a in prop::collection::vec(-1.0f64..1.0, 24),
        b in prop::collection::vec(-1.0f64..1.0, 24),
        c in prop::collection::vec(-1.0f64..1.0, 24),
        s in -3.0f64..3.0,
    ) {
        let (a, b, c) = (nse_combo(&a), nse_combo(&b), nse_combo(&c));
        let mut bc = b.clone();
        bc.add_scaled(s, &c);
        let lhs = nse_bilinear_vec(&a, &bc);
        let mut rhs = nse_bilinear_vec(&a, &b);
        rhs.add_scaled(s, &nse_bilinear_vec(&a, &c));
        let mut diff = lhs.clone();
        diff.add_scaled(-1.0, &rhs);
        prop_assert!(diff.norm_inf() < 1e-12);
        let mut sym = nse_bilinear_vec(&a, &b);
        sym.add_scaled(-1.0, &nse_bilinear_vec(&b, &a));
        prop_assert!(sym.norm_inf() < 1e-12);
    }

    #[test]
    fn euler_images_are_divergence_free_and_match_convolution(
        a in prop::collection::vec(-1.0f64..1.0, 52),
        b in prop::collection::vec(-1.0f64..1.0, 52),
    ) {
        let (a, b) = (euler_combo(&a), euler_combo(&b));
        let img = oracle::velocity_to_phys(&euler_bilinear_vec(&a, &b));
        let num = oracle::euler_b_fourier(&a, &b);
        prop_assert!(close(&img, &num, 1e-10));
        // q . amplitude = 0 for each frequency and parity
        let mut div = std::collections::BTreeMap::<(Vec<i32>, u8), f64>::new();
        for ((q, p, c), v) in &img {
            *div.entry((q.clone(), *p)).or_default() += q[*c as usize] as f64 * v;
        }
        prop_assert!(div.values().all(|d| d.abs() < 1e-12));
    }
}
