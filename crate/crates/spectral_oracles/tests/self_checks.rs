use mode_algebra::{family, CoeffVec, TrigMode};
use spectral_oracles::{euler_b, euler_b_fourier, gauss_legendre, max_diff, rank, rd_product, same_span, scalar_to_phys, PhysVec};

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    for n in [1usize, 3, 8, 20] {
        let (xs, ws) = gauss_legendre(n, -0.5, 2.0);
        for deg in 0..2 * n as i32 {
            let q: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = (2f64.powi(deg + 1) - (-0.5f64).powi(deg + 1)) / (deg + 1) as f64;
            assert!((q - exact).abs() < 1e-12 * exact.abs().max(1.0), "n {n} deg {deg}: {q} vs {exact}");
        }
    }
}

#[test]
fn sine_products_follow_product_to_sum() {
    // sin x sin 2x sin 3x = (sin 2x + sin 4x - sin 6x) / 4
    let h: Vec<CoeffVec> = (1..=3).map(|k| CoeffVec::unit(TrigMode::rd(k))).collect();
    let p = rd_product(1.0, &[&h[0], &h[1], &h[2]], 8);
    let want = scalar_to_phys(&CoeffVec::from_pairs([(TrigMode::rd(2), 0.25), (TrigMode::rd(4), 0.25), (TrigMode::rd(6), -0.25)]));
    assert!(max_diff(&p, &want) < 1e-13, "{p:?}");
}

#[test]
fn rank_and_span_comparison() {
    let e = |k: i32, c: f64| scalar_to_phys(&CoeffVec::from_pairs([(TrigMode::rd(k), c)]));
    let mut sum = e(1, 1.0);
    sum.extend(e(2, 1.0));
    assert_eq!(rank(&[e(1, 1.0), e(2, 3.0), sum.clone()], 1e-10), 2);
    assert!(same_span(&[e(1, 2.0), e(2, 1.0)], &[sum, e(1, -1.0)], 1e-10));
    assert!(!same_span(&[e(1, 1.0)], &[e(2, 1.0)], 1e-10));
    assert_eq!(rank(&[PhysVec::new()], 1e-10), 0);
}

#[test]
fn euler_grid_and_convolution_agree() {
    let f = CoeffVec::from_pairs(family([1, 0, 0]).into_iter().zip([0.3, -0.2, 0.5, 0.1]));
    let g = CoeffVec::from_pairs(family([0, 1, 1]).into_iter().chain(family([1, -1, 0])).zip([0.4, 0.1, -0.3, 0.2, 0.6, -0.5, 0.05, 0.7]));
    let a = euler_b(&f, &g);
    assert!(!a.is_empty());
    assert!(max_diff(&a, &euler_b_fourier(&f, &g)) < 1e-12);
}
