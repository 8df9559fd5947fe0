use mode_algebra::rd::multisets;
use mode_algebra::{family, CoeffVec, Nonlinearity, Parity, SpanSet, TrigMode, WaveVector};
use proptest::prelude::*;
use saturation_engine::{
    axis_double_brackets, check_hoermander, determining_modes, iterate_span, polarization_equivalence,
};
use spectral_oracles as oracle;

/// Chain dimensions by brute force: quadrature products of all generator multisets.
fn rd_brute_dims(seed: &[i32], cutoff: i32, levels: usize) -> Vec<usize> {
    let mut gens: Vec<CoeffVec> = seed.iter().map(|&k| CoeffVec::unit(TrigMode::rd(k))).collect();
    let phys = |v: &CoeffVec| oracle::scalar_to_phys(v);
    let mut vecs: Vec<oracle::PhysVec> = gens.iter().map(phys).collect();
    let mut dims = vec![oracle::rank(&vecs, 1e-10)];
    for _ in 0..levels {
        let mut next = vecs.clone();
        for ms in multisets(gens.len(), 3) {
            let hs: Vec<&CoeffVec> = ms.iter().map(|&i| &gens[i]).collect();
            let p = oracle::rd_product(1.0, &hs, cutoff);
            next.push(p);
        }
        // regenerate generators as sine modes carried by the new span (coordinate spans here)
        let mut modes: Vec<i32> = next.iter().flat_map(|v| v.keys().map(|k| k.0[0])).collect();
        modes.sort();
        modes.dedup();
        gens = modes.iter().map(|&k| CoeffVec::unit(TrigMode::rd(k))).collect();
        vecs = next;
        dims.push(oracle::rank(&vecs, 1e-10));
    }
    dims
}

#[test]
fn rd_chain_dimensions_match_quadrature() {
    let nl = Nonlinearity::rd(3, -1.0).unwrap();
    for seed in [vec![1, 2], vec![1], vec![2, 3]] {
        let chain = iterate_span(&SpanSet::from_modes(seed.iter().map(|&k| TrigMode::rd(k))), &nl, 30, 16).unwrap();
        let brute = rd_brute_dims(&seed, 16, chain.levels.len() - 1);
        assert_eq!(chain.dims(), brute, "seed {seed:?}");
    }
}

#[test]
fn euler_double_brackets_match_convolution_oracle() {
    let axis: Vec<oracle::PhysVec> = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        .iter()
        .flat_map(|k| family(*k))
        .map(|m| oracle::velocity_to_phys(&CoeffVec::unit(m)))
        .collect();
    let mut doubles = Vec::new();
    for a in &axis {
        for b in &axis {
            let inner = oracle::euler_b_phys(a, b);
            for c in &axis {
                doubles.push(oracle::euler_b_phys(&inner, c));
            }
        }
    }
    let f111: Vec<oracle::PhysVec> =
        family([1, 1, 1]).into_iter().map(|m| oracle::velocity_to_phys(&CoeffVec::unit(m))).collect();
    let r = oracle::rank(&doubles, 1e-10);
    let mut with = doubles.clone();
    with.extend(f111);
    assert_eq!(oracle::rank(&with, 1e-10), r, "F_(1,1,1) not contained in the oracle double brackets");
    let symbolic: Vec<oracle::PhysVec> = axis_double_brackets().basis().iter().map(oracle::velocity_to_phys).collect();
    assert!(oracle::same_span(&symbolic, &doubles, 1e-10));
}

#[test]
fn euler_polarization_equivalence_on_two_axes() {
    let seed = SpanSet::from_modes(family([1, 0, 0]).into_iter().chain(family([0, 1, 0])));
    assert!(polarization_equivalence(&seed, &Nonlinearity::Euler3d, 2, 2, 3).unwrap());
}

#[test]
fn nse_polarization_equivalence() {
    let seed = SpanSet::from_modes([
        TrigMode::vorticity(1, 0, Parity::Cos),
        TrigMode::vorticity(1, 0, Parity::Sin),
        TrigMode::vorticity(1, 1, Parity::Sin),
    ]);
    assert!(polarization_equivalence(&seed, &Nonlinearity::Nse2d, 3, 3, 11).unwrap());
}

#[test]
fn euler_hoermander_small_box() {
    let z: Vec<WaveVector> = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]].iter().map(|k| WaveVector::d3(k[0], k[1], k[2])).collect();
    let r = check_hoermander(&z, &Nonlinearity::Euler3d, 2, 20).unwrap();
    assert!(r.satisfied_up_to_cutoff, "{} missing", r.missing.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn larger_seed_never_shrinks_a_level(base in prop::collection::btree_set(1i32..=12, 1..3), extra in 1i32..=12) {
        let nl = Nonlinearity::rd(3, -1.0).unwrap();
        let small: Vec<TrigMode> = base.iter().map(|&k| TrigMode::rd(k)).collect();
        let mut big = small.clone();
        big.push(TrigMode::rd(extra));
        let a = iterate_span(&SpanSet::from_modes(small), &nl, 6, 12).unwrap();
        let b = iterate_span(&SpanSet::from_modes(big), &nl, 6, 12).unwrap();
        for k in 0..7 {
            prop_assert!(a.level(k).dim() <= b.level(k).dim());
        }
    }

    #[test]
    fn move_closure_is_order_independent(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(), flip in prop::collection::vec(any::<bool>(), 4)) {
        let base = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]];
        let z: Vec<WaveVector> = perm
            .iter()
            .zip(&flip)
            .map(|(&i, &f)| {
                let k = WaveVector::d3(base[i][0], base[i][1], base[i][2]);
                if f { k.neg() } else { k }
            })
            .collect();
        let g = determining_modes(&z, 3).unwrap();
        let reference = determining_modes(&z.iter().rev().copied().collect::<Vec<_>>(), 3).unwrap();
        prop_assert_eq!(g.nodes, reference.nodes);
    }

    #[test]
    fn chain_levels_are_nested(ks in prop::collection::btree_set((0i32..=3, -3i32..=3), 1..4)) {
        let modes: Vec<TrigMode> = ks
            .iter()
            .filter(|(a, b)| *a > 0 || (*a == 0 && *b > 0))
            .flat_map(|&(a, b)| [Parity::Cos, Parity::Sin].map(|p| TrigMode::vorticity(a, b, p)))
            .collect();
        let c = iterate_span(&SpanSet::from_modes(modes), &Nonlinearity::Nse2d, 6, 3).unwrap();
        for w in c.levels.windows(2) {
            prop_assert!(w[0].is_subspace_of(&w[1]));
        }
    }
}
