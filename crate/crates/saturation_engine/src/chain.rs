//! Level-by-level subspace chains.

use std::collections::BTreeSet;

use mode_algebra::fluid2d::{dx, theta_bracket_vec, vorticity_bracket_vec};
use mode_algebra::{lattice_modes, within_cutoff, CoeffVec, Field, ModelKind, Nonlinearity, SpanSet, TrigMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::SaturationError;

/// Images below this fraction of their own max-norm inside the box are treated as zero.
const INSIDE_TOL: f64 = 1e-12;

/// Consecutive non-growing random samples before a diagonal level is declared complete.
const DIAGONAL_PATIENCE: usize = 8;

/// `X_0 ⊆ X_1 ⊆ ...`, truncated to the cutoff box.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceChain {
    pub model: ModelKind,
    pub cutoff: u32,
    pub levels: Vec<SpanSet>,
    pub stabilized: bool,
    /// Modes produced by some image but lying outside the box; never recursed on.
    pub discarded: BTreeSet<TrigMode>,
}

impl SubspaceChain {
    pub fn top(&self) -> &SpanSet {
        self.levels.last().expect("a chain always has its seed level")
    }

    pub fn dims(&self) -> Vec<usize> {
        self.levels.iter().map(SpanSet::dim).collect()
    }

    /// Level `k`, or the top level once the chain has stopped growing.
    pub fn level(&self, k: usize) -> &SpanSet {
        &self.levels[k.min(self.levels.len() - 1)]
    }

    /// Lattice modes (inside the box) that are members of the top level.
    pub fn covered_modes(&self) -> Vec<TrigMode> {
        lattice_modes(self.model, self.cutoff).into_iter().filter(|m| self.top().contains_mode(*m)).collect()
    }
}

fn expected_fields(model: ModelKind) -> &'static [Field] {
    match model {
        ModelKind::Rd => &[Field::RdScalar],
        ModelKind::Nse2d => &[Field::Vorticity],
        ModelKind::Boussinesq => &[Field::Vorticity, Field::Temperature],
        ModelKind::Euler3d => &[Field::Velocity],
    }
}

fn validate_seed(seed: &SpanSet, nl: &Nonlinearity, cutoff: u32) -> Result<(), SaturationError> {
    let model = nl.model();
    for m in seed.modes() {
        m.validate()?;
        if m.k.dim() != model.dim() || !expected_fields(model).contains(&m.field) {
            return Err(SaturationError::WrongField(m));
        }
        if !within_cutoff(&m, cutoff) {
            return Err(SaturationError::OutsideCutoff(m));
        }
    }
    if nl.degree() == 2 {
        // every same-frequency pair must have a vanishing image
        let freqs: BTreeSet<_> = seed.modes().iter().map(|m| m.k).collect();
        for k in freqs {
            let family: Vec<TrigMode> =
                lattice_modes(model, k.linf()).into_iter().filter(|m| m.k == k).collect();
            for (i, a) in family.iter().enumerate() {
                for b in &family[i..] {
                    let img = nl.multilinear(&[&CoeffVec::unit(*a), &CoeffVec::unit(*b)]);
                    if !img.is_negligible(INSIDE_TOL) {
                        return Err(SaturationError::Cancellation(k));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Inserts the in-box part of `img`, logging out-of-box modes.
fn absorb(span: &mut SpanSet, img: &CoeffVec, cutoff: u32, discarded: &mut BTreeSet<TrigMode>) {
    let scale = img.norm_inf();
    if scale == 0.0 {
        return;
    }
    let (inside, outside) = img.partition(|m| within_cutoff(m, cutoff));
    for (m, c) in outside.iter() {
        if c.abs() > INSIDE_TOL * scale {
            discarded.insert(*m);
        }
    }
    if inside.norm_inf() > INSIDE_TOL * scale {
        span.insert(&inside);
    }
}

/// Nondecreasing index tuples of length `m` over `0..n` whose largest entry is `>= fresh`.
fn fresh_tuples(n: usize, m: usize, fresh: usize, mut f: impl FnMut(&[usize]) -> bool) {
    fn rec(n: usize, m: usize, fresh: usize, lo: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == m {
            return f(cur);
        }
        let last = cur.len() + 1 == m;
        let start = if last { lo.max(fresh) } else { lo };
        for i in start..n {
            cur.push(i);
            let go = rec(n, m, fresh, i, cur, f);
            cur.pop();
            if !go {
                return false;
            }
        }
        true
    }
    if m > 0 {
        rec(n, m, fresh, 0, &mut Vec::with_capacity(m), &mut f);
    }
}

/// Builds the chain `X_0 ⊆ X_1 ⊆ ...` from `seed` for the model's nonlinearity.
///
/// Multilinear images of all generator tuples are used (the polarized recursion). For the
/// Boussinesq system the temperature brackets, the `d_x` coupling and the vorticity
/// brackets are tracked as separate generator rules. Iteration stops when a level adds
/// nothing (`stabilized`), when the whole box is covered, or after `max_depth` steps.
pub fn iterate_span(seed: &SpanSet, nl: &Nonlinearity, max_depth: usize, cutoff: u32) -> Result<SubspaceChain, SaturationError> {
    validate_seed(seed, nl, cutoff)?;
    Ok(match nl {
        Nonlinearity::Boussinesq => boussinesq_chain(seed, max_depth, cutoff),
        _ => multilinear_chain(seed, nl, max_depth, cutoff),
    })
}

fn start_chain(seed: &SpanSet, model: ModelKind, cutoff: u32) -> (SpanSet, SubspaceChain, usize) {
    let span = SpanSet::from_vectors(&seed.basis());
    let chain = SubspaceChain { model, cutoff, levels: vec![span.clone()], stabilized: false, discarded: BTreeSet::new() };
    (span, chain, lattice_modes(model, cutoff).len())
}

fn multilinear_chain(seed: &SpanSet, nl: &Nonlinearity, max_depth: usize, cutoff: u32) -> SubspaceChain {
    let (mut span, mut chain, full) = start_chain(seed, nl.model(), cutoff);
    let mut gens = span.basis_from(0);
    let mut fresh = 0;
    for _ in 0..max_depth {
        if span.dim() == full || gens.len() == fresh {
            chain.stabilized = true;
            break;
        }
        let start = span.dim();
        fresh_tuples(gens.len(), nl.degree(), fresh, |idx| {
            let hs: Vec<&CoeffVec> = idx.iter().map(|&i| &gens[i]).collect();
            absorb(&mut span, &nl.multilinear(&hs), cutoff, &mut chain.discarded);
            span.dim() < full
        });
        if span.dim() == start {
            chain.stabilized = true;
            break;
        }
        fresh = gens.len();
        gens.extend(span.basis_from(start));
        chain.levels.push(span.clone());
    }
    chain.stabilized |= span.dim() == full;
    chain
}

fn is_theta(v: &CoeffVec) -> bool {
    v.modes().all(|m| m.field == Field::Temperature)
}

fn boussinesq_chain(seed: &SpanSet, max_depth: usize, cutoff: u32) -> SubspaceChain {
    let (mut span, mut chain, full) = start_chain(seed, ModelKind::Boussinesq, cutoff);
    let (mut theta, mut xi): (Vec<CoeffVec>, Vec<CoeffVec>) = span.basis_from(0).into_iter().partition(is_theta);
    let (mut t_fresh, mut x_fresh) = (0, 0);
    for _ in 0..max_depth {
        if span.dim() == full || (theta.len() == t_fresh && xi.len() == x_fresh) {
            chain.stabilized = true;
            break;
        }
        let start = span.dim();
        // temperature brackets g[b(d_x e_k, e_j) - b(d_x e_j, e_k)]; the gravity factor only scales
        fresh_tuples(theta.len(), 2, t_fresh, |idx| {
            if idx[0] != idx[1] {
                absorb(&mut span, &theta_bracket_vec(1.0, &theta[idx[0]], &theta[idx[1]]), cutoff, &mut chain.discarded);
            }
            true
        });
        // buoyancy coupling: a temperature direction phi yields the vorticity direction d_x phi
        for phi in &theta[t_fresh..] {
            absorb(&mut span, &dx(phi, Field::Vorticity), cutoff, &mut chain.discarded);
        }
        fresh_tuples(xi.len(), 2, x_fresh, |idx| {
            absorb(&mut span, &vorticity_bracket_vec(&xi[idx[0]], &xi[idx[1]]), cutoff, &mut chain.discarded);
            true
        });
        if span.dim() == start {
            chain.stabilized = true;
            break;
        }
        t_fresh = theta.len();
        x_fresh = xi.len();
        for v in span.basis_from(start) {
            if is_theta(&v) {
                theta.push(v);
            } else {
                xi.push(v);
            }
        }
        chain.levels.push(span.clone());
    }
    chain.stabilized |= span.dim() == full;
    chain
}

/// Compares, level by level, the chain of diagonal images `N_M(g)` with the chain of full
/// multilinear images.
///
/// The diagonal span of a level is estimated from random combinations `g` of its basis,
/// sampled until `DIAGONAL_PATIENCE` consecutive samples add nothing. The Boussinesq system
/// uses its plain bilinear transport term here, not the bracket rules.
pub fn polarization_equivalence(
    seed: &SpanSet,
    nl: &Nonlinearity,
    depth: usize,
    cutoff: u32,
    rng_seed: u64,
) -> Result<bool, SaturationError> {
    validate_seed(seed, nl, cutoff)?;
    let full_chain = multilinear_chain(seed, nl, depth, cutoff);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut ignored = BTreeSet::new();
    let full = lattice_modes(nl.model(), cutoff).len();
    let mut diag = vec![SpanSet::from_vectors(&seed.basis())];
    for _ in 0..depth {
        let prev = diag.last().unwrap();
        let basis = prev.basis();
        let mut next = prev.clone();
        let mut idle = 0;
        while idle < DIAGONAL_PATIENCE && next.dim() < full && !basis.is_empty() {
            let mut g = CoeffVec::new();
            for b in &basis {
                let r: f64 = StandardNormal.sample(&mut rng);
                g.add_scaled(r, b);
            }
            let before = next.dim();
            absorb(&mut next, &nl.diagonal(&g), cutoff, &mut ignored);
            idle = if next.dim() > before { 0 } else { idle + 1 };
        }
        diag.push(next);
    }
    Ok((0..=depth).all(|k| full_chain.level(k).same_span(&diag[k])))
}
