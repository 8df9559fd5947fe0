//! Closure of a frequency set under admissible moves (3D Euler).

use std::collections::{BTreeMap, BTreeSet};

use mode_algebra::{canonical, canonical_box, WaveVector};
use serde::Serialize;

use crate::SaturationError;

/// `j + k` is admissible when `j, k` are linearly independent and `|j| != |k|`.
pub fn admissible(j: &WaveVector, k: &WaveVector) -> bool {
    j.independent_of(k) && j.norm2() != k.norm2()
}

#[derive(Clone, Debug, Serialize)]
pub struct MoveGraph {
    pub cutoff: u32,
    /// Canonical node and the generation in which it first appeared.
    pub nodes: BTreeMap<WaveVector, usize>,
    /// Nodes of the last generation that added anything.
    pub frontier: BTreeSet<WaveVector>,
    pub generations: usize,
}

impl MoveGraph {
    pub fn contains(&self, k: WaveVector) -> bool {
        canonical(k).map(|(c, _)| self.nodes.contains_key(&c)).unwrap_or(false)
    }

    /// Whether every nonzero frequency in the box was reached.
    pub fn covers_box(&self) -> bool {
        self.nodes.len() == canonical_box(3, self.cutoff).len()
    }

    pub fn generation_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.generations + 1];
        for g in self.nodes.values() {
            sizes[*g] += 1;
        }
        sizes
    }

    pub fn to_json(&self) -> String {
        let nodes: Vec<_> = self.nodes.iter().map(|(k, g)| (k, g)).collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "model": "euler3d",
            "cutoff": self.cutoff,
            "generations": self.generations,
            "generation_sizes": self.generation_sizes(),
            "covers_box": self.covers_box(),
            "nodes": nodes,
            "frontier": self.frontier,
        }))
        .expect("graph serializes")
    }
}

/// Closure of `z` (and its negatives) under admissible moves inside `[-cutoff, cutoff]^3`.
///
/// Generation `n` collects the moves available from nodes of generations `< n`; only pairs
/// involving at least one generation `n - 1` node are new work.
pub fn determining_modes(z: &[WaveVector], cutoff: u32) -> Result<MoveGraph, SaturationError> {
    let mut nodes = BTreeMap::new();
    for &k in z {
        if k.dim() != 3 {
            return Err(mode_algebra::ModeError::Dimension(k.dim()).into());
        }
        let (c, _) = canonical(k)?;
        if c.linf() > cutoff {
            return Err(SaturationError::FrequencyOutsideCutoff(c));
        }
        nodes.insert(c, 0);
    }
    let signed = |set: &[WaveVector]| -> Vec<WaveVector> { set.iter().flat_map(|k| [*k, k.neg()]).collect() };
    let mut all: Vec<WaveVector> = signed(&nodes.keys().copied().collect::<Vec<_>>());
    let mut newest = all.clone();
    let mut frontier: BTreeSet<WaveVector> = nodes.keys().copied().collect();
    let mut generation = 0;
    loop {
        let mut found = BTreeSet::new();
        for j in &newest {
            for k in &all {
                if !admissible(j, k) {
                    continue;
                }
                let l = j.add(k);
                if l.is_zero() || l.linf() > cutoff {
                    continue;
                }
                let (c, _) = canonical(l)?;
                if !nodes.contains_key(&c) {
                    found.insert(c);
                }
            }
        }
        if found.is_empty() {
            break;
        }
        generation += 1;
        for c in &found {
            nodes.insert(*c, generation);
        }
        let fresh: Vec<WaveVector> = found.iter().copied().collect();
        newest = signed(&fresh);
        all.extend(newest.iter().copied());
        frontier = found;
    }
    Ok(MoveGraph { cutoff, nodes, frontier, generations: generation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d3(a: i32, b: i32, c: i32) -> WaveVector {
        WaveVector::d3(a, b, c)
    }

    #[test]
    fn predicate() {
        assert!(admissible(&d3(1, 1, 1), &d3(1, 0, 0)));
        assert!(!admissible(&d3(1, 0, 0), &d3(0, 1, 0)));
        assert!(!admissible(&d3(1, 0, 0), &d3(2, 0, 0)));
    }

    #[test]
    fn axes_alone_stall() {
        let g = determining_modes(&[d3(1, 0, 0), d3(0, 1, 0), d3(0, 0, 1)], 5).unwrap();
        assert_eq!(g.generations, 0);
        assert_eq!(g.nodes.len(), 3);
        assert!(!g.covers_box());
    }

    #[test]
    fn axes_plus_diagonal_fill_the_box() {
        let g = determining_modes(&[d3(1, 0, 0), d3(0, 1, 0), d3(0, 0, 1), d3(1, 1, 1)], 5).unwrap();
        assert!(g.covers_box());
        assert_eq!(g.nodes[&d3(2, 1, 1)], 1);
        assert!(g.contains(d3(-5, 5, -5)));
    }

    #[test]
    fn closure_ignores_input_order_and_duplicates() {
        let a = determining_modes(&[d3(1, 1, 1), d3(0, 0, 1), d3(0, 1, 0), d3(1, 0, 0)], 3).unwrap();
        let b = determining_modes(&[d3(0, 1, 0), d3(-1, -1, -1), d3(1, 0, 0), d3(0, 0, -1), d3(0, 1, 0)], 3).unwrap();
        assert_eq!(a.nodes, b.nodes);
    }

    #[test]
    fn generations_are_built_from_earlier_ones() {
        let g = determining_modes(&[d3(1, 0, 0), d3(0, 1, 0), d3(0, 0, 1), d3(1, 1, 1)], 3).unwrap();
        for (l, &gen) in &g.nodes {
            if gen == 0 {
                continue;
            }
            let earlier: Vec<WaveVector> =
                g.nodes.iter().filter(|(_, &h)| h < gen).flat_map(|(k, _)| [*k, k.neg()]).collect();
            let ok = earlier.iter().any(|j| earlier.iter().any(|k| admissible(j, k) && (j.add(k) == *l || j.add(k) == l.neg())));
            assert!(ok, "{l}");
        }
    }

    #[test]
    fn outside_seed_rejected() {
        assert!(determining_modes(&[d3(4, 0, 0)], 3).is_err());
    }
}
