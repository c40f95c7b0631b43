//! Tameness: an edge set is tame when each of its components touches at most
//! two rays. Vertices not touched by the set are ignored.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Dense;
use crate::matroid::random_subset;

/// Edge count up to which every subset is examined.
pub const EXHAUSTIVE_TAME_EDGES: usize = 20;
/// Largest connected subsets in the structured family.
pub const CONNECTED_SUBSET_SIZE: usize = 8;
/// Random subsets added to the structured family.
pub const RANDOM_SUBSETS: usize = 10_000;

pub fn is_tame(d: &Dense, edges: impl Iterator<Item = usize>) -> bool {
    let mut uf = UnionFind::<usize>::new(d.n());
    let mut touched = Vec::new();
    for e in edges {
        let (a, b) = d.ends[e];
        uf.union(a, b);
        touched.push(a);
        touched.push(b);
    }
    touched.sort_unstable();
    touched.dedup();
    let mut rays = vec![0usize; d.n()];
    for v in touched {
        let r = uf.find_mut(v);
        rays[r] += d.rays[v];
        if rays[r] > 2 {
            return false;
        }
    }
    true
}

pub fn is_tame_mask(d: &Dense, mask: &FixedBitSet) -> bool {
    is_tame(d, mask.ones())
}

pub fn is_tame_bits(d: &Dense, bits: u64) -> bool {
    is_tame(d, (0..d.m()).filter(|i| bits >> i & 1 == 1))
}

/// Tameness of every subset, indexed by bit pattern.
pub fn tame_table(d: &Dense) -> Vec<bool> {
    (0..1u64 << d.m())
        .map(|bits| is_tame_bits(d, bits))
        .collect()
}

/// Connected edge subsets with at most `max` edges.
pub fn connected_subsets(d: &Dense, max: usize) -> Vec<FixedBitSet> {
    let m = d.m();
    let mut seen: HashSet<FixedBitSet> = HashSet::new();
    let mut layer: Vec<FixedBitSet> = Vec::new();
    for e in 0..m {
        let mut s = FixedBitSet::with_capacity(m);
        s.insert(e);
        if seen.insert(s.clone()) {
            layer.push(s);
        }
    }
    let mut out = layer.clone();
    for _ in 1..max {
        let mut next = Vec::new();
        for s in &layer {
            let mut verts = FixedBitSet::with_capacity(d.n());
            for e in s.ones() {
                verts.insert(d.ends[e].0);
                verts.insert(d.ends[e].1);
            }
            for v in verts.ones() {
                for &e in &d.inc[v] {
                    if s.contains(e) {
                        continue;
                    }
                    let mut t = s.clone();
                    t.insert(e);
                    if seen.insert(t.clone()) {
                        next.push(t);
                    }
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Minimal non-tame edge sets of size at most `max`. They are connected, so
/// they appear among the connected subsets.
pub fn minimal_wild_sets(d: &Dense, max: usize) -> Vec<FixedBitSet> {
    if d.rays.iter().sum::<usize>() < 3 {
        return Vec::new();
    }
    connected_subsets(d, max)
        .into_iter()
        .filter(|s| {
            !is_tame_mask(d, s)
                && s.ones().all(|e| {
                    let mut t = s.clone();
                    t.set(e, false);
                    is_tame_mask(d, &t)
                })
        })
        .collect()
}

/// Structured subset family used when `m` exceeds the exhaustive threshold:
/// the full edge set, connected subsets up to the size cap, unions of at most
/// three components of the whole graph, and seeded random subsets.
pub fn structured_family(d: &Dense, seed: u64) -> Vec<FixedBitSet> {
    let m = d.m();
    let mut out = vec![d.full_mask()];
    out.extend(connected_subsets(d, CONNECTED_SUBSET_SIZE));
    let (label, count) = crate::graph::connect::component_labels(d, |_| true);
    let comps: Vec<FixedBitSet> = (0..count)
        .map(|c| {
            let mut s = FixedBitSet::with_capacity(m);
            for e in 0..m {
                if label[d.ends[e].0] == c {
                    s.insert(e);
                }
            }
            s
        })
        .filter(|s| !s.is_clear())
        .collect();
    for i in 0..comps.len() {
        out.push(comps[i].clone());
        for j in i + 1..comps.len() {
            let mut s = comps[i].clone();
            s.union_with(&comps[j]);
            out.push(s.clone());
            for k in j + 1..comps.len() {
                let mut t = s.clone();
                t.union_with(&comps[k]);
                out.push(t);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RANDOM_SUBSETS {
        out.push(random_subset(d, &mut rng));
    }
    out
}
