use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::connect::component_labels;
use crate::graph::flow::disjoint_paths;
use crate::graph::{is_weakly_n_connected, Dense, EdgeId, EdgeSet, RayedGraph, VertexId};

/// A maximal banana: a connected edge set with exactly two boundary vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Banana {
    pub edges: EdgeSet,
    pub boundary: (VertexId, VertexId),
}

/// Maximal bananas keyed by their smallest edge id, and the graph `Ban(G)`
/// on boundary vertices with one edge per banana (carrying the banana id)
/// and the rays of the original graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BananaDecomposition {
    pub bananas: BTreeMap<EdgeId, Banana>,
    pub quotient: RayedGraph,
}

impl BananaDecomposition {
    pub fn banana_of(&self, e: &EdgeId) -> Option<&EdgeId> {
        self.bananas
            .iter()
            .find(|(_, b)| b.edges.contains(e))
            .map(|(k, _)| k)
    }
}

fn span(d: &Dense, s: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(d.n());
    for e in s.ones() {
        out.insert(d.ends[e].0);
        out.insert(d.ends[e].1);
    }
    out
}

/// Boundary of an edge set: vertices of its span that carry a ray or meet an
/// edge outside the set.
pub(crate) fn boundary(d: &Dense, s: &FixedBitSet) -> Vec<usize> {
    span(d, s)
        .ones()
        .filter(|&v| d.rays[v] > 0 || d.inc[v].iter().any(|&e| !s.contains(e)))
        .collect()
}

pub(crate) fn edges_connected(d: &Dense, s: &FixedBitSet) -> bool {
    let Some(first) = s.ones().next() else {
        return false;
    };
    let (label, _) = component_labels(d, |e| s.contains(e));
    let home = label[d.ends[first].0];
    s.ones().all(|e| label[d.ends[e].0] == home)
}

pub(crate) fn is_banana_mask(d: &Dense, s: &FixedBitSet) -> bool {
    edges_connected(d, s) && boundary(d, s).len() == 2
}

pub fn is_banana(g: &RayedGraph, b: &EdgeSet) -> Result<bool> {
    let d = Dense::new(g);
    Ok(is_banana_mask(&d, &d.mask(b)?))
}

fn check_hypotheses(g: &RayedGraph) -> Result<()> {
    let d = Dense::new(g);
    let (label, count) = component_labels(&d, |_| true);
    let mut rays = vec![0; count];
    for v in 0..d.n() {
        rays[label[v]] += d.rays[v];
    }
    if let Some(c) = rays.iter().position(|&r| r < 3) {
        let v = (0..d.n())
            .find(|&v| label[v] == c)
            .expect("component has a vertex");
        return Err(Error::precondition(format!(
            "the component of {} has {} rays; bananas need at least three per component",
            d.vids[v], rays[c]
        )));
    }
    let w = is_weakly_n_connected(g, 2)?;
    if let Some((removed, comp)) = w.witness {
        return Err(Error::precondition(format!(
            "not weakly 2-connected: removing {removed:?} leaves the finite part {comp:?}"
        )));
    }
    Ok(())
}

/// Bananas that seed the merge: each ray-free component of `G - {p, q}`
/// together with its attaching edges.
fn separation_bananas(d: &Dense) -> Vec<FixedBitSet> {
    let mut out = Vec::new();
    for p in 0..d.n() {
        for q in p + 1..d.n() {
            let gone = |v: usize| v == p || v == q;
            let (label, _) = component_labels(d, |e| {
                let (a, b) = d.ends[e];
                !gone(a) && !gone(b)
            });
            let mut pieces: BTreeMap<usize, (FixedBitSet, bool)> = BTreeMap::new();
            for v in (0..d.n()).filter(|&v| !gone(v)) {
                let entry = pieces
                    .entry(label[v])
                    .or_insert_with(|| (FixedBitSet::with_capacity(d.m()), false));
                entry.1 |= d.rays[v] > 0;
                for &e in &d.inc[v] {
                    entry.0.insert(e);
                }
            }
            for (s, rayed) in pieces.into_values() {
                if !rayed && is_banana_mask(d, &s) {
                    out.push(s);
                }
            }
        }
    }
    out
}

struct Parts {
    of: Vec<usize>,
    sets: Vec<Option<FixedBitSet>>,
}

impl Parts {
    fn union_of(&self, ids: &[usize]) -> FixedBitSet {
        let mut u = FixedBitSet::with_capacity(self.of.len());
        for &i in ids {
            u.union_with(self.sets[i].as_ref().expect("live part"));
        }
        u
    }

    fn merge(&mut self, ids: &[usize], u: FixedBitSet) {
        let keep = ids[0];
        for &i in &ids[1..] {
            self.sets[i] = None;
        }
        for e in u.ones() {
            self.of[e] = keep;
        }
        self.sets[keep] = Some(u);
    }
}

fn merge_to_fixpoint(d: &Dense, shuffle: Option<u64>) -> Vec<FixedBitSet> {
    let m = d.m();
    let mut parts = Parts {
        of: (0..m).collect(),
        sets: (0..m)
            .map(|e| {
                let mut s = FixedBitSet::with_capacity(m);
                s.insert(e);
                Some(s)
            })
            .collect(),
    };
    let mut seeds = separation_bananas(d);
    seeds.sort_by_key(|s| std::cmp::Reverse(s.count_ones(..)));
    let mut rng = shuffle.map(ChaCha8Rng::seed_from_u64);
    if let Some(r) = rng.as_mut() {
        seeds.shuffle(r);
    }
    for x in &seeds {
        let mut ids: Vec<usize> = x.ones().map(|e| parts.of[e]).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() > 1 {
            let u = parts.union_of(&ids);
            if is_banana_mask(d, &u) {
                parts.merge(&ids, u);
            }
        }
    }
    loop {
        let mut live: Vec<usize> = (0..m).filter(|&i| parts.sets[i].is_some()).collect();
        if let Some(r) = rng.as_mut() {
            live.shuffle(r);
        }
        let mut changed = false;
        'scan: for (k, &i) in live.iter().enumerate() {
            for &j in &live[k + 1..] {
                let (a, b) = (
                    parts.sets[i].as_ref().expect("live"),
                    parts.sets[j].as_ref().expect("live"),
                );
                if span(d, a).is_disjoint(&span(d, b)) {
                    continue;
                }
                let mut u = a.clone();
                u.union_with(b);
                if is_banana_mask(d, &u) {
                    parts.merge(&[i.min(j), i.max(j)], u);
                    changed = true;
                    break 'scan;
                }
            }
        }
        if !changed {
            break;
        }
    }
    parts.sets.into_iter().flatten().collect()
}

fn decomposition(g: &RayedGraph, shuffle: Option<u64>) -> Result<BananaDecomposition> {
    check_hypotheses(g)?;
    let d = Dense::new(g);
    let mut bananas = BTreeMap::new();
    let mut quotient = RayedGraph::new();
    for s in merge_to_fixpoint(&d, shuffle) {
        let b = boundary(&d, &s);
        if b.len() != 2 || !edges_connected(&d, &s) {
            let edges: Vec<String> = d.edge_set(&s).iter().map(|e| e.to_string()).collect();
            return Err(Error::internal(format!(
                "merged part {{{}}} has {} boundary vertices",
                edges.join(","),
                b.len()
            )));
        }
        let (p, q) = (d.vids[b[0]].clone(), d.vids[b[1]].clone());
        let id = d.eids[s.ones().next().expect("nonempty")].clone();
        quotient.core.add_vertex(p.clone());
        quotient.core.add_vertex(q.clone());
        quotient.core.add_edge(id.clone(), p.clone(), q.clone())?;
        bananas.insert(
            id,
            Banana {
                edges: d.edge_set(&s),
                boundary: (p, q),
            },
        );
    }
    for (r, at) in g.rays() {
        quotient.core.add_vertex(at.clone());
        quotient.add_ray(r.clone(), at.clone())?;
    }
    Ok(BananaDecomposition { bananas, quotient })
}

/// Partition of the edges into maximal bananas. Separation-pair pieces are
/// merged first, then adjacent parts whose union is a banana, until nothing
/// changes.
pub fn enumerate_maximal_bananas(g: &RayedGraph) -> Result<BananaDecomposition> {
    decomposition(g, None)
}

/// Same decomposition with merge candidates visited in a seeded random order.
pub fn enumerate_maximal_bananas_shuffled(
    g: &RayedGraph,
    seed: u64,
) -> Result<BananaDecomposition> {
    decomposition(g, Some(seed))
}

/// Weak 3-connectivity of `Ban(G)`; false when the quotient has a ray-free
/// component.
pub fn check_ban_weakly_3_connected(d: &BananaDecomposition) -> bool {
    is_weakly_n_connected(&d.quotient, 3)
        .map(|w| w.connected)
        .unwrap_or(false)
}

/// A simple path inside banana `b` joining its two boundary vertices and
/// passing through `e`. The edge is split by a new vertex, from which two
/// disjoint paths reach the two boundary vertices.
pub fn path_through_edge_in_banana(
    g: &RayedGraph,
    dec: &BananaDecomposition,
    b: &EdgeId,
    e: &EdgeId,
) -> Result<Vec<EdgeId>> {
    let banana = dec
        .bananas
        .get(b)
        .ok_or_else(|| Error::input(format!("unknown banana {b}")))?;
    if !banana.edges.contains(e) {
        return Err(Error::input(format!("edge {e} is not in banana {b}")));
    }
    let d = Dense::new(g);
    let ei = d
        .edge_index(e)
        .ok_or_else(|| Error::input(format!("unknown edge {e}")))?;
    let (u, w) = d.ends[ei];
    if u == w {
        return Err(Error::precondition(format!("edge {e} is a loop")));
    }
    let index = |v: &VertexId| {
        d.vertex_index(v)
            .ok_or_else(|| Error::input(format!("unknown vertex {v}")))
    };
    let (p, q) = (index(&banana.boundary.0)?, index(&banana.boundary.1)?);
    let inside = d.mask(&banana.edges)?;
    let n = d.n() + 1;
    let split = d.n();
    let mut ends = d.ends.clone();
    ends[ei] = (split, u);
    ends.push((split, w));
    let mut vcap = vec![1u32; n];
    vcap[split] = 2;
    let m = d.m();
    let paths = disjoint_paths(
        n,
        &ends,
        |x| x == m || inside.contains(x),
        &vcap,
        &[split],
        &[p, q],
        2,
    );
    if paths.len() < 2 {
        return Err(Error::theorem(format!(
            "no boundary path through {e} in banana {b}"
        )));
    }
    let to_id = |x: usize| d.eids[if x == m { ei } else { x }].clone();
    let ends_at = |path: &Vec<usize>| -> usize {
        let mut v = split;
        for &x in path {
            let (a, c) = ends[x];
            v = if a == v { c } else { a };
        }
        v
    };
    let (first, second) = if ends_at(&paths[0]) == p {
        (&paths[0], &paths[1])
    } else {
        (&paths[1], &paths[0])
    };
    let mut out: Vec<EdgeId> = first.iter().rev().map(|&x| to_id(x)).collect();
    out.pop();
    out.push(e.clone());
    out.extend(second.iter().skip(1).map(|&x| to_id(x)));
    Ok(out)
}
