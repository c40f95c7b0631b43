//! Trifurcations, Voronoi cells around disjoint trifurcations, and banana
//! decompositions.

mod bananas;

use std::collections::{BTreeMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::connect::component_labels;
use crate::graph::{Dense, EdgeSet, RayedGraph, VertexId, VertexSet};

pub use bananas::{
    check_ban_weakly_3_connected, enumerate_maximal_bananas, enumerate_maximal_bananas_shuffled,
    is_banana, path_through_edge_in_banana, Banana, BananaDecomposition,
};

/// Largest connected vertex sets tried as trifurcation candidates.
pub const MAX_FURCATION_VERTICES: usize = 4;

fn vertex_mask(d: &Dense, vs: &VertexSet) -> Result<FixedBitSet> {
    let mut out = FixedBitSet::with_capacity(d.n());
    for v in vs {
        let i = d
            .vertex_index(v)
            .ok_or_else(|| Error::input(format!("unknown vertex {v}")))?;
        out.insert(i);
    }
    Ok(out)
}

fn is_connected_vertices(d: &Dense, s: &FixedBitSet) -> bool {
    let Some(start) = s.ones().next() else {
        return false;
    };
    let mut seen = FixedBitSet::with_capacity(d.n());
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &e in &d.inc[v] {
            let w = d.other(e, v);
            if s.contains(w) && !seen.contains(w) {
                seen.insert(w);
                queue.push_back(w);
            }
        }
    }
    seen.count_ones(..) == s.count_ones(..)
}

/// Infinite sides of a connected vertex set: components of its component
/// minus the set that carry a ray, plus each ray attached inside the set.
pub(crate) fn vertex_sides(d: &Dense, s: &FixedBitSet) -> usize {
    let (label, _) = component_labels(d, |_| true);
    let Some(root) = s.ones().next() else {
        return 0;
    };
    let home = label[root];
    let (rest, _) = component_labels(d, |e| {
        let (a, b) = d.ends[e];
        !s.contains(a) && !s.contains(b)
    });
    let mut rayed = std::collections::BTreeSet::new();
    let mut inside = 0;
    for v in 0..d.n() {
        if label[v] != home || d.rays[v] == 0 {
            continue;
        }
        if s.contains(v) {
            inside += d.rays[v];
        } else {
            rayed.insert(rest[v]);
        }
    }
    rayed.len() + inside
}

/// Whether the connected, nonempty edge set `a` has at least `n` infinite
/// sides, i.e. ray-carrying components of its component with `a` removed.
pub fn is_n_furcation(g: &RayedGraph, a: &EdgeSet, n: usize) -> Result<bool> {
    g.core.check_edges(a)?;
    let d = Dense::new(g);
    let mask = d.mask(a)?;
    if mask.is_clear() {
        return Err(Error::precondition("edge set is empty"));
    }
    let mut span = FixedBitSet::with_capacity(d.n());
    for e in mask.ones() {
        span.insert(d.ends[e].0);
        span.insert(d.ends[e].1);
    }
    let (inner, _) = component_labels(&d, |e| mask.contains(e));
    let first = inner[span.ones().next().expect("nonempty")];
    if span.ones().any(|v| inner[v] != first) {
        return Err(Error::precondition("edge set is not connected"));
    }
    let (label, _) = component_labels(&d, |_| true);
    let home = label[span.ones().next().expect("nonempty")];
    let (rest, _) = component_labels(&d, |e| !mask.contains(e));
    let rayed: std::collections::BTreeSet<usize> = (0..d.n())
        .filter(|&v| label[v] == home && d.rays[v] > 0)
        .map(|v| rest[v])
        .collect();
    Ok(rayed.len() >= n)
}

/// Whether a connected vertex set has at least `n` infinite sides. Removing
/// the vertices splits its component; each ray attached inside the set is a
/// side of its own.
pub fn is_n_furcation_vertices(g: &RayedGraph, vs: &VertexSet, n: usize) -> Result<bool> {
    let d = Dense::new(g);
    let s = vertex_mask(&d, vs)?;
    if !is_connected_vertices(&d, &s) {
        return Err(Error::precondition("vertex set is empty or not connected"));
    }
    Ok(vertex_sides(&d, &s) >= n)
}

/// Connected vertex sets with at most `max` vertices, ordered by size and
/// then by the positions of their vertices in `rank`.
fn connected_vertex_sets(d: &Dense, max: usize, rank: &[usize]) -> Vec<FixedBitSet> {
    let mut seen = std::collections::HashSet::new();
    let mut layer: Vec<FixedBitSet> = (0..d.n())
        .map(|v| {
            let mut s = FixedBitSet::with_capacity(d.n());
            s.insert(v);
            s
        })
        .collect();
    seen.extend(layer.iter().cloned());
    let mut out = Vec::new();
    for _ in 0..max {
        let key = |s: &FixedBitSet| {
            let mut r: Vec<usize> = s.ones().map(|v| rank[v]).collect();
            r.sort_unstable();
            r
        };
        layer.sort_by_cached_key(key);
        out.extend(layer.iter().cloned());
        let mut next = Vec::new();
        for s in &layer {
            for v in s.ones() {
                for &e in &d.inc[v] {
                    let w = d.other(e, v);
                    if !s.contains(w) {
                        let mut t = s.clone();
                        t.insert(w);
                        if seen.insert(t.clone()) {
                            next.push(t);
                        }
                    }
                }
            }
        }
        layer = next;
    }
    out
}

fn ordering_rank(d: &Dense, ordering: Option<&[VertexId]>) -> Result<Vec<usize>> {
    let Some(order) = ordering else {
        return Ok((0..d.n()).collect());
    };
    let mut rank = vec![usize::MAX; d.n()];
    for (i, v) in order.iter().enumerate() {
        let j = d
            .vertex_index(v)
            .ok_or_else(|| Error::input(format!("unknown vertex {v}")))?;
        if rank[j] != usize::MAX {
            return Err(Error::input(format!("vertex {v} repeated in ordering")));
        }
        rank[j] = i;
    }
    if rank.contains(&usize::MAX) {
        return Err(Error::input("ordering does not list every vertex"));
    }
    Ok(rank)
}

/// Pairwise disjoint trifurcation vertex sets, grown greedily over connected
/// candidates of at most [`MAX_FURCATION_VERTICES`] vertices, smallest first
/// and then by `ordering` (sorted ids when absent). Empty when no component
/// has three rays.
pub fn maximal_disjoint_trifurcations(
    g: &RayedGraph,
    ordering: Option<&[VertexId]>,
) -> Result<Vec<VertexSet>> {
    let d = Dense::new(g);
    let rank = ordering_rank(&d, ordering)?;
    let mut used = FixedBitSet::with_capacity(d.n());
    let mut out = Vec::new();
    if crate::matroid::default_wiring(g).is_empty() {
        return Ok(out);
    }
    for s in connected_vertex_sets(&d, MAX_FURCATION_VERTICES, &rank) {
        if s.is_disjoint(&used) && vertex_sides(&d, &s) >= 3 {
            used.union_with(&s);
            out.push(s.ones().map(|v| d.vids[v].clone()).collect());
        }
    }
    Ok(out)
}

/// Trifurcation vertex sets of at most `max` vertices that avoid every set
/// in `family`. Empty exactly when the family cannot be extended by such a
/// set.
pub fn trifurcations_disjoint_from(
    g: &RayedGraph,
    family: &[VertexSet],
    max: usize,
) -> Result<Vec<VertexSet>> {
    let d = Dense::new(g);
    let mut used = FixedBitSet::with_capacity(d.n());
    for s in family {
        used.union_with(&vertex_mask(&d, s)?);
    }
    let rank: Vec<usize> = (0..d.n()).collect();
    Ok(connected_vertex_sets(&d, max, &rank)
        .into_iter()
        .filter(|s| s.is_disjoint(&used) && vertex_sides(&d, s) >= 3)
        .map(|s| s.ones().map(|v| d.vids[v].clone()).collect())
        .collect())
}

/// Partition of the vertices into cells around seeds, with the quotient
/// graph. Quotient vertices are cell ids; each edge joining two cells keeps
/// its id, and rays move to the cell of their vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellPartition {
    pub cells: BTreeMap<String, VertexSet>,
    pub quotient: RayedGraph,
}

impl CellPartition {
    pub fn cell_of(&self, v: &VertexId) -> Option<&str> {
        self.cells
            .iter()
            .find(|(_, c)| c.contains(v))
            .map(|(k, _)| k.as_str())
    }
}

pub fn cell_id(i: usize) -> String {
    format!("cell{i:03}")
}

/// Assigns every vertex to the nearest seed, ties going to the earlier seed,
/// then checks that each cell is connected and a trifurcation.
pub fn voronoi_cells(g: &RayedGraph, seeds: &[VertexSet]) -> Result<CellPartition> {
    let d = Dense::new(g);
    let mut owner = vec![usize::MAX; d.n()];
    let mut frontier = Vec::new();
    for (i, s) in seeds.iter().enumerate() {
        let mask = vertex_mask(&d, s)?;
        if !is_connected_vertices(&d, &mask) {
            return Err(Error::input(format!("seed {i} is empty or not connected")));
        }
        for v in mask.ones() {
            if owner[v] != usize::MAX {
                return Err(Error::input(format!("seeds {} and {i} overlap", owner[v])));
            }
            owner[v] = i;
            frontier.push(v);
        }
    }
    while !frontier.is_empty() {
        let mut best: BTreeMap<usize, usize> = BTreeMap::new();
        for &v in &frontier {
            for &e in &d.inc[v] {
                let w = d.other(e, v);
                if owner[w] == usize::MAX {
                    let slot = best.entry(w).or_insert(owner[v]);
                    *slot = (*slot).min(owner[v]);
                }
            }
        }
        frontier = best.keys().copied().collect();
        for (w, o) in best {
            owner[w] = o;
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::precondition(format!(
            "vertex {} is not reachable from any seed",
            d.vids[v]
        )));
    }
    let mut masks = vec![FixedBitSet::with_capacity(d.n()); seeds.len()];
    for (v, &o) in owner.iter().enumerate() {
        masks[o].insert(v);
    }
    for (i, m) in masks.iter().enumerate() {
        if !is_connected_vertices(&d, m) {
            return Err(Error::theorem(format!("{} is not connected", cell_id(i))));
        }
        if vertex_sides(&d, m) < 3 {
            return Err(Error::theorem(format!(
                "{} is not a trifurcation",
                cell_id(i)
            )));
        }
    }
    let mut quotient = RayedGraph::new();
    let mut cells = BTreeMap::new();
    for (i, m) in masks.iter().enumerate() {
        quotient.core.add_vertex(cell_id(i));
        cells.insert(cell_id(i), m.ones().map(|v| d.vids[v].clone()).collect());
    }
    for (e, &(a, b)) in d.ends.iter().enumerate() {
        if owner[a] != owner[b] {
            quotient
                .core
                .add_edge(d.eids[e].clone(), cell_id(owner[a]), cell_id(owner[b]))?;
        }
    }
    for (r, at) in g.rays() {
        let v = d.vertex_index(at).expect("ray attachment exists");
        quotient.add_ray(r.clone(), cell_id(owner[v]))?;
    }
    Ok(CellPartition { cells, quotient })
}
