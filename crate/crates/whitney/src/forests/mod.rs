//! Free minimal spanning forests, pruning to leafless forests, and covers of
//! rayed graphs by leafless forests or by cycles through wedge endpoints.

mod cover;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::connect::components;
use crate::graph::cycles::fundamental_cycles;
use crate::graph::{Dense, EdgeId, EdgeSet, RayedGraph};

pub use cover::{
    cover_violations, leafless_cover, wedge_classes, wedge_cover, wedge_cover_violations,
    ClassCover, ForestCover, WedgeClassCover, WedgeCover, WedgeCycle,
};

/// Strict total order on edge ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<EdgeId>", into = "Vec<EdgeId>")]
pub struct EdgeOrder {
    order: Vec<EdgeId>,
    position: BTreeMap<EdgeId, usize>,
}

impl TryFrom<Vec<EdgeId>> for EdgeOrder {
    type Error = Error;

    fn try_from(order: Vec<EdgeId>) -> Result<Self> {
        EdgeOrder::new(order)
    }
}

impl From<EdgeOrder> for Vec<EdgeId> {
    fn from(o: EdgeOrder) -> Self {
        o.order
    }
}

impl EdgeOrder {
    pub fn new(order: Vec<EdgeId>) -> Result<EdgeOrder> {
        let mut position = BTreeMap::new();
        for (i, e) in order.iter().enumerate() {
            if position.insert(e.clone(), i).is_some() {
                return Err(Error::input(format!("edge {e} appears twice in the order")));
            }
        }
        Ok(EdgeOrder { order, position })
    }

    /// Edges of `g` in sorted id order.
    pub fn sorted(g: &RayedGraph) -> EdgeOrder {
        EdgeOrder::new(g.edge_ids().into_iter().collect()).expect("ids are distinct")
    }

    /// Edges of `g` in a seeded random order.
    pub fn shuffled(g: &RayedGraph, seed: u64) -> EdgeOrder {
        let mut order: Vec<EdgeId> = g.edge_ids().into_iter().collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        EdgeOrder::new(order).expect("ids are distinct")
    }

    pub fn as_slice(&self) -> &[EdgeId] {
        &self.order
    }

    pub fn position(&self, e: &EdgeId) -> Option<usize> {
        self.position.get(e).copied()
    }

    fn check_covers(&self, g: &RayedGraph) -> Result<()> {
        match g
            .edge_ids()
            .into_iter()
            .find(|e| !self.position.contains_key(e))
        {
            Some(e) => Err(Error::input(format!("edge {e} is missing from the order"))),
            None => Ok(()),
        }
    }
}

/// The free minimal spanning forest: every edge that is not the largest edge
/// of some cycle. Computed greedily in increasing order. Ids in the order that
/// are not edges of `g` are ignored.
pub fn fmsf(g: &RayedGraph, order: &EdgeOrder) -> Result<EdgeSet> {
    order.check_covers(g)?;
    let d = Dense::new(g);
    let mut uf = UnionFind::<usize>::new(d.n());
    let mut out = EdgeSet::new();
    for e in order.as_slice() {
        let Some(i) = d.edge_index(e) else { continue };
        let (a, b) = d.ends[i];
        if uf.union(a, b) {
            out.insert(e.clone());
        }
    }
    Ok(out)
}

/// True when `f` contains no cycle (a loop is a cycle).
pub fn is_acyclic(g: &RayedGraph, f: &EdgeSet) -> bool {
    let d = Dense::new(g);
    let mut uf = UnionFind::<usize>::new(d.n());
    f.iter().all(|e| match d.edge_index(e) {
        Some(i) => uf.union(d.ends[i].0, d.ends[i].1),
        None => false,
    })
}

/// True when every cycle meeting `s` lies inside `s`, that is, `s` is a union
/// of blocks, bridges and loops.
pub fn is_cycle_closed(g: &RayedGraph, s: &EdgeSet) -> Result<bool> {
    g.core.check_edges(s)?;
    let d = Dense::new(g);
    let mut uf = UnionFind::<usize>::new(d.m());
    for c in fundamental_cycles(d.n(), &d.ends) {
        let mut it = c.ones();
        if let Some(first) = it.next() {
            for e in it {
                uf.union(first, e);
            }
        }
    }
    let inside = d.mask(s)?;
    let mut class_in: BTreeMap<usize, bool> = BTreeMap::new();
    for e in 0..d.m() {
        let here = inside.contains(e);
        if *class_in.entry(uf.find(e)).or_insert(here) != here {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FmsfReport {
    /// The forest of `g` restricted to `s` equals the forest of `s`.
    pub restriction: bool,
    /// Every vertex of a rayed component lies in a rayed forest component.
    pub ray_components: bool,
    pub violations: Vec<String>,
}

/// Checks the restriction and ray-component properties of the forest for a
/// cycle-closed edge subset `s`.
pub fn check_fmsf_lemmas(g: &RayedGraph, order: &EdgeOrder, s: &EdgeSet) -> Result<FmsfReport> {
    if !is_cycle_closed(g, s)? {
        return Err(Error::precondition("edge subset is not cycle-closed"));
    }
    let whole = fmsf(g, order)?;
    let part = fmsf(&g.edge_subgraph(s), order)?;
    let restricted: EdgeSet = whole.intersection(s).cloned().collect();
    let mut violations = Vec::new();
    if restricted != part {
        let diff: Vec<String> = restricted
            .symmetric_difference(&part)
            .map(|e| e.to_string())
            .collect();
        violations.push(format!("restriction differs on {}", diff.join(",")));
    }
    let restriction = violations.is_empty();
    let graph_parts = components(g, &g.edge_ids())?;
    let forest_parts = components(g, &whole)?;
    for block in graph_parts.blocks.iter().filter(|b| !b.rays.is_empty()) {
        for v in &block.vertices {
            let i = forest_parts
                .block_of(v)
                .expect("every vertex has a component");
            if forest_parts.blocks[i].rays.is_empty() {
                violations.push(format!("vertex {v} lies in a ray-free forest component"));
            }
        }
    }
    let ray_components = violations.len() == usize::from(!restriction);
    Ok(FmsfReport {
        restriction,
        ray_components,
        violations,
    })
}

/// Removes edges at ray-free vertices of degree one until none remain. What
/// is left is the union of all paths in `f` between distinct rays.
pub fn prune_leafless(g: &RayedGraph, f: &EdgeSet) -> Result<EdgeSet> {
    g.core.check_edges(f)?;
    if !is_acyclic(g, f) {
        return Err(Error::precondition("edge set is not a forest"));
    }
    let d = Dense::new(g);
    let mut keep = d.mask(f)?;
    let mut degree = vec![0usize; d.n()];
    for e in keep.ones() {
        degree[d.ends[e].0] += 1;
        degree[d.ends[e].1] += 1;
    }
    let mut stack: Vec<usize> = (0..d.n())
        .filter(|&v| degree[v] == 1 && d.rays[v] == 0)
        .collect();
    while let Some(v) = stack.pop() {
        let Some(&e) = d.inc[v].iter().find(|&&e| keep.contains(e)) else {
            continue;
        };
        keep.set(e, false);
        degree[v] -= 1;
        let w = d.other(e, v);
        degree[w] -= 1;
        if degree[w] == 1 && d.rays[w] == 0 {
            stack.push(w);
        }
    }
    Ok(d.edge_set(&keep))
}

/// A forest whose leaves all carry rays and whose non-trivial components
/// carry at least three rays each.
pub fn verify_leafless(g: &RayedGraph, f: &EdgeSet) -> bool {
    leafless_violations(g, f).is_empty()
}

pub(crate) fn leafless_violations(g: &RayedGraph, f: &EdgeSet) -> Vec<String> {
    if g.core.check_edges(f).is_err() {
        return vec!["edge set names unknown edges".into()];
    }
    if !is_acyclic(g, f) {
        return vec!["edge set contains a cycle".into()];
    }
    let mut out = Vec::new();
    let d = Dense::new(g);
    let mask = d.mask(f).expect("checked");
    let mut degree = vec![0usize; d.n()];
    for e in mask.ones() {
        degree[d.ends[e].0] += 1;
        degree[d.ends[e].1] += 1;
    }
    for v in (0..d.n()).filter(|&v| degree[v] == 1 && d.rays[v] == 0) {
        out.push(format!("vertex {} is a leaf without a ray", d.vids[v]));
    }
    for block in components(g, f).expect("checked").blocks {
        if !block.edges.is_empty() && block.rays.len() < 3 {
            let first = block.vertices.iter().next().expect("nonempty");
            out.push(format!(
                "forest component at {first} carries {} rays",
                block.rays.len()
            ));
        }
    }
    out
}

pub(crate) fn span_mask(d: &Dense, edges: &FixedBitSet) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(d.n());
    for e in edges.ones() {
        out.insert(d.ends[e].0);
        out.insert(d.ends[e].1);
    }
    out
}
