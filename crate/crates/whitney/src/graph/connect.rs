use std::collections::{BTreeSet, VecDeque};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::{Dense, EdgeId, EdgeSet, Multigraph, RayId, RayedGraph, VertexId, VertexSet};
use crate::error::{Error, Result};

/// One connected component of a restricted subgraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub vertices: VertexSet,
    pub edges: EdgeSet,
    pub rays: BTreeSet<RayId>,
}

/// Components of the subgraph on all vertices with a restricted edge set,
/// ordered by smallest vertex id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentPartition {
    pub blocks: Vec<Block>,
}

impl ComponentPartition {
    /// Index of the block containing `v`.
    pub fn block_of(&self, v: &VertexId) -> Option<usize> {
        self.blocks.iter().position(|b| b.vertices.contains(v))
    }
}

pub(crate) fn component_labels(d: &Dense, allowed: impl Fn(usize) -> bool) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; d.n()];
    let mut count = 0;
    for s in 0..d.n() {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &d.inc[v] {
                if !allowed(e) {
                    continue;
                }
                let w = d.other(e, v);
                if label[w] == usize::MAX {
                    label[w] = count;
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

pub fn components(g: &RayedGraph, restrict: &EdgeSet) -> Result<ComponentPartition> {
    g.core.check_edges(restrict)?;
    let d = Dense::new(g);
    let mask = d.mask(restrict)?;
    let (label, count) = component_labels(&d, |e| mask.contains(e));
    let mut blocks = vec![
        Block {
            vertices: VertexSet::new(),
            edges: EdgeSet::new(),
            rays: BTreeSet::new()
        };
        count
    ];
    for (v, &l) in label.iter().enumerate() {
        blocks[l].vertices.insert(d.vids[v].clone());
    }
    for e in mask.ones() {
        blocks[label[d.ends[e].0]].edges.insert(d.eids[e].clone());
    }
    for (r, at) in g.rays() {
        let v = d.vertex_index(at).expect("ray attachment exists");
        blocks[label[v]].rays.insert(r.clone());
    }
    Ok(ComponentPartition { blocks })
}

/// Number of ends of a component, i.e. the rays it carries.
pub fn end_count(block: &Block) -> usize {
    block.rays.len()
}

/// Outcome of a weak connectivity test; on failure the witness is the removed
/// set and the ray-free component it leaves behind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakConnectivity {
    pub connected: bool,
    pub witness: Option<(VertexSet, VertexSet)>,
}

/// Ray-free components of `g - removed`, as vertex index lists.
pub(crate) fn finite_components_after(d: &Dense, removed: &[usize]) -> Option<Vec<usize>> {
    let mut seen = vec![false; d.n()];
    for &r in removed {
        seen[r] = true;
    }
    for s in 0..d.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut rays = d.rays[s];
        let mut i = 0;
        while i < comp.len() {
            let v = comp[i];
            i += 1;
            for &e in &d.inc[v] {
                let w = d.other(e, v);
                if !seen[w] {
                    seen[w] = true;
                    rays += d.rays[w];
                    comp.push(w);
                }
            }
        }
        if rays == 0 {
            comp.sort_unstable();
            return Some(comp);
        }
    }
    None
}

pub fn is_weakly_n_connected(g: &RayedGraph, n: usize) -> Result<WeakConnectivity> {
    if n == 0 {
        return Err(Error::input("connectivity order must be at least 1"));
    }
    let d = Dense::new(g);
    if let Some(comp) = finite_components_after(&d, &[]) {
        let names: Vec<String> = comp.iter().map(|&v| d.vids[v].to_string()).collect();
        return Err(Error::precondition(format!(
            "component {{{}}} has no ray; use the strong connectivity check",
            names.join(",")
        )));
    }
    for k in 1..n {
        for removed in (0..d.n()).combinations(k) {
            if let Some(comp) = finite_components_after(&d, &removed) {
                let s = removed.iter().map(|&v| d.vids[v].clone()).collect();
                let c = comp.iter().map(|&v| d.vids[v].clone()).collect();
                return Ok(WeakConnectivity {
                    connected: false,
                    witness: Some((s, c)),
                });
            }
        }
    }
    Ok(WeakConnectivity {
        connected: true,
        witness: None,
    })
}

pub fn is_strongly_n_connected(g: &Multigraph, n: usize) -> Result<bool> {
    let d = Dense::new(&RayedGraph::from(g.clone()));
    let (_, count) = component_labels(&d, |_| true);
    if count > 1 {
        return Err(Error::precondition("graph is disconnected"));
    }
    for k in 1..n.min(d.n()) {
        for removed in (0..d.n()).combinations(k) {
            let mut gone = vec![false; d.n()];
            for &r in &removed {
                gone[r] = true;
            }
            let (label, _) = component_labels(&d, |e| {
                let (a, b) = d.ends[e];
                !gone[a] && !gone[b]
            });
            let kept: BTreeSet<usize> =
                (0..d.n()).filter(|&v| !gone[v]).map(|v| label[v]).collect();
            if kept.len() > 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A path of two distinct edges through a center vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Wedge {
    pub left: EdgeId,
    pub center: VertexId,
    pub right: EdgeId,
    pub endpoints: (VertexId, VertexId),
}

/// All wedges, each unordered pair of incident edges listed once with
/// `left < right`. Loops and pairs leading back to the same vertex do not form
/// paths and are skipped.
pub fn wedges(g: &Multigraph) -> Vec<Wedge> {
    let mut out = Vec::new();
    for z in g.vertices() {
        let star: Vec<(EdgeId, VertexId)> = g
            .incident(z)
            .into_iter()
            .filter(|e| !g.is_loop(e))
            .map(|e| {
                let w = g.other_end(&e, z).expect("incident").clone();
                (e, w)
            })
            .collect();
        for (i, (e, x)) in star.iter().enumerate() {
            for (f, y) in &star[i + 1..] {
                if x != y {
                    out.push(Wedge {
                        left: e.clone(),
                        center: z.clone(),
                        right: f.clone(),
                        endpoints: (x.clone(), y.clone()),
                    });
                }
            }
        }
    }
    out
}
