use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;

use super::{default_wiring, RankOracle};
use crate::error::{Error, Result};
use crate::graph::{Dense, EdgeSet, Multigraph, RayedGraph, VertexId, VertexSet};

/// A minor obtained by deleting and contracting edges.
#[derive(Clone, Debug)]
pub struct Minor {
    pub base: RayedGraph,
    /// Requested deletions plus contracted edges that closed a cycle.
    pub deleted: EdgeSet,
    /// Acyclic part of the requested contraction.
    pub contracted: EdgeSet,
    pub quotient: RayedGraph,
    pub projection: BTreeMap<VertexId, VertexId>,
    /// Quotient vertices whose class contains a wired base vertex.
    pub wired: VertexSet,
}

impl Minor {
    /// Rank oracle of the quotient, wired as inherited from the base.
    pub fn oracle(&self) -> RankOracle {
        RankOracle::with_wiring(&self.quotient, &self.wired).expect("wired vertices exist")
    }
}

pub fn minor(g: &RayedGraph, delete: &EdgeSet, contract: &EdgeSet) -> Result<Minor> {
    g.core.check_edges(delete)?;
    g.core.check_edges(contract)?;
    if let Some(e) = delete.intersection(contract).next() {
        return Err(Error::input(format!(
            "edge {e} is both deleted and contracted"
        )));
    }
    let d = Dense::new(g);
    let base_wired = default_wiring(g);
    let wired: Vec<bool> = d.vids.iter().map(|v| base_wired.contains(v)).collect();
    let n = d.n();
    let node = |v: usize| if wired[v] { n } else { v };

    let mut deleted = delete.clone();
    let mut contracted = EdgeSet::new();
    let mut acyclic = UnionFind::<usize>::new(n + 1);
    let mut classes = UnionFind::<usize>::new(n);
    for e in contract {
        let i = d.edge_index(e).expect("checked");
        let (a, b) = d.ends[i];
        if acyclic.union(node(a), node(b)) {
            classes.union(a, b);
            contracted.insert(e.clone());
        } else {
            deleted.insert(e.clone());
        }
    }

    let mut rep: BTreeMap<usize, VertexId> = BTreeMap::new();
    for v in 0..n {
        rep.entry(classes.find(v))
            .or_insert_with(|| d.vids[v].clone());
    }
    let projection: BTreeMap<VertexId, VertexId> = (0..n)
        .map(|v| (d.vids[v].clone(), rep[&classes.find(v)].clone()))
        .collect();

    let mut core = Multigraph::new();
    for v in rep.values() {
        core.add_vertex(v.clone());
    }
    for (e, u, v) in g.core.edges() {
        if !deleted.contains(e) && !contracted.contains(e) {
            core.add_edge(e.clone(), projection[u].clone(), projection[v].clone())?;
        }
    }
    let mut quotient = RayedGraph::from(core);
    for (r, at) in g.rays() {
        quotient.add_ray(r.clone(), projection[at].clone())?;
    }
    let wired = (0..n)
        .filter(|&v| wired[v])
        .map(|v| projection[&d.vids[v]].clone())
        .collect();
    Ok(Minor {
        base: g.clone(),
        deleted,
        contracted,
        quotient,
        projection,
        wired,
    })
}
