use fixedbitset::FixedBitSet;

use super::{EdgeId, EdgeSet, RayedGraph, VertexId};
use crate::error::{Error, Result};

/// Index-based snapshot of a rayed graph. Vertices and edges are numbered in
/// sorted id order.
#[derive(Clone, Debug)]
pub struct Dense {
    pub vids: Vec<VertexId>,
    pub eids: Vec<EdgeId>,
    pub ends: Vec<(usize, usize)>,
    pub rays: Vec<usize>,
    /// Incident edges per vertex; a loop is listed once.
    pub inc: Vec<Vec<usize>>,
}

impl Dense {
    pub fn new(g: &RayedGraph) -> Dense {
        let vids: Vec<VertexId> = g.vertices().iter().cloned().collect();
        let index = |v: &VertexId| vids.binary_search(v).expect("endpoint is a vertex");
        let mut eids = Vec::with_capacity(g.edge_count());
        let mut ends = Vec::with_capacity(g.edge_count());
        let mut inc = vec![Vec::new(); vids.len()];
        for (i, (e, u, v)) in g.core.edges().enumerate() {
            let (a, b) = (index(u), index(v));
            eids.push(e.clone());
            ends.push((a, b));
            inc[a].push(i);
            if a != b {
                inc[b].push(i);
            }
        }
        let mut rays = vec![0; vids.len()];
        for at in g.rays().values() {
            rays[index(at)] += 1;
        }
        Dense {
            vids,
            eids,
            ends,
            rays,
            inc,
        }
    }

    pub fn n(&self) -> usize {
        self.vids.len()
    }

    pub fn m(&self) -> usize {
        self.eids.len()
    }

    pub fn vertex_index(&self, v: &VertexId) -> Option<usize> {
        self.vids.binary_search(v).ok()
    }

    pub fn edge_index(&self, e: &EdgeId) -> Option<usize> {
        self.eids.binary_search(e).ok()
    }

    pub fn other(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.ends[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Converts an edge-id set to a mask, rejecting unknown ids.
    pub fn mask(&self, f: &EdgeSet) -> Result<FixedBitSet> {
        let mut out = FixedBitSet::with_capacity(self.m());
        for e in f {
            let i = self
                .edge_index(e)
                .ok_or_else(|| Error::input(format!("unknown edge id {e}")))?;
            out.insert(i);
        }
        Ok(out)
    }

    pub fn full_mask(&self) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.m());
        out.insert_range(..);
        out
    }

    pub fn edge_set(&self, mask: &FixedBitSet) -> EdgeSet {
        mask.ones().map(|i| self.eids[i].clone()).collect()
    }

    /// Mask of a `u64`-encoded subset (bit i = edge i).
    pub fn mask_from_bits(&self, bits: u64) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.m());
        for i in 0..self.m() {
            if bits >> i & 1 == 1 {
                out.insert(i);
            }
        }
        out
    }
}
