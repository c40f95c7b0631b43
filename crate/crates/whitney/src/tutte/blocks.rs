use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::connect::components;
use crate::graph::{
    is_strongly_n_connected, is_weakly_n_connected, EdgeSet, RayId, RayedGraph, VertexId, VertexSet,
};
use crate::ops::{apply, labels_without, separates_rays, OpSequence, WhitneyOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PieceKind {
    /// No rays.
    Finite,
    /// One or two rays.
    FewEnds,
    /// Three or more rays.
    ManyEnds,
}

/// A component of the fully split graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub vertices: VertexSet,
    pub edges: EdgeSet,
    pub rays: BTreeSet<RayId>,
    pub kind: PieceKind,
    /// Strong 2-connectivity for pieces with at most two rays (a single edge
    /// counts), weak 2-connectivity otherwise.
    pub connected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    pub ops: OpSequence,
    pub graph: RayedGraph,
    pub pieces: Vec<Piece>,
}

/// A split at a cut vertex that detaches one of its ray-free sides.
fn finite_split(g: &RayedGraph) -> Option<WhitneyOp> {
    for v in g.vertices() {
        let label = labels_without(g, &[v]);
        let sides: BTreeSet<usize> = g
            .core
            .incident(v)
            .iter()
            .filter_map(|e| g.core.other_end(e, v))
            .filter(|w| *w != v)
            .map(|w| label[w])
            .collect();
        if sides.len() < 2 {
            continue;
        }
        for c in sides {
            let inside: VertexSet = label
                .iter()
                .filter(|(_, l)| **l == c)
                .map(|(w, _)| w.clone())
                .collect();
            if inside.iter().any(|w| g.rays_at(w) > 0) {
                continue;
            }
            let side: EdgeSet = inside.iter().flat_map(|w| g.core.incident(w)).collect();
            return Some(WhitneyOp::FiniteSplit {
                vertex: v.clone(),
                side,
                new_vertex: None,
            });
        }
    }
    None
}

/// A two-ended split of some 2-ray component at every vertex separating its
/// rays.
fn two_ended_split(g: &RayedGraph) -> Option<WhitneyOp> {
    let parts = components(g, &g.edge_ids()).ok()?;
    for block in &parts.blocks {
        if block.rays.len() != 2 {
            continue;
        }
        let rays: Vec<RayId> = block.rays.iter().cloned().collect();
        let cuts: Vec<VertexId> = block
            .vertices
            .iter()
            .filter(|v| separates_rays(g, &[*v], &rays))
            .cloned()
            .collect();
        if !cuts.is_empty() {
            let component = block.vertices.iter().next().expect("nonempty").clone();
            return Some(WhitneyOp::TwoEndedSplit {
                component,
                cuts,
                toward: None,
                copies: None,
            });
        }
    }
    None
}

fn piece_connected(g: &RayedGraph, kind: PieceKind) -> Result<bool> {
    if g.edge_count() == 0 {
        return Ok(false);
    }
    if kind == PieceKind::ManyEnds {
        return Ok(is_weakly_n_connected(g, 2)?.connected);
    }
    if g.edge_count() == 1 {
        return Ok(true);
    }
    Ok(g.core.edges().all(|(_, u, v)| u != v) && is_strongly_n_connected(&g.core, 2)?)
}

/// Splits `g` at cut vertices until every component with at most two rays is
/// a block and every component with three or more rays has no ray-free side
/// at any vertex. Ray-free sides go first as finite splits; 2-ray components
/// are then cut at every vertex separating their rays.
pub fn block_decompose(g: &RayedGraph) -> Result<BlockDecomposition> {
    let mut graph = g.clone();
    let mut ops = Vec::new();
    while let Some(op) = finite_split(&graph).or_else(|| two_ended_split(&graph)) {
        let step = apply(&op, &graph)?;
        graph = step.graph;
        ops.push(step.op);
    }
    let mut pieces = Vec::new();
    for block in components(&graph, &graph.edge_ids())?.blocks {
        let kind = match block.rays.len() {
            0 => PieceKind::Finite,
            1 | 2 => PieceKind::FewEnds,
            _ => PieceKind::ManyEnds,
        };
        let connected = piece_connected(&graph.induced(&block.vertices), kind)?;
        pieces.push(Piece {
            vertices: block.vertices,
            edges: block.edges,
            rays: block.rays,
            kind,
            connected,
        });
    }
    Ok(BlockDecomposition {
        ops: OpSequence::new(ops),
        graph,
        pieces,
    })
}
