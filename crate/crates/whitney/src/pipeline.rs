//! End-to-end checks: recovering a vertex isomorphism from a weak isomorphism
//! of well-connected rayed graphs, and producing Whitney operations that
//! implement an arbitrary weak isomorphism.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forests::{wedge_classes, wedge_cover, ClassCover};
use crate::graph::connect::components;
use crate::graph::{
    is_strongly_n_connected, is_weakly_n_connected, EdgeId, EdgeSet, RayedGraph, VertexId,
};
use crate::ops::{invert_sequence, replay, OpSequence, WhitneyOp};
use crate::structure::{enumerate_maximal_bananas, Banana};
use crate::tutte::{
    block_decompose, implementing_isomorphism, synthesize_twists, synthesize_twists_protecting,
    Piece, PieceKind,
};
use crate::weakiso::{
    check_weak_isomorphism, extract_induced_isomorphism, wedge_image, EdgeBijection, Extraction,
};

type VertexMap = BTreeMap<VertexId, VertexId>;

/// How a wedge class was handled during the rigidity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassStatus {
    pub centers: Vec<VertexId>,
    /// `cycles`, `forest`, or `none` when no cover was found.
    pub cover: String,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityReport {
    /// `classical` for ray-free strongly 3-connected inputs, `rayed` otherwise.
    pub route: String,
    pub classes: Vec<ClassStatus>,
    pub vertex_map: VertexMap,
}

fn ensure_weak_iso(g1: &RayedGraph, g2: &RayedGraph, phi: &EdgeBijection) -> Result<()> {
    phi.validate(g1, g2)?;
    let report = check_weak_isomorphism(g1, g2, phi)?;
    if !report.verdict {
        return Err(Error::precondition(
            "the bijection is not a weak isomorphism",
        ));
    }
    Ok(())
}

/// Recovers the vertex isomorphism inducing `phi`. Inputs with rays must be
/// weakly 3-connected with at least three rays in every component; ray-free
/// inputs must be strongly 3-connected.
pub fn rigidity_check(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<RigidityReport> {
    ensure_weak_iso(g1, g2, phi)?;
    let route = if g1.ray_count() == 0 {
        if !is_strongly_n_connected(&g1.core, 3)? {
            return Err(Error::precondition(
                "a ray-free graph must be strongly 3-connected",
            ));
        }
        "classical"
    } else {
        for block in components(g1, &g1.edge_ids())?.blocks {
            if block.rays.len() < 3 {
                let first = block
                    .vertices
                    .iter()
                    .next()
                    .cloned()
                    .unwrap_or_else(|| VertexId::new(""));
                return Err(Error::precondition(format!(
                    "the component at {first} carries {} rays, at least three are required",
                    block.rays.len()
                )));
            }
        }
        let weak = is_weakly_n_connected(g1, 3)?;
        if !weak.connected {
            let detail = match weak.witness {
                Some((cut, _)) => format!(" (separated by {})", join(&cut)),
                None => String::new(),
            };
            return Err(Error::precondition(format!(
                "the graph is not weakly 3-connected{detail}"
            )));
        }
        "rayed"
    };
    let mut classes = Vec::new();
    if route == "rayed" {
        for class in wedge_classes(g1)? {
            for w in &class {
                if !wedge_image(g2, phi, w)?.is_wedge {
                    return Err(Error::theorem(format!(
                        "wedge {}-{}-{} does not map to a wedge",
                        w.left, w.center, w.right
                    )));
                }
            }
            let centers = class.iter().map(|w| w.center.clone()).collect();
            let status = match wedge_cover(g1, &class) {
                Ok(cover) => {
                    let kind = match cover.classes.first().map(|c| &c.cover) {
                        Some(ClassCover::Cycles { .. }) => "cycles",
                        Some(ClassCover::Forest { .. }) => "forest",
                        None => "none",
                    };
                    ClassStatus {
                        centers,
                        cover: kind.into(),
                        note: None,
                    }
                }
                Err(e) => ClassStatus {
                    centers,
                    cover: "none".into(),
                    note: Some(e.to_string()),
                },
            };
            classes.push(status);
        }
    }
    match extract_induced_isomorphism(g1, g2, phi)? {
        Extraction::Isomorphism { vertex_map } => Ok(RigidityReport {
            route: route.into(),
            classes,
            vertex_map,
        }),
        Extraction::Failure { vertex, reason, .. } => {
            Err(Error::theorem(format!("at vertex {vertex}: {reason}")))
        }
    }
}

/// Which synthesis handled a piece.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// At most one edge; nothing to do.
    Trivial,
    /// Twists read off the Tutte decompositions of the two pieces.
    Tutte,
    /// Banana-level matching followed by twists inside each banana.
    Bananas,
}

/// Twists produced inside one banana.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BananaRoute {
    pub banana: EdgeId,
    pub image: EdgeId,
    /// True when the interior had to be turned over at its boundary.
    pub flipped: bool,
    pub ops: OpSequence,
}

/// A piece of the split first graph and the piece of the split second graph
/// its edges map onto.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub piece: usize,
    pub target: usize,
    pub kind: PieceKind,
    pub branch: Branch,
    /// Boundary vertex map of the banana graphs, for the banana branch.
    pub quotient_map: Option<VertexMap>,
    pub bananas: Vec<BananaRoute>,
    pub ops: OpSequence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineResult {
    /// Splits taking the first graph to its blocks.
    pub splits: OpSequence,
    pub routes: Vec<Route>,
    /// The inverse of the splits of the second graph, renamed into the first.
    pub joins: OpSequence,
    /// Splits, then every route in order, then joins.
    pub sequence: OpSequence,
    /// Isomorphism from the final graph onto the second graph, ignoring rays
    /// and isolated vertices.
    pub isomorphism: VertexMap,
    /// Whether the final isomorphism also matches ray counts.
    pub rays_preserved: bool,
    pub verdict: bool,
}

fn join<'a>(vs: impl IntoIterator<Item = &'a VertexId>) -> String {
    vs.into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn labeled<T>(stage: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Input(m) => Error::Input(format!("{stage}: {m}")),
        Error::Precondition(m) => Error::Precondition(format!("{stage}: {m}")),
        Error::Theorem(m) => Error::Theorem(format!("{stage}: {m}")),
        Error::Internal(m) => Error::Internal(format!("{stage}: {m}")),
        Error::Invalid(v) => {
            Error::Invalid(v.into_iter().map(|m| format!("{stage}: {m}")).collect())
        }
        other => other,
    })
}

fn strip_rays(g: &RayedGraph) -> RayedGraph {
    RayedGraph::from(g.core.clone())
}

fn restrict(phi: &EdgeBijection, edges: &EdgeSet) -> EdgeBijection {
    EdgeBijection::new(
        edges
            .iter()
            .map(|e| (e.clone(), phi.map[e].clone()))
            .collect(),
    )
}

/// Pairs each piece of the first split graph with the piece its edges map
/// onto. Edgeless pieces are paired by ray count.
fn route_pieces(p1: &[Piece], p2: &[Piece], phi: &EdgeBijection) -> Result<Vec<usize>> {
    let mut owner: BTreeMap<&EdgeId, usize> = BTreeMap::new();
    for (j, p) in p2.iter().enumerate() {
        for e in &p.edges {
            owner.insert(e, j);
        }
    }
    let mut spare: Vec<usize> = (0..p2.len()).filter(|&j| p2[j].edges.is_empty()).collect();
    spare.sort_by_key(|&j| (p2[j].rays.len(), j));
    let mut out = Vec::new();
    for (i, p) in p1.iter().enumerate() {
        let target = match p.edges.iter().next() {
            Some(e) => {
                let j = owner[&phi.map[e]];
                if phi.image(&p.edges)? != p2[j].edges {
                    return Err(Error::theorem(format!(
                        "piece {i} does not map onto a single piece"
                    )));
                }
                j
            }
            None => {
                let k = spare
                    .iter()
                    .position(|&j| p2[j].rays.len() == p.rays.len())
                    .ok_or_else(|| Error::theorem(format!("edgeless piece {i} has no partner")))?;
                spare.remove(k)
            }
        };
        if p.kind != p2[target].kind {
            return Err(Error::theorem(format!(
                "piece {i} has {} rays but its image has {}",
                p.rays.len(),
                p2[target].rays.len()
            )));
        }
        out.push(target);
    }
    Ok(out)
}

fn with_aux(g: &RayedGraph, b: &Banana, tag: &EdgeId) -> Result<(RayedGraph, EdgeId)> {
    let mut out = strip_rays(&g.edge_subgraph(&b.edges));
    let mut id = format!("aux:{tag}");
    while out.core.has_edge(&EdgeId::new(&id)) {
        id.push('\'');
    }
    let id = EdgeId::new(&id);
    out.core
        .add_edge(id.clone(), b.boundary.0.clone(), b.boundary.1.clone())?;
    Ok((out, id))
}

/// Twists inside one banana so that its edges map correctly and its boundary
/// vertices land where the banana-level isomorphism sends them.
fn banana_twists(
    h1: &RayedGraph,
    h2: &RayedGraph,
    phi: &EdgeBijection,
    b1: (&EdgeId, &Banana),
    b2: (&EdgeId, &Banana),
    theta: &VertexMap,
) -> Result<BananaRoute> {
    let (g1, aux1) = with_aux(h1, b1.1, b1.0)?;
    let (g2, aux2) = with_aux(h2, b2.1, b2.0)?;
    let mut map = restrict(phi, &b1.1.edges).map;
    map.insert(aux1.clone(), aux2);
    let phi_b = EdgeBijection::new(map);
    let mut ops = if b1.1.edges.len() > 1 {
        synthesize_twists_protecting(&g1, &g2, &phi_b, &[aux1.clone()].into_iter().collect())?.ops
    } else {
        Vec::new()
    };
    let sigma = implementing_isomorphism(&g1, &OpSequence::new(ops.clone()), &phi_b, &g2)?
        .ok_or_else(|| {
            Error::theorem(format!(
                "twists inside banana {} do not implement the map",
                b1.0
            ))
        })?;
    let (p, q) = &b1.1.boundary;
    let mut flipped = false;
    if sigma.get(p) != theta.get(p) {
        let now = replay(&g1, &OpSequence::new(ops.clone()))?.graph;
        let mut inner = now.clone();
        inner.core.remove_edge(&aux1);
        for side in interior_sides(&inner, p, q) {
            ops.push(WhitneyOp::FiniteTwist {
                x: p.clone(),
                y: q.clone(),
                side,
            });
            flipped = true;
        }
    }
    let seq = OpSequence::new(ops);
    let check = implementing_isomorphism(&g1, &seq, &phi_b, &g2)?;
    if flipped && check.as_ref().and_then(|s| s.get(p)) != theta.get(p) {
        return Err(Error::theorem(format!(
            "banana {} cannot be oriented",
            b1.0
        )));
    }
    Ok(BananaRoute {
        banana: b1.0.clone(),
        image: b2.0.clone(),
        flipped,
        ops: seq,
    })
}

/// Edge sets of the components of `g - {p, q}`, each with its attaching edges.
fn interior_sides(g: &RayedGraph, p: &VertexId, q: &VertexId) -> Vec<EdgeSet> {
    let label = crate::ops::labels_without(g, &[p, q]);
    let mut sides: BTreeMap<usize, EdgeSet> = BTreeMap::new();
    for (e, u, v) in g.core.edges() {
        let inner = if u != p && u != q {
            Some(u)
        } else if v != p && v != q {
            Some(v)
        } else {
            None
        };
        if let Some(w) = inner {
            sides.entry(label[w]).or_default().insert(e.clone());
        }
    }
    sides.into_values().collect()
}

fn route_many_ends(
    h1: &RayedGraph,
    h2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<(VertexMap, Vec<BananaRoute>)> {
    let d1 = enumerate_maximal_bananas(h1)?;
    let d2 = enumerate_maximal_bananas(h2)?;
    let mut pairs = Vec::new();
    let mut qmap = BTreeMap::new();
    for (id, b) in &d1.bananas {
        let first = b.edges.iter().next().expect("bananas are nonempty");
        let target = d2
            .banana_of(&phi.map[first])
            .ok_or_else(|| Error::internal(format!("edge {first} has no banana image")))?;
        if phi.image(&b.edges)? != d2.bananas[target].edges {
            return Err(Error::theorem(format!(
                "banana {id} does not map onto a banana"
            )));
        }
        qmap.insert(id.clone(), target.clone());
        pairs.push((id, target));
    }
    let theta =
        match extract_induced_isomorphism(&d1.quotient, &d2.quotient, &EdgeBijection::new(qmap))? {
            Extraction::Isomorphism { vertex_map } => vertex_map,
            Extraction::Failure { vertex, reason, .. } => {
                return Err(Error::theorem(format!(
                    "banana graphs at {vertex}: {reason}"
                )));
            }
        };
    let routes = pairs
        .iter()
        .map(|(a, b)| {
            banana_twists(
                h1,
                h2,
                phi,
                (a, &d1.bananas[*a]),
                (b, &d2.bananas[*b]),
                &theta,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((theta, routes))
}

fn route_piece(
    i: usize,
    j: usize,
    p1: &Piece,
    p2: &Piece,
    h1: &RayedGraph,
    h2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<Route> {
    let mut route = Route {
        piece: i,
        target: j,
        kind: p1.kind,
        branch: Branch::Trivial,
        quotient_map: None,
        bananas: Vec::new(),
        ops: OpSequence::default(),
    };
    if p1.edges.len() <= 1 {
        return Ok(route);
    }
    if !p1.connected || !p2.connected {
        return Err(Error::precondition(format!("piece {i} is not 2-connected")));
    }
    let (s1, s2) = (h1.induced(&p1.vertices), h2.induced(&p2.vertices));
    let local = restrict(phi, &p1.edges);
    match p1.kind {
        PieceKind::Finite | PieceKind::FewEnds => {
            route.branch = Branch::Tutte;
            route.ops = synthesize_twists(&s1, &s2, &local)?;
        }
        PieceKind::ManyEnds => {
            route.branch = Branch::Bananas;
            let (theta, bananas) = route_many_ends(&s1, &s2, &local)?;
            route.ops = OpSequence::new(bananas.iter().flat_map(|b| b.ops.ops.clone()).collect());
            route.quotient_map = Some(theta);
            route.bananas = bananas;
        }
    }
    Ok(route)
}

/// Renames a join of the second graph into the vertex and edge names of the
/// first. `psi` maps second-graph vertices to first-graph vertices.
fn rename_join(op: &WhitneyOp, psi: &VertexMap, back: &EdgeBijection) -> Result<WhitneyOp> {
    let v = |x: &VertexId| {
        psi.get(x)
            .cloned()
            .ok_or_else(|| Error::internal(format!("vertex {x} has no preimage")))
    };
    Ok(match op {
        WhitneyOp::FiniteJoin {
            target,
            merge,
            side,
        } => WhitneyOp::FiniteJoin {
            target: v(target)?,
            merge: v(merge)?,
            side: side.as_ref().map(|s| back.image(s)).transpose()?,
        },
        WhitneyOp::TwoEndedJoin { chain, .. } => WhitneyOp::TwoEndedJoin {
            chain: chain
                .iter()
                .map(|(a, b)| Ok((v(a)?, v(b)?)))
                .collect::<Result<Vec<_>>>()?,
            toward: None,
        },
        other => {
            return Err(Error::internal(format!(
                "unexpected {} among joins",
                other.kind()
            )))
        }
    })
}

/// Vertex map from the second split graph onto the current first graph:
/// the inverse of the edge-induced isomorphism, with isolated vertices
/// paired by ray count.
fn pull_back(now: &RayedGraph, h2: &RayedGraph, phi: &EdgeBijection) -> Result<VertexMap> {
    let forward = implementing_isomorphism(now, &OpSequence::default(), phi, h2)?
        .ok_or_else(|| Error::theorem("the twisted pieces are not isomorphic to their images"))?;
    let mut psi: VertexMap = forward
        .iter()
        .map(|(a, b)| (b.clone(), a.clone()))
        .collect();
    let isolated = |g: &RayedGraph, taken: &BTreeSet<VertexId>| -> Vec<VertexId> {
        let mut vs: Vec<VertexId> = g
            .vertices()
            .iter()
            .filter(|v| !taken.contains(*v))
            .cloned()
            .collect();
        vs.sort_by_key(|v| (g.rays_at(v), v.clone()));
        vs
    };
    let left = isolated(now, &forward.keys().cloned().collect());
    let right = isolated(h2, &forward.values().cloned().collect());
    if left.len() != right.len() {
        return Err(Error::theorem("isolated vertices do not pair up"));
    }
    psi.extend(right.into_iter().zip(left));
    Ok(psi)
}

/// Whitney operations on `g1` implementing `phi` up to a final isomorphism
/// onto `g2`: both graphs are split into blocks, each block is twisted into
/// place, and the splits of `g2` are undone.
pub fn implement_weak_iso(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<PipelineResult> {
    labeled("input", ensure_weak_iso(g1, g2, phi))?;
    if let Some(isomorphism) = implementing_isomorphism(g1, &OpSequence::default(), phi, g2)? {
        let rays_preserved = crate::graph::iso::induced_vertex_map(g1, g2, &phi.map).is_some();
        return Ok(PipelineResult {
            splits: OpSequence::default(),
            routes: Vec::new(),
            joins: OpSequence::default(),
            sequence: OpSequence::default(),
            isomorphism,
            rays_preserved,
            verdict: true,
        });
    }
    let d1 = labeled("splits of the first graph", block_decompose(g1))?;
    let d2 = labeled("splits of the second graph", block_decompose(g2))?;
    let targets = labeled("routing", route_pieces(&d1.pieces, &d2.pieces, phi))?;
    let routes = targets
        .par_iter()
        .enumerate()
        .map(|(i, &j)| {
            labeled(
                &format!("piece {i}"),
                route_piece(
                    i,
                    j,
                    &d1.pieces[i],
                    &d2.pieces[j],
                    &d1.graph,
                    &d2.graph,
                    phi,
                ),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let twists = OpSequence::new(routes.iter().flat_map(|r| r.ops.ops.clone()).collect());
    let twisted = labeled("twists", replay(&d1.graph, &twists))?.graph;
    let psi = labeled("final pieces", pull_back(&twisted, &d2.graph, phi))?;
    let undo = labeled("joins", invert_sequence(&d2.ops))?;
    let back = phi.inverse();
    let joins = OpSequence::new(
        undo.ops
            .iter()
            .map(|op| labeled("joins", rename_join(op, &psi, &back)))
            .collect::<Result<Vec<_>>>()?,
    );
    let mut all = d1.ops.ops.clone();
    all.extend(twists.ops.iter().cloned());
    all.extend(joins.ops.iter().cloned());
    let sequence = OpSequence::new(all);
    let end = labeled("final sequence", replay(g1, &sequence))?.graph;
    let isomorphism = implementing_isomorphism(g1, &sequence, phi, g2)?;
    let rays_preserved = crate::graph::iso::induced_vertex_map(&end, g2, &phi.map).is_some();
    Ok(PipelineResult {
        splits: d1.ops,
        routes,
        joins,
        sequence,
        verdict: isomorphism.is_some(),
        isomorphism: isomorphism.unwrap_or_default(),
        rays_preserved,
    })
}
