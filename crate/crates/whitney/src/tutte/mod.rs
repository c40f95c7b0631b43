//! Tutte decomposition of finite 2-connected multigraphs into cycles, bonds
//! and 3-connected pieces, reassembly of decomposition trees, matching of
//! decompositions under cycle-preserving bijections, and twist synthesis.

mod blocks;
mod synth;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::iso::induced_vertex_map;
use crate::graph::{
    is_strongly_n_connected, EdgeId, EdgeSet, Multigraph, RayedGraph, VertexId, VertexSet,
};
use crate::ops::{replay, OpSequence};
use crate::weakiso::{check_cycle_preserving, EdgeBijection};

pub use blocks::{block_decompose, BlockDecomposition, Piece, PieceKind};
pub use synth::{synthesize_twists, synthesize_twists_protecting};

/// Prefix reserved for virtual edge ids.
pub const VIRTUAL_PREFIX: &str = "virt:";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Cycle,
    Bond,
    ThreeConnected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TutteNode {
    pub kind: NodeKind,
    pub graph: RayedGraph,
}

/// Amalgamation of two nodes along a virtual edge in each. With sorted
/// endpoints `(u1, v1)` of `va` and `(u2, v2)` of `vb`, the identification is
/// `u1 = u2, v1 = v2`, or `u1 = v2, v1 = u2` when `flipped`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub a: String,
    pub va: EdgeId,
    pub b: String,
    pub vb: EdgeId,
    pub flipped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TutteTree {
    pub nodes: BTreeMap<String, TutteNode>,
    pub links: Vec<Link>,
}

pub fn is_virtual(e: &EdgeId) -> bool {
    e.as_str().starts_with(VIRTUAL_PREFIX)
}

fn node_id(i: usize) -> String {
    format!("n{i:02}")
}

fn is_bond(h: &Multigraph) -> bool {
    h.vertex_count() == 2 && h.edges().all(|(_, u, v)| u != v)
}

fn is_cycle(h: &Multigraph) -> bool {
    h.edge_count() >= 1
        && h.vertices().iter().all(|v| h.degree(v) == 2)
        && is_strongly_n_connected(h, 1).unwrap_or(false)
}

fn classify(h: &Multigraph) -> NodeKind {
    if h.edge_count() == 2 && h.vertex_count() == 2 {
        NodeKind::Cycle
    } else if is_bond(h) {
        NodeKind::Bond
    } else if is_cycle(h) {
        NodeKind::Cycle
    } else {
        NodeKind::ThreeConnected
    }
}

fn check_two_connected(g: &Multigraph) -> Result<()> {
    if g.edge_count() == 0 {
        return Err(Error::precondition("graph has no edges"));
    }
    if let Some(v) = g.vertices().iter().find(|v| g.degree(v) == 0) {
        return Err(Error::precondition(format!("vertex {v} is isolated")));
    }
    if g.edge_count() > 1 {
        if let Some((e, _, _)) = g.edges().find(|(_, u, v)| u == v) {
            return Err(Error::precondition(format!("edge {e} is a loop")));
        }
    }
    if !is_strongly_n_connected(g, 2)? {
        return Err(Error::precondition("graph has a cut vertex"));
    }
    Ok(())
}

/// Edge classes of a split pair: one per component of `h - {a, b}` with its
/// attaching edges, and one per edge joining `a` and `b`.
fn separation_classes(h: &Multigraph, a: &VertexId, b: &VertexId) -> Vec<EdgeSet> {
    let mut label: BTreeMap<&VertexId, usize> = BTreeMap::new();
    let mut count = 0;
    for s in h.vertices() {
        if s == a || s == b || label.contains_key(s) {
            continue;
        }
        label.insert(s, count);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for e in h.incident(v) {
                let w = h.other_end(&e, v).expect("incident");
                if w != a && w != b && !label.contains_key(w) {
                    label.insert(w, count);
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    let mut classes = vec![EdgeSet::new(); count];
    for (e, u, v) in h.edges() {
        let inner = [u, v].into_iter().find(|x| *x != a && *x != b);
        match inner {
            Some(x) => {
                classes[label[x]].insert(e.clone());
            }
            None => classes.push(EdgeSet::from([e.clone()])),
        }
    }
    classes
}

struct Builder {
    nodes: Vec<Option<Multigraph>>,
    links: Vec<(usize, EdgeId, usize, EdgeId)>,
    next_virtual: usize,
}

impl Builder {
    /// Moves `part` out of node `i` into a new node, adding a virtual edge
    /// between `a` and `b` on both sides.
    fn split_off(&mut self, i: usize, part: &EdgeSet, a: &VertexId, b: &VertexId) -> usize {
        let k = self.next_virtual;
        self.next_virtual += 1;
        let va = EdgeId::new(format!("{VIRTUAL_PREFIX}{k}a"));
        let vb = EdgeId::new(format!("{VIRTUAL_PREFIX}{k}b"));
        let h = self.nodes[i].as_mut().expect("live node");
        let mut fresh = Multigraph::new();
        for e in part {
            let (u, v) = h.remove_edge(e).expect("edge of node");
            fresh.add_edge_auto(e.clone(), u, v).expect("fresh ids");
        }
        fresh
            .add_edge_auto(va.clone(), a.clone(), b.clone())
            .expect("fresh virtual");
        h.add_edge(vb.clone(), a.clone(), b.clone())
            .expect("endpoints kept");
        let dead: Vec<VertexId> = h
            .vertices()
            .iter()
            .filter(|v| h.degree(v) == 0)
            .cloned()
            .collect();
        for v in dead {
            h.remove_isolated_vertex(&v).expect("isolated");
        }
        self.nodes.push(Some(fresh));
        let j = self.nodes.len() - 1;
        for link in &mut self.links {
            if link.0 == i && part.contains(&link.1) {
                link.0 = j;
            }
            if link.2 == i && part.contains(&link.3) {
                link.2 = j;
            }
        }
        self.links.push((j, va, i, vb));
        j
    }

    /// Applies one split to node `i`; false when the node is a bond, a cycle
    /// or 3-connected.
    fn refine(&mut self, i: usize) -> bool {
        let h = self.nodes[i].as_ref().expect("live node");
        if h.edge_count() <= 3 || is_bond(h) || is_cycle(h) {
            return false;
        }
        let mut parallel: BTreeMap<(VertexId, VertexId), EdgeSet> = BTreeMap::new();
        for (e, u, v) in h.edges() {
            parallel
                .entry((u.clone(), v.clone()))
                .or_default()
                .insert(e.clone());
        }
        if let Some(((a, b), class)) = parallel.into_iter().find(|(_, c)| c.len() >= 2) {
            self.split_off(i, &class, &a, &b);
            return true;
        }
        let vs: Vec<VertexId> = h.vertices().iter().cloned().collect();
        for (x, a) in vs.iter().enumerate() {
            for b in &vs[x + 1..] {
                let classes = separation_classes(h, a, b);
                let total: usize = classes.iter().map(|c| c.len()).sum();
                let Some(part) = classes
                    .iter()
                    .find(|c| c.len() >= 2 && total - c.len() >= 2)
                else {
                    continue;
                };
                if classes.len() >= 3
                    || (classes.len() == 2 && classes.iter().all(|c| c.len() >= 2))
                {
                    let part = part.clone();
                    self.split_off(i, &part, a, b);
                    return true;
                }
            }
        }
        false
    }

    fn kind(&self, i: usize) -> NodeKind {
        classify(self.nodes[i].as_ref().expect("live node"))
    }

    /// Merges adjacent bonds and adjacent cycles until none remain.
    fn merge_same_kind(&mut self) {
        loop {
            let hit = self.links.iter().position(|(x, _, y, _)| {
                let (kx, ky) = (self.kind(*x), self.kind(*y));
                kx == ky && kx != NodeKind::ThreeConnected
            });
            let Some(l) = hit else { break };
            let (x, vx, y, vy) = self.links.remove(l);
            let (keep, gone) = (x.min(y), x.max(y));
            let other = self.nodes[y].take().expect("live node");
            let mut merged = self.nodes[x].take().expect("live node");
            merged.remove_edge(&vx);
            for (e, u, v) in other.edges() {
                if e != &vy {
                    merged
                        .add_edge_auto(e.clone(), u.clone(), v.clone())
                        .expect("disjoint ids");
                }
            }
            self.nodes[keep] = Some(merged);
            for link in &mut self.links {
                if link.0 == gone {
                    link.0 = keep;
                }
                if link.2 == gone {
                    link.2 = keep;
                }
            }
        }
    }
}

/// Unique decomposition of a 2-connected multigraph: split pairs are cut
/// until every node is a bond, a cycle or 3-connected, then adjacent nodes of
/// the same kind are merged back.
pub fn tutte_decompose(g: &Multigraph) -> Result<TutteTree> {
    check_two_connected(g)?;
    if let Some(e) = g.edge_ids().into_iter().find(is_virtual) {
        return Err(Error::input(format!(
            "edge id {e} uses the reserved prefix {VIRTUAL_PREFIX}"
        )));
    }
    let mut b = Builder {
        nodes: vec![Some(g.clone())],
        links: Vec::new(),
        next_virtual: 0,
    };
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        while b.refine(i) {
            queue.push_back(b.nodes.len() - 1);
        }
    }
    b.merge_same_kind();
    let mut ids = BTreeMap::new();
    let mut nodes = BTreeMap::new();
    for (i, h) in b.nodes.iter().enumerate() {
        if let Some(h) = h {
            let id = node_id(ids.len());
            ids.insert(i, id.clone());
            nodes.insert(
                id,
                TutteNode {
                    kind: classify(h),
                    graph: RayedGraph::from(h.clone()),
                },
            );
        }
    }
    let links = b
        .links
        .into_iter()
        .map(|(x, vx, y, vy)| Link {
            a: ids[&x].clone(),
            va: vx,
            b: ids[&y].clone(),
            vb: vy,
            flipped: false,
        })
        .collect();
    Ok(TutteTree { nodes, links })
}

fn node_shape_ok(kind: NodeKind, h: &Multigraph, single: bool) -> Option<String> {
    match kind {
        NodeKind::Bond if !is_bond(h) || (!single && h.edge_count() < 3) => {
            Some("is not a bond of at least three edges".into())
        }
        NodeKind::Cycle if !is_cycle(h) || (!single && h.edge_count() < 3) => {
            Some("is not a cycle of at least three edges".into())
        }
        NodeKind::ThreeConnected => {
            let simple = h
                .edges()
                .map(|(_, u, v)| (u, v))
                .collect::<BTreeSet<_>>()
                .len()
                == h.edge_count()
                && h.edges().all(|(_, u, v)| u != v);
            if h.vertex_count() < 4 || !simple || !is_strongly_n_connected(h, 3).unwrap_or(false) {
                Some("is not a simple 3-connected graph".into())
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Violated invariants of a decomposition tree; empty when it is valid.
pub fn validate_tree(t: &TutteTree) -> Vec<String> {
    let mut out = Vec::new();
    let mut seen_link_edges: BTreeMap<(&str, &EdgeId), usize> = BTreeMap::new();
    for (i, l) in t.links.iter().enumerate() {
        for (n, e) in [(&l.a, &l.va), (&l.b, &l.vb)] {
            match t.nodes.get(n) {
                None => out.push(format!("link {i} references unknown node {n}")),
                Some(node) if !node.graph.core.has_edge(e) => {
                    out.push(format!("link {i}: node {n} has no edge {e}"))
                }
                _ => {}
            }
            *seen_link_edges.entry((n.as_str(), e)).or_default() += 1;
        }
    }
    if seen_link_edges.values().any(|&c| c > 1) {
        out.push("a virtual edge appears in more than one link".into());
    }
    let mut real = BTreeSet::new();
    for (n, node) in &t.nodes {
        for e in node.graph.edge_ids() {
            let linked = seen_link_edges.contains_key(&(n.as_str(), &e));
            if is_virtual(&e) && !linked {
                out.push(format!("dangling virtual edge {e} in node {n}"));
            }
            if !linked && !real.insert(e.clone()) {
                out.push(format!("real edge {e} appears in several nodes"));
            }
        }
        if let Some(msg) = node_shape_ok(node.kind, &node.graph.core, t.nodes.len() == 1) {
            out.push(format!("node {n} {msg}"));
        }
    }
    if !t.nodes.is_empty() && t.links.len() + 1 != t.nodes.len() {
        out.push(format!(
            "{} links do not form a tree on {} nodes",
            t.links.len(),
            t.nodes.len()
        ));
    } else if !tree_connected(t) {
        out.push("links do not connect the nodes".into());
    }
    for l in &t.links {
        if let (Some(x), Some(y)) = (t.nodes.get(&l.a), t.nodes.get(&l.b)) {
            if x.kind == y.kind && x.kind != NodeKind::ThreeConnected {
                out.push(format!(
                    "adjacent nodes {} and {} are both of kind {:?}",
                    l.a, l.b, x.kind
                ));
            }
        }
    }
    out
}

fn tree_connected(t: &TutteTree) -> bool {
    let Some(root) = t.nodes.keys().next() else {
        return true;
    };
    let mut seen = BTreeSet::from([root.as_str()]);
    let mut queue = VecDeque::from([root.as_str()]);
    while let Some(n) = queue.pop_front() {
        for l in &t.links {
            for (x, y) in [(&l.a, &l.b), (&l.b, &l.a)] {
                if x == n && seen.insert(y.as_str()) {
                    queue.push_back(y.as_str());
                }
            }
        }
    }
    seen.len() == t.nodes.len()
}

/// Glues the nodes along their links and drops the virtual edges. Each
/// vertex of the result is named by the smallest node-local name it carries.
pub fn reassemble(t: &TutteTree) -> Result<Multigraph> {
    let violations = validate_tree(t);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let mut index: BTreeMap<(&str, &VertexId), usize> = BTreeMap::new();
    for (n, node) in &t.nodes {
        for v in node.graph.vertices() {
            let k = index.len();
            index.insert((n.as_str(), v), k);
        }
    }
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(index.len());
    let mut linked = BTreeSet::new();
    for l in &t.links {
        let (u1, v1) = t.nodes[&l.a].graph.endpoints(&l.va).expect("validated");
        let (u2, v2) = t.nodes[&l.b].graph.endpoints(&l.vb).expect("validated");
        let (u2, v2) = if l.flipped { (v2, u2) } else { (u2, v2) };
        uf.union(index[&(l.a.as_str(), u1)], index[&(l.b.as_str(), u2)]);
        uf.union(index[&(l.a.as_str(), v1)], index[&(l.b.as_str(), v2)]);
        linked.insert((l.a.as_str(), &l.va));
        linked.insert((l.b.as_str(), &l.vb));
    }
    let mut names: BTreeMap<usize, &VertexId> = BTreeMap::new();
    for (&(_, v), &k) in &index {
        let root = uf.find(k);
        let slot = names.entry(root).or_insert(v);
        if v < *slot {
            *slot = v;
        }
    }
    let mut taken: BTreeMap<&VertexId, usize> = BTreeMap::new();
    let mut label: BTreeMap<usize, VertexId> = BTreeMap::new();
    for (root, v) in names {
        let n = taken.entry(v).or_default();
        let name = if *n == 0 {
            v.clone()
        } else {
            VertexId::new(format!("{v}#{n}"))
        };
        *n += 1;
        label.insert(root, name);
    }
    let mut out = Multigraph::new();
    for (n, node) in &t.nodes {
        for (e, u, v) in node.graph.core.edges() {
            if linked.contains(&(n.as_str(), e)) {
                continue;
            }
            let name = |x: &VertexId| label[&uf.find(index[&(n.as_str(), x)])].clone();
            out.add_edge_auto(e.clone(), name(u), name(v))?;
        }
    }
    Ok(out)
}

/// Real edges on each side of every link: `.0` on the side of `a`, `.1` on
/// the side of `b`.
pub fn link_sides(t: &TutteTree) -> Vec<(EdgeSet, EdgeSet)> {
    let linked: BTreeSet<(&str, &EdgeId)> = t
        .links
        .iter()
        .flat_map(|l| [(l.a.as_str(), &l.va), (l.b.as_str(), &l.vb)])
        .collect();
    let real = |n: &str| -> EdgeSet {
        t.nodes[n]
            .graph
            .edge_ids()
            .into_iter()
            .filter(|e| !linked.contains(&(n, e)))
            .collect()
    };
    let all: EdgeSet = t.nodes.keys().flat_map(|n| real(n)).collect();
    t.links
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let nodes = side_nodes(t, i, &l.a);
            let side: EdgeSet = nodes.iter().flat_map(|n| real(n)).collect();
            let rest = all.difference(&side).cloned().collect();
            (side, rest)
        })
        .collect()
}

/// Nodes reachable from `start` without crossing link `cut`.
pub fn side_nodes(t: &TutteTree, cut: usize, start: &str) -> BTreeSet<String> {
    let mut seen = BTreeSet::from([start.to_string()]);
    let mut queue = VecDeque::from([start.to_string()]);
    while let Some(n) = queue.pop_front() {
        for (i, l) in t.links.iter().enumerate() {
            if i == cut {
                continue;
            }
            for (x, y) in [(&l.a, &l.b), (&l.b, &l.a)] {
                if *x == n && seen.insert(y.clone()) {
                    queue.push_back(y.clone());
                }
            }
        }
    }
    seen
}

/// Real edges of a node.
pub fn real_edges(t: &TutteTree, n: &str) -> EdgeSet {
    let linked: BTreeSet<&EdgeId> = t
        .links
        .iter()
        .flat_map(|l| [(l.a.as_str(), &l.va), (l.b.as_str(), &l.vb)])
        .filter(|(x, _)| *x == n)
        .map(|(_, e)| e)
        .collect();
    t.nodes[n]
        .graph
        .edge_ids()
        .into_iter()
        .filter(|e| !linked.contains(e))
        .collect()
}

/// Correspondence between the decompositions of two graphs under a
/// cycle-preserving bijection. `edges` extends the bijection to virtual edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeMatch {
    pub left: TutteTree,
    pub right: TutteTree,
    pub nodes: BTreeMap<String, String>,
    pub links: Vec<usize>,
    pub edges: EdgeBijection,
}

fn strip(g: &RayedGraph) -> RayedGraph {
    RayedGraph::from(g.core.clone())
}

/// Matches the decomposition trees of `g1` and `g2` under `phi`. Each link is
/// a 2-separation of the edge set; a cycle-preserving bijection carries
/// 2-separations to 2-separations, which fixes the link correspondence and
/// then the nodes.
pub fn match_decompositions(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<TreeMatch> {
    let (s1, s2) = (strip(g1), strip(g2));
    if let Some(w) = check_cycle_preserving(&s1, &s2, phi)? {
        return Err(Error::precondition(format!(
            "bijection is not cycle-preserving: the {:?} image of {:?} is not a cycle",
            w.direction, w.edges
        )));
    }
    let (t1, t2) = (tutte_decompose(&g1.core)?, tutte_decompose(&g2.core)?);
    let (sides1, sides2) = (link_sides(&t1), link_sides(&t2));
    let mut by_side: BTreeMap<&EdgeSet, (usize, bool)> = BTreeMap::new();
    for (i, (a, b)) in sides2.iter().enumerate() {
        by_side.insert(a, (i, false));
        by_side.insert(b, (i, true));
    }
    let mut links = Vec::new();
    for (i, (a, _)) in sides1.iter().enumerate() {
        let image = phi.image(a)?;
        let Some(&(j, _)) = by_side.get(&image) else {
            return Err(Error::theorem(format!(
                "the separation of link {i} has no counterpart"
            )));
        };
        links.push(j);
    }
    if t1.nodes.len() != t2.nodes.len()
        || links.iter().collect::<BTreeSet<_>>().len() != links.len()
    {
        return Err(Error::theorem("decomposition trees differ in shape"));
    }
    let mut nodes = BTreeMap::new();
    for n1 in t1.nodes.keys() {
        let real = real_edges(&t1, n1);
        let n2 = if let Some(e) = real.iter().next() {
            let image = &phi.map[e];
            t2.nodes
                .keys()
                .find(|n| t2.nodes[*n].graph.core.has_edge(image))
                .cloned()
        } else {
            let incident: Vec<usize> = (0..t1.links.len())
                .filter(|&i| t1.links[i].a == *n1 || t1.links[i].b == *n1)
                .collect();
            let ends = |j: usize| [t2.links[j].a.clone(), t2.links[j].b.clone()];
            let mut common: Vec<String> = ends(links[incident[0]]).to_vec();
            for &i in &incident[1..] {
                let e = ends(links[i]);
                common.retain(|x| e.contains(x));
            }
            common.into_iter().next()
        };
        let n2 = n2.ok_or_else(|| Error::theorem(format!("node {n1} has no counterpart")))?;
        if t1.nodes[n1].kind != t2.nodes[&n2].kind {
            return Err(Error::theorem(format!(
                "node {n1} and its counterpart {n2} differ in kind"
            )));
        }
        if phi.image(&real)? != real_edges(&t2, &n2) {
            return Err(Error::theorem(format!(
                "real edges of node {n1} do not map onto node {n2}"
            )));
        }
        nodes.insert(n1.clone(), n2);
    }
    if nodes.values().collect::<BTreeSet<_>>().len() != nodes.len() {
        return Err(Error::theorem("node correspondence is not injective"));
    }
    let mut map = phi.map.clone();
    for (i, l1) in t1.links.iter().enumerate() {
        let l2 = &t2.links[links[i]];
        if nodes[&l1.a] == l2.a && nodes[&l1.b] == l2.b {
            map.insert(l1.va.clone(), l2.va.clone());
            map.insert(l1.vb.clone(), l2.vb.clone());
        } else if nodes[&l1.a] == l2.b && nodes[&l1.b] == l2.a {
            map.insert(l1.va.clone(), l2.vb.clone());
            map.insert(l1.vb.clone(), l2.va.clone());
        } else {
            return Err(Error::theorem(format!(
                "link {i} does not join the matched nodes"
            )));
        }
    }
    Ok(TreeMatch {
        left: t1,
        right: t2,
        nodes,
        links,
        edges: EdgeBijection::new(map),
    })
}

/// A vertex isomorphism from the graph produced by `seq` on `g1` to `g2`
/// that carries each edge to its image under `phi`. Rays are ignored, as
/// they are invisible to the cycle matroid of a component with at most two.
pub fn implementing_isomorphism(
    g1: &RayedGraph,
    seq: &OpSequence,
    phi: &EdgeBijection,
    g2: &RayedGraph,
) -> Result<Option<BTreeMap<VertexId, VertexId>>> {
    let end = replay(g1, seq)?.graph;
    let (a, b) = (strip(&end), strip(g2));
    let active = |g: &RayedGraph| -> VertexSet {
        g.vertices()
            .iter()
            .filter(|v| g.core.degree(v) > 0)
            .cloned()
            .collect()
    };
    let (a, b) = (a.induced(&active(&a)), b.induced(&active(&b)));
    Ok(induced_vertex_map(&a, &b, &phi.map))
}

/// Whether `seq` implements `phi`: some isomorphism `theta` from the final
/// graph to `g2` satisfies `theta . compose(seq) = phi`.
pub fn verify_implements(
    g1: &RayedGraph,
    seq: &OpSequence,
    phi: &EdgeBijection,
    g2: &RayedGraph,
) -> Result<bool> {
    Ok(implementing_isomorphism(g1, seq, phi, g2)?.is_some())
}
