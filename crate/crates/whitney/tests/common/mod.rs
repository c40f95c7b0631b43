#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use whitney::forests::EdgeOrder;
use whitney::graph::iso::{edge_maps_for, vertex_isomorphisms};
use whitney::ops::{apply, validate, WhitneyOp};
use whitney::structure::Banana;
use whitney::weakiso::EdgeBijection;
use whitney::{EdgeId, EdgeSet, Multigraph, RayedGraph, VertexId};

/// Random 2-connected multigraph with at most `max_edges` edges, grown by
/// ears from a cycle of length 3 to 5.
pub fn random_two_connected(rng: &mut impl Rng, max_edges: usize) -> RayedGraph {
    let mut g = Multigraph::new();
    let mut next_vertex = 0;
    let mut next_edge = 0;
    let mut vertex = |g: &mut Multigraph| {
        let v = VertexId::new(format!("v{next_vertex}"));
        next_vertex += 1;
        g.add_vertex(v.clone());
        v
    };
    let mut edge = |g: &mut Multigraph, a: &VertexId, b: &VertexId| {
        g.add_edge(format!("e{next_edge:02}"), a.clone(), b.clone())
            .unwrap();
        next_edge += 1;
    };
    let n = rng.gen_range(3..=5.min(max_edges));
    let ring: Vec<VertexId> = (0..n).map(|_| vertex(&mut g)).collect();
    for i in 0..n {
        edge(&mut g, &ring[i], &ring[(i + 1) % n]);
    }
    while g.edge_count() < max_edges {
        let room = max_edges - g.edge_count();
        let len = rng.gen_range(1..=3.min(room));
        let vs: Vec<VertexId> = g.vertices().iter().cloned().collect();
        let ends: Vec<&VertexId> = vs.choose_multiple(rng, 2).collect();
        let mut at = ends[0].clone();
        for _ in 1..len {
            let w = vertex(&mut g);
            edge(&mut g, &at, &w);
            at = w;
        }
        edge(&mut g, &at, ends[1]);
        if rng.gen_bool(0.25) {
            break;
        }
    }
    RayedGraph::from(g)
}

/// Vertex sets of the components of `g` minus `removed`.
pub fn pieces(g: &RayedGraph, removed: &[&VertexId]) -> Vec<BTreeSet<VertexId>> {
    let mut seen: BTreeSet<VertexId> = removed.iter().map(|v| (*v).clone()).collect();
    let mut out = Vec::new();
    for start in g.vertices() {
        if seen.contains(start) {
            continue;
        }
        let mut comp = BTreeSet::from([start.clone()]);
        seen.insert(start.clone());
        let mut stack = vec![start.clone()];
        while let Some(x) = stack.pop() {
            for e in g.core.incident(&x) {
                let w = g.core.other_end(&e, &x).unwrap().clone();
                if seen.insert(w.clone()) {
                    comp.insert(w.clone());
                    stack.push(w);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Every valid finite twist of `g`.
pub fn finite_twists(g: &RayedGraph) -> Vec<WhitneyOp> {
    let vs: Vec<&VertexId> = g.vertices().iter().collect();
    let mut out = Vec::new();
    for (i, x) in vs.iter().enumerate() {
        for y in &vs[i + 1..] {
            for p in pieces(g, &[x, y]) {
                if p.iter().any(|v| g.rays_at(v) > 0) {
                    continue;
                }
                let side: EdgeSet = p.iter().flat_map(|v| g.core.incident(v)).collect();
                let op = WhitneyOp::FiniteTwist {
                    x: (*x).clone(),
                    y: (*y).clone(),
                    side,
                };
                if validate(&op, g).is_empty() {
                    out.push(op);
                }
            }
        }
    }
    out
}

/// Applies up to `steps` random valid finite twists.
pub fn random_twists(g: &RayedGraph, rng: &mut impl Rng, steps: usize) -> RayedGraph {
    let mut cur = g.clone();
    for _ in 0..steps {
        let options = finite_twists(&cur);
        let Some(op) = options.choose(rng) else { break };
        cur = apply(op, &cur).unwrap().graph;
    }
    cur
}

/// Renames edges by a random permutation of their ids and vertices by a
/// prefix; returns the renamed graph and the bijection from `g`.
pub fn scramble(g: &RayedGraph, rng: &mut impl Rng) -> (RayedGraph, EdgeBijection) {
    let ids: Vec<EdgeId> = g.edge_ids().into_iter().collect();
    let mut shuffled = ids.clone();
    shuffled.shuffle(rng);
    let map: BTreeMap<EdgeId, EdgeId> = ids
        .iter()
        .zip(&shuffled)
        .map(|(a, b)| (a.clone(), EdgeId::new(format!("f{b}"))))
        .collect();
    let renamed = g
        .rename_edges(|e| map[e].clone())
        .unwrap()
        .rename_vertices(|v| VertexId::new(format!("w{v}")))
        .unwrap();
    (renamed, EdgeBijection::new(map))
}

/// Random multigraph on `n` vertices with `m` edges, loops and parallel
/// edges allowed, and `rays` rays at random vertices.
pub fn random_rayed(rng: &mut impl Rng, n: usize, m: usize, rays: usize) -> RayedGraph {
    let mut core = Multigraph::new();
    for i in 0..n {
        core.add_vertex(format!("v{i}"));
    }
    for k in 0..m {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        core.add_edge(format!("e{k:02}"), format!("v{a}"), format!("v{b}"))
            .unwrap();
    }
    let mut g = RayedGraph::from(core);
    for k in 0..rays {
        g.add_ray(format!("r{k}"), format!("v{}", rng.gen_range(0..n)))
            .unwrap();
    }
    g
}

/// Component labels of the subgraph on all vertices with edges `f`, by
/// breadth-first search.
pub fn bfs_labels(g: &RayedGraph, f: &EdgeSet) -> BTreeMap<VertexId, usize> {
    let mut label = BTreeMap::new();
    let mut next = 0;
    for start in g.vertices() {
        if label.contains_key(start) {
            continue;
        }
        label.insert(start.clone(), next);
        let mut queue = std::collections::VecDeque::from([start.clone()]);
        while let Some(x) = queue.pop_front() {
            for e in g.core.incident(&x) {
                if !f.contains(&e) {
                    continue;
                }
                let w = g.core.other_end(&e, &x).unwrap().clone();
                if !label.contains_key(&w) {
                    label.insert(w.clone(), next);
                    queue.push_back(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Vertices reachable from `from` using edges of `f`.
pub fn reach(
    g: &RayedGraph,
    f: &EdgeSet,
    from: &VertexId,
) -> BTreeMap<VertexId, Option<(VertexId, EdgeId)>> {
    let mut prev = BTreeMap::from([(from.clone(), None)]);
    let mut queue = VecDeque::from([from.clone()]);
    while let Some(v) = queue.pop_front() {
        for e in g.core.incident(&v) {
            if !f.contains(&e) {
                continue;
            }
            let w = g.core.other_end(&e, &v).unwrap().clone();
            if !prev.contains_key(&w) {
                prev.insert(w.clone(), Some((v.clone(), e)));
                queue.push_back(w);
            }
        }
    }
    prev
}

/// Greedy minimum forest: take each edge in order unless its ends are
/// already joined by chosen edges.
pub fn greedy_forest(g: &RayedGraph, order: &EdgeOrder) -> EdgeSet {
    let mut chosen = EdgeSet::new();
    for e in order.as_slice() {
        let (u, v) = g.endpoints(e).unwrap();
        if !reach(g, &chosen, u).contains_key(v) {
            chosen.insert(e.clone());
        }
    }
    chosen
}

/// Independent oracle: every connected edge subset with exactly two boundary
/// vertices, keeping the inclusion-maximal ones.
pub fn brute_force_maximal_bananas(g: &RayedGraph) -> BTreeSet<BTreeSet<EdgeId>> {
    let edges: Vec<(EdgeId, VertexId, VertexId)> = g
        .core
        .edges()
        .map(|(e, u, v)| (e.clone(), u.clone(), v.clone()))
        .collect();
    let m = edges.len();
    assert!(m <= 18);
    let mut found: Vec<u32> = Vec::new();
    for bits in 1u32..(1 << m) {
        let chosen: Vec<usize> = (0..m).filter(|i| bits >> i & 1 == 1).collect();
        let mut adj: BTreeMap<&VertexId, Vec<&VertexId>> = BTreeMap::new();
        for &i in &chosen {
            adj.entry(&edges[i].1).or_default().push(&edges[i].2);
            adj.entry(&edges[i].2).or_default().push(&edges[i].1);
        }
        let start = *adj.keys().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if seen.len() != adj.len() {
            continue;
        }
        let boundary = adj
            .keys()
            .filter(|v| {
                g.rays_at(v) > 0
                    || (0..m)
                        .any(|i| bits >> i & 1 == 0 && (&&edges[i].1 == *v || &&edges[i].2 == *v))
            })
            .count();
        if boundary == 2 {
            found.push(bits);
        }
    }
    found
        .iter()
        .filter(|&&b| !found.iter().any(|&c| c != b && c & b == b))
        .map(|&b| {
            (0..m)
                .filter(|i| b >> i & 1 == 1)
                .map(|i| edges[i].0.clone())
                .collect()
        })
        .collect()
}

pub fn edges_touching(g: &RayedGraph, vs: &BTreeSet<VertexId>) -> EdgeSet {
    vs.iter().flat_map(|x| g.core.incident(x)).collect()
}

pub fn ray_free(g: &RayedGraph, vs: &BTreeSet<VertexId>) -> bool {
    vs.iter().all(|x| g.rays_at(x) == 0)
}

/// Every finite split and finite twist of `g` that passes validation.
pub fn candidate_ops(g: &RayedGraph) -> Vec<WhitneyOp> {
    let mut out = Vec::new();
    for x in g.vertices() {
        for p in pieces(g, &[x]) {
            if ray_free(g, &p) {
                out.push(WhitneyOp::FiniteSplit {
                    vertex: x.clone(),
                    side: edges_touching(g, &p),
                    new_vertex: None,
                });
            }
        }
    }
    let vs: Vec<&VertexId> = g.vertices().iter().collect();
    for (i, x) in vs.iter().enumerate() {
        for y in &vs[i + 1..] {
            for p in pieces(g, &[x, y]) {
                if ray_free(g, &p) {
                    out.push(WhitneyOp::FiniteTwist {
                        x: (*x).clone(),
                        y: (*y).clone(),
                        side: edges_touching(g, &p),
                    });
                }
            }
        }
    }
    out.retain(|op| validate(op, g).is_empty());
    out
}

/// 2-connected pieces joined in a tree pattern by bridges. Every piece is a
/// union of blocks, so any union of pieces is cycle-closed.
pub fn glued_pieces(rng: &mut impl Rng) -> (RayedGraph, Vec<EdgeSet>) {
    let mut g = Multigraph::new();
    let mut pieces = Vec::new();
    let count = rng.gen_range(2..5);
    for p in 0..count {
        let size = rng.gen_range(3..8);
        let piece = random_two_connected(rng, size);
        let name = |v: &VertexId| VertexId::new(format!("p{p}{v}"));
        let mut edges = EdgeSet::new();
        for (e, u, v) in piece.core.edges() {
            let id = EdgeId::new(format!("p{p}{e}"));
            g.add_vertex(name(u));
            g.add_vertex(name(v));
            g.add_edge(id.clone(), name(u), name(v)).unwrap();
            edges.insert(id);
        }
        if p > 0 {
            let here = name(piece.vertices().iter().next().unwrap());
            let others: Vec<VertexId> = g
                .vertices()
                .iter()
                .filter(|v| !v.as_str().starts_with(&format!("p{p}")))
                .cloned()
                .collect();
            let there = others[rng.gen_range(0..others.len())].clone();
            let bridge = EdgeId::new(format!("bridge{p}"));
            g.add_edge(bridge.clone(), there, here).unwrap();
            pieces.push(EdgeSet::from([bridge]));
        }
        pieces.push(edges);
    }
    (RayedGraph::from(g), pieces)
}

/// Edge sets that form a single cycle: connected, every touched vertex of
/// degree two (a loop counts twice).
pub fn oracle_cycles(g: &RayedGraph) -> BTreeSet<EdgeSet> {
    let ids: Vec<EdgeId> = g.edge_ids().into_iter().collect();
    let mut out = BTreeSet::new();
    for bits in 1u32..1 << ids.len() {
        let f: EdgeSet = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| bits >> i & 1 == 1)
            .map(|(_, e)| e.clone())
            .collect();
        let mut degree: BTreeMap<&VertexId, usize> = BTreeMap::new();
        for e in &f {
            let (a, b) = g.endpoints(e).unwrap();
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
        if degree.values().any(|&d| d != 2) {
            continue;
        }
        let label = bfs_labels(&g.edge_subgraph(&f), &f);
        if label.values().collect::<BTreeSet<_>>().len() == 1 {
            out.insert(f);
        }
    }
    out
}

/// Every bijection of ray-free graphs that maps cycles onto cycles, by
/// trying all permutations.
pub fn brute_force_weak_isos(g1: &RayedGraph, g2: &RayedGraph) -> BTreeSet<EdgeBijection> {
    let (c1, c2) = (oracle_cycles(g1), oracle_cycles(g2));
    let (e1, e2): (Vec<EdgeId>, Vec<EdgeId>) = (
        g1.edge_ids().into_iter().collect(),
        g2.edge_ids().into_iter().collect(),
    );
    let mut out = BTreeSet::new();
    for perm in e2.iter().permutations(e2.len()) {
        let phi = EdgeBijection::new(e1.iter().cloned().zip(perm.into_iter().cloned()).collect());
        let images: BTreeSet<EdgeSet> = c1.iter().map(|c| phi.image(c).unwrap()).collect();
        if images == c2 {
            out.insert(phi);
        }
    }
    out
}

pub fn automorphism_bijections(g: &RayedGraph) -> BTreeSet<EdgeBijection> {
    vertex_isomorphisms(g, g, 0)
        .iter()
        .flat_map(|psi| edge_maps_for(g, g, psi))
        .map(EdgeBijection::new)
        .collect()
}

/// Asserts that `path` walks inside `b` from one boundary vertex to the
/// other without repeating a vertex and uses `e`.
pub fn check_banana_path(g: &RayedGraph, b: &Banana, e: &EdgeId, path: &[EdgeId]) {
    assert!(path.contains(e));
    assert!(path.iter().all(|x| b.edges.contains(x)));
    let mut at = b.boundary.0.clone();
    let mut visited = BTreeSet::from([at.clone()]);
    for x in path {
        at = g.core.other_end(x, &at).expect("path is a walk").clone();
        assert!(visited.insert(at.clone()), "path repeats {at}");
    }
    assert_eq!(at, b.boundary.1);
}
