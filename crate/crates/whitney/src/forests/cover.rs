use std::collections::{BTreeMap, VecDeque};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fmsf, leafless_violations, prune_leafless, span_mask, EdgeOrder};
use crate::error::{Error, Result};
use crate::graph::connect::components;
use crate::graph::cycles::is_cycle;
use crate::graph::flow::disjoint_paths;
use crate::graph::{
    is_weakly_n_connected, wedges, Dense, EdgeId, EdgeSet, RayedGraph, VertexId, VertexSet, Wedge,
};
use crate::structure::{maximal_disjoint_trifurcations, voronoi_cells};

/// Smallest quotient distance between two members of one class.
pub const CLASS_DISTANCE: usize = 6;

/// Forests whose union contains `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestCover {
    pub forests: Vec<EdgeSet>,
    pub target: EdgeSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeCycle {
    pub wedge: Wedge,
    pub cycle: EdgeSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassCover {
    /// One cycle per wedge through both of its endpoints.
    Cycles { cycles: Vec<WedgeCycle> },
    /// A leafless forest through every endpoint.
    Forest { forest: EdgeSet },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeClassCover {
    pub wedges: Vec<Wedge>,
    pub cover: ClassCover,
}

/// Cover of one wedge class. A class whose wedges do not all take the same
/// branch, or whose structures collide, is split into sub-classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeCover {
    pub centers: VertexSet,
    pub classes: Vec<WedgeClassCover>,
}

#[derive(Clone, Debug)]
struct Tree {
    vertices: FixedBitSet,
    edges: FixedBitSet,
}

impl Tree {
    fn at(d: &Dense, vs: &[usize]) -> Tree {
        let mut vertices = FixedBitSet::with_capacity(d.n());
        for &v in vs {
            vertices.insert(v);
        }
        Tree {
            vertices,
            edges: FixedBitSet::with_capacity(d.m()),
        }
    }

    fn rays(&self, d: &Dense) -> usize {
        self.vertices.ones().map(|v| d.rays[v]).sum()
    }

    fn add_path(&mut self, d: &Dense, path: &[usize]) {
        for &e in path {
            self.edges.insert(e);
            self.vertices.insert(d.ends[e].0);
            self.vertices.insert(d.ends[e].1);
        }
    }
}

/// Adds `k` paths from each listed tree vertex to rays outside the tree,
/// pairwise disjoint and meeting the tree only at their start.
fn branch_out(d: &Dense, blocked: &FixedBitSet, tree: &mut Tree, need: &[(usize, u32)]) -> bool {
    let total: u32 = need.iter().map(|(_, k)| k).sum();
    if total == 0 {
        return true;
    }
    let mut vcap = vec![1u32; d.n()];
    for v in blocked.ones().chain(tree.vertices.ones()) {
        vcap[v] = 0;
    }
    for &(v, k) in need {
        vcap[v] = k;
    }
    let sources: Vec<usize> = need
        .iter()
        .filter(|(_, k)| *k > 0)
        .map(|(v, _)| *v)
        .collect();
    let sinks: Vec<usize> = (0..d.n())
        .filter(|&v| d.rays[v] > 0 && !tree.vertices.contains(v) && !blocked.contains(v))
        .collect();
    let inside = tree.vertices.clone();
    let allowed = |e: usize| !(inside.contains(d.ends[e].0) && inside.contains(d.ends[e].1));
    let paths = disjoint_paths(
        d.n(),
        &d.ends,
        allowed,
        &vcap,
        &sources,
        &sinks,
        total as usize,
    );
    if paths.len() < total as usize {
        return false;
    }
    for p in &paths {
        tree.add_path(d, p);
    }
    true
}

/// Shortest path from `from` to the nearest vertex accepted by `goal`,
/// through vertices that are neither blocked nor in `avoid`.
fn shortest_path(
    d: &Dense,
    from: &[usize],
    blocked: &FixedBitSet,
    avoid: &FixedBitSet,
    goal: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; d.n()];
    let mut seen = FixedBitSet::with_capacity(d.n());
    let mut queue = VecDeque::new();
    for &s in from {
        seen.insert(s);
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &e in &d.inc[v] {
            let w = d.other(e, v);
            if seen.contains(w) || blocked.contains(w) {
                continue;
            }
            seen.insert(w);
            prev[w] = Some((v, e));
            if goal(w) {
                let mut path = Vec::new();
                let mut cur = w;
                while let Some((p, e)) = prev[cur] {
                    path.push(e);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            if !avoid.contains(w) {
                queue.push_back(w);
            }
        }
    }
    None
}

/// Adds branches to the nearest outside rays until the tree carries three.
fn reach_third_ray(d: &Dense, blocked: &FixedBitSet, tree: &mut Tree) -> bool {
    while tree.rays(d) < 3 {
        let from: Vec<usize> = tree.vertices.ones().collect();
        let inside = tree.vertices.clone();
        let Some(path) = shortest_path(d, &from, blocked, &inside, |w| {
            d.rays[w] > 0 && !inside.contains(w)
        }) else {
            return false;
        };
        tree.add_path(d, &path);
    }
    true
}

fn need_at(d: &Dense, v: usize, without_ray: u32) -> (usize, u32) {
    (
        v,
        if d.rays[v] > 0 {
            without_ray.saturating_sub(1)
        } else {
            without_ray
        },
    )
}

/// A tree through edge `e` whose leaves carry rays and which carries at
/// least three rays: disjoint paths from both ends to rays, then a branch to
/// a third ray if needed.
fn edge_tree(d: &Dense, blocked: &FixedBitSet, e: usize) -> Option<Tree> {
    let (u, v) = d.ends[e];
    if u == v || blocked.contains(u) || blocked.contains(v) {
        return None;
    }
    let mut tree = Tree::at(d, &[u, v]);
    tree.edges.insert(e);
    let need = [need_at(d, u, 1), need_at(d, v, 1)];
    (branch_out(d, blocked, &mut tree, &need) && reach_third_ray(d, blocked, &mut tree))
        .then_some(tree)
}

/// A tree with at least one edge at `x` whose leaves carry rays and which
/// carries at least three rays.
fn vertex_tree(d: &Dense, blocked: &FixedBitSet, x: usize) -> Option<Tree> {
    if blocked.contains(x) {
        return None;
    }
    let mut tree = Tree::at(d, &[x]);
    let need = [(x, if d.rays[x] > 0 { 1 } else { 2 })];
    (branch_out(d, blocked, &mut tree, &need) && reach_third_ray(d, blocked, &mut tree))
        .then_some(tree)
}

/// Joins `y` to the tree by a shortest path and gives it a branch to a ray
/// when it would otherwise be a ray-free leaf.
fn attach(d: &Dense, blocked: &FixedBitSet, tree: &Tree, y: usize) -> Option<Tree> {
    let inside = tree.vertices.clone();
    let path = shortest_path(d, &[y], blocked, &FixedBitSet::with_capacity(d.n()), |w| {
        inside.contains(w)
    })?;
    let mut out = tree.clone();
    out.add_path(d, &path);
    out.vertices.insert(y);
    branch_out(d, blocked, &mut out, &[need_at(d, y, 1)]).then_some(out)
}

/// Trees covering both endpoints: one tree through both when `y` can be
/// joined to the tree at `x`, otherwise disjoint trees at `x` and at `y`. The
/// side of the smaller endpoint is built first.
fn endpoint_trees(d: &Dense, blocked: &FixedBitSet, x: usize, y: usize) -> Option<Vec<Tree>> {
    let (x, y) = (x.min(y), x.max(y));
    let tx = vertex_tree(d, blocked, x).or_else(|| {
        let ty = vertex_tree(d, blocked, y)?;
        let joined = attach(d, blocked, &ty, x)?;
        Some(joined)
    })?;
    if tx.vertices.contains(y) {
        return Some(vec![tx]);
    }
    if let Some(t) = attach(d, blocked, &tx, y) {
        return Some(vec![t]);
    }
    let mut rest = blocked.clone();
    rest.union_with(&tx.vertices);
    let ty = vertex_tree(d, &rest, y)?;
    Some(vec![tx, ty])
}

/// Two internally disjoint paths from `x` to `y` avoiding `blocked`.
fn endpoint_cycle(d: &Dense, blocked: &FixedBitSet, x: usize, y: usize) -> Option<FixedBitSet> {
    if blocked.contains(x) || blocked.contains(y) {
        return None;
    }
    let mut vcap = vec![1u32; d.n()];
    for v in blocked.ones() {
        vcap[v] = 0;
    }
    vcap[x] = 2;
    vcap[y] = 2;
    let paths = disjoint_paths(d.n(), &d.ends, |_| true, &vcap, &[x], &[y], 2);
    if paths.len() < 2 {
        return None;
    }
    let mut mask = FixedBitSet::with_capacity(d.m());
    for e in paths.iter().flatten() {
        mask.insert(*e);
    }
    is_cycle(d.n(), &d.ends, &mask).then_some(mask)
}

/// Quotient distances between the cells around a maximal family of disjoint
/// trifurcations.
struct Metric {
    cell: Vec<usize>,
    dist: Vec<Vec<usize>>,
}

impl Metric {
    fn new(g: &RayedGraph, d: &Dense) -> Result<Metric> {
        let seeds = maximal_disjoint_trifurcations(g, None)?;
        if seeds.is_empty() {
            return Ok(Metric {
                cell: vec![0; d.n()],
                dist: vec![vec![0]],
            });
        }
        let cells = voronoi_cells(g, &seeds)?;
        let names: Vec<&String> = cells.cells.keys().collect();
        let index: BTreeMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut cell = vec![0; d.n()];
        for (name, vs) in &cells.cells {
            for v in vs {
                cell[d.vertex_index(v).expect("cell vertex")] = index[name.as_str()];
            }
        }
        let k = names.len();
        let mut adj = vec![Vec::new(); k];
        for (_, a, b) in cells.quotient.core.edges() {
            let (a, b) = (index[a.as_str()], index[b.as_str()]);
            adj[a].push(b);
            adj[b].push(a);
        }
        let dist = (0..k)
            .map(|s| {
                let mut row = vec![usize::MAX; k];
                row[s] = 0;
                let mut queue = VecDeque::from([s]);
                while let Some(v) = queue.pop_front() {
                    for &w in &adj[v] {
                        if row[w] == usize::MAX {
                            row[w] = row[v] + 1;
                            queue.push_back(w);
                        }
                    }
                }
                row
            })
            .collect();
        Ok(Metric { cell, dist })
    }

    fn between(&self, a: &[usize], b: &[usize]) -> usize {
        a.iter()
            .flat_map(|&x| b.iter().map(move |&y| (x, y)))
            .map(|(x, y)| self.dist[self.cell[x]][self.cell[y]])
            .min()
            .unwrap_or(usize::MAX)
    }
}

fn check_rayed_components(g: &RayedGraph) -> Result<()> {
    for block in components(g, &g.edge_ids())?.blocks {
        if block.rays.len() < 3 {
            let first = block.vertices.iter().next().expect("nonempty");
            return Err(Error::precondition(format!(
                "component at {first} carries {} rays; at least 3 are required",
                block.rays.len()
            )));
        }
    }
    Ok(())
}

fn check_weak(g: &RayedGraph, n: usize) -> Result<()> {
    let w = is_weakly_n_connected(g, n)?;
    if let Some((removed, finite)) = w.witness {
        let names = |s: &VertexSet| {
            s.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        return Err(Error::precondition(format!(
            "graph is not weakly {n}-connected: removing {{{}}} leaves the ray-free part {{{}}}",
            names(&removed),
            names(&finite)
        )));
    }
    Ok(())
}

/// Forest spanned by `base` and the remaining allowed edges: the free minimal
/// spanning forest with `base` first, pruned, keeping components with at
/// least three rays.
fn thicken(
    g: &RayedGraph,
    d: &Dense,
    blocked: &FixedBitSet,
    base: &FixedBitSet,
) -> Result<EdgeSet> {
    let allowed: Vec<usize> = (0..d.m())
        .filter(|&e| !blocked.contains(d.ends[e].0) && !blocked.contains(d.ends[e].1))
        .collect();
    let mut order: Vec<EdgeId> = base.ones().map(|e| d.eids[e].clone()).collect();
    order.extend(
        allowed
            .iter()
            .filter(|&&e| !base.contains(e))
            .map(|&e| d.eids[e].clone()),
    );
    let sub = g.edge_subgraph(&allowed.iter().map(|&e| d.eids[e].clone()).collect());
    let forest = fmsf(&sub, &EdgeOrder::new(order)?)?;
    let pruned = prune_leafless(g, &forest)?;
    let mut out = EdgeSet::new();
    for block in components(g, &pruned)?.blocks {
        if block.rays.len() >= 3 {
            out.extend(block.edges);
        }
    }
    Ok(out)
}

/// Covers every edge by leafless forests with at least three rays per
/// component. Edges are grouped greedily in sorted order into classes at
/// pairwise quotient distance at least [`CLASS_DISTANCE`]; each edge gets a
/// tree through it with all leaves on rays, disjoint from the other trees of
/// its class; each class is then thickened by the free minimal spanning
/// forest of the whole graph and pruned.
pub fn leafless_cover(g: &RayedGraph) -> Result<ForestCover> {
    check_rayed_components(g)?;
    check_weak(g, 2)?;
    let d = Dense::new(g);
    if let Some(e) = (0..d.m()).find(|&e| d.ends[e].0 == d.ends[e].1) {
        return Err(Error::precondition(format!(
            "edge {} is a loop and lies in no forest",
            d.eids[e]
        )));
    }
    let metric = Metric::new(g, &d)?;
    struct Class {
        members: Vec<usize>,
        used: FixedBitSet,
        base: FixedBitSet,
    }
    let mut classes: Vec<Class> = Vec::new();
    for e in 0..d.m() {
        let ends = [d.ends[e].0, d.ends[e].1];
        let mut placed = false;
        for class in classes.iter_mut() {
            let far = class
                .members
                .iter()
                .all(|&f| metric.between(&ends, &[d.ends[f].0, d.ends[f].1]) >= CLASS_DISTANCE);
            if !far {
                continue;
            }
            if let Some(t) = edge_tree(&d, &class.used, e) {
                class.members.push(e);
                class.used.union_with(&t.vertices);
                class.base.union_with(&t.edges);
                placed = true;
                break;
            }
        }
        if !placed {
            let t = edge_tree(&d, &FixedBitSet::with_capacity(d.n()), e).ok_or_else(|| {
                Error::theorem(format!(
                    "edge {} lies on no tree with leaves on three rays",
                    d.eids[e]
                ))
            })?;
            classes.push(Class {
                members: vec![e],
                used: t.vertices,
                base: t.edges,
            });
        }
    }
    let none = FixedBitSet::with_capacity(d.n());
    let forests = classes
        .par_iter()
        .map(|c| thicken(g, &d, &none, &c.base))
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestCover {
        forests,
        target: g.edge_ids(),
    })
}

/// Violated cover invariants; empty when the cover is valid.
pub fn cover_violations(g: &RayedGraph, cover: &ForestCover) -> Vec<String> {
    let mut out = Vec::new();
    let union: EdgeSet = cover.forests.iter().flatten().cloned().collect();
    for e in cover.target.difference(&union) {
        out.push(format!("edge {e} is not covered"));
    }
    for (i, f) in cover.forests.iter().enumerate() {
        out.extend(
            leafless_violations(g, f)
                .into_iter()
                .map(|m| format!("forest {i}: {m}")),
        );
    }
    out
}

fn wedge_vertices(d: &Dense, w: &Wedge) -> Result<[usize; 3]> {
    let index = |v: &VertexId| {
        d.vertex_index(v)
            .ok_or_else(|| Error::input(format!("unknown vertex {v}")))
    };
    Ok([
        index(&w.endpoints.0)?,
        index(&w.center)?,
        index(&w.endpoints.1)?,
    ])
}

fn check_wedge(g: &RayedGraph, w: &Wedge) -> Result<()> {
    let fits = |e: &EdgeId, x: &VertexId| {
        g.endpoints(e)
            .is_some_and(|(a, b)| (a == &w.center && b == x) || (b == &w.center && a == x))
    };
    if w.left == w.right || !fits(&w.left, &w.endpoints.0) || !fits(&w.right, &w.endpoints.1) {
        return Err(Error::input(format!(
            "{} {} {} is not a wedge of the graph",
            w.left, w.center, w.right
        )));
    }
    Ok(())
}

/// All wedges grouped greedily, in sorted order, into classes whose members
/// lie at pairwise quotient distance at least [`CLASS_DISTANCE`].
pub fn wedge_classes(g: &RayedGraph) -> Result<Vec<Vec<Wedge>>> {
    let d = Dense::new(g);
    let metric = Metric::new(g, &d)?;
    let mut all = wedges(&g.core);
    all.sort();
    let mut classes: Vec<Vec<(Wedge, [usize; 3])>> = Vec::new();
    for w in all {
        let vs = wedge_vertices(&d, &w)?;
        match classes.iter_mut().find(|c| {
            c.iter()
                .all(|(_, us)| metric.between(&vs, us) >= CLASS_DISTANCE)
        }) {
            Some(c) => c.push((w, vs)),
            None => classes.push(vec![(w, vs)]),
        }
    }
    Ok(classes
        .into_iter()
        .map(|c| c.into_iter().map(|(w, _)| w).collect())
        .collect())
}

/// Covers the endpoints of a class of far-apart wedges, avoiding every
/// center of the class. Wedges whose endpoints lie on a cycle avoiding the
/// centers get such cycles, pairwise disjoint; the others get a leafless
/// forest with at least three rays per component through their endpoints.
pub fn wedge_cover(g: &RayedGraph, class: &[Wedge]) -> Result<WedgeCover> {
    for w in class {
        check_wedge(g, w)?;
    }
    check_rayed_components(g)?;
    check_weak(g, 3)?;
    let d = Dense::new(g);
    let vs: Vec<[usize; 3]> = class
        .iter()
        .map(|w| wedge_vertices(&d, w))
        .collect::<Result<_>>()?;
    if class.len() > 1 {
        let metric = Metric::new(g, &d)?;
        let mut close = Vec::new();
        for i in 0..class.len() {
            for j in i + 1..class.len() {
                let k = metric.between(&vs[i], &vs[j]);
                if k < CLASS_DISTANCE {
                    close.push(format!("wedges {i} and {j} at distance {k}"));
                }
            }
        }
        if !close.is_empty() {
            return Err(Error::precondition(format!(
                "wedges are too close: {}",
                close.join("; ")
            )));
        }
    }
    let mut centers = FixedBitSet::with_capacity(d.n());
    for v in &vs {
        centers.insert(v[1]);
    }
    let mut cycle_groups: Vec<(Vec<usize>, Vec<FixedBitSet>, FixedBitSet)> = Vec::new();
    let mut forest_wedges = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        let (x, y) = (v[0], v[2]);
        if endpoint_cycle(&d, &centers, x, y).is_none() {
            forest_wedges.push(i);
            continue;
        }
        let mut placed = false;
        for (members, cycles, used) in cycle_groups.iter_mut() {
            let mut blocked = centers.clone();
            blocked.union_with(used);
            if let Some(c) = endpoint_cycle(&d, &blocked, x, y) {
                used.union_with(&span_mask(&d, &c));
                members.push(i);
                cycles.push(c);
                placed = true;
                break;
            }
        }
        if !placed {
            let c = endpoint_cycle(&d, &centers, x, y).expect("found above");
            let used = span_mask(&d, &c);
            cycle_groups.push((vec![i], vec![c], used));
        }
    }
    let mut forest_groups: Vec<(Vec<usize>, FixedBitSet, FixedBitSet)> = Vec::new();
    for i in forest_wedges {
        let (x, y) = (vs[i][0], vs[i][2]);
        let mut placed = false;
        for (members, used, base) in forest_groups.iter_mut() {
            let mut blocked = centers.clone();
            blocked.union_with(used);
            if let Some(trees) = endpoint_trees(&d, &blocked, x, y) {
                for t in trees {
                    used.union_with(&t.vertices);
                    base.union_with(&t.edges);
                }
                members.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            let trees = endpoint_trees(&d, &centers, x, y).ok_or_else(|| {
                Error::theorem(format!(
                    "wedge {} {} {}: no cycle and no leafless forest with three rays covers the endpoints {} and {} avoiding the centers",
                    class[i].left, class[i].center, class[i].right, class[i].endpoints.0, class[i].endpoints.1
                ))
            })?;
            let mut used = FixedBitSet::with_capacity(d.n());
            let mut base = FixedBitSet::with_capacity(d.m());
            for t in trees {
                used.union_with(&t.vertices);
                base.union_with(&t.edges);
            }
            forest_groups.push((vec![i], used, base));
        }
    }
    let mut classes = Vec::new();
    for (members, cycles, _) in cycle_groups {
        let cycles = members
            .iter()
            .zip(cycles)
            .map(|(&i, c)| WedgeCycle {
                wedge: class[i].clone(),
                cycle: d.edge_set(&c),
            })
            .collect();
        classes.push(WedgeClassCover {
            wedges: members.iter().map(|&i| class[i].clone()).collect(),
            cover: ClassCover::Cycles { cycles },
        });
    }
    let forests: Vec<EdgeSet> = forest_groups
        .par_iter()
        .map(|(_, _, base)| thicken(g, &d, &centers, base))
        .collect::<Result<_>>()?;
    for ((members, _, _), forest) in forest_groups.iter().zip(forests) {
        classes.push(WedgeClassCover {
            wedges: members.iter().map(|&i| class[i].clone()).collect(),
            cover: ClassCover::Forest { forest },
        });
    }
    let centers = centers.ones().map(|v| d.vids[v].clone()).collect();
    Ok(WedgeCover { centers, classes })
}

/// Violated wedge cover invariants for `class`; empty when valid.
pub fn wedge_cover_violations(g: &RayedGraph, class: &[Wedge], cover: &WedgeCover) -> Vec<String> {
    let mut out = Vec::new();
    let d = Dense::new(g);
    let expected: VertexSet = class.iter().map(|w| w.center.clone()).collect();
    if cover.centers != expected {
        out.push("centers differ from the class".into());
    }
    let mut listed: Vec<&Wedge> = cover.classes.iter().flat_map(|c| &c.wedges).collect();
    listed.sort();
    let mut wanted: Vec<&Wedge> = class.iter().collect();
    wanted.sort();
    if listed != wanted {
        out.push("sub-classes do not partition the class".into());
    }
    let touches_center = |span: &VertexSet| span.iter().find(|v| expected.contains(*v)).cloned();
    for (k, sub) in cover.classes.iter().enumerate() {
        match &sub.cover {
            ClassCover::Cycles { cycles } => {
                let mut seen = VertexSet::new();
                for c in cycles {
                    let Ok(mask) = d.mask(&c.cycle) else {
                        out.push(format!("class {k}: cycle names unknown edges"));
                        continue;
                    };
                    let span = g.core.span(&c.cycle);
                    if !is_cycle(d.n(), &d.ends, &mask) {
                        out.push(format!(
                            "class {k}: edge set at {} is not a cycle",
                            c.wedge.center
                        ));
                    }
                    if !span.contains(&c.wedge.endpoints.0) || !span.contains(&c.wedge.endpoints.1)
                    {
                        out.push(format!(
                            "class {k}: cycle misses an endpoint of the wedge at {}",
                            c.wedge.center
                        ));
                    }
                    if let Some(v) = touches_center(&span) {
                        out.push(format!("class {k}: cycle passes through center {v}"));
                    }
                    if !seen.is_disjoint(&span) {
                        out.push(format!("class {k}: cycles share a vertex"));
                    }
                    seen.extend(span);
                }
            }
            ClassCover::Forest { forest } => {
                out.extend(
                    leafless_violations(g, forest)
                        .into_iter()
                        .map(|m| format!("class {k}: {m}")),
                );
                let span = g.core.span(forest);
                if let Some(v) = touches_center(&span) {
                    out.push(format!("class {k}: forest passes through center {v}"));
                }
                for w in &sub.wedges {
                    for x in [&w.endpoints.0, &w.endpoints.1] {
                        if !span.contains(x) {
                            out.push(format!("class {k}: endpoint {x} is not covered"));
                        }
                    }
                }
            }
        }
    }
    out
}
