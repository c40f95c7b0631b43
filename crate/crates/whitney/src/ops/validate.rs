use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{TwistSide, TwistSpec, WhitneyOp};
use crate::graph::{EdgeId, EdgeSet, RayId, RayedGraph, VertexId, VertexSet};

/// Component labels of the graph with `removed` deleted.
pub(crate) fn labels_without(g: &RayedGraph, removed: &[&VertexId]) -> BTreeMap<VertexId, usize> {
    let mut adj: BTreeMap<&VertexId, Vec<&VertexId>> = BTreeMap::new();
    for (_, u, v) in g.core.edges() {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut label = BTreeMap::new();
    let mut count = 0;
    for s in g.vertices() {
        if removed.contains(&s) || label.contains_key(s) {
            continue;
        }
        label.insert(s.clone(), count);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in adj.get(v).map(|x| x.as_slice()).unwrap_or(&[]) {
                if !removed.contains(&w) && !label.contains_key(w) {
                    label.insert(w.clone(), count);
                    queue.push_back(w);
                }
            }
        }
        count += 1;
    }
    label
}

/// Vertices of the component containing `v`.
pub(crate) fn component_of(g: &RayedGraph, v: &VertexId) -> VertexSet {
    let label = labels_without(g, &[]);
    let l = label[v];
    label
        .into_iter()
        .filter(|(_, x)| *x == l)
        .map(|(w, _)| w)
        .collect()
}

fn rays_in(g: &RayedGraph, vs: &VertexSet) -> Vec<RayId> {
    g.rays()
        .iter()
        .filter(|(_, at)| vs.contains(*at))
        .map(|(r, _)| r.clone())
        .collect()
}

/// Edges of `side` must exist; returns the interior vertices (span minus the
/// attachment vertices) after checking the side is closed around them.
fn interior(
    g: &RayedGraph,
    side: &EdgeSet,
    attach: &[&VertexId],
    out: &mut Vec<String>,
) -> Option<VertexSet> {
    let unknown: Vec<&EdgeId> = side.iter().filter(|e| !g.core.has_edge(e)).collect();
    if !unknown.is_empty() {
        out.push(format!("side references unknown edges {unknown:?}"));
        return None;
    }
    if side.is_empty() {
        out.push("side is empty".into());
        return None;
    }
    let inner: VertexSet = g
        .core
        .span(side)
        .into_iter()
        .filter(|v| !attach.contains(&v))
        .collect();
    for v in &inner {
        if g.core.incident(v).iter().any(|e| !side.contains(e)) {
            out.push(format!(
                "side is not closed: vertex {v} has edges outside it"
            ));
            break;
        }
    }
    if inner.iter().any(|v| g.rays_at(v) > 0) {
        out.push("side carries rays".into());
    }
    let sub = g.edge_subgraph(side);
    let parts = labels_without(&sub, &[]);
    if parts.values().collect::<BTreeSet<_>>().len() > 1 {
        out.push("side is not connected".into());
    }
    Some(inner)
}

fn check_vertex(g: &RayedGraph, v: &VertexId, out: &mut Vec<String>) -> bool {
    if g.core.has_vertex(v) {
        true
    } else {
        out.push(format!("unknown vertex {v}"));
        false
    }
}

fn finite_split(
    g: &RayedGraph,
    v: &VertexId,
    side: &EdgeSet,
    new: Option<&VertexId>,
    out: &mut Vec<String>,
) {
    if !check_vertex(g, v, out) {
        return;
    }
    if let Some(n) = new {
        if g.core.has_vertex(n) {
            out.push(format!("new vertex {n} already exists"));
        }
    }
    if interior(g, side, &[v], out).is_none() {
        return;
    }
    if !g.core.incident(v).iter().any(|e| side.contains(e)) {
        out.push(format!("side does not meet {v}"));
    }
    if g.core.incident(v).iter().all(|e| side.contains(e)) && g.rays_at(v) == 0 {
        out.push(format!(
            "not a cut vertex: {v} keeps nothing outside the side"
        ));
    }
}

fn finite_join(g: &RayedGraph, target: &VertexId, merge: &VertexId, out: &mut Vec<String>) {
    if !(check_vertex(g, target, out) & check_vertex(g, merge, out)) {
        return;
    }
    let comp = component_of(g, merge);
    if comp.contains(target) {
        out.push(format!("{target} and {merge} lie in the same component"));
    }
    if !rays_in(g, &comp).is_empty() {
        out.push(format!("the component of {merge} carries rays"));
    }
}

/// Whether removing `cut` leaves the two rays of its component on different
/// sides.
pub(crate) fn separates_rays(g: &RayedGraph, cut: &[&VertexId], rays: &[RayId]) -> bool {
    let label = labels_without(g, cut);
    let at: Vec<&VertexId> = rays.iter().map(|r| &g.rays()[r]).collect();
    at.iter().all(|v| !cut.contains(v)) && label[at[0]] != label[at[1]]
}

/// The two rays of the component of `v`, when it has exactly two.
pub(crate) fn two_rays(g: &RayedGraph, v: &VertexId, out: &mut Vec<String>) -> Option<Vec<RayId>> {
    let rays = rays_in(g, &component_of(g, v));
    if rays.len() == 2 {
        Some(rays)
    } else {
        out.push(format!(
            "the component of {v} has {} rays, not 2",
            rays.len()
        ));
        None
    }
}

fn two_ended_split(
    g: &RayedGraph,
    component: &VertexId,
    cuts: &[VertexId],
    toward: Option<&RayId>,
    copies: Option<&[VertexId]>,
    out: &mut Vec<String>,
) {
    if !check_vertex(g, component, out) {
        return;
    }
    let Some(rays) = two_rays(g, component, out) else {
        return;
    };
    if let Some(r) = toward {
        if !rays.contains(r) {
            out.push(format!("ray {r} is not an end of this component"));
        }
    }
    if cuts.is_empty() {
        out.push("no cut vertices given".into());
    }
    let comp = component_of(g, component);
    let distinct: BTreeSet<&VertexId> = cuts.iter().collect();
    if distinct.len() != cuts.len() {
        out.push("cut vertices repeat".into());
    }
    for x in cuts {
        if !comp.contains(x) {
            out.push(format!("cut vertex {x} is not in the component"));
        } else if !separates_rays(g, &[x], &rays) {
            out.push(format!("{x} does not separate the two ends"));
        }
    }
    if let Some(c) = copies {
        if c.len() != cuts.len() {
            out.push("copy names do not match the cut vertices".into());
        }
        let names: BTreeSet<&VertexId> = c.iter().collect();
        if names.len() != c.len() || c.iter().any(|v| g.core.has_vertex(v)) {
            out.push("copy names must be new and distinct".into());
        }
    }
}

fn two_ended_join(g: &RayedGraph, chain: &[(VertexId, VertexId)], out: &mut Vec<String>) {
    if chain.is_empty() {
        out.push("empty chain".into());
        return;
    }
    let mut ok = true;
    for (k, m) in chain {
        ok &= check_vertex(g, k, out);
        ok &= check_vertex(g, m, out);
    }
    if !ok {
        return;
    }
    let label = labels_without(g, &[]);
    let mut comps = vec![label[&chain[0].0]];
    for (i, (_, m)) in chain.iter().enumerate() {
        let c = label[m];
        if let Some((k, _)) = chain.get(i + 1) {
            if label[k] != c {
                out.push(format!("{m} and {k} are not in the same piece"));
            }
        }
        comps.push(c);
    }
    if comps.iter().collect::<BTreeSet<_>>().len() != comps.len() {
        out.push("pieces of the chain are not distinct components".into());
        return;
    }
    let ray_count = |c: usize| g.rays().values().filter(|at| label[*at] == c).count();
    let last = comps.len() - 1;
    for (i, &c) in comps.iter().enumerate() {
        let want = if i == 0 || i == last { 1 } else { 0 };
        if ray_count(c) != want {
            out.push(format!(
                "piece {i} carries {} rays, expected {want}",
                ray_count(c)
            ));
        }
    }
}

fn finite_twist(g: &RayedGraph, x: &VertexId, y: &VertexId, side: &EdgeSet, out: &mut Vec<String>) {
    if !(check_vertex(g, x, out) & check_vertex(g, y, out)) {
        return;
    }
    if x == y {
        out.push("cut pair has a repeated vertex".into());
        return;
    }
    let Some(inner) = interior(g, side, &[x, y], out) else {
        return;
    };
    if inner.is_empty() {
        out.push("side has no interior vertices".into());
        return;
    }
    for e in side {
        let (a, b) = g.endpoints(e).expect("checked");
        if !inner.contains(a) && !inner.contains(b) {
            out.push(format!("edge {e} joins the cut pair directly"));
        }
    }
    let label = labels_without(g, &[x, y]);
    if inner
        .iter()
        .map(|v| label[v])
        .collect::<BTreeSet<_>>()
        .len()
        > 1
    {
        out.push("side spans several components of the cut".into());
    }
    for v in [x, y] {
        if !g.core.incident(v).iter().any(|e| side.contains(e)) {
            out.push(format!("side does not meet {v}"));
        }
    }
    let rest = [x, y]
        .iter()
        .any(|v| g.rays_at(v) > 0 || g.core.incident(v).iter().any(|e| !side.contains(e)));
    if !rest {
        out.push(format!(
            "{{{x},{y}}} is not a cut pair: nothing remains outside the side"
        ));
    }
}

fn twist_spec(g: &RayedGraph, t: &TwistSpec, out: &mut Vec<String>) {
    match &t.toward {
        TwistSide::Finite(side) => finite_twist(g, &t.x, &t.y, side, out),
        TwistSide::Ray(r) => {
            if !(check_vertex(g, &t.x, out) & check_vertex(g, &t.y, out)) {
                return;
            }
            if t.x == t.y {
                out.push("cut pair has a repeated vertex".into());
                return;
            }
            let Some(rays) = two_rays(g, &t.x, out) else {
                return;
            };
            if !rays.contains(r) {
                out.push(format!("ray {r} is not an end of the component of {}", t.x));
            }
            if !component_of(g, &t.x).contains(&t.y) {
                out.push(format!("{} and {} lie in different components", t.x, t.y));
            } else if !separates_rays(g, &[&t.x, &t.y], &rays) {
                out.push(format!(
                    "{{{},{}}} does not separate the two ends",
                    t.x, t.y
                ));
            }
        }
    }
}

fn simultaneous(g: &RayedGraph, twists: &[TwistSpec], out: &mut Vec<String>) {
    if twists.is_empty() {
        out.push("no twists given".into());
    }
    for (i, t) in twists.iter().enumerate() {
        let mut local = Vec::new();
        twist_spec(g, t, &mut local);
        out.extend(local.into_iter().map(|m| format!("twist {i}: {m}")));
    }
    if !out.is_empty() {
        return;
    }
    for (i, a) in twists.iter().enumerate() {
        for (j, b) in twists.iter().enumerate().skip(i + 1) {
            if [&a.x, &a.y].iter().any(|v| *v == &b.x || *v == &b.y) {
                out.push(format!("twists {i} and {j} share a vertex"));
                continue;
            }
            for (p, q, pi, qi) in [(a, b, i, j), (b, a, j, i)] {
                let label = labels_without(g, &[&p.x, &p.y]);
                if label.get(&q.x) != label.get(&q.y) {
                    out.push(format!("twists {pi} and {qi} cross"));
                }
            }
        }
    }
}

/// Violated clauses of `op` on `g`; empty when the op may be applied.
pub fn validate(op: &WhitneyOp, g: &RayedGraph) -> Vec<String> {
    let mut out = Vec::new();
    match op {
        WhitneyOp::FiniteSplit {
            vertex,
            side,
            new_vertex,
        } => finite_split(g, vertex, side, new_vertex.as_ref(), &mut out),
        WhitneyOp::FiniteJoin { target, merge, .. } => finite_join(g, target, merge, &mut out),
        WhitneyOp::TwoEndedSplit {
            component,
            cuts,
            toward,
            copies,
        } => two_ended_split(
            g,
            component,
            cuts,
            toward.as_ref(),
            copies.as_deref(),
            &mut out,
        ),
        WhitneyOp::TwoEndedJoin { chain, .. } => two_ended_join(g, chain, &mut out),
        WhitneyOp::FiniteTwist { x, y, side } => finite_twist(g, x, y, side, &mut out),
        WhitneyOp::SimultaneousTwist { twists } => simultaneous(g, twists, &mut out),
    }
    out.dedup();
    out
}
