use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use super::{link_sides, match_decompositions, side_nodes, NodeKind, TreeMatch, TutteTree};
use crate::error::{Error, Result};
use crate::graph::iso::induced_vertex_map;
use crate::graph::{EdgeId, EdgeSet, Multigraph, RayId, RayedGraph, VertexId};
use crate::ops::{
    apply, component_of, labels_without, OpSequence, TwistSide, TwistSpec, WhitneyOp,
};
use crate::weakiso::EdgeBijection;

type VertexMap = BTreeMap<VertexId, VertexId>;

/// Twist operations realizing "exchange `x` and `y` on `side`". The side is
/// split into the components of `g - {x, y}` it meets. When it cannot be
/// twisted (protected edges, or rays that no two-ended twist can carry) the
/// complementary side is twisted instead, which gives the same graph up to
/// exchanging the names `x` and `y`; the flag reports that case.
fn twist_ops(
    g: &RayedGraph,
    x: &VertexId,
    y: &VertexId,
    side: &EdgeSet,
    protect: &EdgeSet,
) -> Result<(Vec<WhitneyOp>, bool)> {
    let label = labels_without(g, &[x, y]);
    let home = component_of(g, x);
    let mut groups: BTreeMap<usize, EdgeSet> = BTreeMap::new();
    for (e, u, v) in g.core.edges() {
        if !home.contains(u) {
            continue;
        }
        if let Some(w) = [u, v].into_iter().find(|w| *w != x && *w != y) {
            groups.entry(label[w]).or_default().insert(e.clone());
        }
    }
    let rays_of = |c: usize| -> Vec<RayId> {
        g.rays()
            .iter()
            .filter(|(_, at)| label.get(*at) == Some(&c) && *at != x && *at != y)
            .map(|(r, _)| r.clone())
            .collect()
    };
    let home_rays: Vec<&VertexId> = g.rays().values().filter(|at| home.contains(*at)).collect();
    let separated = home_rays.len() == 2
        && home_rays.iter().all(|at| *at != x && *at != y)
        && label[home_rays[0]] != label[home_rays[1]];
    let plan = |cs: &[usize]| -> Option<Vec<WhitneyOp>> {
        let mut ops = Vec::new();
        for &c in cs {
            let edges = &groups[&c];
            if !edges.is_disjoint(protect) {
                return None;
            }
            let rays = rays_of(c);
            if rays.is_empty() {
                ops.push(WhitneyOp::FiniteTwist {
                    x: x.clone(),
                    y: y.clone(),
                    side: edges.clone(),
                });
            } else if separated && rays.len() == 1 {
                let spec = TwistSpec {
                    x: x.clone(),
                    y: y.clone(),
                    toward: TwistSide::Ray(rays[0].clone()),
                };
                ops.push(WhitneyOp::SimultaneousTwist { twists: vec![spec] });
            } else {
                return None;
            }
        }
        Some(ops)
    };
    let (mine, rest): (Vec<usize>, Vec<usize>) =
        groups.keys().partition(|c| !groups[*c].is_disjoint(side));
    if let Some(ops) = plan(&mine) {
        return Ok((ops, false));
    }
    if let Some(ops) = plan(&rest) {
        return Ok((ops, true));
    }
    Err(Error::internal(format!(
        "no valid twist exchanges {x} and {y} on either side"
    )))
}

struct Synth<'a> {
    g: RayedGraph,
    ops: Vec<WhitneyOp>,
    m: &'a TreeMatch,
    sides: Vec<(EdgeSet, EdgeSet)>,
    protect: &'a EdgeSet,
}

impl Synth<'_> {
    fn t1(&self) -> &TutteTree {
        &self.m.left
    }

    fn twist(&mut self, x: &VertexId, y: &VertexId, side: &EdgeSet) -> Result<bool> {
        let (ops, flipped) = twist_ops(&self.g, x, y, side, self.protect)?;
        for op in ops {
            let step = apply(&op, &self.g)
                .map_err(|e| Error::internal(format!("synthesized twist rejected: {e}")))?;
            self.g = step.graph;
            self.ops.push(step.op);
        }
        Ok(flipped)
    }

    /// The link pair: the two vertices shared by the sides of link `l`.
    fn pair(&self, l: usize) -> Result<(VertexId, VertexId)> {
        let (a, b) = &self.sides[l];
        let (sa, sb) = (self.g.core.span(a), self.g.core.span(b));
        let common: Vec<VertexId> = sa.intersection(&sb).cloned().collect();
        match common.as_slice() {
            [u, v] => Ok((u.clone(), v.clone())),
            _ => Err(Error::internal(format!(
                "link {l} separates at {} vertices",
                common.len()
            ))),
        }
    }

    /// Node graph of `n` with endpoints read from the current graph.
    fn node_graph(&self, n: &str) -> Result<Multigraph> {
        let t = self.t1();
        let mut h = Multigraph::new();
        for e in t.nodes[n].graph.edge_ids() {
            let link = t
                .links
                .iter()
                .position(|l| (l.a == n && l.va == e) || (l.b == n && l.vb == e));
            let (u, v) = match link {
                Some(l) => self.pair(l)?,
                None => {
                    let (u, v) = self.g.endpoints(&e).expect("real edge");
                    (u.clone(), v.clone())
                }
            };
            h.add_edge_auto(e, u, v)?;
        }
        Ok(h)
    }

    /// Real edges represented by element `e` of node `n`.
    fn expansion(&self, n: &str, e: &EdgeId) -> EdgeSet {
        let t = self.t1();
        for (i, l) in t.links.iter().enumerate() {
            if l.a == n && &l.va == e {
                return self.sides[i].1.clone();
            }
            if l.b == n && &l.vb == e {
                return self.sides[i].0.clone();
            }
        }
        EdgeSet::from([e.clone()])
    }

    fn target_graph(&self, n: &str) -> &Multigraph {
        &self.m.right.nodes[&self.m.nodes[n]].graph.core
    }

    fn align_cycle(&mut self, n: &str) -> Result<()> {
        let psi = &self.m.edges;
        let inverse = psi.inverse();
        let (order2, _) = walk(self.target_graph(n), None);
        let target: Vec<EdgeId> = order2.iter().map(|e| inverse.map[e].clone()).collect();
        let h = self.node_graph(n)?;
        let anchor = h
            .edge_ids()
            .into_iter()
            .max_by(|a, b| {
                let (sa, sb) = (self.expansion(n, a).len(), self.expansion(n, b).len());
                sa.cmp(&sb).then_with(|| b.cmp(a))
            })
            .expect("cycle has edges");
        let len = target.len();
        for _ in 0..=len {
            let h = self.node_graph(n)?;
            let tpos = target
                .iter()
                .position(|e| *e == anchor)
                .expect("anchor in target");
            let t_fwd: Vec<EdgeId> = (0..len).map(|k| target[(tpos + k) % len].clone()).collect();
            let t_rev: Vec<EdgeId> = (0..len)
                .map(|k| target[(tpos + len - k) % len].clone())
                .collect();
            let mut best: Option<(usize, Vec<EdgeId>, Vec<VertexId>, Vec<EdgeId>)> = None;
            for flip in [false, true] {
                let (cur, verts) = walk(&h, Some((&anchor, flip)));
                for t in [&t_fwd, &t_rev] {
                    let k = cur.iter().zip(t.iter()).take_while(|(a, b)| a == b).count();
                    if best.as_ref().is_none_or(|b| k > b.0) {
                        best = Some((k, cur.clone(), verts.clone(), t.clone()));
                    }
                }
            }
            let (k, cur, verts, t) = best.expect("two directions");
            if k == len {
                return Ok(());
            }
            let j = cur.iter().position(|e| *e == t[k]).expect("same elements");
            let (x, y) = (verts[k].clone(), verts[(j + 1) % len].clone());
            let side: EdgeSet = cur[k..=j]
                .iter()
                .flat_map(|e| self.expansion(n, e))
                .collect();
            self.twist(&x, &y, &side)?;
        }
        Err(Error::internal(format!("cycle node {n} did not align")))
    }

    fn sigma(&self, n: &str) -> Result<VertexMap> {
        let h = self.node_graph(n)?;
        let emap: BTreeMap<EdgeId, EdgeId> = h
            .edge_ids()
            .into_iter()
            .map(|e| (e.clone(), self.m.edges.map[&e].clone()))
            .collect();
        induced_vertex_map(
            &RayedGraph::from(h),
            &RayedGraph::from(self.target_graph(n).clone()),
            &emap,
        )
        .ok_or_else(|| Error::theorem(format!("node {n} admits no vertex map after alignment")))
    }

    fn orient(&mut self) -> Result<()> {
        let t = self.t1().clone();
        let Some(root) = t.nodes.keys().next().cloned() else {
            return Ok(());
        };
        let mut sigma: BTreeMap<String, VertexMap> = BTreeMap::new();
        let root_map = if t.nodes[&root].kind == NodeKind::Bond {
            let h = self.node_graph(&root)?;
            h.vertices()
                .iter()
                .cloned()
                .zip(self.target_graph(&root).vertices().iter().cloned())
                .collect()
        } else {
            self.sigma(&root)?
        };
        sigma.insert(root.clone(), root_map);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(p) = queue.pop_front() {
            if t.nodes[&p].kind == NodeKind::Bond {
                self.settle_bond(&t, &p, &mut sigma)?;
            }
            for (l, link) in t.links.iter().enumerate() {
                let c = if link.a == p {
                    link.b.clone()
                } else if link.b == p {
                    link.a.clone()
                } else {
                    continue;
                };
                if sigma.contains_key(&c) {
                    continue;
                }
                let (a, b) = self.pair(l)?;
                if t.nodes[&c].kind == NodeKind::Bond {
                    let restricted = [&a, &b]
                        .into_iter()
                        .map(|v| (v.clone(), sigma[&p][v].clone()))
                        .collect();
                    sigma.insert(c.clone(), restricted);
                } else {
                    let mut sc = self.sigma(&c)?;
                    if sc[&a] != sigma[&p][&a] {
                        let child = side_nodes(&t, l, &c);
                        let parent: BTreeSet<String> = t
                            .nodes
                            .keys()
                            .filter(|n| !child.contains(*n))
                            .cloned()
                            .collect();
                        let (child_edges, parent_edges) = if link.a == c {
                            self.sides[l].clone()
                        } else {
                            (self.sides[l].1.clone(), self.sides[l].0.clone())
                        };
                        let key = |s: &EdgeSet| (s.len(), s.iter().next().cloned());
                        let child_first = t.nodes[&p].kind == NodeKind::Bond
                            || key(&child_edges) <= key(&parent_edges);
                        let chosen = if child_first {
                            &child_edges
                        } else {
                            &parent_edges
                        };
                        let flipped = self.twist(&a, &b, chosen)?;
                        let twisted = if child_first != flipped {
                            &child
                        } else {
                            &parent
                        };
                        for (n, map) in sigma.iter_mut() {
                            if twisted.contains(n) {
                                swap_keys(map, &a, &b);
                            }
                        }
                        sc = self.sigma(&c)?;
                        if sc[&a] != sigma[&p][&a] {
                            return Err(Error::internal(format!(
                                "link {l} still disagrees after twisting"
                            )));
                        }
                    }
                    sigma.insert(c.clone(), sc);
                }
                queue.push_back(c);
            }
        }
        Ok(())
    }
}

impl Synth<'_> {
    /// At a bond every side hangs off the same pair, so exchanging the pair on
    /// the agreeing sides fixes all disagreeing children at once. Does so when
    /// that takes fewer twists than repairing each disagreeing child.
    fn settle_bond(
        &mut self,
        t: &TutteTree,
        p: &str,
        sigma: &mut BTreeMap<String, VertexMap>,
    ) -> Result<()> {
        let mut agree = Vec::new();
        let mut disagree = 0;
        let mut parent = None;
        for (l, link) in t.links.iter().enumerate() {
            let c = if link.a == p {
                &link.b
            } else if link.b == p {
                &link.a
            } else {
                continue;
            };
            if sigma.contains_key(c) {
                parent = Some((l, c.clone()));
                continue;
            }
            let (a, _) = self.pair(l)?;
            if self.sigma(c)?[&a] == sigma[p][&a] {
                agree.push((l, c.clone()));
            } else {
                disagree += 1;
            }
        }
        if agree.len() + usize::from(parent.is_some()) >= disagree {
            return Ok(());
        }
        for (l, far) in agree.into_iter().chain(parent) {
            let (a, b) = self.pair(l)?;
            let far_nodes = side_nodes(t, l, &far);
            let far_edges = if t.links[l].a == far {
                self.sides[l].0.clone()
            } else {
                self.sides[l].1.clone()
            };
            let flipped = self.twist(&a, &b, &far_edges)?;
            for (n, map) in sigma.iter_mut() {
                if far_nodes.contains(n) != flipped {
                    swap_keys(map, &a, &b);
                }
            }
        }
        let own = sigma.get_mut(p).expect("visited");
        let (a, b) = own
            .keys()
            .cloned()
            .collect_tuple()
            .expect("bond has two vertices");
        swap_keys(own, &a, &b);
        Ok(())
    }
}

fn swap_keys(map: &mut VertexMap, a: &VertexId, b: &VertexId) {
    let (va, vb) = (map.remove(a), map.remove(b));
    if let Some(v) = va {
        map.insert(b.clone(), v);
    }
    if let Some(v) = vb {
        map.insert(a.clone(), v);
    }
}

/// Edges of a cycle in cyclic order with the vertex before each edge. The
/// walk starts at `start` (or the smallest edge) and leaves from its smaller
/// endpoint, or its larger one when the flag is set.
fn walk(h: &Multigraph, start: Option<(&EdgeId, bool)>) -> (Vec<EdgeId>, Vec<VertexId>) {
    let (first, flip) = match start {
        Some((e, f)) => (e.clone(), f),
        None => (
            h.edge_ids().into_iter().next().expect("cycle has edges"),
            false,
        ),
    };
    let (u, v) = h.endpoints(&first).expect("edge of cycle");
    let (mut at, mut from) = if flip {
        (u.clone(), v.clone())
    } else {
        (v.clone(), u.clone())
    };
    let mut edges = vec![first.clone()];
    let mut verts = vec![from.clone()];
    let mut last = first;
    while edges.len() < h.edge_count() {
        let next = h
            .incident(&at)
            .into_iter()
            .find(|e| *e != last && !edges.contains(e))
            .expect("cycle continues");
        from = at.clone();
        at = h.other_end(&next, &at).expect("incident").clone();
        edges.push(next.clone());
        verts.push(from.clone());
        last = next;
    }
    (edges, verts)
}

/// Finite twists on `g1` whose induced bijection equals `phi` up to a final
/// isomorphism onto `g2`. Cycle nodes are reordered first by reversing arcs
/// that avoid a fixed anchor element; then each link whose two node maps
/// disagree is repaired by twisting its smaller side.
pub fn synthesize_twists(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<OpSequence> {
    synthesize_twists_protecting(g1, g2, phi, &EdgeSet::new())
}

/// As [`synthesize_twists`], keeping every edge of `protect` on the untwisted
/// side of each twist.
pub fn synthesize_twists_protecting(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
    protect: &EdgeSet,
) -> Result<OpSequence> {
    let m = match_decompositions(g1, g2, phi)?;
    let sides = link_sides(&m.left);
    let mut s = Synth {
        g: g1.clone(),
        ops: Vec::new(),
        m: &m,
        sides,
        protect,
    };
    let cycles: Vec<String> = m
        .left
        .nodes
        .iter()
        .filter(|(_, n)| n.kind == NodeKind::Cycle)
        .map(|(k, _)| k.clone())
        .collect();
    for n in &cycles {
        s.align_cycle(n)?;
    }
    s.orient()?;
    Ok(OpSequence::new(s.ops))
}
