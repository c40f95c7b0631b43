//! Whitney operations: vertex splits and joins, two-ended splits and joins,
//! and finite or simultaneous twists. Every operation keeps edge ids, so the
//! induced edge bijection is the identity on ids.

mod validate;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeSet, RayId, RayedGraph, VertexId};
use crate::weakiso::{check_weak_isomorphism, EdgeBijection, WeakIsoReport};

pub use validate::validate;
pub(crate) use validate::{component_of, labels_without, separates_rays};

/// The side a twist acts on: everything toward one end of a two-ended
/// component, or an explicit ray-free edge set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwistSide {
    Ray(RayId),
    Finite(EdgeSet),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistSpec {
    pub x: VertexId,
    pub y: VertexId,
    pub toward: TwistSide,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WhitneyOp {
    /// Moves the edges of `side` at `vertex` to a new copy of the vertex.
    FiniteSplit {
        vertex: VertexId,
        side: EdgeSet,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        new_vertex: Option<VertexId>,
    },
    /// Identifies `merge`, which lies in a ray-free component, into `target`.
    /// `side` records the merged component's edges once applied.
    FiniteJoin {
        target: VertexId,
        merge: VertexId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        side: Option<EdgeSet>,
    },
    /// Splits a two-ended component at each cut vertex; the edges leading
    /// toward `toward` move to the copy.
    TwoEndedSplit {
        component: VertexId,
        cuts: Vec<VertexId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        toward: Option<RayId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        copies: Option<Vec<VertexId>>,
    },
    /// Glues a chain of pieces into a line: each `(keep, merge)` identifies
    /// the exit of one piece with the entry of the next.
    TwoEndedJoin {
        chain: Vec<(VertexId, VertexId)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        toward: Option<RayId>,
    },
    /// Exchanges `x` and `y` on the edges of a ray-free side.
    FiniteTwist {
        x: VertexId,
        y: VertexId,
        side: EdgeSet,
    },
    /// Several non-crossing twists applied at once.
    SimultaneousTwist { twists: Vec<TwistSpec> },
}

impl WhitneyOp {
    pub fn kind(&self) -> &'static str {
        match self {
            WhitneyOp::FiniteSplit { .. } => "finite_split",
            WhitneyOp::FiniteJoin { .. } => "finite_join",
            WhitneyOp::TwoEndedSplit { .. } => "two_ended_split",
            WhitneyOp::TwoEndedJoin { .. } => "two_ended_join",
            WhitneyOp::FiniteTwist { .. } => "finite_twist",
            WhitneyOp::SimultaneousTwist { .. } => "simultaneous_twist",
        }
    }
}

/// Result of applying one operation. `op` has every optional parameter
/// filled in, which is what [`invert`] needs.
#[derive(Clone, Debug)]
pub struct Applied {
    pub graph: RayedGraph,
    pub op: WhitneyOp,
    pub edge_map: EdgeBijection,
    pub altered: EdgeSet,
}

fn fresh(g: &RayedGraph, taken: &[VertexId], base: &VertexId) -> VertexId {
    let mut name = g.core.fresh_vertex(base);
    while taken.contains(&name) || g.core.has_vertex(&name) {
        name = VertexId::new(format!("{name}'"));
    }
    name
}

/// Re-attaches endpoints: `moves[e]` lists `(old, new)` replacements, each
/// applied to one endpoint slot.
fn reattach(
    g: &mut RayedGraph,
    moves: BTreeMap<EdgeId, Vec<(VertexId, VertexId)>>,
) -> Result<EdgeSet> {
    let mut altered = EdgeSet::new();
    for (e, list) in moves {
        let (a, b) = g
            .endpoints(&e)
            .map(|(a, b)| (a.clone(), b.clone()))
            .expect("edge exists");
        let mut slots = [a, b];
        let mut done = [false, false];
        for (old, new) in list {
            if let Some(i) = (0..2).find(|&i| !done[i] && slots[i] == old) {
                slots[i] = new;
                done[i] = true;
            }
        }
        let [u, v] = slots;
        let before = g.endpoints(&e).map(|(a, b)| (a.clone(), b.clone()));
        g.core.set_endpoints(&e, u, v)?;
        if g.endpoints(&e).map(|(a, b)| (a.clone(), b.clone())) != before {
            altered.insert(e.clone());
        }
    }
    Ok(altered)
}

fn twist_moves(
    g: &RayedGraph,
    t: &TwistSpec,
    moves: &mut BTreeMap<EdgeId, Vec<(VertexId, VertexId)>>,
) {
    let (x, y) = (&t.x, &t.y);
    let partner = |v: &VertexId| if v == x { y.clone() } else { x.clone() };
    match &t.toward {
        TwistSide::Finite(side) => {
            for e in side {
                let (a, b) = g.endpoints(e).expect("validated");
                for v in [a, b] {
                    if v == x || v == y {
                        moves
                            .entry(e.clone())
                            .or_default()
                            .push((v.clone(), partner(v)));
                    }
                }
            }
        }
        TwistSide::Ray(r) => {
            let label = labels_without(g, &[x, y]);
            let target = label[&g.rays()[r]];
            for v in [x, y] {
                for e in g.core.incident(v) {
                    let Some(w) = g.core.other_end(&e, v) else {
                        continue;
                    };
                    if label.get(w) == Some(&target) {
                        moves
                            .entry(e.clone())
                            .or_default()
                            .push((v.clone(), partner(v)));
                    }
                }
            }
        }
    }
}

/// Applies `op` to `g` after validating it.
pub fn apply(op: &WhitneyOp, g: &RayedGraph) -> Result<Applied> {
    let violations = validate(op, g);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let mut out = g.clone();
    let mut moves: BTreeMap<EdgeId, Vec<(VertexId, VertexId)>> = BTreeMap::new();
    let mut altered = EdgeSet::new();
    let normalized = match op {
        WhitneyOp::FiniteSplit {
            vertex,
            side,
            new_vertex,
        } => {
            let new = new_vertex.clone().unwrap_or_else(|| fresh(g, &[], vertex));
            out.core.add_vertex(new.clone());
            for e in side {
                let (a, b) = g.endpoints(e).expect("validated");
                for w in [a, b] {
                    if w == vertex {
                        moves
                            .entry(e.clone())
                            .or_default()
                            .push((w.clone(), new.clone()));
                    }
                }
            }
            WhitneyOp::FiniteSplit {
                vertex: vertex.clone(),
                side: side.clone(),
                new_vertex: Some(new),
            }
        }
        WhitneyOp::FiniteJoin { target, merge, .. } => {
            let comp = component_of(g, merge);
            let side: EdgeSet = g
                .core
                .edges()
                .filter(|(_, u, _)| comp.contains(*u))
                .map(|(e, _, _)| e.clone())
                .collect();
            altered.extend(g.core.incident(merge));
            out.identify(target, merge)?;
            WhitneyOp::FiniteJoin {
                target: target.clone(),
                merge: merge.clone(),
                side: Some(side),
            }
        }
        WhitneyOp::TwoEndedSplit {
            component,
            cuts,
            toward,
            copies,
        } => {
            let rays: Vec<RayId> = g
                .rays()
                .iter()
                .filter(|(_, at)| component_of(g, component).contains(*at))
                .map(|(r, _)| r.clone())
                .collect();
            let toward = toward.clone().unwrap_or_else(|| rays[1].clone());
            let end = &g.rays()[&toward];
            let sides: Vec<BTreeMap<VertexId, usize>> =
                cuts.iter().map(|x| labels_without(g, &[x])).collect();
            let mut order: Vec<usize> = (0..cuts.len()).collect();
            order.sort_by_key(|&i| {
                std::cmp::Reverse(
                    cuts.iter()
                        .filter(|y| sides[i].get(*y) == sides[i].get(end))
                        .count(),
                )
            });
            let mut names: Vec<VertexId> = Vec::new();
            for &i in &order {
                let name = match copies {
                    Some(c) => c[i].clone(),
                    None => fresh(g, &names, &cuts[i]),
                };
                names.push(name);
            }
            for (k, &i) in order.iter().enumerate() {
                let x = &cuts[i];
                out.core.add_vertex(names[k].clone());
                for e in g.core.incident(x) {
                    let Some(w) = g.core.other_end(&e, x) else {
                        continue;
                    };
                    if w != x && sides[i].get(w) == sides[i].get(end) {
                        moves
                            .entry(e.clone())
                            .or_default()
                            .push((x.clone(), names[k].clone()));
                    }
                }
            }
            WhitneyOp::TwoEndedSplit {
                component: component.clone(),
                cuts: order.iter().map(|&i| cuts[i].clone()).collect(),
                toward: Some(toward),
                copies: Some(names),
            }
        }
        WhitneyOp::TwoEndedJoin { chain, .. } => {
            let last = component_of(g, &chain.last().expect("validated").1);
            let toward = g
                .rays()
                .iter()
                .find(|(_, at)| last.contains(*at))
                .map(|(r, _)| r.clone());
            for (keep, merge) in chain {
                altered.extend(out.core.incident(merge));
                out.identify(keep, merge)?;
            }
            let result = out.clone();
            let rays: Vec<RayId> = result
                .rays()
                .keys()
                .filter(|r| component_of(&result, &chain[0].0).contains(&result.rays()[*r]))
                .cloned()
                .collect();
            for (keep, _) in chain {
                if rays.len() != 2 || !separates_rays(&result, &[keep], &rays) {
                    return Err(Error::Invalid(vec![format!(
                        "joined vertex {keep} does not separate the two ends"
                    )]));
                }
            }
            WhitneyOp::TwoEndedJoin {
                chain: chain.clone(),
                toward,
            }
        }
        WhitneyOp::FiniteTwist { x, y, side } => {
            let spec = TwistSpec {
                x: x.clone(),
                y: y.clone(),
                toward: TwistSide::Finite(side.clone()),
            };
            twist_moves(g, &spec, &mut moves);
            op.clone()
        }
        WhitneyOp::SimultaneousTwist { twists } => {
            for t in twists {
                twist_moves(g, t, &mut moves);
            }
            op.clone()
        }
    };
    altered.extend(reattach(&mut out, moves)?);
    Ok(Applied {
        edge_map: EdgeBijection::identity(g),
        graph: out,
        op: normalized,
        altered,
    })
}

/// The operation undoing an applied (normalized) operation.
pub fn invert(op: &WhitneyOp) -> Result<WhitneyOp> {
    let missing = |what: &str| {
        Error::input(format!(
            "cannot invert {}: {what} was not recorded",
            op.kind()
        ))
    };
    Ok(match op {
        WhitneyOp::FiniteSplit {
            vertex, new_vertex, ..
        } => WhitneyOp::FiniteJoin {
            target: vertex.clone(),
            merge: new_vertex
                .clone()
                .ok_or_else(|| missing("the new vertex"))?,
            side: None,
        },
        WhitneyOp::FiniteJoin {
            target,
            merge,
            side,
        } => WhitneyOp::FiniteSplit {
            vertex: target.clone(),
            side: side.clone().ok_or_else(|| missing("the merged side"))?,
            new_vertex: Some(merge.clone()),
        },
        WhitneyOp::TwoEndedSplit { cuts, copies, .. } => {
            let copies = copies.clone().ok_or_else(|| missing("the copy names"))?;
            WhitneyOp::TwoEndedJoin {
                chain: cuts.iter().cloned().zip(copies).collect(),
                toward: None,
            }
        }
        WhitneyOp::TwoEndedJoin { chain, toward } => WhitneyOp::TwoEndedSplit {
            component: chain.first().ok_or_else(|| missing("the chain"))?.0.clone(),
            cuts: chain.iter().map(|(k, _)| k.clone()).collect(),
            toward: Some(toward.clone().ok_or_else(|| missing("the far end"))?),
            copies: Some(chain.iter().map(|(_, m)| m.clone()).collect()),
        },
        WhitneyOp::FiniteTwist { .. } | WhitneyOp::SimultaneousTwist { .. } => op.clone(),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpSequence {
    pub ops: Vec<WhitneyOp>,
}

impl OpSequence {
    pub fn new(ops: Vec<WhitneyOp>) -> Self {
        OpSequence { ops }
    }

    /// A sequence made of finite splits only.
    pub fn is_split_chain(&self) -> bool {
        !self.ops.is_empty()
            && self
                .ops
                .iter()
                .all(|op| matches!(op, WhitneyOp::FiniteSplit { .. }))
    }
}

/// Outcome of replaying a sequence: the final graph, the normalized ops, the
/// induced bijection and how often each edge was re-attached.
#[derive(Clone, Debug)]
pub struct Replay {
    pub graph: RayedGraph,
    pub ops: OpSequence,
    pub induced: EdgeBijection,
    pub alterations: BTreeMap<EdgeId, usize>,
}

pub fn replay(g: &RayedGraph, seq: &OpSequence) -> Result<Replay> {
    let mut graph = g.clone();
    let mut ops = Vec::with_capacity(seq.ops.len());
    let mut alterations: BTreeMap<EdgeId, usize> =
        g.edge_ids().into_iter().map(|e| (e, 0)).collect();
    for (index, op) in seq.ops.iter().enumerate() {
        let step = apply(op, &graph).map_err(|e| Error::Step {
            index,
            source: Box::new(e),
        })?;
        for e in &step.altered {
            *alterations.get_mut(e).expect("edge ids are preserved") += 1;
        }
        graph = step.graph;
        ops.push(step.op);
    }
    Ok(Replay {
        induced: EdgeBijection::identity(g),
        graph,
        ops: OpSequence { ops },
        alterations,
    })
}

/// Applies disjoint operations as one batch, in sorted order.
pub fn apply_batch(g: &RayedGraph, ops: &[WhitneyOp]) -> Result<Replay> {
    let mut sorted = ops.to_vec();
    sorted.sort();
    replay(g, &OpSequence { ops: sorted })
}

/// The bijection induced by the sequence from `g` to its final graph.
pub fn compose(g: &RayedGraph, seq: &OpSequence) -> Result<EdgeBijection> {
    Ok(replay(g, seq)?.induced)
}

/// Inverse of a normalized sequence. Split chains are undone in their
/// original order, with join targets redirected to the surviving vertex;
/// other sequences are undone in reverse order.
pub fn invert_sequence(seq: &OpSequence) -> Result<OpSequence> {
    if seq.is_split_chain() {
        let mut alias: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let resolve = |alias: &BTreeMap<VertexId, VertexId>, v: &VertexId| {
            let mut v = v.clone();
            while let Some(w) = alias.get(&v) {
                v = w.clone();
            }
            v
        };
        let mut ops = Vec::new();
        for op in &seq.ops {
            let WhitneyOp::FiniteJoin { target, merge, .. } = invert(op)? else {
                unreachable!()
            };
            let target = resolve(&alias, &target);
            let merge = resolve(&alias, &merge);
            alias.insert(merge.clone(), target.clone());
            ops.push(WhitneyOp::FiniteJoin {
                target,
                merge,
                side: None,
            });
        }
        return Ok(OpSequence { ops });
    }
    let ops = seq
        .ops
        .iter()
        .rev()
        .map(invert)
        .collect::<Result<Vec<_>>>()?;
    Ok(OpSequence { ops })
}

/// Weak isomorphism report for the bijection a sequence induces.
pub fn check_sequence_weak_iso(
    g: &RayedGraph,
    seq: &OpSequence,
) -> Result<(RayedGraph, WeakIsoReport)> {
    let r = replay(g, seq)?;
    let report = check_weak_isomorphism(g, &r.graph, &r.induced)?;
    Ok((r.graph, report))
}
