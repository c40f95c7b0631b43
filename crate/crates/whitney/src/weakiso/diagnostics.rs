use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{check_weak_isomorphism, EdgeBijection};
use crate::error::{Error, Result};
use crate::graph::{components, is_weakly_n_connected, Dense, EdgeId, RayedGraph};
use crate::structure::enumerate_maximal_bananas;

/// Outcome of one structural check: `None` when skipped, otherwise the list
/// of violations (empty on success).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub components: Vec<String>,
    pub ends: Vec<String>,
    pub bananas: Option<Vec<String>>,
    pub bananas_skipped: Option<String>,
}

impl DiagnosticsReport {
    pub fn ok(&self) -> bool {
        self.components.is_empty()
            && self.ends.is_empty()
            && self.bananas.as_ref().is_none_or(|b| b.is_empty())
    }
}

/// Each component with at most two rays must be strongly 2-connected and
/// each component with three or more rays weakly 2-connected.
fn hypotheses(g: &RayedGraph, name: &str) -> Result<()> {
    let parts = components(g, &g.edge_ids())?;
    for block in &parts.blocks {
        let sub = g.induced(&block.vertices);
        let label = block
            .vertices
            .iter()
            .next()
            .map(|v| v.to_string())
            .unwrap_or_default();
        if block.rays.len() <= 2 {
            if !crate::graph::is_strongly_n_connected(&sub.core, 2)? {
                return Err(Error::precondition(format!(
                    "{name}: the component of {label} has at most two rays but is not 2-connected"
                )));
            }
        } else if !is_weakly_n_connected(&sub, 2)?.connected {
            return Err(Error::precondition(format!(
                "{name}: the component of {label} is not weakly 2-connected"
            )));
        }
    }
    Ok(())
}

/// Checks that a weak isomorphism maps components into components, keeps
/// the number of ends of each component, and (for graphs whose components
/// all have three or more rays) carries maximal bananas onto maximal bananas.
pub fn preservation_diagnostics(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<DiagnosticsReport> {
    let report = check_weak_isomorphism(g1, g2, phi)?;
    if !report.verdict {
        return Err(Error::precondition(
            "the bijection is not a weak isomorphism",
        ));
    }
    hypotheses(g1, "source")?;
    hypotheses(g2, "target")?;
    let p1 = components(g1, &g1.edge_ids())?;
    let p2 = components(g2, &g2.edge_ids())?;
    let mut out = DiagnosticsReport::default();
    let comp_of = |parts: &crate::graph::ComponentPartition, e: &EdgeId| {
        parts
            .blocks
            .iter()
            .position(|b| b.edges.contains(e))
            .expect("edge lies in a component")
    };
    let mut matched: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (a, b) in &phi.map {
        matched
            .entry(comp_of(&p1, a))
            .or_default()
            .insert(comp_of(&p2, b));
    }
    for (c, targets) in &matched {
        let name = p1.blocks[*c]
            .vertices
            .iter()
            .next()
            .map(|v| v.to_string())
            .unwrap_or_default();
        if targets.len() != 1 {
            out.components.push(format!(
                "the component of {name} meets {} target components",
                targets.len()
            ));
            continue;
        }
        let t = *targets.iter().next().expect("one target");
        let (r1, r2) = (p1.blocks[*c].rays.len(), p2.blocks[t].rays.len());
        if r1 != r2 {
            out.ends.push(format!(
                "the component of {name} has {r1} ends but its image has {r2}"
            ));
        }
    }
    let rich = |g: &RayedGraph| {
        crate::matroid::default_wiring(g).len() > 0 && {
            let d = Dense::new(g);
            let (label, count) = crate::graph::connect::component_labels(&d, |_| true);
            let mut rays = vec![0; count];
            for v in 0..d.n() {
                rays[label[v]] += d.rays[v];
            }
            rays.iter().all(|&r| r >= 3)
        }
    };
    if rich(g1) && rich(g2) {
        let (b1, b2) = (
            enumerate_maximal_bananas(g1)?,
            enumerate_maximal_bananas(g2)?,
        );
        let mut violations = Vec::new();
        for (id, banana) in &b1.bananas {
            let image = phi.image(&banana.edges)?;
            let first = image.iter().next().expect("bananas are nonempty");
            let target = b2.banana_of(first).expect("edge lies in a banana");
            if b2.bananas[target].edges != image {
                violations.push(format!("banana {id} does not map onto a maximal banana"));
            }
        }
        out.bananas = Some(violations);
    } else {
        out.bananas_skipped = Some("some component has fewer than three rays".into());
    }
    Ok(out)
}
