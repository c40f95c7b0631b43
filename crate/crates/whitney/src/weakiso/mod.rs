//! Weak isomorphisms: edge bijections that preserve cycles and tameness in
//! both directions.

mod diagnostics;
mod search;
pub mod tame;

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::cycles::{fundamental_cycles, is_cycle, simple_cycles, CYCLE_CAP};
use crate::graph::iso::{induced_vertex_map, VertexMap};
use crate::graph::{Dense, EdgeId, EdgeSet, RayedGraph, VertexId, Wedge};
use crate::matroid::RankOracle;

pub use diagnostics::{preservation_diagnostics, DiagnosticsReport};
pub use search::search_weak_isomorphisms;
use tame::{is_tame_mask, structured_family, tame_table, EXHAUSTIVE_TAME_EDGES};

/// Total bijection between the edge sets of two graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeBijection {
    pub map: BTreeMap<EdgeId, EdgeId>,
}

impl EdgeBijection {
    pub fn new(map: BTreeMap<EdgeId, EdgeId>) -> Self {
        EdgeBijection { map }
    }

    pub fn identity(g: &RayedGraph) -> Self {
        EdgeBijection {
            map: g.edge_ids().into_iter().map(|e| (e.clone(), e)).collect(),
        }
    }

    pub fn get(&self, e: &EdgeId) -> Option<&EdgeId> {
        self.map.get(e)
    }

    pub fn inverse(&self) -> Self {
        EdgeBijection {
            map: self
                .map
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }

    /// `next` after `self`.
    pub fn then(&self, next: &EdgeBijection) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (a, b) in &self.map {
            let c = next
                .get(b)
                .ok_or_else(|| Error::input(format!("edge {b} has no image")))?;
            map.insert(a.clone(), c.clone());
        }
        Ok(EdgeBijection { map })
    }

    pub fn image(&self, f: &EdgeSet) -> Result<EdgeSet> {
        f.iter()
            .map(|e| {
                self.get(e)
                    .cloned()
                    .ok_or_else(|| Error::input(format!("edge {e} has no image")))
            })
            .collect()
    }

    /// Checks that the map is a bijection from `E(g1)` onto `E(g2)`.
    pub fn validate(&self, g1: &RayedGraph, g2: &RayedGraph) -> Result<()> {
        self.indices(&Dense::new(g1), &Dense::new(g2)).map(|_| ())
    }

    /// The map as edge indices of the dense views.
    pub fn indices(&self, d1: &Dense, d2: &Dense) -> Result<Vec<usize>> {
        if d1.m() != d2.m() {
            return Err(Error::input(format!(
                "edge counts differ: {} versus {}",
                d1.m(),
                d2.m()
            )));
        }
        if self.map.len() != d1.m() {
            return Err(Error::input("map is not total on the source edges"));
        }
        let mut hit = vec![false; d2.m()];
        let mut out = Vec::with_capacity(d1.m());
        for e in &d1.eids {
            let t = self
                .get(e)
                .ok_or_else(|| Error::input(format!("edge {e} has no image")))?;
            let j = d2
                .edge_index(t)
                .ok_or_else(|| Error::input(format!("unknown target edge {t}")))?;
            if std::mem::replace(&mut hit[j], true) {
                return Err(Error::input(format!("target edge {t} is hit twice")));
            }
            out.push(j);
        }
        Ok(out)
    }

    pub fn from_indices(d1: &Dense, d2: &Dense, p: &[usize]) -> Self {
        EdgeBijection {
            map: p
                .iter()
                .enumerate()
                .map(|(i, &j)| (d1.eids[i].clone(), d2.eids[j].clone()))
                .collect(),
        }
    }
}

/// Which map fails: `Forward` is the bijection itself, `Backward` its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

/// A set whose image under the named direction breaks a property. For
/// `Forward` the edges belong to the source graph, for `Backward` to the
/// target graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub direction: Direction,
    pub edges: EdgeSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetCoverage {
    /// Every subset of the edge set.
    Exhaustive,
    /// The structured family described in [`tame::structured_family`].
    Structured,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakIsoReport {
    pub cycle_preserving: bool,
    pub cycle_witness: Option<Witness>,
    pub tameness_preserving: bool,
    pub tameness_witness: Option<Witness>,
    pub rank_preserving: bool,
    pub rank_witness: Option<Witness>,
    pub cycles_exhaustive: bool,
    pub subsets: SubsetCoverage,
    pub subsets_checked: u64,
    /// True when the rank cross-check is expected to agree with the verdict:
    /// exhaustive coverage and no component with three or more rays.
    pub rank_equivalence_asserted: bool,
    pub verdict: bool,
}

/// Precomputed data for checking many bijections between the same graphs.
pub struct Checker {
    pub d1: Dense,
    pub d2: Dense,
    o1: RankOracle,
    o2: RankOracle,
    cycles1: Vec<FixedBitSet>,
    cycles2: Vec<FixedBitSet>,
    set1: HashSet<FixedBitSet>,
    set2: HashSet<FixedBitSet>,
    cycles_exhaustive: bool,
    tables: OnceLock<Tables>,
    families: OnceLock<(Vec<FixedBitSet>, Vec<FixedBitSet>)>,
    finite_like: bool,
    seed: u64,
}

struct Tables {
    tame1: Vec<bool>,
    tame2: Vec<bool>,
    rank1: Vec<u8>,
    rank2: Vec<u8>,
}

fn at_most_two_rays_per_component(g: &RayedGraph) -> bool {
    crate::matroid::default_wiring(g).is_empty()
}

impl Checker {
    pub fn new(g1: &RayedGraph, g2: &RayedGraph) -> Result<Checker> {
        Self::with_seed(g1, g2, 0)
    }

    pub fn with_seed(g1: &RayedGraph, g2: &RayedGraph, seed: u64) -> Result<Checker> {
        let (d1, d2) = (Dense::new(g1), Dense::new(g2));
        if d1.m() != d2.m() {
            return Err(Error::input(format!(
                "edge counts differ: {} versus {}",
                d1.m(),
                d2.m()
            )));
        }
        let c1 = simple_cycles(d1.n(), &d1.ends, CYCLE_CAP);
        let c2 = simple_cycles(d2.n(), &d2.ends, CYCLE_CAP);
        let cycles_exhaustive = c1.exhaustive && c2.exhaustive;
        let (cycles1, cycles2) = if cycles_exhaustive {
            (c1.cycles, c2.cycles)
        } else {
            let mut a = c1.cycles;
            a.extend(fundamental_cycles(d1.n(), &d1.ends));
            let mut b = c2.cycles;
            b.extend(fundamental_cycles(d2.n(), &d2.ends));
            (a, b)
        };
        Ok(Checker {
            set1: cycles1.iter().cloned().collect(),
            set2: cycles2.iter().cloned().collect(),
            cycles1,
            cycles2,
            cycles_exhaustive,
            o1: RankOracle::new(g1),
            o2: RankOracle::new(g2),
            d1,
            d2,
            tables: OnceLock::new(),
            families: OnceLock::new(),
            finite_like: at_most_two_rays_per_component(g1) && at_most_two_rays_per_component(g2),
            seed,
        })
    }

    pub fn exhaustive_subsets(&self) -> bool {
        self.d1.m() <= EXHAUSTIVE_TAME_EDGES
    }

    pub fn cycles_exhaustive(&self) -> bool {
        self.cycles_exhaustive
    }

    pub fn cycles1(&self) -> &[FixedBitSet] {
        &self.cycles1
    }

    pub fn cycles2(&self) -> &[FixedBitSet] {
        &self.cycles2
    }

    pub fn is_cycle2(&self, mask: &FixedBitSet) -> bool {
        if self.cycles_exhaustive {
            self.set2.contains(mask)
        } else {
            is_cycle(self.d2.n(), &self.d2.ends, mask)
        }
    }

    pub fn is_cycle1(&self, mask: &FixedBitSet) -> bool {
        if self.cycles_exhaustive {
            self.set1.contains(mask)
        } else {
            is_cycle(self.d1.n(), &self.d1.ends, mask)
        }
    }

    fn tables(&self) -> &Tables {
        self.tables.get_or_init(|| Tables {
            tame1: tame_table(&self.d1),
            tame2: tame_table(&self.d2),
            rank1: self.o1.rank_table(),
            rank2: self.o2.rank_table(),
        })
    }

    fn families(&self) -> &(Vec<FixedBitSet>, Vec<FixedBitSet>) {
        self.families.get_or_init(|| {
            (
                structured_family(&self.d1, self.seed),
                structured_family(&self.d2, self.seed),
            )
        })
    }

    fn map_mask(p: &[usize], mask: &FixedBitSet, m: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(m);
        for e in mask.ones() {
            out.insert(p[e]);
        }
        out
    }

    fn witness(&self, direction: Direction, mask: &FixedBitSet) -> Witness {
        let d = match direction {
            Direction::Forward => &self.d1,
            Direction::Backward => &self.d2,
        };
        Witness {
            direction,
            edges: d.edge_set(mask),
        }
    }

    /// Cycle preservation of the index map `p` in both directions.
    pub fn cycles(&self, p: &[usize]) -> Option<Witness> {
        let m = self.d1.m();
        for c in &self.cycles1 {
            if !self.is_cycle2(&Self::map_mask(p, c, m)) {
                return Some(self.witness(Direction::Forward, c));
            }
        }
        let inv = invert(p);
        for c in &self.cycles2 {
            if !self.is_cycle1(&Self::map_mask(&inv, c, m)) {
                return Some(self.witness(Direction::Backward, c));
            }
        }
        None
    }

    /// Tameness and rank comparison over the subset family.
    fn subsets(&self, p: &[usize]) -> (Option<Witness>, Option<Witness>, u64) {
        let m = self.d1.m();
        let mut tame_w = None;
        let mut rank_w = None;
        if self.exhaustive_subsets() {
            let t = self.tables();
            let size = 1usize << m;
            let mut img = vec![0u32; size];
            for x in 1..size {
                let low = x & x.wrapping_neg();
                img[x] = img[x ^ low] | (1u32 << p[low.trailing_zeros() as usize]);
            }
            let full = size - 1;
            let order = std::iter::once(full).chain(0..full);
            for x in order {
                let y = img[x] as usize;
                if tame_w.is_none() && t.tame1[x] != t.tame2[y] {
                    tame_w = Some(if t.tame1[x] {
                        self.witness(Direction::Forward, &mask_of(x as u64, m))
                    } else {
                        self.witness(Direction::Backward, &mask_of(y as u64, m))
                    });
                }
                if rank_w.is_none() && t.rank1[x] != t.rank2[y] {
                    rank_w = Some(self.witness(Direction::Forward, &mask_of(x as u64, m)));
                }
                if tame_w.is_some() && rank_w.is_some() {
                    break;
                }
            }
            return (tame_w, rank_w, size as u64);
        }
        let (fam1, fam2) = self.families();
        let inv = invert(p);
        for s in fam1 {
            let t = Self::map_mask(p, s, m);
            if tame_w.is_none() && is_tame_mask(&self.d1, s) && !is_tame_mask(&self.d2, &t) {
                tame_w = Some(self.witness(Direction::Forward, s));
            }
            if rank_w.is_none() && self.o1.rank_mask(s) != self.o2.rank_mask(&t) {
                rank_w = Some(self.witness(Direction::Forward, s));
            }
        }
        for s in fam2 {
            let t = Self::map_mask(&inv, s, m);
            if tame_w.is_none() && is_tame_mask(&self.d2, s) && !is_tame_mask(&self.d1, &t) {
                tame_w = Some(self.witness(Direction::Backward, s));
            }
            if rank_w.is_none() && self.o2.rank_mask(s) != self.o1.rank_mask(&t) {
                rank_w = Some(self.witness(Direction::Backward, s));
            }
        }
        (tame_w, rank_w, (fam1.len() + fam2.len()) as u64)
    }

    /// Full report for the index map `p`.
    pub fn report(&self, p: &[usize]) -> Result<WeakIsoReport> {
        let cycle_witness = self.cycles(p);
        let (tameness_witness, rank_witness, subsets_checked) = self.subsets(p);
        let exhaustive = self.exhaustive_subsets() && self.cycles_exhaustive;
        let report = WeakIsoReport {
            cycle_preserving: cycle_witness.is_none(),
            tameness_preserving: tameness_witness.is_none(),
            rank_preserving: rank_witness.is_none(),
            verdict: cycle_witness.is_none() && tameness_witness.is_none(),
            cycle_witness,
            tameness_witness,
            rank_witness,
            cycles_exhaustive: self.cycles_exhaustive,
            subsets: if self.exhaustive_subsets() {
                SubsetCoverage::Exhaustive
            } else {
                SubsetCoverage::Structured
            },
            subsets_checked,
            rank_equivalence_asserted: exhaustive && self.finite_like,
        };
        if report.rank_equivalence_asserted && report.rank_preserving != report.verdict {
            return Err(Error::theorem(format!(
                "rank preservation ({}) disagrees with the weak isomorphism verdict ({})",
                report.rank_preserving, report.verdict
            )));
        }
        Ok(report)
    }

    /// Verdict only, skipping the rank cross-check.
    pub fn accepts(&self, p: &[usize]) -> bool {
        if self.cycles(p).is_some() {
            return false;
        }
        if self.d1.rays.iter().sum::<usize>() <= 2 && self.d2.rays.iter().sum::<usize>() <= 2 {
            return true;
        }
        let m = self.d1.m();
        if self.exhaustive_subsets() {
            let t = self.tables();
            let size = 1usize << m;
            let mut img = vec![0u32; size];
            for x in 1..size {
                let low = x & x.wrapping_neg();
                img[x] = img[x ^ low] | (1u32 << p[low.trailing_zeros() as usize]);
            }
            return (0..size).all(|x| t.tame1[x] == t.tame2[img[x] as usize]);
        }
        let (fam1, fam2) = self.families();
        let inv = invert(p);
        fam1.iter()
            .all(|s| !is_tame_mask(&self.d1, s) || is_tame_mask(&self.d2, &Self::map_mask(p, s, m)))
            && fam2.iter().all(|s| {
                !is_tame_mask(&self.d2, s) || is_tame_mask(&self.d1, &Self::map_mask(&inv, s, m))
            })
    }
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

fn mask_of(bits: u64, m: usize) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(m);
    for i in 0..m {
        if bits >> i & 1 == 1 {
            s.insert(i);
        }
    }
    s
}

/// Cycle preservation in both directions; the witness is a cycle whose image
/// is not a cycle.
pub fn check_cycle_preserving(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<Option<Witness>> {
    let c = Checker::new(g1, g2)?;
    let p = phi.indices(&c.d1, &c.d2)?;
    Ok(c.cycles(&p))
}

/// Tameness preservation in both directions over the subset family.
pub fn check_tameness_preserving(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<(Option<Witness>, SubsetCoverage)> {
    let r = check_weak_isomorphism(g1, g2, phi)?;
    Ok((r.tameness_witness, r.subsets))
}

pub fn check_weak_isomorphism(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<WeakIsoReport> {
    let c = Checker::new(g1, g2)?;
    let p = phi.indices(&c.d1, &c.d2)?;
    c.report(&p)
}

/// Image of a wedge: the two image edges and their shared endpoint, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WedgeImage {
    pub is_wedge: bool,
    pub left: EdgeId,
    pub right: EdgeId,
    pub center: Option<VertexId>,
}

pub fn wedge_image(g2: &RayedGraph, phi: &EdgeBijection, w: &Wedge) -> Result<WedgeImage> {
    let img = |e: &EdgeId| {
        phi.get(e)
            .cloned()
            .ok_or_else(|| Error::input(format!("edge {e} has no image")))
    };
    let (left, right) = (img(&w.left)?, img(&w.right)?);
    let ends = |e: &EdgeId| {
        g2.endpoints(e)
            .map(|(a, b)| [a.clone(), b.clone()])
            .ok_or_else(|| Error::input(format!("unknown target edge {e}")))
    };
    let (l, r) = (ends(&left)?, ends(&right)?);
    let center = l.iter().find(|x| r.contains(x)).cloned();
    Ok(WedgeImage {
        is_wedge: center.is_some(),
        left,
        right,
        center,
    })
}

/// Result of recovering a vertex map from an edge bijection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum Extraction {
    Isomorphism {
        vertex_map: VertexMap,
    },
    Failure {
        vertex: VertexId,
        wedge: Option<Wedge>,
        reason: String,
    },
}

/// Recovers the vertex map by intersecting the endpoint sets of the images
/// of each star.
pub fn extract_induced_isomorphism(
    g1: &RayedGraph,
    g2: &RayedGraph,
    phi: &EdgeBijection,
) -> Result<Extraction> {
    phi.validate(g1, g2)?;
    for v in g1.vertices() {
        if g1.core.degree(v) + g1.rays_at(v) < 2 {
            return Err(Error::precondition(format!("vertex {v} is a leaf")));
        }
    }
    for w in crate::graph::wedges(&g1.core) {
        if !wedge_image(g2, phi, &w)?.is_wedge {
            return Ok(Extraction::Failure {
                vertex: w.center.clone(),
                reason: "the star of this vertex does not map to a star".into(),
                wedge: Some(w),
            });
        }
    }
    for v in g1.vertices() {
        let mut common: Option<Vec<VertexId>> = None;
        for e in g1.core.incident(v) {
            let (a, b) = g2.endpoints(&phi.map[&e]).expect("validated");
            let here = [a.clone(), b.clone()];
            common = Some(match common {
                None => here.to_vec(),
                Some(c) => c.into_iter().filter(|x| here.contains(x)).collect(),
            });
        }
        if common.is_some_and(|c| c.is_empty()) {
            return Ok(Extraction::Failure {
                vertex: v.clone(),
                wedge: None,
                reason: "the images of the star share no endpoint".into(),
            });
        }
    }
    match induced_vertex_map(g1, g2, &phi.map) {
        Some(vertex_map) => Ok(Extraction::Isomorphism { vertex_map }),
        None => Ok(Extraction::Failure {
            vertex: g1
                .vertices()
                .iter()
                .next()
                .cloned()
                .unwrap_or_else(|| VertexId::new("")),
            wedge: None,
            reason: "star images do not assemble into a graph isomorphism".into(),
        }),
    }
}
