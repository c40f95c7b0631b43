//! Cycle-matroid rank oracle for rayed graphs.
//!
//! A component with at most two rays is ranked like a finite graph. In a
//! component with three or more rays all ray-bearing vertices are wired
//! together into a single point, so a path between two of them closes a cycle
//! through infinity. The rank is the graphic rank of the resulting quotient.

mod minor;

use std::num::NonZeroUsize;
use std::sync::Mutex;

use fixedbitset::FixedBitSet;
use lru::LruCache;
use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::cycles::{simple_cycles, CYCLE_CAP};
use crate::graph::{Dense, EdgeSet, RayedGraph, VertexSet};

pub use minor::{minor, Minor};

const MEMO_CAPACITY: usize = 1_000_000;

/// Edge counts up to which `verify_rank_axioms` checks every subset pair.
pub const EXHAUSTIVE_AXIOM_EDGES: usize = 14;
/// Sampled pairs beyond the exhaustive threshold.
pub const SAMPLED_AXIOM_PAIRS: usize = 10_000;

pub struct RankOracle {
    graph: RayedGraph,
    dense: Dense,
    wired: Vec<bool>,
    /// Created on first use; the cache preallocates its full capacity.
    memo: Mutex<Option<LruCache<FixedBitSet, usize>>>,
}

impl std::fmt::Debug for RankOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RankOracle")
            .field("graph", &self.graph)
            .field("wired", &self.wired)
            .finish()
    }
}

/// Vertices whose component carries at least three rays and which carry a ray.
pub fn default_wiring(g: &RayedGraph) -> VertexSet {
    let d = Dense::new(g);
    let (label, count) = crate::graph::connect::component_labels(&d, |_| true);
    let mut rays = vec![0; count];
    for v in 0..d.n() {
        rays[label[v]] += d.rays[v];
    }
    (0..d.n())
        .filter(|&v| d.rays[v] > 0 && rays[label[v]] >= 3)
        .map(|v| d.vids[v].clone())
        .collect()
}

impl RankOracle {
    pub fn new(g: &RayedGraph) -> RankOracle {
        let wired = default_wiring(g);
        Self::build(g, &wired)
    }

    /// Oracle with an explicit set of wired vertices.
    pub fn with_wiring(g: &RayedGraph, wired: &VertexSet) -> Result<RankOracle> {
        if let Some(v) = wired.iter().find(|v| !g.core.has_vertex(v)) {
            return Err(Error::input(format!("unknown vertex {v}")));
        }
        Ok(Self::build(g, wired))
    }

    fn build(g: &RayedGraph, wired: &VertexSet) -> RankOracle {
        let dense = Dense::new(g);
        let wired = dense.vids.iter().map(|v| wired.contains(v)).collect();
        RankOracle {
            graph: g.clone(),
            dense,
            wired,
            memo: Mutex::new(None),
        }
    }

    pub fn graph(&self) -> &RayedGraph {
        &self.graph
    }

    pub fn dense(&self) -> &Dense {
        &self.dense
    }

    pub fn wired(&self) -> VertexSet {
        (0..self.dense.n())
            .filter(|&v| self.wired[v])
            .map(|v| self.dense.vids[v].clone())
            .collect()
    }

    /// Edge endpoints in the wired quotient; wired vertices become vertex `n`.
    pub fn quotient_ends(&self) -> Vec<(usize, usize)> {
        let n = self.dense.n();
        let f = |v: usize| if self.wired[v] { n } else { v };
        self.dense.ends.iter().map(|&(a, b)| (f(a), f(b))).collect()
    }

    pub fn rank(&self, f: &EdgeSet) -> Result<usize> {
        let mask = self.dense.mask(f)?;
        Ok(self.rank_mask(&mask))
    }

    /// Memoized rank of an edge mask.
    pub fn rank_mask(&self, mask: &FixedBitSet) -> usize {
        let mut memo = self.memo.lock().expect("memo lock");
        let memo =
            memo.get_or_insert_with(|| LruCache::new(NonZeroUsize::new(MEMO_CAPACITY).unwrap()));
        if let Some(&r) = memo.get(mask) {
            return r;
        }
        let r = self.compute(mask.ones());
        memo.put(mask.clone(), r);
        r
    }

    /// Rank of a subset given as bits (edge i = bit i), bypassing the memo.
    pub fn rank_bits(&self, bits: u64) -> usize {
        self.compute((0..self.dense.m()).filter(|i| bits >> i & 1 == 1))
    }

    fn compute(&self, edges: impl Iterator<Item = usize>) -> usize {
        let n = self.dense.n();
        let mut uf = UnionFind::<usize>::new(n + 1);
        let node = |v: usize| if self.wired[v] { n } else { v };
        edges
            .filter(|&e| {
                let (a, b) = self.dense.ends[e];
                uf.union(node(a), node(b))
            })
            .count()
    }

    /// Ranks of all `2^m` subsets, indexed by bit pattern.
    pub fn rank_table(&self) -> Vec<u8> {
        let m = self.dense.m();
        assert!(m <= 24, "rank table limited to 24 edges");
        (0..1u64 << m)
            .map(|bits| self.rank_bits(bits) as u8)
            .collect()
    }
}

/// Findings of an axiom check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub pairs_checked: u64,
    pub exhaustive: bool,
    pub violation_count: u64,
    /// First violations found, at most 20.
    pub violations: Vec<String>,
}

impl AxiomReport {
    fn record(&mut self, msg: impl FnOnce() -> String) {
        self.violation_count += 1;
        if self.violations.len() < 20 {
            self.violations.push(msg());
        }
    }

    pub fn ok(&self) -> bool {
        self.violation_count == 0
    }
}

pub fn verify_rank_axioms(o: &RankOracle) -> AxiomReport {
    verify_rank_axioms_with(o, EXHAUSTIVE_AXIOM_EDGES, SAMPLED_AXIOM_PAIRS, 0)
}

/// Checks the cardinality bound, monotonicity and submodularity over every
/// subset pair when `m <= threshold`, otherwise over `samples` seeded pairs.
pub fn verify_rank_axioms_with(
    o: &RankOracle,
    threshold: usize,
    samples: usize,
    seed: u64,
) -> AxiomReport {
    let m = o.dense.m();
    let mut report = AxiomReport::default();
    if m <= threshold.min(24) {
        report.exhaustive = true;
        let table = o.rank_table();
        let size = table.len();
        if table[0] != 0 {
            report.record(|| format!("rank of the empty set is {}", table[0]));
        }
        for x in 0..size {
            let rx = table[x];
            if u32::from(rx) > (x as u64).count_ones() {
                report.record(|| format!("rank {rx} exceeds size of subset {x:#b}"));
            }
            for y in 0..size {
                let ry = table[y];
                if x & y == x && rx > ry {
                    report.record(|| format!("monotonicity fails for {x:#b} within {y:#b}"));
                }
                if u16::from(rx) + u16::from(ry) < u16::from(table[x & y]) + u16::from(table[x | y])
                {
                    report.record(|| format!("submodularity fails for {x:#b}, {y:#b}"));
                }
            }
        }
        report.pairs_checked = (size as u64) * (size as u64);
        return report;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = random_subset(&o.dense, &mut rng);
        let y = random_subset(&o.dense, &mut rng);
        let (rx, ry) = (o.rank_mask(&x), o.rank_mask(&y));
        let mut both = x.clone();
        both.intersect_with(&y);
        let mut either = x.clone();
        either.union_with(&y);
        let (ri, ru) = (o.rank_mask(&both), o.rank_mask(&either));
        if rx > x.count_ones(..) || ry > y.count_ones(..) {
            report.record(|| "cardinality bound fails on a sampled subset".to_string());
        }
        if ri > rx.min(ry) || ru < rx.max(ry) {
            report.record(|| "monotonicity fails on a sampled pair".to_string());
        }
        if rx + ry < ri + ru {
            report.record(|| "submodularity fails on a sampled pair".to_string());
        }
    }
    report.pairs_checked = samples as u64;
    report
}

pub fn is_independent(o: &RankOracle, f: &EdgeSet) -> Result<bool> {
    Ok(o.rank(f)? == f.len())
}

/// All circuits, ordered by size and then by sorted ids. They are the simple
/// cycles of the wired quotient.
pub fn circuits(o: &RankOracle) -> Vec<EdgeSet> {
    let cycles = simple_cycles(o.dense.n() + 1, &o.quotient_ends(), CYCLE_CAP);
    let mut out: Vec<EdgeSet> = cycles.cycles.iter().map(|c| o.dense.edge_set(c)).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Edges `e` of `f` with `rank(E) = rank(E - e)`.
pub fn disposable_edges(o: &RankOracle, f: &EdgeSet) -> Result<EdgeSet> {
    let mask = o.dense.mask(f)?;
    let full = o.dense.full_mask();
    let total = o.rank_mask(&full);
    Ok(mask
        .ones()
        .filter(|&e| {
            let mut rest = full.clone();
            rest.set(e, false);
            o.rank_mask(&rest) == total
        })
        .map(|e| o.dense.eids[e].clone())
        .collect())
}

/// Every single edge of `f` is disposable.
pub fn is_superfluous_analog(o: &RankOracle, f: &EdgeSet) -> Result<bool> {
    Ok(disposable_edges(o, f)?.len() == f.len())
}

/// Seeded uniform subset of the edges, used by sampling checks.
pub fn random_subset(d: &Dense, rng: &mut impl Rng) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(d.m());
    for i in 0..d.m() {
        if rng.gen_bool(0.5) {
            s.insert(i);
        }
    }
    s
}
