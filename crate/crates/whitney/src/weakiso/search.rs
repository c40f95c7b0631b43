use std::collections::{BTreeMap, HashSet, VecDeque};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::tame::{minimal_wild_sets, CONNECTED_SUBSET_SIZE};
use super::{Checker, EdgeBijection};
use crate::error::Result;
use crate::graph::{Dense, RayedGraph};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Cycle,
    Wild,
}

/// Sets that must map onto sets of the same kind under any weak isomorphism:
/// simple cycles, and minimal non-tame sets (which keep their size).
struct Witnesses {
    sets: Vec<(FixedBitSet, Kind)>,
    containing: Vec<Vec<usize>>,
    cycles: HashSet<FixedBitSet>,
    wild: HashSet<FixedBitSet>,
    signature: Vec<Vec<(u8, usize, usize)>>,
}

impl Witnesses {
    fn new(d: &Dense, cycles: &[FixedBitSet]) -> Witnesses {
        let wild = minimal_wild_sets(d, CONNECTED_SUBSET_SIZE);
        let mut sets: Vec<(FixedBitSet, Kind)> =
            cycles.iter().map(|c| (c.clone(), Kind::Cycle)).collect();
        sets.extend(wild.iter().map(|w| (w.clone(), Kind::Wild)));
        let mut containing = vec![Vec::new(); d.m()];
        let mut hist: Vec<BTreeMap<(u8, usize), usize>> = vec![BTreeMap::new(); d.m()];
        for (i, (s, kind)) in sets.iter().enumerate() {
            let size = s.count_ones(..);
            for e in s.ones() {
                containing[e].push(i);
                *hist[e].entry((*kind as u8, size)).or_default() += 1;
            }
        }
        let signature = (0..d.m())
            .map(|e| {
                let (a, b) = d.ends[e];
                let mut sig = vec![(2, usize::from(a == b), 0)];
                sig.extend(hist[e].iter().map(|(&(k, s), &c)| (k, s, c)));
                sig
            })
            .collect();
        Witnesses {
            cycles: cycles.iter().cloned().collect(),
            wild: wild.into_iter().collect(),
            sets,
            containing,
            signature,
        }
    }

    fn holds(
        &self,
        kind: Kind,
        mask: &FixedBitSet,
        checker_cycle: impl Fn(&FixedBitSet) -> bool,
    ) -> bool {
        match kind {
            Kind::Cycle => self.cycles.contains(mask) || checker_cycle(mask),
            Kind::Wild => self.wild.contains(mask),
        }
    }
}

/// All weak isomorphisms from `g1` to `g2` (at most `limit` per top-level
/// branch when `limit > 0`), sorted. Backtracking assigns edges in
/// breadth-first order and prunes with invariants every weak isomorphism
/// respects; each complete assignment is verified in full.
pub fn search_weak_isomorphisms(
    g1: &RayedGraph,
    g2: &RayedGraph,
    limit: usize,
) -> Result<Vec<EdgeBijection>> {
    let checker = Checker::new(g1, g2)?;
    let (d1, d2) = (&checker.d1, &checker.d2);
    let m = d1.m();
    if m == 0 {
        return Ok(if d1.n() == d2.n() {
            vec![EdgeBijection::default()]
        } else {
            Vec::new()
        });
    }
    let exact = checker.cycles_exhaustive();
    let w1 = Witnesses::new(d1, if exact { checker.cycles1() } else { &[] });
    let w2 = Witnesses::new(d2, if exact { checker.cycles2() } else { &[] });
    let order = edge_order(d1);
    let candidates: Vec<Vec<usize>> = (0..m)
        .map(|e| {
            (0..m)
                .filter(|&f| w1.signature[e] == w2.signature[f])
                .collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(Vec::new());
    }
    let ctx = Ctx {
        checker: &checker,
        w1: &w1,
        w2: &w2,
        order: &order,
        candidates: &candidates,
        limit,
    };
    let first = order[0];
    let mut out: Vec<EdgeBijection> = candidates[first]
        .par_iter()
        .flat_map_iter(|&f| {
            let mut st = State::new(&ctx, m);
            let mut found = Vec::new();
            if st.assign(&ctx, first, f) {
                st.dfs(&ctx, 1, &mut found);
            }
            found
        })
        .map(|p| EdgeBijection::from_indices(d1, d2, &p))
        .collect();
    out.sort();
    if limit > 0 {
        out.truncate(limit);
    }
    Ok(out)
}

fn edge_order(d: &Dense) -> Vec<usize> {
    let mut order = Vec::with_capacity(d.m());
    let mut seen = vec![false; d.m()];
    for s in 0..d.m() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(e) = queue.pop_front() {
            order.push(e);
            let (a, b) = d.ends[e];
            for v in [a, b] {
                for &f in &d.inc[v] {
                    if !seen[f] {
                        seen[f] = true;
                        queue.push_back(f);
                    }
                }
            }
        }
    }
    order
}

struct Ctx<'a> {
    checker: &'a Checker,
    w1: &'a Witnesses,
    w2: &'a Witnesses,
    order: &'a [usize],
    candidates: &'a [Vec<usize>],
    limit: usize,
}

struct State {
    p: Vec<usize>,
    pinv: Vec<usize>,
    count1: Vec<usize>,
    count2: Vec<usize>,
}

impl State {
    fn new(ctx: &Ctx, m: usize) -> State {
        State {
            p: vec![usize::MAX; m],
            pinv: vec![usize::MAX; m],
            count1: vec![0; ctx.w1.sets.len()],
            count2: vec![0; ctx.w2.sets.len()],
        }
    }

    /// Assigns `e -> f`; returns false (with the assignment undone) when a
    /// completed witness set maps to a set of the wrong kind.
    fn assign(&mut self, ctx: &Ctx, e: usize, f: usize) -> bool {
        self.p[e] = f;
        self.pinv[f] = e;
        let m = self.p.len();
        let mut ok = true;
        for &w in &ctx.w1.containing[e] {
            self.count1[w] += 1;
            let (set, kind) = &ctx.w1.sets[w];
            if ok && self.count1[w] == set.count_ones(..) {
                let mut img = FixedBitSet::with_capacity(m);
                for x in set.ones() {
                    img.insert(self.p[x]);
                }
                ok = ctx.w2.holds(*kind, &img, |s| ctx.checker.is_cycle2(s));
            }
        }
        for &w in &ctx.w2.containing[f] {
            self.count2[w] += 1;
            let (set, kind) = &ctx.w2.sets[w];
            if ok && self.count2[w] == set.count_ones(..) {
                let mut pre = FixedBitSet::with_capacity(m);
                for x in set.ones() {
                    pre.insert(self.pinv[x]);
                }
                ok = ctx.w1.holds(*kind, &pre, |s| ctx.checker.is_cycle1(s));
            }
        }
        if !ok {
            self.unassign(ctx, e, f);
        }
        ok
    }

    fn unassign(&mut self, ctx: &Ctx, e: usize, f: usize) {
        for &w in &ctx.w1.containing[e] {
            self.count1[w] -= 1;
        }
        for &w in &ctx.w2.containing[f] {
            self.count2[w] -= 1;
        }
        self.p[e] = usize::MAX;
        self.pinv[f] = usize::MAX;
    }

    fn dfs(&mut self, ctx: &Ctx, k: usize, found: &mut Vec<Vec<usize>>) {
        if ctx.limit > 0 && found.len() >= ctx.limit {
            return;
        }
        if k == ctx.order.len() {
            if ctx.checker.accepts(&self.p) {
                found.push(self.p.clone());
            }
            return;
        }
        let e = ctx.order[k];
        for &f in &ctx.candidates[e] {
            if self.pinv[f] != usize::MAX {
                continue;
            }
            if self.assign(ctx, e, f) {
                self.dfs(ctx, k + 1, found);
                self.unassign(ctx, e, f);
            }
        }
    }
}
