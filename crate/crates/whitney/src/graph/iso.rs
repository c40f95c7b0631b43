//! Graph isomorphisms of rayed multigraphs. Rays are unlabeled here: an
//! isomorphism only has to preserve the number of rays at each vertex.

use std::collections::{BTreeMap, VecDeque};

use itertools::Itertools;

use super::{Dense, EdgeId, RayedGraph, VertexId};

pub type VertexMap = BTreeMap<VertexId, VertexId>;
pub type EdgeMap = BTreeMap<EdgeId, EdgeId>;

/// Finds a vertex bijection `psi` with `emap(e) = psi(e)` for every edge,
/// preserving ray counts. Returns `None` when `emap` is not induced by an
/// isomorphism.
pub fn induced_vertex_map(g1: &RayedGraph, g2: &RayedGraph, emap: &EdgeMap) -> Option<VertexMap> {
    let (d1, d2) = (Dense::new(g1), Dense::new(g2));
    if d1.n() != d2.n() || d1.m() != d2.m() || emap.len() != d1.m() {
        return None;
    }
    let mut p = Vec::with_capacity(d1.m());
    let mut hit = vec![false; d2.m()];
    for e in &d1.eids {
        let j = d2.edge_index(emap.get(e)?)?;
        if std::mem::replace(&mut hit[j], true) {
            return None;
        }
        p.push(j);
    }
    let mut psi = vec![usize::MAX; d1.n()];
    let mut used = vec![false; d2.n()];
    let mut roots = Vec::new();
    let mut seen = vec![false; d1.n()];
    for v in 0..d1.n() {
        if d1.inc[v].is_empty() || seen[v] {
            continue;
        }
        roots.push(v);
        let mut queue = VecDeque::from([v]);
        seen[v] = true;
        while let Some(x) = queue.pop_front() {
            for &e in &d1.inc[x] {
                let w = d1.other(e, x);
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    if !assign_components(&d1, &d2, &p, &roots, &mut psi, &mut used) {
        return None;
    }
    // Isolated vertices pair up by ray count.
    let mut free2: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for w in 0..d2.n() {
        if !used[w] && d2.inc[w].is_empty() {
            free2.entry(d2.rays[w]).or_default().push(w);
        }
    }
    for v in 0..d1.n() {
        if psi[v] == usize::MAX {
            let w = free2.get_mut(&d1.rays[v])?.pop()?;
            psi[v] = w;
            used[w] = true;
        }
    }
    if used.iter().any(|u| !u) {
        return None;
    }
    Some(
        (0..d1.n())
            .map(|v| (d1.vids[v].clone(), d2.vids[psi[v]].clone()))
            .collect(),
    )
}

fn assign_components(
    d1: &Dense,
    d2: &Dense,
    p: &[usize],
    roots: &[usize],
    psi: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    let Some((&root, rest)) = roots.split_first() else {
        return true;
    };
    let mut cands: Option<Vec<usize>> = None;
    for &e in &d1.inc[root] {
        let (a, b) = d2.ends[p[e]];
        let here = vec![a, b];
        cands = Some(match cands {
            None => here.into_iter().unique().collect(),
            Some(c) => c.into_iter().filter(|x| here.contains(x)).collect(),
        });
    }
    for c in cands.unwrap_or_default() {
        let (saved_psi, saved_used) = (psi.clone(), used.clone());
        if propagate(d1, d2, p, root, c, psi, used) && assign_components(d1, d2, p, rest, psi, used)
        {
            return true;
        }
        *psi = saved_psi;
        *used = saved_used;
    }
    false
}

fn propagate(
    d1: &Dense,
    d2: &Dense,
    p: &[usize],
    root: usize,
    image: usize,
    psi: &mut [usize],
    used: &mut [bool],
) -> bool {
    let place = |v: usize, w: usize, psi: &mut [usize], used: &mut [bool]| {
        if used[w] || d1.rays[v] != d2.rays[w] || d1.inc[v].len() != d2.inc[w].len() {
            return false;
        }
        psi[v] = w;
        used[w] = true;
        true
    };
    if !place(root, image, psi, used) {
        return false;
    }
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &e in &d1.inc[v] {
            let (a, b) = d2.ends[p[e]];
            let w = d1.other(e, v);
            let loop1 = w == v;
            if loop1 != (a == b) {
                return false;
            }
            let target = if a == psi[v] {
                b
            } else if b == psi[v] {
                a
            } else {
                return false;
            };
            if psi[w] == usize::MAX {
                if !place(w, target, psi, used) {
                    return false;
                }
                queue.push_back(w);
            } else if psi[w] != target {
                return false;
            }
        }
    }
    true
}

/// Vertex isomorphisms from `g1` to `g2` preserving edge multiplicities,
/// loops and ray counts; at most `limit` results, all when `limit` is 0.
pub fn vertex_isomorphisms(g1: &RayedGraph, g2: &RayedGraph, limit: usize) -> Vec<VertexMap> {
    let (d1, d2) = (Dense::new(g1), Dense::new(g2));
    if d1.n() != d2.n() || d1.m() != d2.m() || g1.ray_count() != g2.ray_count() {
        return Vec::new();
    }
    let (m1, m2) = (multiplicities(&d1), multiplicities(&d2));
    let deg = |d: &Dense, v: usize| d.inc[v].len();
    // Vertices in breadth-first order, each component started at a max-degree vertex.
    let mut order = Vec::with_capacity(d1.n());
    let mut parent = vec![None; d1.n()];
    let mut seen = vec![false; d1.n()];
    let mut starts: Vec<usize> = (0..d1.n()).collect();
    starts.sort_by_key(|&v| (std::cmp::Reverse(deg(&d1, v)), v));
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in &d1.inc[v] {
                let w = d1.other(e, v);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
    }
    let mut state = IsoSearch {
        d1: &d1,
        d2: &d2,
        m1: &m1,
        m2: &m2,
        order: &order,
        parent: &parent,
        psi: vec![usize::MAX; d1.n()],
        used: vec![false; d2.n()],
        out: Vec::new(),
        limit,
    };
    state.search(0);
    state.out
}

fn multiplicities(d: &Dense) -> Vec<Vec<u32>> {
    let mut m = vec![vec![0; d.n()]; d.n()];
    for &(a, b) in &d.ends {
        m[a][b] += 1;
        if a != b {
            m[b][a] += 1;
        }
    }
    m
}

struct IsoSearch<'a> {
    d1: &'a Dense,
    d2: &'a Dense,
    m1: &'a [Vec<u32>],
    m2: &'a [Vec<u32>],
    order: &'a [usize],
    parent: &'a [Option<usize>],
    psi: Vec<usize>,
    used: Vec<bool>,
    out: Vec<VertexMap>,
    limit: usize,
}

impl IsoSearch<'_> {
    fn done(&self) -> bool {
        self.limit > 0 && self.out.len() >= self.limit
    }

    fn search(&mut self, k: usize) {
        if self.done() {
            return;
        }
        if k == self.order.len() {
            let map = (0..self.d1.n())
                .map(|v| (self.d1.vids[v].clone(), self.d2.vids[self.psi[v]].clone()))
                .collect();
            self.out.push(map);
            return;
        }
        let v = self.order[k];
        let pool: Vec<usize> = match self.parent[v] {
            Some(p) => {
                let pw = self.psi[p];
                (0..self.d2.n()).filter(|&w| self.m2[pw][w] > 0).collect()
            }
            None => (0..self.d2.n()).collect(),
        };
        for w in pool {
            if self.used[w] || !self.compatible(v, w, k) {
                continue;
            }
            self.psi[v] = w;
            self.used[w] = true;
            self.search(k + 1);
            self.used[w] = false;
            self.psi[v] = usize::MAX;
            if self.done() {
                return;
            }
        }
    }

    fn compatible(&self, v: usize, w: usize, k: usize) -> bool {
        let (d1, d2) = (self.d1, self.d2);
        if d1.inc[v].len() != d2.inc[w].len()
            || d1.rays[v] != d2.rays[w]
            || self.m1[v][v] != self.m2[w][w]
        {
            return false;
        }
        self.order[..k]
            .iter()
            .all(|&u| self.m1[v][u] == self.m2[w][self.psi[u]])
    }
}

/// Every edge bijection compatible with a vertex isomorphism; parallel edges
/// may be permuted freely within their class.
pub fn edge_maps_for(g1: &RayedGraph, g2: &RayedGraph, psi: &VertexMap) -> Vec<EdgeMap> {
    let key = |u: &VertexId, v: &VertexId| {
        if u <= v {
            (u.clone(), v.clone())
        } else {
            (v.clone(), u.clone())
        }
    };
    let mut classes2: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    for (e, u, v) in g2.core.edges() {
        classes2.entry(key(u, v)).or_default().push(e.clone());
    }
    let mut classes1: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    for (e, u, v) in g1.core.edges() {
        classes1
            .entry(key(&psi[u], &psi[v]))
            .or_default()
            .push(e.clone());
    }
    let mut choices: Vec<Vec<Vec<(EdgeId, EdgeId)>>> = Vec::new();
    for (k, src) in &classes1 {
        let Some(dst) = classes2.get(k) else {
            return Vec::new();
        };
        if dst.len() != src.len() {
            return Vec::new();
        }
        let perms = dst
            .iter()
            .permutations(dst.len())
            .map(|perm| src.iter().cloned().zip(perm.into_iter().cloned()).collect())
            .collect();
        choices.push(perms);
    }
    if choices.is_empty() {
        return vec![EdgeMap::new()];
    }
    choices
        .into_iter()
        .multi_cartesian_product()
        .map(|parts| parts.into_iter().flatten().collect())
        .collect()
}

/// Some isomorphism, as a vertex map and a compatible edge map.
pub fn find_isomorphism(g1: &RayedGraph, g2: &RayedGraph) -> Option<(VertexMap, EdgeMap)> {
    let psi = vertex_isomorphisms(g1, g2, 1).pop()?;
    let emap = edge_maps_for(g1, g2, &psi).into_iter().next()?;
    Some((psi, emap))
}

pub fn is_isomorphic(g1: &RayedGraph, g2: &RayedGraph) -> bool {
    !vertex_isomorphisms(g1, g2, 1).is_empty()
}
