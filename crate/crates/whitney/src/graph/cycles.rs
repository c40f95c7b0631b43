//! Simple cycle enumeration on indexed multigraphs.

use fixedbitset::FixedBitSet;

/// Default cap on the number of enumerated cycles.
pub const CYCLE_CAP: usize = 1_000_000;

/// Simple cycles as edge masks; `exhaustive` is false when the cap was hit.
#[derive(Clone, Debug)]
pub struct Cycles {
    pub cycles: Vec<FixedBitSet>,
    pub exhaustive: bool,
}

/// Enumerates simple cycles (loops are 1-cycles, parallel pairs 2-cycles).
/// Each cycle is found once, from its smallest edge index.
pub fn simple_cycles(n: usize, ends: &[(usize, usize)], cap: usize) -> Cycles {
    let m = ends.len();
    let mut inc = vec![Vec::new(); n];
    for (i, &(a, b)) in ends.iter().enumerate() {
        if a != b {
            inc[a].push(i);
            inc[b].push(i);
        }
    }
    let mut out = Vec::new();
    let mut on_path = vec![false; n];
    let mut path = FixedBitSet::with_capacity(m);
    for first in 0..m {
        if out.len() >= cap {
            return Cycles {
                cycles: out,
                exhaustive: false,
            };
        }
        let (u, v) = ends[first];
        path.clear();
        path.insert(first);
        if u == v {
            out.push(path.clone());
            continue;
        }
        on_path[u] = true;
        let complete = extend(
            u,
            v,
            first,
            ends,
            &inc,
            &mut on_path,
            &mut path,
            &mut out,
            cap,
        );
        on_path[u] = false;
        if !complete {
            return Cycles {
                cycles: out,
                exhaustive: false,
            };
        }
    }
    Cycles {
        cycles: out,
        exhaustive: true,
    }
}

#[allow(clippy::too_many_arguments)]
fn extend(
    at: usize,
    target: usize,
    first: usize,
    ends: &[(usize, usize)],
    inc: &[Vec<usize>],
    on_path: &mut [bool],
    path: &mut FixedBitSet,
    out: &mut Vec<FixedBitSet>,
    cap: usize,
) -> bool {
    for &e in &inc[at] {
        if e <= first {
            continue;
        }
        let (a, b) = ends[e];
        let w = if a == at { b } else { a };
        if w == target {
            path.insert(e);
            out.push(path.clone());
            path.set(e, false);
            if out.len() >= cap {
                return false;
            }
        } else if !on_path[w] {
            on_path[w] = true;
            path.insert(e);
            let ok = extend(w, target, first, ends, inc, on_path, path, out, cap);
            path.set(e, false);
            on_path[w] = false;
            if !ok {
                return false;
            }
        }
    }
    true
}

/// True iff the masked edges form exactly one simple cycle.
pub fn is_cycle(n: usize, ends: &[(usize, usize)], mask: &FixedBitSet) -> bool {
    let mut deg = vec![0u32; n];
    let mut first = None;
    for e in mask.ones() {
        let (a, b) = ends[e];
        deg[a] += 1;
        deg[b] += 1;
        first.get_or_insert(a);
    }
    let Some(start) = first else { return false };
    if deg.iter().any(|&d| d != 0 && d != 2) {
        return false;
    }
    let span = deg.iter().filter(|&&d| d == 2).count();
    // A 2-regular edge set is one cycle iff it is connected.
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut stack = vec![start];
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for e in mask.ones() {
            let (a, b) = ends[e];
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                stack.push(w);
            }
        }
    }
    reached == span
}

/// Edges of a spanning forest plus the fundamental cycle of every other edge.
pub fn fundamental_cycles(n: usize, ends: &[(usize, usize)]) -> Vec<FixedBitSet> {
    let m = ends.len();
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(n);
    let mut tree = vec![Vec::new(); n];
    let mut extra = Vec::new();
    for (i, &(a, b)) in ends.iter().enumerate() {
        if uf.union(a, b) {
            tree[a].push((b, i));
            tree[b].push((a, i));
        } else {
            extra.push(i);
        }
    }
    extra
        .into_iter()
        .map(|i| {
            let (a, b) = ends[i];
            let mut mask = FixedBitSet::with_capacity(m);
            mask.insert(i);
            if a != b {
                for e in tree_path(&tree, a, b) {
                    mask.insert(e);
                }
            }
            mask
        })
        .collect()
}

fn tree_path(tree: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![None; tree.len()];
    let mut seen = vec![false; tree.len()];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &(w, e) in &tree[v] {
            if !seen[w] {
                seen[w] = true;
                prev[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = to;
    while let Some((p, e)) = prev[cur] {
        out.push(e);
        cur = p;
    }
    out
}
