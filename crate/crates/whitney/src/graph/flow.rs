//! Vertex-capacitated max flow for Menger-style disjoint path searches.

use std::collections::VecDeque;

/// Sentinel capacity for vertices that may be shared by every path.
pub const UNLIMITED: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Arc {
    to: usize,
    cap: u32,
    rev: usize,
    edge: Option<usize>,
}

struct Network {
    arcs: Vec<Vec<Arc>>,
}

impl Network {
    fn add(&mut self, from: usize, to: usize, cap: u32, edge: Option<usize>) {
        let (rf, rt) = (self.arcs[to].len(), self.arcs[from].len());
        self.arcs[from].push(Arc {
            to,
            cap,
            rev: rf,
            edge,
        });
        self.arcs[to].push(Arc {
            to: from,
            cap: 0,
            rev: rt,
            edge: None,
        });
    }

    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; self.arcs.len()];
        let mut seen = vec![false; self.arcs.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for (i, a) in self.arcs[v].iter().enumerate() {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    prev[a.to] = Some((v, i));
                    queue.push_back(a.to);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut cur = t;
        while let Some((v, i)) = prev[cur] {
            let rev = self.arcs[v][i].rev;
            if self.arcs[v][i].cap != UNLIMITED {
                self.arcs[v][i].cap -= 1;
            }
            if self.arcs[cur][rev].cap != UNLIMITED {
                self.arcs[cur][rev].cap += 1;
            }
            cur = v;
        }
        true
    }
}

/// Paths from `sources` to `sinks` using the allowed edges, where vertex `v`
/// lies on at most `vcap[v]` paths and each edge is used at most once. At
/// most `limit` paths are returned, each as a list of edge indices in order.
pub fn disjoint_paths(
    n: usize,
    ends: &[(usize, usize)],
    allowed: impl Fn(usize) -> bool,
    vcap: &[u32],
    sources: &[usize],
    sinks: &[usize],
    limit: usize,
) -> Vec<Vec<usize>> {
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = Network {
        arcs: vec![Vec::new(); 2 * n + 2],
    };
    for v in 0..n {
        if vcap[v] > 0 {
            net.add(2 * v, 2 * v + 1, vcap[v], None);
        }
    }
    for (e, &(a, b)) in ends.iter().enumerate() {
        if a != b && allowed(e) {
            net.add(2 * a + 1, 2 * b, 1, Some(e));
            net.add(2 * b + 1, 2 * a, 1, Some(e));
        }
    }
    for &v in sources {
        net.add(s, 2 * v, UNLIMITED, None);
    }
    for &v in sinks {
        net.add(2 * v + 1, t, UNLIMITED, None);
    }
    let mut flow = 0;
    while flow < limit && net.augment(s, t) {
        flow += 1;
    }
    // Flow on each arc is the residual capacity of its reverse arc.
    let mut used: Vec<Vec<u32>> = net
        .arcs
        .iter()
        .map(|list| {
            list.iter()
                .map(|a| {
                    if a.edge.is_some() {
                        net.arcs[a.to][a.rev].cap
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect();
    let mut paths = Vec::new();
    for _ in 0..flow {
        let mut path = Vec::new();
        let Some(&first) = sources
            .iter()
            .find(|&&v| (0..n).contains(&v) && has_exit(&net, &used, 2 * v + 1, t))
        else {
            break;
        };
        let mut v = first;
        let mut guard = 0;
        while !sinks.contains(&v) || (path.is_empty() && !sources.contains(&v)) {
            let out = 2 * v + 1;
            let Some(i) = (0..net.arcs[out].len()).find(|&i| used[out][i] > 0) else {
                break;
            };
            used[out][i] -= 1;
            path.push(net.arcs[out][i].edge.expect("edge arc"));
            v = net.arcs[out][i].to / 2;
            guard += 1;
            if guard > ends.len() {
                break;
            }
        }
        paths.push(path);
    }
    paths
}

fn has_exit(net: &Network, used: &[Vec<u32>], out: usize, t: usize) -> bool {
    used[out].iter().any(|&u| u > 0) || net.arcs[out].iter().any(|a| a.to == t)
}
