//! Curated graphs used by tests, the CLI and the checked-in `fixtures/` files.

use std::collections::BTreeMap;

use crate::graph::{EdgeId, Multigraph, RayedGraph};
use crate::weakiso::EdgeBijection;

fn build(edges: &[(&str, &str, &str)], rays: &[(&str, &str)]) -> RayedGraph {
    let mut core = Multigraph::new();
    for (id, u, v) in edges {
        core.add_edge_auto(*id, *u, *v).expect("fixture edge");
    }
    let mut g = RayedGraph::from(core);
    for (id, at) in rays {
        g.add_ray(*id, *at).expect("fixture ray");
    }
    g
}

fn owned(edges: &[(String, String, String)], rays: &[(String, String)]) -> RayedGraph {
    let e: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    let r: Vec<(&str, &str)> = rays.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    build(&e, &r)
}

fn complete(n: usize) -> RayedGraph {
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            edges.push((format!("e{i}{j}"), i.to_string(), j.to_string()));
        }
    }
    owned(&edges, &[])
}

pub fn triangle() -> RayedGraph {
    build(&[("a", "u", "v"), ("b", "v", "w"), ("c", "u", "w")], &[])
}

pub fn path3() -> RayedGraph {
    build(&[("a", "1", "2"), ("b", "2", "3")], &[])
}

pub fn cycle4() -> RayedGraph {
    build(
        &[
            ("a", "1", "2"),
            ("b", "2", "3"),
            ("c", "3", "4"),
            ("d", "4", "1"),
        ],
        &[],
    )
}

pub fn k4() -> RayedGraph {
    complete(4)
}

pub fn k5() -> RayedGraph {
    complete(5)
}

pub fn prism() -> RayedGraph {
    build(
        &[
            ("e12", "1", "2"),
            ("e13", "1", "3"),
            ("e23", "2", "3"),
            ("e45", "4", "5"),
            ("e46", "4", "6"),
            ("e56", "5", "6"),
            ("e14", "1", "4"),
            ("e25", "2", "5"),
            ("e36", "3", "6"),
        ],
        &[],
    )
}

/// Wheel with hub `h` and five rim vertices.
pub fn wheel5() -> RayedGraph {
    let mut edges = Vec::new();
    for i in 1..=5 {
        edges.push((format!("s{i}"), "h".to_string(), i.to_string()));
        let j = i % 5 + 1;
        edges.push((format!("r{i}"), i.to_string(), j.to_string()));
    }
    owned(&edges, &[])
}

/// Octahedron; the opposite pairs are 1-6, 2-5 and 3-4.
pub fn octahedron() -> RayedGraph {
    let mut edges = Vec::new();
    for i in 1..=6 {
        for j in i + 1..=6 {
            if i + j != 7 {
                edges.push((format!("e{i}{j}"), i.to_string(), j.to_string()));
            }
        }
    }
    owned(&edges, &[])
}

/// Hubs `x` and `y` joined by three paths of length two.
pub fn theta() -> RayedGraph {
    build(
        &[
            ("xa", "x", "a"),
            ("ay", "a", "y"),
            ("xb", "x", "b"),
            ("by", "b", "y"),
            ("xc", "x", "c"),
            ("cy", "c", "y"),
        ],
        &[],
    )
}

pub fn two_triangles() -> RayedGraph {
    build(
        &[
            ("a1", "c", "x1"),
            ("a2", "x1", "x2"),
            ("a3", "x2", "c"),
            ("b1", "c", "y1"),
            ("b2", "y1", "y2"),
            ("b3", "y2", "c"),
        ],
        &[],
    )
}

/// Triangle on `h` with a pendant path ending in a ray.
pub fn lollipop() -> RayedGraph {
    build(
        &[
            ("ha", "h", "a"),
            ("ab", "a", "b"),
            ("bh", "b", "h"),
            ("hc", "h", "c"),
            ("cd", "c", "d"),
        ],
        &[("r", "d")],
    )
}

/// Path on five vertices with a ray at each end.
pub fn line5() -> RayedGraph {
    build(
        &[
            ("l1", "p0", "p1"),
            ("l2", "p1", "p2"),
            ("l3", "p2", "p3"),
            ("l4", "p3", "p4"),
        ],
        &[("west", "p0"), ("east", "p4")],
    )
}

/// Tripod with one ray per leaf.
pub fn star3() -> RayedGraph {
    build(
        &[("cx", "c", "x"), ("cy", "c", "y"), ("cz", "c", "z")],
        &[("rx", "x"), ("ry", "y"), ("rz", "z")],
    )
}

/// 3-regular tree cut at `depth`; each leaf carries two rays.
pub fn tree3(depth: usize, subdivided: bool) -> RayedGraph {
    let mut edges = Vec::new();
    let mut rays = Vec::new();
    let mut level = vec![String::new()];
    for d in 1..=depth {
        let mut next = Vec::new();
        for parent in &level {
            let children = if d == 1 { 3 } else { 2 };
            for c in 0..children {
                let child = format!("{parent}{c}");
                let (pv, cv) = (format!("t{parent}"), format!("t{child}"));
                if subdivided {
                    let mid = format!("s{child}");
                    edges.push((format!("e{child}a"), pv, mid.clone()));
                    edges.push((format!("e{child}b"), mid, cv));
                } else {
                    edges.push((format!("e{child}"), pv, cv));
                }
                next.push(child);
            }
        }
        level = next;
    }
    for leaf in &level {
        rays.push((format!("r{leaf}a"), format!("t{leaf}")));
        rays.push((format!("r{leaf}b"), format!("t{leaf}")));
    }
    owned(&edges, &rays)
}

/// A triangle with two rays at each corner; the finite model of a triangle
/// free product with a line.
pub fn ex26() -> RayedGraph {
    build(
        &[("a", "u", "v"), ("b", "v", "w"), ("c", "u", "w")],
        &[
            ("u1", "u"),
            ("u2", "u"),
            ("v1", "v"),
            ("v2", "v"),
            ("w1", "w"),
            ("w2", "w"),
        ],
    )
}

/// Wedge `(x, z, y)` whose endpoints share a cycle through `u` and `v` that
/// avoids the center.
pub fn ex39() -> RayedGraph {
    build(
        &[
            ("xz", "x", "z"),
            ("zy", "z", "y"),
            ("xu", "x", "u"),
            ("uy", "u", "y"),
            ("xv", "x", "v"),
            ("vy", "v", "y"),
        ],
        &[("rz", "z"), ("ru", "u"), ("rv", "v")],
    )
}

fn ladder_edges() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("t01", "t0", "t1"),
        ("t12", "t1", "t2"),
        ("t23", "t2", "t3"),
        ("b01", "b0", "b1"),
        ("b12", "b1", "b2"),
        ("b23", "b2", "b3"),
        ("r0", "t0", "b0"),
        ("r1", "t1", "b1"),
        ("r2", "t2", "b2"),
        ("r3", "t3", "b3"),
        ("d0", "t0", "b1"),
        ("d1", "t1", "b2"),
        ("d2", "t2", "b3"),
    ]
}

/// Ladder segment of three squares with a diagonal in each; one ray leaves
/// each end.
pub fn fig2_g1() -> RayedGraph {
    build(&ladder_edges(), &[("west", "t0"), ("east", "t3")])
}

/// The same ladder with the middle square flipped, so its diagonal runs the
/// other way.
pub fn fig2_g2() -> RayedGraph {
    let edges: Vec<_> = ladder_edges()
        .into_iter()
        .map(|(e, u, v)| match e {
            "t12" => (e, "b1", "b2"),
            "b12" => (e, "t1", "t2"),
            "d1" => (e, "b1", "t2"),
            _ => (e, u, v),
        })
        .collect();
    build(&edges, &[("west", "t0"), ("east", "t3")])
}

/// Identity on edge ids from `fig2_g1` to `fig2_g2`.
pub fn fig2_phi() -> EdgeBijection {
    EdgeBijection::identity(&fig2_g1())
}

fn gadget(edges: &mut Vec<(String, String, String)>, p: &str, q: &str, diamond: bool) {
    let n = |s: &str| format!("{p}{q}{s}");
    let mut push = |id: String, u: String, v: String| edges.push((id, u, v));
    if diamond {
        push(n(":pa"), p.into(), n("a"));
        push(n(":pb"), p.into(), n("b"));
        push(n(":aq"), n("a"), q.into());
        push(n(":bq"), n("b"), q.into());
        push(n(":ab"), n("a"), n("b"));
    } else {
        push(n(":pa"), p.into(), n("a"));
        push(n(":pb"), p.into(), n("b"));
        push(n(":cq"), n("c"), q.into());
        push(n(":dq"), n("d"), q.into());
        push(n(":ac"), n("a"), n("c"));
        push(n(":cd"), n("c"), n("d"));
        push(n(":db"), n("d"), n("b"));
        push(n(":ba"), n("b"), n("a"));
    }
}

fn gadget_triangle(diamond: bool) -> RayedGraph {
    let mut edges = Vec::new();
    for (p, q) in [("A", "B"), ("B", "C"), ("C", "A")] {
        gadget(&mut edges, p, q, diamond);
    }
    let rays: Vec<(String, String)> = ["A", "B", "C"]
        .iter()
        .flat_map(|v| {
            [
                (format!("{v}1"), v.to_string()),
                (format!("{v}2"), v.to_string()),
            ]
        })
        .collect();
    owned(&edges, &rays)
}

/// Triangle `A B C` whose sides are square-bridge gadgets; two rays at each
/// corner.
pub fn fig6() -> RayedGraph {
    gadget_triangle(false)
}

/// As `fig6`, with diamond gadgets.
pub fn fig6_diamond() -> RayedGraph {
    gadget_triangle(true)
}

fn fig7_edges() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("t0ab", "a", "b"),
        ("t0bc", "b", "c"),
        ("t0ca", "c", "a"),
        ("t1a", "a", "a1"),
        ("t1m", "a1", "a2"),
        ("t1b", "a2", "a"),
        ("t2a", "b", "b1"),
        ("t2m", "b1", "b2"),
        ("t2b", "b2", "b"),
        ("t3a", "c", "c1"),
        ("t3m", "c1", "c2"),
        ("t3b", "c2", "c"),
        ("t4a", "b1", "b3"),
        ("t4m", "b3", "b4"),
        ("t4b", "b4", "b1"),
        ("t5a", "c1", "c3"),
        ("t5m", "c3", "c4"),
        ("t5b", "c4", "c1"),
    ]
}

fn fig7_rays() -> Vec<(&'static str, &'static str)> {
    ["a1", "a2", "b2", "b3", "b4", "c2", "c3", "c4"]
        .iter()
        .map(|v| (*v, *v))
        .collect()
}

/// Six triangles glued along a tree pattern, every vertex in at most two of
/// them. Vertices lying in a single triangle carry a ray. Vertices `a`, `b1`
/// and `c1` are the shared vertices of a perfect matching of the triangles.
pub fn fig7_g1() -> RayedGraph {
    build(&fig7_edges(), &fig7_rays())
}

/// `fig7_g1` cut apart at `a`, `b1` and `c1` into four lines of triangles.
pub fn fig7_g2() -> RayedGraph {
    let edges: Vec<_> = fig7_edges()
        .into_iter()
        .map(|(e, u, v)| {
            let moved = |x: &'static str| match (e, x) {
                ("t1a" | "t1b", "a") => "a'",
                ("t4a" | "t4b", "b1") => "b1'",
                ("t5a" | "t5b", "c1") => "c1'",
                _ => x,
            };
            (e, moved(u), moved(v))
        })
        .collect();
    build(&edges, &fig7_rays())
}

pub fn fig7_phi() -> EdgeBijection {
    EdgeBijection::identity(&fig7_g1())
}

/// Line with a ray at each end and a pendant triangle at each inner vertex.
pub fn fig8() -> RayedGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((format!("l{i}"), format!("p{i}"), format!("p{}", i + 1)));
    }
    for i in 1..=4 {
        edges.push((format!("g{i}a"), format!("p{i}"), format!("q{i}")));
        edges.push((format!("g{i}b"), format!("q{i}"), format!("s{i}")));
        edges.push((format!("g{i}c"), format!("s{i}"), format!("p{i}")));
    }
    owned(
        &edges,
        &[("west".into(), "p0".into()), ("east".into(), "p5".into())],
    )
}

/// Line `p0 x y p1` with a ray at each end, plus a square `x a b y` with the
/// diagonal `x b`.
pub fn fig9() -> RayedGraph {
    build(
        &[
            ("l0", "p0", "x"),
            ("lm", "x", "y"),
            ("l1", "y", "p1"),
            ("xa", "x", "a"),
            ("ab", "a", "b"),
            ("by", "b", "y"),
            ("xb", "x", "b"),
        ],
        &[("west", "p0"), ("east", "p1")],
    )
}

/// Three triangles in a chain with a ray at each end.
pub fn triangle_chain() -> RayedGraph {
    build(
        &[
            ("a0", "p0", "m0"),
            ("a1", "m0", "p1"),
            ("a2", "p0", "p1"),
            ("b0", "p1", "m1"),
            ("b1", "m1", "p2"),
            ("b2", "p1", "p2"),
            ("c0", "p2", "m2"),
            ("c1", "m2", "p3"),
            ("c2", "p2", "p3"),
        ],
        &[("west", "p0"), ("east", "p3")],
    )
}

/// All curated graphs by name, in name order.
pub fn graphs() -> BTreeMap<&'static str, RayedGraph> {
    BTreeMap::from([
        ("cycle4", cycle4()),
        ("ex26", ex26()),
        ("ex39", ex39()),
        ("fig2_g1", fig2_g1()),
        ("fig2_g2", fig2_g2()),
        ("fig6", fig6()),
        ("fig6_diamond", fig6_diamond()),
        ("fig7_g1", fig7_g1()),
        ("fig7_g2", fig7_g2()),
        ("fig8", fig8()),
        ("fig9", fig9()),
        ("k4", k4()),
        ("k5", k5()),
        ("line5", line5()),
        ("lollipop", lollipop()),
        ("octahedron", octahedron()),
        ("path3", path3()),
        ("prism", prism()),
        ("star3", star3()),
        ("theta", theta()),
        ("tree3_d2", tree3(2, false)),
        ("tree3_d2_subdivided", tree3(2, true)),
        ("tree3_d3", tree3(3, false)),
        ("tree3_d3_subdivided", tree3(3, true)),
        ("triangle", triangle()),
        ("triangle_chain", triangle_chain()),
        ("two_triangles", two_triangles()),
        ("wheel5", wheel5()),
    ])
}

/// Curated edge bijections by name.
pub fn bijections() -> BTreeMap<&'static str, EdgeBijection> {
    BTreeMap::from([("fig2_phi", fig2_phi()), ("fig7_phi", fig7_phi())])
}

pub fn graph(name: &str) -> Option<RayedGraph> {
    graphs().remove(name)
}

/// Every fixture file as `(file name, bytes)`.
pub fn files() -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = graphs()
        .into_iter()
        .map(|(name, g)| (format!("{name}.json"), crate::graph::io::save(&g)))
        .collect();
    out.extend(
        bijections()
            .into_iter()
            .map(|(name, b)| (format!("{name}.json"), crate::graph::io::to_json(&b))),
    );
    out.sort();
    out
}

/// Identity map on the edges of `g`.
pub fn identity_map(g: &RayedGraph) -> BTreeMap<EdgeId, EdgeId> {
    g.edge_ids().into_iter().map(|e| (e.clone(), e)).collect()
}
