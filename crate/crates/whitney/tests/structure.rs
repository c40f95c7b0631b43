mod common;

use std::collections::BTreeSet;

use whitney::fixtures;
use whitney::graph::{edge_set, EdgeId, RayedGraph, VertexId, VertexSet};
use whitney::structure::*;

fn eligible() -> Vec<(&'static str, RayedGraph)> {
    fixtures::graphs()
        .into_iter()
        .filter(|(_, g)| g.edge_count() <= 18 && enumerate_maximal_bananas(g).is_ok())
        .collect()
}

fn as_sets(d: &BananaDecomposition) -> BTreeSet<BTreeSet<EdgeId>> {
    d.bananas.values().map(|b| b.edges.clone()).collect()
}

#[test]
fn merge_matches_brute_force_on_small_fixtures() {
    let names: Vec<&str> = eligible().iter().map(|(n, _)| *n).collect();
    assert!(names.contains(&"fig6_diamond"), "{names:?}");
    assert!(names.contains(&"tree3_d2_subdivided"), "{names:?}");
    for (name, g) in eligible() {
        let d = enumerate_maximal_bananas(&g).unwrap();
        assert_eq!(
            as_sets(&d),
            common::brute_force_maximal_bananas(&g),
            "{name}"
        );
    }
}

#[test]
fn merge_order_does_not_matter() {
    for (name, g) in fixtures::graphs() {
        let Ok(base) = enumerate_maximal_bananas(&g) else {
            continue;
        };
        for seed in 0..5 {
            let other = enumerate_maximal_bananas_shuffled(&g, seed).unwrap();
            assert_eq!(as_sets(&base), as_sets(&other), "{name} seed {seed}");
        }
    }
}

#[test]
fn bananas_partition_edges_and_are_maximal() {
    for (name, g) in fixtures::graphs() {
        let Ok(d) = enumerate_maximal_bananas(&g) else {
            continue;
        };
        let mut all = BTreeSet::new();
        for b in d.bananas.values() {
            assert!(is_banana(&g, &b.edges).unwrap(), "{name}");
            for e in &b.edges {
                assert!(all.insert(e.clone()), "{name}: {e} covered twice");
            }
        }
        assert_eq!(all, g.edge_ids(), "{name}");
        let list: Vec<&Banana> = d.bananas.values().collect();
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                let union: BTreeSet<EdgeId> = a.edges.union(&b.edges).cloned().collect();
                assert!(!is_banana(&g, &union).unwrap(), "{name}");
            }
        }
    }
}

#[test]
fn fig6_bananas_are_the_gadgets() {
    let g = fixtures::fig6();
    let d = enumerate_maximal_bananas(&g).unwrap();
    assert_eq!(d.bananas.len(), 3);
    for b in d.bananas.values() {
        assert_eq!(b.edges.len(), 8);
        let prefix = b
            .edges
            .iter()
            .next()
            .unwrap()
            .as_str()
            .split(':')
            .next()
            .unwrap()
            .to_string();
        assert!(b.edges.iter().all(|e| e.as_str().starts_with(&prefix)));
    }
    assert_eq!(d.quotient.vertex_count(), 3);
    assert_eq!(d.quotient.ray_count(), 6);
    assert!(check_ban_weakly_3_connected(&d));
}

#[test]
fn tree_bananas_are_single_edges() {
    let g = fixtures::tree3(3, false);
    let d = enumerate_maximal_bananas(&g).unwrap();
    assert_eq!(d.bananas.len(), g.edge_count());
    assert!(d.bananas.values().all(|b| b.edges.len() == 1));
    assert!(check_ban_weakly_3_connected(&d));
}

#[test]
fn subdivided_tree_bananas_are_length_two_paths() {
    let g = fixtures::tree3(3, true);
    let d = enumerate_maximal_bananas(&g).unwrap();
    assert_eq!(d.bananas.len(), g.edge_count() / 2);
    for b in d.bananas.values() {
        let ids: Vec<&str> = b.edges.iter().map(|e| e.as_str()).collect();
        assert_eq!(ids.len(), 2);
        assert_eq!(ids[0].trim_end_matches('a'), ids[1].trim_end_matches('b'));
    }
    assert!(check_ban_weakly_3_connected(&d));
}

#[test]
fn broken_partition_fails_the_ban_check() {
    let g = fixtures::fig6();
    let mut d = enumerate_maximal_bananas(&g).unwrap();
    d.quotient.core.add_vertex("X");
    d.quotient.core.add_edge("bogus", "A", "X").unwrap();
    assert!(!check_ban_weakly_3_connected(&d));
}

#[test]
fn banana_hypotheses_are_enforced() {
    for g in [fixtures::line5(), fixtures::k4(), fixtures::lollipop()] {
        assert!(matches!(
            enumerate_maximal_bananas(&g),
            Err(whitney::Error::Precondition(_))
        ));
    }
}

#[test]
fn single_edge_banana_path_is_the_edge() {
    let g = fixtures::tree3(2, false);
    let d = enumerate_maximal_bananas(&g).unwrap();
    let (id, _) = d.bananas.iter().next().unwrap();
    assert_eq!(
        path_through_edge_in_banana(&g, &d, id, id).unwrap(),
        vec![id.clone()]
    );
}

#[test]
fn square_gadget_crossing_edge_path_has_three_edges() {
    let g = fixtures::fig6();
    let d = enumerate_maximal_bananas(&g).unwrap();
    let e = EdgeId::new("AB:ac");
    let id = d.banana_of(&e).unwrap().clone();
    let b = &d.bananas[&id];
    let path = path_through_edge_in_banana(&g, &d, &id, &e).unwrap();
    common::check_banana_path(&g, b, &e, &path);
    assert_eq!(
        path.len(),
        shortest_boundary_path_through(&g, b, &e),
        "{path:?}"
    );
    assert_eq!(path.len(), 3);
}

/// Exhaustive search over simple boundary-to-boundary paths in the banana.
fn shortest_boundary_path_through(g: &RayedGraph, b: &Banana, e: &EdgeId) -> usize {
    fn walk(
        g: &RayedGraph,
        b: &Banana,
        e: &EdgeId,
        at: &VertexId,
        seen: &mut BTreeSet<VertexId>,
        len: usize,
        used: bool,
        best: &mut usize,
    ) {
        if at == &b.boundary.1 {
            if used {
                *best = (*best).min(len);
            }
            return;
        }
        for x in &b.edges {
            let Some(next) = g.core.other_end(x, at).cloned() else {
                continue;
            };
            if seen.insert(next.clone()) {
                walk(g, b, e, &next, seen, len + 1, used || x == e, best);
                seen.remove(&next);
            }
        }
    }
    let mut best = usize::MAX;
    let start = b.boundary.0.clone();
    walk(
        g,
        b,
        e,
        &start,
        &mut BTreeSet::from([start.clone()]),
        0,
        false,
        &mut best,
    );
    best
}

#[test]
fn every_banana_edge_lies_on_a_boundary_path() {
    for (name, g) in fixtures::graphs() {
        let Ok(d) = enumerate_maximal_bananas(&g) else {
            continue;
        };
        for (id, b) in &d.bananas {
            for e in &b.edges {
                let path = path_through_edge_in_banana(&g, &d, id, e)
                    .unwrap_or_else(|err| panic!("{name}: {err}"));
                common::check_banana_path(&g, b, e, &path);
            }
        }
    }
}

#[test]
fn furcation_examples() {
    let line = fixtures::line5();
    for e in line.edge_ids() {
        let a = BTreeSet::from([e]);
        assert!(is_n_furcation(&line, &a, 2).unwrap());
        assert!(!is_n_furcation(&line, &a, 3).unwrap());
    }
    let k4 = fixtures::k4();
    assert!(!is_n_furcation(&k4, &edge_set(["e12"]), 1).unwrap());
    let disconnected = edge_set(["e12", "e34"]);
    assert!(is_n_furcation(&k4, &disconnected, 1).is_err());
    let ex = fixtures::ex26();
    for v in ex.vertices() {
        assert!(is_n_furcation_vertices(&ex, &VertexSet::from([v.clone()]), 3).unwrap());
    }
}

#[test]
fn tree_family_is_maximal_and_cells_are_valid() {
    let g = fixtures::tree3(3, false);
    let family = maximal_disjoint_trifurcations(&g, None).unwrap();
    assert!(!family.is_empty());
    for s in &family {
        assert!(is_n_furcation_vertices(&g, s, 3).unwrap());
    }
    assert!(
        trifurcations_disjoint_from(&g, &family, MAX_FURCATION_VERTICES)
            .unwrap()
            .is_empty()
    );
    let cells = voronoi_cells(&g, &family).unwrap();
    let covered: usize = cells.cells.values().map(|c| c.len()).sum();
    assert_eq!(covered, g.vertex_count());
    let parts = whitney::graph::components(&cells.quotient, &cells.quotient.edge_ids()).unwrap();
    assert_eq!(parts.blocks.len(), 1);
}

#[test]
fn example_two_six_quotient_has_a_cycle() {
    let g = fixtures::ex26();
    let family = maximal_disjoint_trifurcations(&g, None).unwrap();
    assert_eq!(family.len(), 3);
    assert!(family.iter().all(|s| s.len() == 1));
    let cells = voronoi_cells(&g, &family).unwrap();
    let q = &cells.quotient;
    assert_eq!((q.vertex_count(), q.edge_count()), (3, 3));
    assert!(whitney::graph::iso::is_isomorphic(q, &g));
}

#[test]
fn line_has_no_trifurcations() {
    assert!(maximal_disjoint_trifurcations(&fixtures::line5(), None)
        .unwrap()
        .is_empty());
}

#[test]
fn single_seed_cell_is_everything() {
    let g = fixtures::star3();
    let seed = VertexSet::from([VertexId::new("c")]);
    let cells = voronoi_cells(&g, &[seed]).unwrap();
    assert_eq!(cells.cells.len(), 1);
    assert_eq!(cells.cells.values().next().unwrap(), g.vertices());
}

#[test]
fn bananas_meet_at_most_two_cells() {
    for g in [
        fixtures::tree3(3, true),
        fixtures::fig6(),
        fixtures::fig7_g1(),
    ] {
        let d = enumerate_maximal_bananas(&g).unwrap();
        let family = maximal_disjoint_trifurcations(&g, None).unwrap();
        let cells = voronoi_cells(&g, &family).unwrap();
        for b in d.bananas.values() {
            let touched: BTreeSet<&str> = g
                .core
                .span(&b.edges)
                .iter()
                .filter_map(|v| cells.cell_of(v))
                .collect();
            assert!(touched.len() <= 2, "{touched:?}");
        }
    }
}
