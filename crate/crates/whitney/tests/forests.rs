mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use whitney::fixtures;
use whitney::forests::{
    check_fmsf_lemmas, cover_violations, fmsf, is_acyclic, is_cycle_closed, leafless_cover,
    prune_leafless, verify_leafless, wedge_classes, wedge_cover, wedge_cover_violations,
    ClassCover, EdgeOrder,
};
use whitney::graph::edge_set;
use whitney::matroid::{is_superfluous_analog, RankOracle};
use whitney::weakiso::EdgeBijection;
use whitney::{EdgeId, EdgeSet, Error, Multigraph, RayedGraph, VertexId};

fn build(edges: &[(&str, &str, &str)], rays: &[(&str, &str)]) -> RayedGraph {
    let mut g = Multigraph::new();
    for (e, u, v) in edges {
        g.add_vertex(*u);
        g.add_vertex(*v);
        g.add_edge(*e, *u, *v).unwrap();
    }
    let mut g = RayedGraph::from(g);
    for (r, at) in rays {
        g.add_ray(*r, *at).unwrap();
    }
    g
}

fn order(ids: &[&str]) -> EdgeOrder {
    EdgeOrder::new(ids.iter().map(|e| EdgeId::new(*e)).collect()).unwrap()
}

/// Union of the forest paths between every two distinct rays.
fn ray_path_union(g: &RayedGraph, f: &EdgeSet) -> EdgeSet {
    let ends: Vec<&VertexId> = g.rays().values().collect();
    let mut out = EdgeSet::new();
    for (i, a) in ends.iter().enumerate() {
        let tree = common::reach(g, f, a);
        for b in &ends[i + 1..] {
            let mut cur = (*b).clone();
            if !tree.contains_key(&cur) {
                continue;
            }
            while let Some(Some((p, e))) = tree.get(&cur) {
                out.insert(e.clone());
                cur = p.clone();
            }
        }
    }
    out
}

fn random_tree(rng: &mut impl Rng, n: usize, rays: usize) -> RayedGraph {
    let mut g = Multigraph::new();
    g.add_vertex("v0");
    for v in 1..n {
        g.add_vertex(format!("v{v}"));
        let p = rng.gen_range(0..v);
        g.add_edge(format!("e{v:02}"), format!("v{p}"), format!("v{v}"))
            .unwrap();
    }
    let mut g = RayedGraph::from(g);
    for r in 0..rays {
        g.add_ray(format!("r{r}"), format!("v{}", rng.gen_range(0..n)))
            .unwrap();
    }
    g
}

#[test]
fn triangle_drops_its_largest_edge() {
    let f = fmsf(&fixtures::triangle(), &order(&["a", "b", "c"])).unwrap();
    assert_eq!(f, edge_set(["a", "b"]));
}

#[test]
fn forest_input_is_its_own_forest() {
    let g = fixtures::tree3(2, false);
    assert_eq!(fmsf(&g, &EdgeOrder::shuffled(&g, 3)).unwrap(), g.edge_ids());
}

#[test]
fn incomplete_or_repeated_orders_are_input_errors() {
    assert!(fmsf(&fixtures::triangle(), &order(&["a", "b"]))
        .unwrap_err()
        .is_input());
    assert!(EdgeOrder::new(vec![EdgeId::new("a"), EdgeId::new("a")])
        .unwrap_err()
        .is_input());
    let json = serde_json::to_string(&order(&["b", "a", "c"])).unwrap();
    assert_eq!(json, r#"["b","a","c"]"#);
    assert!(serde_json::from_str::<EdgeOrder>(r#"["a","a"]"#).is_err());
}

#[test]
fn fmsf_matches_greedy_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..200 {
        let (n, m, rays) = (
            rng.gen_range(1..9),
            rng.gen_range(0..16),
            rng.gen_range(0..4),
        );
        let g = common::random_rayed(&mut rng, n, m, rays);
        let o = EdgeOrder::shuffled(&g, seed);
        let f = fmsf(&g, &o).unwrap();
        assert_eq!(f, common::greedy_forest(&g, &o), "seed {seed}");
        assert!(is_acyclic(&g, &f));
        for (_, u, v) in g.core.edges() {
            assert!(
                common::reach(&g, &f, u).contains_key(v),
                "forest does not span a component"
            );
        }
    }
}

#[test]
fn one_triangle_of_two_restricts_exactly() {
    let g = build(
        &[
            ("a", "1", "2"),
            ("b", "2", "3"),
            ("c", "1", "3"),
            ("d", "4", "5"),
            ("e", "5", "6"),
            ("f", "4", "6"),
        ],
        &[],
    );
    let report = check_fmsf_lemmas(
        &g,
        &order(&["f", "a", "e", "b", "d", "c"]),
        &edge_set(["a", "b", "c"]),
    )
    .unwrap();
    assert!(report.restriction && report.ray_components, "{report:?}");
}

#[test]
fn subsets_cutting_a_cycle_are_rejected() {
    let err = check_fmsf_lemmas(
        &fixtures::cycle4(),
        &EdgeOrder::sorted(&fixtures::cycle4()),
        &edge_set(["a", "b"]),
    );
    assert!(matches!(err, Err(Error::Precondition(_))));
    assert!(!is_cycle_closed(&fixtures::theta(), &edge_set(["xa", "ay"])).unwrap());
    assert!(is_cycle_closed(&fixtures::lollipop(), &edge_set(["cd"])).unwrap());
}

#[test]
fn restriction_holds_on_cycle_closed_subsets() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for seed in 0..100 {
        let (g, pieces) = common::glued_pieces(&mut rng);
        let s: EdgeSet = pieces
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .flatten()
            .cloned()
            .collect();
        assert!(is_cycle_closed(&g, &s).unwrap());
        let report = check_fmsf_lemmas(&g, &EdgeOrder::shuffled(&g, seed), &s).unwrap();
        assert!(report.restriction, "seed {seed}: {:?}", report.violations);
    }
}

#[test]
fn rayed_fixtures_keep_their_ray_components() {
    for (name, g) in fixtures::graphs() {
        if g.ray_count() == 0 {
            continue;
        }
        for seed in 0..5 {
            let report =
                check_fmsf_lemmas(&g, &EdgeOrder::shuffled(&g, seed), &g.edge_ids()).unwrap();
            assert!(
                report.ray_components && report.restriction,
                "{name}: {:?}",
                report.violations
            );
        }
    }
}

#[test]
fn pruning_a_three_ray_star_changes_nothing() {
    let g = fixtures::star3();
    assert_eq!(prune_leafless(&g, &g.edge_ids()).unwrap(), g.edge_ids());
}

#[test]
fn pruning_drops_a_ray_free_pendant() {
    let g = build(
        &[("cx", "c", "x"), ("cy", "c", "y"), ("cz", "c", "z")],
        &[("rx", "x"), ("ry", "y")],
    );
    assert_eq!(
        prune_leafless(&g, &g.edge_ids()).unwrap(),
        edge_set(["cx", "cy"])
    );
}

#[test]
fn pruning_rejects_cycles() {
    let g = fixtures::triangle();
    assert!(matches!(
        prune_leafless(&g, &g.edge_ids()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn pruning_matches_ray_path_union() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let (n, rays) = (rng.gen_range(1..14), rng.gen_range(0..5));
        let g = random_tree(&mut rng, n, rays);
        assert_eq!(
            prune_leafless(&g, &g.edge_ids()).unwrap(),
            ray_path_union(&g, &g.edge_ids())
        );
    }
}

#[test]
fn leafless_forest_examples() {
    assert!(verify_leafless(
        &fixtures::star3(),
        &fixtures::star3().edge_ids()
    ));
    let line = fixtures::line5();
    assert!(!verify_leafless(&line, &line.edge_ids()));
    assert!(verify_leafless(&line, &EdgeSet::new()));
    assert!(!verify_leafless(
        &fixtures::triangle(),
        &fixtures::triangle().edge_ids()
    ));
}

fn cover_fixtures() -> Vec<(&'static str, RayedGraph)> {
    vec![
        ("tree", fixtures::tree3(3, false)),
        ("subdivided tree", fixtures::tree3(3, true)),
        ("fig6", fixtures::fig6()),
    ]
}

#[test]
fn leafless_covers_are_valid_and_superfluous() {
    for (name, g) in cover_fixtures() {
        let cover = leafless_cover(&g).unwrap();
        assert_eq!(cover_violations(&g, &cover), Vec::<String>::new(), "{name}");
        let union: EdgeSet = cover.forests.iter().flatten().cloned().collect();
        assert_eq!(union, g.edge_ids(), "{name}");
        let oracle = RankOracle::new(&g);
        for f in &cover.forests {
            assert!(verify_leafless(&g, f));
            assert!(is_superfluous_analog(&oracle, f).unwrap(), "{name}: {f:?}");
            assert_eq!(prune_leafless(&g, f).unwrap(), *f);
        }
    }
}

#[test]
fn leafless_cover_needs_three_rays_per_component() {
    assert!(matches!(
        leafless_cover(&fixtures::line5()),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        leafless_cover(&fixtures::fig8()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn leafless_cover_is_deterministic() {
    let g = fixtures::fig6();
    assert_eq!(leafless_cover(&g).unwrap(), leafless_cover(&g).unwrap());
}

#[test]
fn gadget_wedge_takes_the_cycle_branch() {
    let g = fixtures::ex39();
    let classes = wedge_classes(&g).unwrap();
    let class = classes
        .iter()
        .find(|c| c.iter().any(|w| w.center.as_str() == "z"))
        .unwrap();
    let cover = wedge_cover(&g, class).unwrap();
    assert!(wedge_cover_violations(&g, class, &cover).is_empty());
    let sub = cover
        .classes
        .iter()
        .find(|s| s.wedges.iter().any(|w| w.center.as_str() == "z"))
        .unwrap();
    let ClassCover::Cycles { cycles } = &sub.cover else {
        panic!("expected cycles")
    };
    let c = &cycles
        .iter()
        .find(|c| c.wedge.center.as_str() == "z")
        .unwrap()
        .cycle;
    let span = g.core.span(c);
    assert!(span.contains(&VertexId::new("x")) && span.contains(&VertexId::new("y")));
    assert!(!span.contains(&VertexId::new("z")));
    assert_eq!(c.len(), 4);
}

#[test]
fn every_gadget_class_is_covered() {
    let g = fixtures::ex39();
    for class in wedge_classes(&g).unwrap() {
        let cover = wedge_cover(&g, &class).unwrap();
        assert!(wedge_cover_violations(&g, &class, &cover).is_empty());
    }
}

fn rayed_k4() -> RayedGraph {
    let mut g = fixtures::k4();
    for v in ["1", "2", "3", "4"] {
        g.add_ray(format!("r{v}"), v).unwrap();
    }
    g
}

#[test]
fn adjacent_endpoints_close_a_triangle() {
    let g = rayed_k4();
    let class: Vec<_> = whitney::graph::wedges(&g.core)
        .into_iter()
        .filter(|w| w.center.as_str() == "1")
        .take(1)
        .collect();
    let cover = wedge_cover(&g, &class).unwrap();
    assert!(wedge_cover_violations(&g, &class, &cover).is_empty());
    let ClassCover::Cycles { cycles } = &cover.classes[0].cover else {
        panic!("expected cycles")
    };
    assert_eq!(cycles[0].cycle.len(), 3);
    assert!(!g.core.span(&cycles[0].cycle).contains(&VertexId::new("1")));
}

#[test]
fn tree_wedges_away_from_the_leaves_take_forests() {
    let g = fixtures::tree3(3, false);
    let mut forests = 0;
    for class in wedge_classes(&g).unwrap() {
        let deep = class.iter().any(|w| w.center.as_str().len() == 3);
        match wedge_cover(&g, &class) {
            Ok(cover) => {
                assert!(!deep);
                assert!(wedge_cover_violations(&g, &class, &cover).is_empty());
                assert!(cover
                    .classes
                    .iter()
                    .all(|s| matches!(s.cover, ClassCover::Forest { .. })));
                forests += 1;
            }
            Err(e) => {
                // A leaf endpoint is isolated once its parent is removed and
                // carries only two rays.
                assert!(deep, "{e}");
                assert!(matches!(e, Error::Theorem(_)));
            }
        }
    }
    assert!(forests > 0);
}

#[test]
fn graphs_without_weak_three_connectivity_are_rejected() {
    for g in [fixtures::tree3(3, true), fixtures::fig6()] {
        let class = wedge_classes(&g).unwrap().remove(0);
        assert!(matches!(
            wedge_cover(&g, &class),
            Err(Error::Precondition(_))
        ));
    }
}

#[test]
fn close_wedges_are_rejected() {
    let g = rayed_k4();
    let class: Vec<_> = whitney::graph::wedges(&g.core)
        .into_iter()
        .take(2)
        .collect();
    let err = wedge_cover(&g, &class).unwrap_err();
    assert!(err.to_string().contains("too close"), "{err}");
}

#[test]
fn wedge_classes_partition_the_wedges() {
    let g = fixtures::tree3(3, false);
    let classes = wedge_classes(&g).unwrap();
    let all: BTreeSet<_> = classes.iter().flatten().cloned().collect();
    assert_eq!(all.len(), whitney::graph::wedges(&g.core).len());
    assert_eq!(classes.iter().map(Vec::len).sum::<usize>(), all.len());
}

#[test]
fn covers_map_to_covers_under_automorphisms() {
    let g = rayed_k4();
    let phi = EdgeBijection::new(
        [
            ("e12", "e13"),
            ("e13", "e12"),
            ("e14", "e14"),
            ("e23", "e23"),
            ("e24", "e34"),
            ("e34", "e24"),
        ]
        .into_iter()
        .map(|(a, b)| (EdgeId::new(a), EdgeId::new(b)))
        .collect(),
    );
    assert!(
        whitney::weakiso::check_weak_isomorphism(&g, &g, &phi)
            .unwrap()
            .verdict
    );
    for w in whitney::graph::wedges(&g.core) {
        let cover = wedge_cover(&g, std::slice::from_ref(&w)).unwrap();
        for sub in &cover.classes {
            match &sub.cover {
                ClassCover::Cycles { cycles } => {
                    for c in cycles {
                        let image = phi.image(&c.cycle).unwrap();
                        let mask = whitney::graph::Dense::new(&g).mask(&image).unwrap();
                        let d = whitney::graph::Dense::new(&g);
                        assert!(whitney::graph::cycles::is_cycle(d.n(), &d.ends, &mask));
                    }
                }
                ClassCover::Forest { forest } => {
                    let image = phi.image(forest).unwrap();
                    assert_eq!(prune_leafless(&g, &image).unwrap(), image);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fmsf_is_a_spanning_forest(seed in any::<u64>(), n in 1usize..8, m in 0usize..14) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_rayed(&mut rng, n, m, 0);
        let f = fmsf(&g, &EdgeOrder::shuffled(&g, seed)).unwrap();
        prop_assert!(is_acyclic(&g, &f));
        let comps = whitney::graph::components(&g, &g.edge_ids()).unwrap().blocks.len();
        prop_assert_eq!(f.len() + comps, g.vertex_count());
    }

    #[test]
    fn pruned_forests_are_ray_path_unions(seed in any::<u64>(), n in 1usize..14, rays in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_tree(&mut rng, n, rays);
        let pruned = prune_leafless(&g, &g.edge_ids()).unwrap();
        prop_assert_eq!(&pruned, &ray_path_union(&g, &g.edge_ids()));
        prop_assert_eq!(prune_leafless(&g, &pruned).unwrap(), pruned);
    }
}
