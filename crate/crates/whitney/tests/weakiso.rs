mod common;

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use whitney::fixtures;
use whitney::graph::iso::{edge_maps_for, vertex_isomorphisms};
use whitney::graph::wedges;
use whitney::ops::{compose, replay, OpSequence};
use whitney::weakiso::{
    check_cycle_preserving, check_tameness_preserving, check_weak_isomorphism,
    extract_induced_isomorphism, preservation_diagnostics, search_weak_isomorphisms, wedge_image,
    EdgeBijection, Extraction, SubsetCoverage,
};
use whitney::{EdgeId, Error, VertexId};

fn bijection(pairs: &[(&str, &str)]) -> EdgeBijection {
    EdgeBijection::new(
        pairs
            .iter()
            .map(|(a, b)| (EdgeId::new(*a), EdgeId::new(*b)))
            .collect(),
    )
}

#[test]
fn cycle_preservation_examples() {
    let c4 = fixtures::cycle4();
    let ids: Vec<EdgeId> = c4.edge_ids().into_iter().collect();
    for perm in ids.iter().permutations(4) {
        let phi = EdgeBijection::new(ids.iter().cloned().zip(perm.into_iter().cloned()).collect());
        assert!(check_cycle_preserving(&c4, &c4, &phi).unwrap().is_none());
    }
    let k4 = fixtures::k4();
    assert!(
        check_cycle_preserving(&k4, &k4, &EdgeBijection::identity(&k4))
            .unwrap()
            .is_none()
    );
    let (t, p) = (fixtures::triangle(), fixtures::path3());
    let mut path = p.clone();
    path.core.add_edge_auto("c", "3", "4").unwrap();
    let phi = bijection(&[("a", "a"), ("b", "b"), ("c", "c")]);
    let w = check_cycle_preserving(&t, &path, &phi).unwrap().unwrap();
    assert_eq!(w.edges, t.edge_ids());
}

#[test]
fn ray_free_graphs_are_always_tame() {
    let g = fixtures::k4();
    let (w, coverage) = check_tameness_preserving(&g, &g, &EdgeBijection::identity(&g)).unwrap();
    assert!(w.is_none());
    assert_eq!(coverage, SubsetCoverage::Exhaustive);
}

#[test]
fn split_triangles_break_tameness() {
    let (g1, g2, phi) = (
        fixtures::fig7_g1(),
        fixtures::fig7_g2(),
        fixtures::fig7_phi(),
    );
    let r = check_weak_isomorphism(&g1, &g2, &phi).unwrap();
    assert!(r.cycle_preserving);
    assert!(!r.tameness_preserving);
    assert!(!r.verdict);
    let w = r.tameness_witness.unwrap();
    let full = match w.direction {
        whitney::weakiso::Direction::Forward => g1.edge_ids(),
        whitney::weakiso::Direction::Backward => g2.edge_ids(),
    };
    assert_eq!(w.edges, full);
}

#[test]
fn ladder_flip_is_a_weak_isomorphism() {
    let r = check_weak_isomorphism(
        &fixtures::fig2_g1(),
        &fixtures::fig2_g2(),
        &fixtures::fig2_phi(),
    )
    .unwrap();
    assert!(r.verdict && r.cycle_preserving && r.tameness_preserving);
    assert!(r.rank_preserving);
}

#[test]
fn identity_is_always_a_weak_isomorphism() {
    for (name, g) in fixtures::graphs() {
        if g.edge_count() > 16 {
            continue;
        }
        let r = check_weak_isomorphism(&g, &g, &EdgeBijection::identity(&g)).unwrap();
        assert!(r.verdict, "{name}");
    }
}

#[test]
fn search_matches_brute_force() {
    let k4 = fixtures::k4();
    let found: BTreeSet<EdgeBijection> = search_weak_isomorphisms(&k4, &k4, 0)
        .unwrap()
        .into_iter()
        .collect();
    assert_eq!(found.len(), 24);
    assert_eq!(found, common::brute_force_weak_isos(&k4, &k4));
    assert_eq!(found, common::automorphism_bijections(&k4));
    let c4 = fixtures::cycle4();
    let found: BTreeSet<EdgeBijection> = search_weak_isomorphisms(&c4, &c4, 0)
        .unwrap()
        .into_iter()
        .collect();
    assert_eq!(found.len(), 24);
    assert_eq!(found, common::brute_force_weak_isos(&c4, &c4));
    let mut path = fixtures::path3();
    path.core.add_edge_auto("c", "3", "4").unwrap();
    assert!(search_weak_isomorphisms(&fixtures::triangle(), &path, 0)
        .unwrap()
        .is_empty());
}

#[test]
fn searched_maps_send_wedges_to_wedges() {
    let k4 = fixtures::k4();
    for phi in search_weak_isomorphisms(&k4, &k4, 0).unwrap() {
        for w in wedges(&k4.core) {
            assert!(wedge_image(&k4, &phi, &w).unwrap().is_wedge);
        }
    }
}

#[test]
fn adjacent_transposition_breaks_a_wedge() {
    let c4 = fixtures::cycle4();
    let swap = bijection(&[("a", "b"), ("b", "a"), ("c", "c"), ("d", "d")]);
    assert!(wedges(&c4.core)
        .iter()
        .any(|w| !wedge_image(&c4, &swap, w).unwrap().is_wedge));
    // Swapping opposite edges is the reflection fixing b and d.
    let opposite = bijection(&[("a", "c"), ("b", "b"), ("c", "a"), ("d", "d")]);
    assert!(wedges(&c4.core)
        .iter()
        .all(|w| wedge_image(&c4, &opposite, w).unwrap().is_wedge));
}

#[test]
fn extraction_recovers_automorphisms() {
    let k4 = fixtures::k4();
    for psi in vertex_isomorphisms(&k4, &k4, 0) {
        for map in edge_maps_for(&k4, &k4, &psi) {
            match extract_induced_isomorphism(&k4, &k4, &EdgeBijection::new(map)).unwrap() {
                Extraction::Isomorphism { vertex_map } => assert_eq!(vertex_map, psi),
                other => panic!("{other:?}"),
            }
        }
    }
    let c4 = fixtures::cycle4();
    let rotate = bijection(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")]);
    let Extraction::Isomorphism { vertex_map } =
        extract_induced_isomorphism(&c4, &c4, &rotate).unwrap()
    else {
        panic!("rotation is induced")
    };
    let expected: BTreeMap<VertexId, VertexId> = [("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")]
        .iter()
        .map(|(a, b)| (VertexId::new(*a), VertexId::new(*b)))
        .collect();
    assert_eq!(vertex_map, expected);
}

#[test]
fn extraction_reports_failures() {
    let c4 = fixtures::cycle4();
    let swap = bijection(&[("a", "b"), ("b", "a"), ("c", "c"), ("d", "d")]);
    assert!(matches!(
        extract_induced_isomorphism(&c4, &c4, &swap).unwrap(),
        Extraction::Failure { wedge: Some(_), .. }
    ));
    let p = fixtures::path3();
    let err = extract_induced_isomorphism(&p, &p, &EdgeBijection::identity(&p)).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn diagnostics_pass_on_weak_isomorphisms() {
    let r = preservation_diagnostics(
        &fixtures::fig2_g1(),
        &fixtures::fig2_g2(),
        &fixtures::fig2_phi(),
    )
    .unwrap();
    assert!(r.ok(), "{r:?}");
    let k4 = fixtures::k4();
    assert!(
        preservation_diagnostics(&k4, &k4, &EdgeBijection::identity(&k4))
            .unwrap()
            .ok()
    );
}

#[test]
fn diagnostics_match_bananas_after_twists() {
    let g = fixtures::fig6();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let options = common::finite_twists(&g);
    assert!(!options.is_empty());
    let ops: Vec<_> = options.choose_multiple(&mut rng, 1).cloned().collect();
    let seq = OpSequence::new(ops);
    let twisted = replay(&g, &seq).unwrap().graph;
    let phi = compose(&g, &seq).unwrap();
    let r = preservation_diagnostics(&g, &twisted, &phi).unwrap();
    assert!(r.ok(), "{r:?}");
    assert_eq!(r.bananas, Some(Vec::new()));
}

#[test]
fn diagnostics_reject_non_weak_isomorphisms() {
    let err = preservation_diagnostics(
        &fixtures::fig7_g1(),
        &fixtures::fig7_g2(),
        &fixtures::fig7_phi(),
    )
    .unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn rigidity_on_small_three_connected_graphs() {
    for g in [fixtures::k4(), fixtures::prism(), fixtures::tree3(2, false)] {
        let found: BTreeSet<EdgeBijection> = search_weak_isomorphisms(&g, &g, 0)
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(found, common::automorphism_bijections(&g));
        for phi in &found {
            assert!(matches!(
                extract_induced_isomorphism(&g, &g, phi).unwrap(),
                Extraction::Isomorphism { .. }
            ));
        }
    }
}

#[test]
fn weak_isomorphisms_compose_and_invert() {
    let c4 = fixtures::cycle4();
    let found = search_weak_isomorphisms(&c4, &c4, 0).unwrap();
    for (phi, psi) in found
        .iter()
        .step_by(5)
        .cartesian_product(found.iter().step_by(7))
    {
        assert!(
            check_weak_isomorphism(&c4, &c4, &phi.then(psi).unwrap())
                .unwrap()
                .verdict
        );
        assert!(
            check_weak_isomorphism(&c4, &c4, &phi.inverse())
                .unwrap()
                .verdict
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_matches_rank_preservation_without_rays(seed in any::<u64>(), n in 2usize..6, m in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g1 = common::random_rayed(&mut rng, n, m, 0);
        let g2 = common::random_rayed(&mut rng, n, m, 0);
        let mut target: Vec<EdgeId> = g2.edge_ids().into_iter().collect();
        target.shuffle(&mut rng);
        let phi = EdgeBijection::new(g1.edge_ids().into_iter().zip(target).collect());
        let r = check_weak_isomorphism(&g1, &g2, &phi).unwrap();
        prop_assert!(r.rank_equivalence_asserted);
        prop_assert_eq!(r.rank_preserving, r.verdict);
        prop_assert_eq!(r.verdict, r.cycle_preserving && r.tameness_preserving);
    }

    #[test]
    fn verdict_matches_rank_preservation_with_two_rays(seed in any::<u64>(), n in 2usize..6, m in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g1 = common::random_two_connected(&mut rng, m.max(3));
        let twisted = common::random_twists(&g1, &mut rng, n);
        let (g2, phi) = common::scramble(&twisted, &mut rng);
        let r = check_weak_isomorphism(&g1, &g2, &phi).unwrap();
        prop_assert!(r.verdict);
        prop_assert!(r.rank_preserving);
    }
}
