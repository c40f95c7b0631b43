mod common;

use std::collections::BTreeMap;

use itertools::Itertools;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use whitney::fixtures;
use whitney::graph::iso::is_isomorphic;
use whitney::ops::{check_sequence_weak_iso, OpSequence, WhitneyOp};
use whitney::tutte::{
    block_decompose, match_decompositions, reassemble, synthesize_twists, tutte_decompose,
    validate_tree, verify_implements, NodeKind, PieceKind, TutteTree,
};
use whitney::weakiso::EdgeBijection;
use whitney::{EdgeId, RayedGraph, VertexId};

fn kinds(t: &TutteTree) -> Vec<NodeKind> {
    let mut k: Vec<NodeKind> = t.nodes.values().map(|n| n.kind).collect();
    k.sort();
    k
}

fn perm(pairs: &[(&str, &str)]) -> EdgeBijection {
    EdgeBijection::new(
        pairs
            .iter()
            .map(|(a, b)| (EdgeId::new(*a), EdgeId::new(*b)))
            .collect(),
    )
}

fn no_same_kind_links(t: &TutteTree) -> bool {
    t.links.iter().all(|l| {
        let (x, y) = (t.nodes[&l.a].kind, t.nodes[&l.b].kind);
        x != y || x == NodeKind::ThreeConnected
    })
}

#[test]
fn k4_is_one_three_connected_node() {
    let t = tutte_decompose(&fixtures::k4().core).unwrap();
    assert_eq!(kinds(&t), vec![NodeKind::ThreeConnected]);
    assert!(t.links.is_empty());
    assert!(validate_tree(&t).is_empty());
}

#[test]
fn cycle_is_one_cycle_node() {
    let t = tutte_decompose(&fixtures::cycle4().core).unwrap();
    assert_eq!(kinds(&t), vec![NodeKind::Cycle]);
    assert_eq!(reassemble(&t).unwrap(), fixtures::cycle4().core);
}

#[test]
fn theta_is_a_bond_with_three_triangles() {
    let g = fixtures::theta();
    let t = tutte_decompose(&g.core).unwrap();
    assert_eq!(
        kinds(&t),
        vec![
            NodeKind::Cycle,
            NodeKind::Cycle,
            NodeKind::Cycle,
            NodeKind::Bond
        ]
    );
    let bond = t.nodes.values().find(|n| n.kind == NodeKind::Bond).unwrap();
    assert_eq!(bond.graph.edge_count(), 3);
    assert!(bond.graph.edge_ids().iter().all(whitney::tutte::is_virtual));
    for n in t.nodes.values().filter(|n| n.kind == NodeKind::Cycle) {
        assert_eq!(n.graph.edge_count(), 3);
    }
    assert_eq!(t.links.len(), 3);
    assert!(validate_tree(&t).is_empty());
    assert_eq!(reassemble(&t).unwrap(), g.core);
}

#[test]
fn single_node_tree_reassembles_to_itself() {
    let t = tutte_decompose(&fixtures::k5().core).unwrap();
    assert_eq!(reassemble(&t).unwrap(), fixtures::k5().core);
}

#[test]
fn parallel_edges_become_a_bond() {
    let mut g = fixtures::triangle();
    g.core.add_edge("a2", "u", "v").unwrap();
    let t = tutte_decompose(&g.core).unwrap();
    assert_eq!(kinds(&t), vec![NodeKind::Cycle, NodeKind::Bond]);
    assert_eq!(reassemble(&t).unwrap(), g.core);
}

#[test]
fn decomposition_rejects_cut_vertices() {
    let err = tutte_decompose(&fixtures::two_triangles().core).unwrap_err();
    assert!(err.is_input(), "{err}");
}

#[test]
fn dangling_virtual_edge_is_reported() {
    let mut t = tutte_decompose(&fixtures::theta().core).unwrap();
    t.links.pop();
    assert!(validate_tree(&t)
        .iter()
        .any(|m| m.contains("dangling virtual edge")));
    assert!(reassemble(&t).is_err());
}

#[test]
fn flipped_link_reassembles_to_a_twisted_graph() {
    let mut t = tutte_decompose(&fixtures::theta().core).unwrap();
    t.links[0].flipped = true;
    let g = reassemble(&t).unwrap();
    assert!(is_isomorphic(&RayedGraph::from(g), &fixtures::theta()));
}

#[test]
fn prism_decomposes_into_one_node() {
    let t = tutte_decompose(&fixtures::prism().core).unwrap();
    assert_eq!(kinds(&t), vec![NodeKind::ThreeConnected]);
}

#[test]
fn random_graphs_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let g = common::random_two_connected(&mut rng, 12);
        let t = tutte_decompose(&g.core).unwrap();
        assert!(validate_tree(&t).is_empty(), "{:?}", validate_tree(&t));
        assert!(no_same_kind_links(&t));
        let back = RayedGraph::from(reassemble(&t).unwrap());
        assert!(is_isomorphic(&back, &g));
        assert_eq!(back, g);
    }
}

#[test]
fn isomorphic_inputs_give_matching_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let g = common::random_two_connected(&mut rng, 12);
        let (h, phi) = common::scramble(&g, &mut rng);
        let m = match_decompositions(&g, &h, &phi).unwrap();
        assert_eq!(m.left.nodes.len(), m.right.nodes.len());
        for (a, b) in &m.nodes {
            assert_eq!(m.left.nodes[a].kind, m.right.nodes[b].kind);
            assert_eq!(
                m.left.nodes[a].graph.edge_count(),
                m.right.nodes[b].graph.edge_count()
            );
        }
    }
}

#[test]
fn identity_on_theta_matches_identically() {
    let g = fixtures::theta();
    let m = match_decompositions(&g, &g, &EdgeBijection::identity(&g)).unwrap();
    assert!(m.nodes.iter().all(|(a, b)| a == b));
    assert!(m.edges.map.iter().all(|(a, b)| a == b));
}

#[test]
fn permuted_theta_branches_fix_the_bond() {
    let g = fixtures::theta();
    let phi = perm(&[
        ("xa", "xb"),
        ("ay", "by"),
        ("xb", "xc"),
        ("by", "cy"),
        ("xc", "xa"),
        ("cy", "ay"),
    ]);
    let m = match_decompositions(&g, &g, &phi).unwrap();
    let bond = m
        .left
        .nodes
        .iter()
        .find(|(_, n)| n.kind == NodeKind::Bond)
        .map(|(k, _)| k.clone())
        .unwrap();
    assert_eq!(m.nodes[&bond], bond);
    let moved = m.nodes.iter().filter(|(a, b)| a != b).count();
    assert_eq!(moved, 3);
}

#[test]
fn k4_automorphism_matches_the_single_node() {
    let g = fixtures::k4();
    let phi = perm(&[
        ("e12", "e21"),
        ("e13", "e23"),
        ("e14", "e24"),
        ("e23", "e13"),
        ("e24", "e14"),
        ("e34", "e34"),
    ]);
    let phi = EdgeBijection::new(
        phi.map
            .into_iter()
            .map(|(a, b)| (a, EdgeId::new(b.as_str().replace("e21", "e12"))))
            .collect(),
    );
    let m = match_decompositions(&g, &g, &phi).unwrap();
    assert_eq!(m.nodes.len(), 1);
    let seq = synthesize_twists(&g, &g, &phi).unwrap();
    assert!(seq.ops.is_empty());
    assert!(verify_implements(&g, &seq, &phi, &g).unwrap());
}

#[test]
fn match_rejects_non_cycle_preserving_maps() {
    let g = fixtures::k4();
    let phi = perm(&[
        ("e12", "e12"),
        ("e13", "e13"),
        ("e14", "e34"),
        ("e23", "e23"),
        ("e24", "e24"),
        ("e34", "e14"),
    ]);
    let err = match_decompositions(&g, &g, &phi).unwrap_err();
    assert!(err.is_input(), "{err}");
}

#[test]
fn every_permutation_of_a_four_cycle_is_synthesized() {
    let g = fixtures::cycle4();
    let ids: Vec<EdgeId> = g.edge_ids().into_iter().collect();
    let mut count = 0;
    for p in ids.iter().permutations(4) {
        let phi = EdgeBijection::new(ids.iter().cloned().zip(p.into_iter().cloned()).collect());
        let seq = synthesize_twists(&g, &g, &phi).unwrap();
        assert!(seq.ops.len() <= 2);
        assert!(verify_implements(&g, &seq, &phi, &g).unwrap(), "{phi:?}");
        let (_, report) = check_sequence_weak_iso(&g, &seq).unwrap();
        assert!(report.verdict);
        count += 1;
    }
    assert_eq!(count, 24);
}

#[test]
fn wrong_twist_order_does_not_implement_the_target() {
    let g = fixtures::cycle4();
    let phi = perm(&[("a", "b"), ("b", "a"), ("c", "c"), ("d", "d")]);
    assert!(!verify_implements(&g, &OpSequence::default(), &phi, &g).unwrap());
    let twist = WhitneyOp::FiniteTwist {
        x: VertexId::new("1"),
        y: VertexId::new("3"),
        side: whitney::graph::edge_set(["c", "d"]),
    };
    let good = synthesize_twists(&g, &g, &phi).unwrap();
    assert!(verify_implements(&g, &good, &phi, &g).unwrap());
    let other = perm(&[("a", "a"), ("b", "c"), ("c", "b"), ("d", "d")]);
    let wrong = synthesize_twists(&g, &g, &other).unwrap();
    assert!(!verify_implements(&g, &wrong, &phi, &g).unwrap());
    assert!(
        !verify_implements(&g, &OpSequence::new(vec![twist.clone(), twist]), &phi, &g).unwrap()
    );
}

#[test]
fn empty_sequence_implements_the_identity() {
    let g = fixtures::theta();
    assert!(
        verify_implements(&g, &OpSequence::default(), &EdgeBijection::identity(&g), &g).unwrap()
    );
}

#[test]
fn reversed_branch_swap_on_theta_takes_one_twist() {
    let g = fixtures::theta();
    let phi = perm(&[
        ("xa", "by"),
        ("ay", "xb"),
        ("xb", "ay"),
        ("by", "xa"),
        ("xc", "xc"),
        ("cy", "cy"),
    ]);
    let seq = synthesize_twists(&g, &g, &phi).unwrap();
    assert_eq!(seq.ops.len(), 1, "{seq:?}");
    let WhitneyOp::FiniteTwist { x, y, .. } = &seq.ops[0] else {
        panic!("expected a finite twist")
    };
    assert_eq!((x.as_str(), y.as_str()), ("x", "y"));
    assert!(verify_implements(&g, &seq, &phi, &g).unwrap());
}

#[test]
fn synthesis_recovers_random_twist_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let g = common::random_two_connected(&mut rng, 12);
        let twisted = common::random_twists(&g, &mut rng, 4);
        let (h, phi) = common::scramble(&twisted, &mut rng);
        let seq = synthesize_twists(&g, &h, &phi).unwrap();
        assert!(verify_implements(&g, &seq, &phi, &h).unwrap());
        let t = tutte_decompose(&g.core).unwrap();
        let cycle_edges: usize = t
            .nodes
            .values()
            .filter(|n| n.kind == NodeKind::Cycle)
            .map(|n| n.graph.edge_count())
            .sum();
        assert!(seq.ops.len() <= cycle_edges + 2 * t.links.len() + t.nodes.len());
    }
}

#[test]
fn two_triangles_split_into_two_blocks() {
    let d = block_decompose(&fixtures::two_triangles()).unwrap();
    assert_eq!(d.ops.ops.len(), 1);
    assert!(matches!(d.ops.ops[0], WhitneyOp::FiniteSplit { .. }));
    assert_eq!(d.pieces.len(), 2);
    assert!(d
        .pieces
        .iter()
        .all(|p| p.edges.len() == 3 && p.connected && p.kind == PieceKind::Finite));
}

#[test]
fn lollipop_splits_off_the_triangle() {
    let d = block_decompose(&fixtures::lollipop()).unwrap();
    let sizes: Vec<usize> = d.pieces.iter().map(|p| p.edges.len()).sorted().collect();
    assert_eq!(sizes, vec![1, 1, 3]);
    let tri = d.pieces.iter().find(|p| p.edges.len() == 3).unwrap();
    assert_eq!(tri.edges, whitney::graph::edge_set(["ab", "bh", "ha"]));
    assert!(d.pieces.iter().all(|p| p.connected));
    let rayed: Vec<_> = d.pieces.iter().filter(|p| !p.rays.is_empty()).collect();
    assert_eq!(rayed.len(), 1);
    assert!(rayed[0].edges.contains(&EdgeId::new("cd")));
}

#[test]
fn two_ended_lines_split_at_every_separating_vertex() {
    let d = block_decompose(&fixtures::triangle_chain()).unwrap();
    assert_eq!(d.ops.ops.len(), 1);
    let WhitneyOp::TwoEndedSplit { cuts, .. } = &d.ops.ops[0] else {
        panic!("expected a two-ended split")
    };
    assert_eq!(cuts.len(), 2);
    assert_eq!(d.pieces.len(), 3);
    assert!(d.pieces.iter().all(|p| p.edges.len() == 3 && p.connected));
    let line = block_decompose(&fixtures::line5()).unwrap();
    assert_eq!(line.pieces.len(), 4);
    assert_eq!(
        line.pieces
            .iter()
            .filter(|p| p.kind == PieceKind::FewEnds)
            .count(),
        2
    );
}

#[test]
fn many_ended_components_end_weakly_two_connected() {
    for g in [fixtures::fig6(), fixtures::tree3(2, true), fixtures::fig8()] {
        let d = block_decompose(&g).unwrap();
        assert!(d.pieces.iter().all(|p| p.connected), "{:?}", d.pieces);
        let (_, report) = check_sequence_weak_iso(&g, &d.ops).unwrap();
        assert!(report.verdict);
    }
}

#[test]
fn block_splits_keep_every_edge() {
    let g = fixtures::fig8();
    let d = block_decompose(&g).unwrap();
    let all: BTreeMap<EdgeId, usize> = d
        .pieces
        .iter()
        .flat_map(|p| p.edges.iter().cloned())
        .map(|e| (e, 1))
        .collect();
    assert_eq!(all.len(), g.edge_count());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decomposition_is_canonical_under_relabeling(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_two_connected(&mut rng, 12);
        let (h, _) = common::scramble(&g, &mut rng);
        let (a, b) = (tutte_decompose(&g.core).unwrap(), tutte_decompose(&h.core).unwrap());
        prop_assert_eq!(kinds(&a), kinds(&b));
        prop_assert_eq!(a.links.len(), b.links.len());
    }

    #[test]
    fn synthesized_sequences_are_weak_isomorphisms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_two_connected(&mut rng, 10);
        let twisted = common::random_twists(&g, &mut rng, 3);
        let phi = EdgeBijection::identity(&g);
        let seq = synthesize_twists(&g, &twisted, &phi).unwrap();
        let (_, report) = check_sequence_weak_iso(&g, &seq).unwrap();
        prop_assert!(report.verdict);
        prop_assert!(verify_implements(&g, &seq, &phi, &twisted).unwrap());
    }
}
