mod common;

use std::collections::BTreeSet;

use ahg_core::gadgets::{clique_from_size_and_degree, CliqueTestOutcome};
use ahg_core::reductions::{preprocess_clique_instance, reduce, PlayerClass, ReductionArtifact, ReductionTarget};
use ahg_core::stability::{blocks, verify_core};
use ahg_core::{FriendshipGraph, Strategy as Search, UtilityModel, VerdictStatus};
use num_rational::Rational64;
use proptest::prelude::*;

const TARGETS: [ReductionTarget; 3] = [ReductionTarget::Thm1, ReductionTarget::Thm2, ReductionTarget::Thm3];

fn graph(max_n: usize) -> impl Strategy<Value = FriendshipGraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |present| {
            let all = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
            FriendshipGraph::new(n, all.zip(present).filter(|(_, p)| *p).map(|(e, _)| e)).unwrap()
        })
    })
}

/// Small source graph with at least one edge and a planted clique of size `k`.
fn planted(n: usize, k: usize, extra: &[(usize, usize)]) -> FriendshipGraph {
    let clique = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b)));
    FriendshipGraph::new(n, clique.chain(extra.iter().copied())).unwrap()
}

fn outside_friends(r: &ReductionArtifact, p: usize) -> Vec<usize> {
    let home = r.gamma.block_of(p);
    r.game.friends(p).ones().filter(|&q| !home.contains(q)).collect()
}

fn check_structure(r: &ReductionArtifact) {
    let classes = r.player_classes();
    let gadget_players: usize = r.gadgets.iter().map(|g| g.layout.size).sum();
    let dummies: usize = r.dummy_players.iter().map(Vec::len).sum();
    assert_eq!(gadget_players + dummies, r.n());
    assert_eq!(
        r.gamma.blocks().len(),
        r.gadgets.len() + r.dummy_players.iter().filter(|d| !d.is_empty()).count()
    );
    for (p, &class) in classes.iter().enumerate() {
        let outside = outside_friends(r, p);
        match class {
            PlayerClass::Distinguished(_) | PlayerClass::Dummy => {}
            other => assert!(
                outside.is_empty(),
                "{other:?} player {p} has friends {outside:?} outside its gadget"
            ),
        }
    }
}

/// The part of the graph on V'∪E'∪B is the source with every edge subdivided once.
fn check_subdivision(r: &ReductionArtifact) {
    let v_set: BTreeSet<usize> = r.vertex_players.iter().copied().collect();
    let e_set: BTreeSet<usize> = r.edge_players.iter().copied().collect();
    let b_set: BTreeSet<usize> = r.incidence_players.values().copied().collect();
    let all: BTreeSet<usize> = v_set.iter().chain(&e_set).chain(&b_set).copied().collect();
    let mut expected = BTreeSet::new();
    for (&(v, e), &b) in &r.incidence_players {
        expected.insert((b.min(r.vertex_players[v]), b.max(r.vertex_players[v])));
        expected.insert((b.min(r.edge_players[e]), b.max(r.edge_players[e])));
    }
    let actual: BTreeSet<(usize, usize)> = r
        .game
        .graph()
        .edges()
        .iter()
        .copied()
        .filter(|(a, b)| all.contains(a) && all.contains(b))
        .collect();
    assert_eq!(actual, expected);
    for (v, &p) in r.vertex_players.iter().enumerate() {
        assert_eq!(outside_friends(r, p).len(), r.source.degree(v));
    }
}

#[test]
fn thm1_degree_discipline() {
    let source = planted(6, 5, &[(4, 5), (0, 5)]);
    let r = reduce(&source, 5, ReductionTarget::Thm1).unwrap();
    let k = r.k_effective;
    assert_eq!(k, 5);
    let n_expected = (source.num_vertices() + 3 * source.num_edges()) * r.k_prime + source.num_edges() * (k - 3);
    assert_eq!(r.n(), n_expected);
    for g in &r.gadgets {
        for p in g.layout.players() {
            let inside = r
                .game
                .friends(p)
                .ones()
                .filter(|q| g.layout.players().contains(q))
                .count();
            assert_eq!(inside, k - 1);
        }
    }
    for (&(_, e), &b) in &r.incidence_players {
        let outside = outside_friends(&r, b);
        assert_eq!(outside.len(), k - 1);
        assert!(r.dummy_players[e].iter().all(|d| outside.contains(d)));
    }
    for (e, dummies) in r.dummy_players.iter().enumerate() {
        assert_eq!(dummies.len(), k - 3);
        assert_eq!(outside_friends(&r, r.edge_players[e]).len(), 2 + (k - 3));
    }
    check_structure(&r);
}

#[test]
fn thm1_and_thm2_subdivide_the_source() {
    let source = planted(5, 3, &[(2, 3), (3, 4)]);
    check_subdivision(&reduce(&source, 3, ReductionTarget::Thm1).unwrap());
    check_subdivision(&reduce(&source, 4, ReductionTarget::Thm2).unwrap());
}

#[test]
fn thm3_links_incidence_pairs() {
    let source = planted(4, 3, &[(2, 3)]);
    let r = reduce(&source, 3, ReductionTarget::Thm3).unwrap();
    check_structure(&r);
    for (e, &(x, y)) in r.source.edges().iter().enumerate() {
        let bx = r.incidence_players[&(x, e)];
        let by = r.incidence_players[&(y, e)];
        let mut expected = vec![r.vertex_players[x], r.edge_players[e], by];
        expected.sort_unstable();
        assert_eq!(outside_friends(&r, bx), expected);
    }
}

#[test]
fn restricted_search_finds_no_small_deviation_without_a_triangle() {
    let r = reduce(&FriendshipGraph::cycle(4).unwrap(), 3, ReductionTarget::Thm1).unwrap();
    for model in [UtilityModel::MIN_EQ, UtilityModel::MIN_AL] {
        let v = verify_core(
            &r.game,
            &r.gamma,
            model,
            &Search::Restricted {
                max_size: 5,
                candidates: r.search_candidates(),
            },
        )
        .unwrap();
        assert_eq!(v.status, VerdictStatus::StableUpToBound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn preprocessing_preserves_clique_existence(h in graph(10), k in 1usize..=5, t in 0usize..3) {
        let target = TARGETS[t];
        let p = preprocess_clique_instance(&h, k, target).unwrap();
        prop_assert_eq!(
            h.find_clique(k).unwrap().is_some(),
            p.graph.find_clique(p.k_effective).unwrap().is_some()
        );
        let size = p.graph.num_vertices() + p.graph.num_edges();
        match target {
            ReductionTarget::Thm1 => prop_assert!(p.k_effective >= 3 && p.k_effective % 2 == 1),
            ReductionTarget::Thm2 => prop_assert!(p.k_effective >= 4 && size >= p.k_effective * p.k_effective),
            ReductionTarget::Thm3 => prop_assert!(p.k_effective % 3 == 2 && size > p.k_effective),
        }
    }

    #[test]
    fn closed_forms_and_structure_hold(h in graph(5), t in 0usize..3) {
        let target = TARGETS[t];
        let k = match target {
            ReductionTarget::Thm2 => 4,
            _ => 3,
        };
        let r = reduce(&h, k, target).unwrap();
        check_structure(&r);
        let report = r.check_closed_forms();
        prop_assert!(report.mismatches.is_empty(), "{:?}", report.mismatches);
    }

    #[test]
    fn witnesses_block_and_recover_the_clique(extra in prop::collection::vec((0usize..6, 0usize..6), 0..6), t in 0usize..3) {
        let target = TARGETS[t];
        let k = match target {
            ReductionTarget::Thm1 => 3,
            ReductionTarget::Thm2 => 4,
            ReductionTarget::Thm3 => 5,
        };
        let extra: Vec<_> = extra.into_iter().filter(|(a, b)| a != b).collect();
        let h = planted(6, k, &extra);
        let r = reduce(&h, k, target).unwrap();
        let clique = r.source.find_clique(r.k_effective).unwrap().expect("planted clique survives padding");
        let w = r.witness_from_clique(&clique).unwrap();
        prop_assert_eq!(w.len(), target.witness_size(r.k_effective));
        for &model in target.models() {
            prop_assert!(blocks(&r.game, &w, &r.gamma, model).unwrap());
        }
        let hc = r.extract_candidate_subgraph(&w).unwrap();
        prop_assert!(hc.well_formed);
        prop_assert_eq!(hc.vertices, clique);
        let alpha = match target {
            ReductionTarget::Thm1 => Rational64::from_integer(r.k_effective as i64),
            _ => Rational64::from_integer(3),
        };
        prop_assert_eq!(
            clique_from_size_and_degree(&hc.graph, alpha, r.k_effective).unwrap(),
            CliqueTestOutcome::CliqueOfSizeK
        );
    }
}
