mod common;

use ahg_core::game::{minimal_weight, to_numeric};
use ahg_core::stability::{self, oracle, verify, SearchLimits};
use ahg_core::{
    BlockingKind, Coalition, CoalitionStructure, FriendshipGraph, Game, Strategy as Search, UtilityModel, VerdictStatus,
};
use common::{homes, Naive};
use proptest::prelude::*;

fn model() -> impl Strategy<Value = UtilityModel> {
    prop::sample::select(UtilityModel::ALL.to_vec())
}

/// Graph plus coalition structure on `1..=max_n` players.
fn instance(max_n: usize) -> impl Strategy<Value = (Game, CoalitionStructure)> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            prop::collection::vec(any::<bool>(), pairs),
            prop::collection::vec(0..n, n),
        )
            .prop_map(move |(present, labels)| {
                let all = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
                let edges: Vec<_> = all.zip(&present).filter(|(_, &p)| p).map(|(e, _)| e).collect();
                let mut lists = vec![Vec::new(); n];
                for (p, &l) in labels.iter().enumerate() {
                    lists[l].push(p);
                }
                lists.retain(|l| !l.is_empty());
                (
                    Game::new(FriendshipGraph::new(n, edges).unwrap()),
                    CoalitionStructure::from_lists(n, &lists).unwrap(),
                )
            })
    })
}

fn members_of(n: usize, mask: u32) -> Vec<usize> {
    (0..n).filter(|&p| mask >> p & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exhaustive_agrees_with_brute_force((game, gamma) in instance(8), m in model(), weak in any::<bool>()) {
        let kind = if weak { BlockingKind::Weak } else { BlockingKind::Strict };
        let fast = verify(&game, &gamma, m, &Search::Exhaustive, kind, SearchLimits::default()).unwrap();
        let slow = oracle::brute_force(&game, &gamma, m, kind).unwrap();
        prop_assert_eq!(fast.status, slow.status);
        if let Some(c) = &fast.certificate {
            let ok = match kind {
                BlockingKind::Strict => stability::blocks(&game, c, &gamma, m).unwrap(),
                BlockingKind::Weak => stability::weakly_blocks(&game, c, &gamma, m).unwrap(),
            };
            prop_assert!(ok);
        }
    }

    #[test]
    fn blocks_matches_reference((game, gamma) in instance(7), m in model(), mask in 1u32..128) {
        let n = game.n();
        let members = members_of(n, mask);
        prop_assume!(!members.is_empty());
        let naive = Naive::from_graph(game.graph());
        let c = Coalition::from_members(n, members.iter().copied()).unwrap();
        prop_assert_eq!(
            stability::blocks(&game, &c, &gamma, m).unwrap(),
            naive.blocks(&members, &homes(&gamma), m)
        );
        for &i in &members {
            let u = game.utility(i, &c, m).unwrap();
            prop_assert_eq!((u.primary, u.secondary), naive.utility(i, &members, m));
        }
    }

    #[test]
    fn parallel_deterministic_matches_sequential((game, gamma) in instance(10), m in model(), threads in 1usize..5) {
        let seq = stability::verify_core(&game, &gamma, m, &Search::Exhaustive).unwrap();
        let par = stability::verify_core(
            &game,
            &gamma,
            m,
            &Search::ExhaustiveParallel { threads: Some(threads), deterministic: true },
        )
        .unwrap();
        prop_assert_eq!(seq.status, par.status);
        prop_assert_eq!(seq.certificate, par.certificate);
        let any = stability::verify_core(
            &game,
            &gamma,
            m,
            &Search::ExhaustiveParallel { threads: Some(threads), deterministic: false },
        )
        .unwrap();
        prop_assert_eq!(seq.status, any.status);
    }

    #[test]
    fn restriction_is_sound((game, gamma) in instance(8), m in model(), pick in any::<u8>(), max_size in 1usize..5) {
        let n = game.n();
        let candidates = members_of(n, pick as u32);
        let full = stability::verify_core(&game, &gamma, m, &Search::Exhaustive).unwrap();
        let restricted = stability::verify_core(
            &game,
            &gamma,
            m,
            &Search::Restricted { max_size, candidates: candidates.clone() },
        )
        .unwrap();
        match restricted.status {
            VerdictStatus::Blocked => {
                prop_assert_eq!(full.status, VerdictStatus::Blocked);
                let c = restricted.certificate.unwrap();
                prop_assert!(c.len() <= max_size);
                prop_assert!(c.members().all(|p| candidates.contains(&p)));
            }
            VerdictStatus::StableUpToBound => prop_assert!(restricted.certificate.is_none()),
            VerdictStatus::Stable => prop_assert!(false, "restricted search never claims stability"),
        }
        let everything = stability::verify_core(
            &game,
            &gamma,
            m,
            &Search::Restricted { max_size: n, candidates: (0..n).collect() },
        )
        .unwrap();
        prop_assert_eq!(everything.status == VerdictStatus::Blocked, full.status == VerdictStatus::Blocked);
    }

    #[test]
    fn grand_coalition_of_a_complete_graph_is_stable(n in 1usize..=8, m in model()) {
        let game = Game::new(FriendshipGraph::complete(n));
        let v = stability::verify_core(&game, &CoalitionStructure::grand(n), m, &Search::Exhaustive).unwrap();
        prop_assert_eq!(v.status, VerdictStatus::Stable);
    }

    #[test]
    fn valuation_orders_by_friends_then_enemies((game, _) in instance(6), a in 1u32..64, b in 1u32..64, i in 0usize..6) {
        let n = game.n();
        prop_assume!(i < n);
        let ca = Coalition::from_members(n, members_of(n, a).into_iter().chain([i]).filter(|&p| p < n)).unwrap();
        let cb = Coalition::from_members(n, members_of(n, b).into_iter().chain([i]).filter(|&p| p < n)).unwrap();
        let count = |c: &Coalition| {
            let f = c.members().filter(|&j| game.graph().has_edge(i, j)).count() as i64;
            (f, c.len() as i64 - 1 - f)
        };
        let ((fa, ea), (fb, eb)) = (count(&ca), count(&cb));
        let by_counts = fa.cmp(&fb).then(eb.cmp(&ea));
        prop_assert_eq!(game.valuation(i, &ca).unwrap().cmp(&game.valuation(i, &cb).unwrap()), by_counts);
    }

    #[test]
    fn weighted_form_preserves_the_order((game, _) in instance(5), a in 1u32..32, b in 1u32..32, i in 0usize..5) {
        let n = game.n();
        prop_assume!(i < n);
        let w = minimal_weight(n);
        let ca = Coalition::from_members(n, members_of(n, a).into_iter().chain([i]).filter(|&p| p < n)).unwrap();
        let cb = Coalition::from_members(n, members_of(n, b).into_iter().chain([i]).filter(|&p| p < n)).unwrap();
        for m in UtilityModel::ALL {
            let (ua, ub) = (game.utility(i, &ca, m).unwrap(), game.utility(i, &cb, m).unwrap());
            prop_assert_eq!(ua.cmp(&ub), to_numeric(&ua, m, &w).cmp(&to_numeric(&ub, m, &w)));
        }
    }

    #[test]
    fn deviation_keeps_other_blocks((game, gamma) in instance(8), mask in 1u32..256) {
        let n = game.n();
        let members = members_of(n, mask);
        prop_assume!(!members.is_empty());
        let c = Coalition::from_members(n, members).unwrap();
        let after = gamma.move_to_empty(&c).unwrap();
        for b in gamma.blocks() {
            if !b.intersects(&c) {
                prop_assert!(after.blocks().contains(b));
            }
        }
    }
}
