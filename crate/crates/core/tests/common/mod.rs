//! Test-only reference implementations and instance generators.
//!
//! Everything here works on adjacency matrices and member lists and shares no
//! code with the engine.

#![allow(dead_code)]

use ahg_core::{Aggregate, Altruism, CoalitionStructure, FriendshipGraph, Game, UtilityModel};
use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Naive {
    pub n: usize,
    pub adj: Vec<Vec<bool>>,
}

impl Naive {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        Naive { n, adj }
    }

    pub fn from_graph(g: &FriendshipGraph) -> Self {
        Self::new(g.num_vertices(), g.edges())
    }

    pub fn val(&self, i: usize, members: &[usize]) -> i64 {
        let mut v = 0;
        for &j in members {
            if j != i {
                v += if self.adj[i][j] { self.n as i64 } else { -1 };
            }
        }
        v
    }

    /// Utility pair ordered so that lexicographic comparison is the preference.
    pub fn utility(&self, i: usize, members: &[usize], model: UtilityModel) -> (Rational64, Rational64) {
        let own = self.val(i, members);
        let friends: Vec<i64> = members
            .iter()
            .filter(|&&j| self.adj[i][j])
            .map(|&j| self.val(j, members))
            .collect();
        let combine = |vals: &[i64]| -> Rational64 {
            if vals.is_empty() {
                return Rational64::from_integer(0);
            }
            match model.aggregate {
                Aggregate::Avg => Rational64::new(vals.iter().sum(), vals.len() as i64),
                Aggregate::Min => Rational64::from_integer(*vals.iter().min().unwrap()),
            }
        };
        match model.altruism {
            Altruism::SelfishFirst => (own.into(), combine(&friends)),
            Altruism::EqualTreatment => {
                let mut all = friends.clone();
                all.push(own);
                (combine(&all), 0.into())
            }
            Altruism::Altruistic => (combine(&friends), own.into()),
        }
    }

    pub fn blocks(&self, members: &[usize], home: &[Vec<usize>], model: UtilityModel) -> bool {
        !members.is_empty()
            && members
                .iter()
                .all(|&i| self.utility(i, members, model) > self.utility(i, &home[i], model))
    }
}

/// `home[i]` is the member list of the block containing `i`.
pub fn homes(gamma: &CoalitionStructure) -> Vec<Vec<usize>> {
    let mut home = vec![Vec::new(); gamma.num_players()];
    for block in gamma.to_lists() {
        for &p in &block {
            home[p] = block.clone();
        }
    }
    home
}

pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> FriendshipGraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    FriendshipGraph::new(n, edges).unwrap()
}

pub fn random_partition<R: Rng>(rng: &mut R, n: usize) -> CoalitionStructure {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let blocks = rng.gen_range(1..=n);
    let mut lists = vec![Vec::new(); blocks];
    for (idx, p) in order.into_iter().enumerate() {
        let b = if idx < blocks { idx } else { rng.gen_range(0..blocks) };
        lists[b].push(p);
    }
    CoalitionStructure::from_lists(n, &lists).unwrap()
}

pub fn random_instance<R: Rng>(rng: &mut R, max_n: usize) -> (Game, CoalitionStructure) {
    let n = rng.gen_range(1..=max_n);
    let p = rng.gen_range(0.15..0.85);
    let g = random_graph(rng, n, p);
    (Game::new(g), random_partition(rng, n))
}

/// The five-player game with edges a-b, a-c, b-c, b-d, c-d, d-e.
pub fn example1() -> (Game, Naive) {
    let edges = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)];
    (
        Game::new(FriendshipGraph::new(5, edges).unwrap()),
        Naive::new(5, &edges),
    )
}

/// Nonempty subsets of `0..n` as member lists.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&p| mask >> p & 1 == 1).collect())
        .collect()
}
