//! Gadget families used by the Clique reductions, plus the degree/size
//! clique test the reductions rely on.
//!
//! Every constructor returns the gadget as a standalone graph with local ids
//! `0..size` together with a [`GadgetLayout`] naming the roles of its
//! players. Layouts are shifted into place with [`GadgetLayout::offset`].
//!
//! Local id layout:
//! - circulant: players `0..k'` along the base cycle, distinguished player `0`;
//! - dome: top `0`, mids `1..=d`, base clique `d+1..k'`;
//! - pinched dome: top `0`, the single mid `1`, base clique `2..k'`.
//!
//! In both dome kinds the fringe players are the `d` lowest-id base members
//! and mid `p_i` (or the single pinched mid) is adjacent to fringe `p'_i`.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::FriendshipGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GadgetKind {
    /// Degree `k-1` circulant on `k_prime` players.
    Circulant {
        k: usize,
        k_prime: usize,
    },
    Dome {
        d: usize,
        k_prime: usize,
    },
    PinchedDome {
        d: usize,
        k_prime: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetLayout {
    #[serde(flatten)]
    pub kind: GadgetKind,
    /// The only player allowed friends outside the gadget.
    pub distinguished: usize,
    pub top: Option<usize>,
    pub mid: Vec<usize>,
    pub fringe: Vec<usize>,
    /// Base cycle (circulant) or base clique (domes).
    pub base: Vec<usize>,
    pub size: usize,
}

impl GadgetLayout {
    /// Same layout with every id shifted by `by`.
    pub fn offset(&self, by: usize) -> GadgetLayout {
        let shift = |v: &Vec<usize>| v.iter().map(|&p| p + by).collect();
        GadgetLayout {
            kind: self.kind,
            distinguished: self.distinguished + by,
            top: self.top.map(|t| t + by),
            mid: shift(&self.mid),
            fringe: shift(&self.fringe),
            base: shift(&self.base),
            size: self.size,
        }
    }

    /// First id covered by this layout (the distinguished player for every kind).
    pub fn first_player(&self) -> usize {
        self.distinguished
    }

    pub fn players(&self) -> std::ops::Range<usize> {
        self.first_player()..self.first_player() + self.size
    }

    pub fn is_fringe(&self, p: usize) -> bool {
        self.fringe.contains(&p)
    }
}

pub fn make_circulant(k: usize, k_prime: usize) -> Result<(FriendshipGraph, GadgetLayout)> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(Error::Parameter(format!("circulant gadget needs odd k >= 3, got {k}")));
    }
    if k_prime <= k {
        return Err(Error::Parameter(format!(
            "circulant gadget needs k' > k, got k={k}, k'={k_prime}"
        )));
    }
    let reach = (k - 1) / 2;
    let edges = (0..k_prime).flat_map(|i| (1..=reach).map(move |s| (i, (i + s) % k_prime)));
    let g = FriendshipGraph::new(k_prime, edges)?;
    let layout = GadgetLayout {
        kind: GadgetKind::Circulant { k, k_prime },
        distinguished: 0,
        top: None,
        mid: Vec::new(),
        fringe: Vec::new(),
        base: (0..k_prime).collect(),
        size: k_prime,
    };
    Ok((g, layout))
}

fn check_dome_params(d: usize, k_prime: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Parameter("dome gadget needs d >= 1".into()));
    }
    if k_prime <= 2 * d + 1 {
        return Err(Error::Parameter(format!(
            "dome gadget needs k' > 2d+1, got d={d}, k'={k_prime}"
        )));
    }
    Ok(())
}

fn base_clique_edges(base: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    base.iter()
        .enumerate()
        .flat_map(move |(idx, &a)| base[idx + 1..].iter().map(move |&b| (a, b)))
}

/// `(d,k')`-dome: top, `d` mids, base clique of `k'-d-1`.
pub fn make_dome(d: usize, k_prime: usize) -> Result<(FriendshipGraph, GadgetLayout)> {
    check_dome_params(d, k_prime)?;
    let mid: Vec<usize> = (1..=d).collect();
    let base: Vec<usize> = (d + 1..k_prime).collect();
    let fringe: Vec<usize> = base[..d].to_vec();
    let mut edges: Vec<(usize, usize)> = mid.iter().map(|&m| (0, m)).collect();
    edges.extend(mid.iter().zip(&fringe).map(|(&m, &f)| (m, f)));
    edges.extend(base_clique_edges(&base));
    let g = FriendshipGraph::new(k_prime, edges)?;
    let layout = GadgetLayout {
        kind: GadgetKind::Dome { d, k_prime },
        distinguished: 0,
        top: Some(0),
        mid,
        fringe,
        base,
        size: k_prime,
    };
    Ok((g, layout))
}

/// Pinched `(d,k')`-dome: top, one mid adjacent to all `d` fringe players,
/// base clique of `k'-2`. The gadget has `k'` players in total.
pub fn make_pinched_dome(d: usize, k_prime: usize) -> Result<(FriendshipGraph, GadgetLayout)> {
    check_dome_params(d, k_prime)?;
    let base: Vec<usize> = (2..k_prime).collect();
    let fringe: Vec<usize> = base[..d].to_vec();
    let mut edges = vec![(0, 1)];
    edges.extend(fringe.iter().map(|&f| (1, f)));
    edges.extend(base_clique_edges(&base));
    let g = FriendshipGraph::new(k_prime, edges)?;
    let layout = GadgetLayout {
        kind: GadgetKind::PinchedDome { d, k_prime },
        distinguished: 0,
        top: Some(0),
        mid: vec![1],
        fringe,
        base,
        size: k_prime,
    };
    Ok((g, layout))
}

pub fn make_gadget(kind: GadgetKind) -> Result<(FriendshipGraph, GadgetLayout)> {
    match kind {
        GadgetKind::Circulant { k, k_prime } => make_circulant(k, k_prime),
        GadgetKind::Dome { d, k_prime } => make_dome(d, k_prime),
        GadgetKind::PinchedDome { d, k_prime } => make_pinched_dome(d, k_prime),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliqueTestOutcome {
    HypothesisFailed,
    CliqueOfSizeK,
}

/// Clique test from size and degree bounds.
///
/// A graph with at least one vertex, `|V| + alpha*|E| <= k + alpha*C(k,2)` and
/// minimum degree `>= k-1` is exactly `K_k`. The conclusion is re-checked and a
/// failure is reported as [`Error::Invariant`]. The empty graph only
/// qualifies for `k = 0`.
pub fn clique_from_size_and_degree(g: &FriendshipGraph, alpha: Rational64, k: usize) -> Result<CliqueTestOutcome> {
    if alpha < Rational64::from_integer(1) {
        return Err(Error::Parameter(format!("alpha must be at least 1, got {alpha}")));
    }
    let n = g.num_vertices();
    if n == 0 {
        return Ok(if k == 0 {
            CliqueTestOutcome::CliqueOfSizeK
        } else {
            CliqueTestOutcome::HypothesisFailed
        });
    }
    let k_i = k as i64;
    let lhs = Rational64::from_integer(n as i64) + alpha * (g.num_edges() as i64);
    let rhs = Rational64::from_integer(k_i) + alpha * (k_i * (k_i - 1) / 2);
    let degree_ok = g.min_degree().unwrap_or(0) as i64 >= k_i - 1;
    if lhs > rhs || !degree_ok {
        return Ok(CliqueTestOutcome::HypothesisFailed);
    }
    let all: Vec<usize> = (0..n).collect();
    if n != k || !g.is_clique(&all)? {
        return Err(Error::Invariant(format!(
            "size/degree bound held for k={k} but the {n}-vertex graph is not K_{k}"
        )));
    }
    Ok(CliqueTestOutcome::CliqueOfSizeK)
}
