//! Reductions from Clique to the complement of core verification.
//!
//! Given `(H, k)`, each reducer builds a game and a coalition structure Γ such
//! that Γ is blocked exactly when `H` has a `k`-clique:
//!
//! | target | models          | vertex gadget              | edge gadget          | incidence gadget             |
//! |--------|-----------------|----------------------------|----------------------|------------------------------|
//! | thm1   | min-EQ, min-AL  | `(k-1,k')`-circulant       | same                 | same, plus dummy sets `A_e`  |
//! | thm2   | avg-EQ          | `(k-1,k')`-dome            | `(2,k')`-dome        | `(2,k')`-dome                |
//! | thm3   | avg-AL          | pinched `(2,k')`-dome      | pinched `(2,k')`     | pinched `((k+1)/3,k')`       |
//!
//! with `k' = k*C(k,2) + k + 1` for thm1 and `k' = k + 3*C(k,2) + 1` otherwise.
//! Each gadget has one distinguished player (the vertex player `v'`, edge
//! player `e'` or incidence player `b_{v,e}`); incidence players are adjacent
//! to their vertex and edge players. thm1 adds, per edge `e = xy`, a clique
//! `A_e` of `k-3` dummies adjacent to `e'`, `b_{x,e}` and `b_{y,e}`; thm3 makes
//! `b_{x,e}` and `b_{y,e}` adjacent.
//!
//! Player ids are allocated gadget by gadget: vertex gadgets by vertex id, edge
//! gadgets by edge index, incidence gadgets by vertex then edge index, then
//! the dummy sets by edge index.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::coalition::{Coalition, CoalitionStructure};
use crate::error::{Error, Result};
use crate::gadgets::{make_dome, make_gadget, GadgetKind, GadgetLayout};
use crate::game::{Game, PlayerId, UtilityModel, UtilityValue};
use crate::graph::FriendshipGraph;
use crate::stability::blocks;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionTarget {
    /// Circulant gadgets and dummy sets; correct for min-EQ and min-AL.
    Thm1,
    /// Dome gadgets; correct for avg-EQ.
    Thm2,
    /// Pinched dome gadgets with linked incidence pairs; correct for avg-AL.
    Thm3,
}

impl ReductionTarget {
    /// Utility models under which the reduction is correct.
    pub fn models(self) -> &'static [UtilityModel] {
        match self {
            ReductionTarget::Thm1 => &[UtilityModel::MIN_EQ, UtilityModel::MIN_AL],
            ReductionTarget::Thm2 => &[UtilityModel::AVG_EQ],
            ReductionTarget::Thm3 => &[UtilityModel::AVG_AL],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ReductionTarget::Thm1 => "thm1",
            ReductionTarget::Thm2 => "thm2",
            ReductionTarget::Thm3 => "thm3",
        }
    }

    /// Gadget size `k'` for the (preprocessed) clique size `k`.
    pub fn k_prime(self, k: usize) -> usize {
        let pairs = k * k.saturating_sub(1) / 2;
        match self {
            ReductionTarget::Thm1 => k * pairs + k + 1,
            ReductionTarget::Thm2 | ReductionTarget::Thm3 => k + 3 * pairs + 1,
        }
    }

    /// Size of the blocking coalition built from a `k`-clique.
    pub fn witness_size(self, k: usize) -> usize {
        let pairs = k * k.saturating_sub(1) / 2;
        match self {
            ReductionTarget::Thm1 => k + k * pairs,
            ReductionTarget::Thm2 | ReductionTarget::Thm3 => k + 3 * pairs,
        }
    }
}

impl fmt::Display for ReductionTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ReductionTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "thm1" => Ok(ReductionTarget::Thm1),
            "thm2" => Ok(ReductionTarget::Thm2),
            "thm3" => Ok(ReductionTarget::Thm3),
            other => Err(Error::Validation {
                field: "target".into(),
                message: format!("unknown reduction target `{other}`, expected thm1, thm2 or thm3"),
            }),
        }
    }
}

/// One clique-preserving padding step applied before a reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum PaddingStep {
    /// A vertex adjacent to all others; the clique size grows by one.
    UniversalVertex { k_after: usize },
    /// Vertices without edges; they join no clique of size two or more.
    IsolatedVertices { count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preprocessed {
    pub graph: FriendshipGraph,
    pub k_effective: usize,
    pub log: Vec<PaddingStep>,
}

/// Pads `(h, k)` until it satisfies the assumptions of `target`.
///
/// After every step the padded graph has a `k_effective`-clique iff `h` has a
/// `k`-clique.
pub fn preprocess_clique_instance(h: &FriendshipGraph, k: usize, target: ReductionTarget) -> Result<Preprocessed> {
    if k == 0 {
        return Err(Error::Contract("clique size must be at least 1".into()));
    }
    let mut graph = h.clone();
    let mut k = k;
    let mut log = Vec::new();
    let universal = |graph: &mut FriendshipGraph, k: &mut usize, log: &mut Vec<PaddingStep>| {
        *graph = graph.add_universal_vertex();
        *k += 1;
        log.push(PaddingStep::UniversalVertex { k_after: *k });
    };
    let size = |g: &FriendshipGraph| g.num_vertices() + g.num_edges();
    match target {
        ReductionTarget::Thm1 => {
            while k < 3 || k.is_multiple_of(2) {
                universal(&mut graph, &mut k, &mut log);
            }
        }
        ReductionTarget::Thm2 => {
            while k < 4 {
                universal(&mut graph, &mut k, &mut log);
            }
            if size(&graph) < k * k {
                let count = k * k - size(&graph);
                graph = graph.add_isolated_vertices(count);
                log.push(PaddingStep::IsolatedVertices { count });
            }
        }
        ReductionTarget::Thm3 => {
            while k < 3 || k % 3 != 2 {
                universal(&mut graph, &mut k, &mut log);
            }
            if size(&graph) <= k {
                let count = k + 1 - size(&graph);
                graph = graph.add_isolated_vertices(count);
                log.push(PaddingStep::IsolatedVertices { count });
            }
        }
    }
    Ok(Preprocessed {
        graph,
        k_effective: k,
        log,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "kebab-case")]
pub enum GadgetRole {
    Vertex {
        vertex: usize,
    },
    /// `edge` indexes the sorted edge list of the (preprocessed) source graph.
    Edge {
        edge: usize,
    },
    Incidence {
        vertex: usize,
        edge: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedGadget {
    #[serde(flatten)]
    pub role: GadgetRole,
    pub layout: GadgetLayout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GadgetFamily {
    Vertex,
    Edge,
    Incidence,
}

impl From<GadgetRole> for GadgetFamily {
    fn from(r: GadgetRole) -> Self {
        match r {
            GadgetRole::Vertex { .. } => GadgetFamily::Vertex,
            GadgetRole::Edge { .. } => GadgetFamily::Edge,
            GadgetRole::Incidence { .. } => GadgetFamily::Incidence,
        }
    }
}

/// Role of a player inside a reduced instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlayerClass {
    /// The distinguished player of a gadget of the given family.
    Distinguished(GadgetFamily),
    Mid(GadgetFamily),
    Fringe(GadgetFamily),
    /// Non-fringe base-clique member of a dome.
    Base(GadgetFamily),
    /// Non-distinguished player of a circulant gadget.
    Cycle(GadgetFamily),
    Dummy,
}

/// Output of a reducer: the game, Γ, and where every source object went.
#[derive(Clone, Debug)]
pub struct ReductionArtifact {
    pub target: ReductionTarget,
    pub game: Game,
    pub gamma: CoalitionStructure,
    /// Source graph after preprocessing; vertex and edge indices refer to it.
    pub source: FriendshipGraph,
    pub k_original: usize,
    pub k_effective: usize,
    pub k_prime: usize,
    /// `vertex_players[v]` is `v'`.
    pub vertex_players: Vec<PlayerId>,
    /// `edge_players[e]` is `e'` for the `e`-th source edge.
    pub edge_players: Vec<PlayerId>,
    /// `(vertex, edge index) -> b_{v,e}`.
    pub incidence_players: BTreeMap<(usize, usize), PlayerId>,
    /// `dummy_players[e]` is `A_e` (thm1 only, otherwise empty).
    pub dummy_players: Vec<Vec<PlayerId>>,
    pub gadgets: Vec<PlacedGadget>,
    pub preprocessing_log: Vec<PaddingStep>,
}

pub fn reduce_min_eq_al(h: &FriendshipGraph, k: usize) -> Result<ReductionArtifact> {
    reduce(h, k, ReductionTarget::Thm1)
}

pub fn reduce_avg_eq(h: &FriendshipGraph, k: usize) -> Result<ReductionArtifact> {
    reduce(h, k, ReductionTarget::Thm2)
}

pub fn reduce_avg_al(h: &FriendshipGraph, k: usize) -> Result<ReductionArtifact> {
    reduce(h, k, ReductionTarget::Thm3)
}

/// Preprocesses `(h, k)` for `target` and builds the reduced instance.
pub fn reduce(h: &FriendshipGraph, k: usize, target: ReductionTarget) -> Result<ReductionArtifact> {
    let pre = preprocess_clique_instance(h, k, target)?;
    let mut artifact = build(&pre.graph, pre.k_effective, target)?;
    artifact.k_original = k;
    artifact.preprocessing_log = pre.log;
    Ok(artifact)
}

fn check_preconditions(h: &FriendshipGraph, k: usize, target: ReductionTarget) -> Result<()> {
    let size = h.num_vertices() + h.num_edges();
    let ok = match target {
        ReductionTarget::Thm1 => k >= 3 && k % 2 == 1,
        ReductionTarget::Thm2 => k >= 4 && size >= k * k,
        ReductionTarget::Thm3 => k >= 3 && (k + 1).is_multiple_of(3) && size > k,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "{target} construction needs a preprocessed instance, got k={k}, |V|+|E|={size}"
        )))
    }
}

/// Builds the reduced instance from an already preprocessed `(h, k)`.
pub fn build(h: &FriendshipGraph, k: usize, target: ReductionTarget) -> Result<ReductionArtifact> {
    check_preconditions(h, k, target)?;
    let k_prime = target.k_prime(k);
    let kind_for = |family: GadgetFamily| match (target, family) {
        (ReductionTarget::Thm1, _) => GadgetKind::Circulant { k, k_prime },
        (ReductionTarget::Thm2, GadgetFamily::Vertex) => GadgetKind::Dome { d: k - 1, k_prime },
        (ReductionTarget::Thm2, _) => GadgetKind::Dome { d: 2, k_prime },
        (ReductionTarget::Thm3, GadgetFamily::Incidence) => GadgetKind::PinchedDome {
            d: (k + 1) / 3,
            k_prime,
        },
        (ReductionTarget::Thm3, _) => GadgetKind::PinchedDome { d: 2, k_prime },
    };

    let mut roles: Vec<GadgetRole> = (0..h.num_vertices())
        .map(|vertex| GadgetRole::Vertex { vertex })
        .collect();
    roles.extend((0..h.num_edges()).map(|edge| GadgetRole::Edge { edge }));
    let mut incidences: Vec<(usize, usize)> = h
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(e, &(x, y))| [(x, e), (y, e)])
        .collect();
    incidences.sort_unstable();
    roles.extend(
        incidences
            .iter()
            .map(|&(vertex, edge)| GadgetRole::Incidence { vertex, edge }),
    );

    let mut templates: HashMap<GadgetKind, (FriendshipGraph, GadgetLayout)> = HashMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut gadgets = Vec::with_capacity(roles.len());
    let mut next = 0usize;
    for role in roles {
        let kind = kind_for(role.into());
        let (g, layout) = match templates.entry(kind) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(make_gadget(kind)?),
        };
        edges.extend(g.edges().iter().map(|&(a, b)| (a + next, b + next)));
        gadgets.push(PlacedGadget {
            role,
            layout: layout.offset(next),
        });
        next += layout.size;
    }

    let mut vertex_players = vec![0; h.num_vertices()];
    let mut edge_players = vec![0; h.num_edges()];
    let mut incidence_players = BTreeMap::new();
    for placed in &gadgets {
        let p = placed.layout.distinguished;
        match placed.role {
            GadgetRole::Vertex { vertex } => vertex_players[vertex] = p,
            GadgetRole::Edge { edge } => edge_players[edge] = p,
            GadgetRole::Incidence { vertex, edge } => {
                incidence_players.insert((vertex, edge), p);
            }
        }
    }

    for (&(v, e), &b) in &incidence_players {
        edges.push((b, vertex_players[v]));
        edges.push((b, edge_players[e]));
    }

    let mut dummy_players = Vec::new();
    match target {
        ReductionTarget::Thm1 => {
            for (e, &(x, y)) in h.edges().iter().enumerate() {
                let dummies: Vec<usize> = (next..next + (k - 3)).collect();
                next += k - 3;
                let anchors = [edge_players[e], incidence_players[&(x, e)], incidence_players[&(y, e)]];
                for (idx, &a) in dummies.iter().enumerate() {
                    edges.extend(dummies[idx + 1..].iter().map(|&b| (a, b)));
                    edges.extend(anchors.iter().map(|&t| (a, t)));
                }
                dummy_players.push(dummies);
            }
        }
        ReductionTarget::Thm3 => {
            for (e, &(x, y)) in h.edges().iter().enumerate() {
                edges.push((incidence_players[&(x, e)], incidence_players[&(y, e)]));
            }
        }
        ReductionTarget::Thm2 => {}
    }

    let n = next;
    let graph = FriendshipGraph::new(n, edges)?;
    let mut blocks: Vec<Coalition> = gadgets
        .iter()
        .map(|g| Coalition::from_members(n, g.layout.players()))
        .collect::<Result<_>>()?;
    for dummies in dummy_players.iter().filter(|d| !d.is_empty()) {
        blocks.push(Coalition::from_members(n, dummies.iter().copied())?);
    }
    let gamma = CoalitionStructure::new(n, blocks)?;

    Ok(ReductionArtifact {
        target,
        game: Game::new(graph),
        gamma,
        source: h.clone(),
        k_original: k,
        k_effective: k,
        k_prime,
        vertex_players,
        edge_players,
        incidence_players,
        dummy_players,
        gadgets,
        preprocessing_log: Vec::new(),
    })
}

/// A closed-form expectation on a utility value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    /// Both components known.
    Exact(UtilityValue),
    /// Only the dominant component is tabulated.
    PrimaryExact(Rational64),
    /// Lower bound on the dominant component.
    PrimaryAtLeast(Rational64),
}

impl Expectation {
    pub fn holds(&self, u: &UtilityValue) -> bool {
        match self {
            Expectation::Exact(e) => e == u,
            Expectation::PrimaryExact(p) => &u.primary == p,
            Expectation::PrimaryAtLeast(p) => &u.primary >= p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectedGammaValue {
    pub class: PlayerClass,
    pub valuation: Option<i64>,
    pub utilities: Vec<(UtilityModel, Expectation)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormMismatch {
    pub player: PlayerId,
    pub class: PlayerClass,
    pub what: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClosedFormReport {
    pub players_checked: usize,
    pub values_checked: usize,
    pub mismatches: Vec<ClosedFormMismatch>,
}

impl ReductionArtifact {
    pub fn n(&self) -> usize {
        self.game.n()
    }

    /// Role of every player, indexed by player id.
    pub fn player_classes(&self) -> Vec<PlayerClass> {
        let mut classes = vec![PlayerClass::Dummy; self.n()];
        for placed in &self.gadgets {
            let family = GadgetFamily::from(placed.role);
            let l = &placed.layout;
            let is_circulant = matches!(l.kind, GadgetKind::Circulant { .. });
            for p in l.players() {
                classes[p] = if is_circulant {
                    PlayerClass::Cycle(family)
                } else {
                    PlayerClass::Base(family)
                };
            }
            for &p in &l.mid {
                classes[p] = PlayerClass::Mid(family);
            }
            for &p in &l.fringe {
                classes[p] = PlayerClass::Fringe(family);
            }
            classes[l.distinguished] = PlayerClass::Distinguished(family);
        }
        classes
    }

    /// Distinguished players, mid players and dummies: the only players that
    /// can take part in a blocking coalition.
    pub fn search_candidates(&self) -> Vec<PlayerId> {
        let mut out: Vec<PlayerId> = self
            .gadgets
            .iter()
            .flat_map(|g| std::iter::once(g.layout.distinguished).chain(g.layout.mid.iter().copied()))
            .chain(self.dummy_players.iter().flatten().copied())
            .collect();
        out.sort_unstable();
        out
    }

    /// Closed-form Γ valuations and utilities for every tabulated player class.
    pub fn expected_gamma_values(&self) -> BTreeMap<PlayerId, ExpectedGammaValue> {
        let n = self.n() as i64;
        let k = self.k_effective as i64;
        let kp = self.k_prime as i64;
        let int = Rational64::from_integer;
        let mut out = BTreeMap::new();
        for (p, class) in self.player_classes().into_iter().enumerate() {
            let entry = match self.target {
                ReductionTarget::Thm1 => {
                    let val = match class {
                        PlayerClass::Dummy => (k - 4) * n,
                        _ => (k - 1) * n - (kp - k),
                    };
                    Some(ExpectedGammaValue {
                        class,
                        valuation: Some(val),
                        utilities: vec![
                            (
                                UtilityModel::MIN_EQ,
                                Expectation::Exact(UtilityValue::from_integers(val, 0)),
                            ),
                            (
                                UtilityModel::MIN_AL,
                                Expectation::Exact(UtilityValue::from_integers(val, val)),
                            ),
                        ],
                    })
                }
                ReductionTarget::Thm2 => {
                    let eq = |primary: Rational64| {
                        vec![(
                            UtilityModel::AVG_EQ,
                            Expectation::Exact(UtilityValue::new(primary, int(0))),
                        )]
                    };
                    let two = 2 * n - (kp - 3);
                    match class {
                        PlayerClass::Distinguished(GadgetFamily::Vertex) => {
                            let ratio = Rational64::new(3 * k - 3, k);
                            Some(ExpectedGammaValue {
                                class,
                                valuation: Some((k - 1) * n - (kp - k)),
                                utilities: eq(ratio * n - (int(kp - 1) - ratio)),
                            })
                        }
                        PlayerClass::Distinguished(_) => Some(ExpectedGammaValue {
                            class,
                            valuation: Some(two),
                            utilities: eq(int(two)),
                        }),
                        PlayerClass::Mid(_) => {
                            let ratio = Rational64::new(kp + 1, 3);
                            Some(ExpectedGammaValue {
                                class,
                                valuation: Some(two),
                                utilities: eq(ratio * n - (int(kp - 1) - ratio)),
                            })
                        }
                        PlayerClass::Fringe(GadgetFamily::Vertex) => Some(ExpectedGammaValue {
                            class,
                            valuation: Some((kp - k) * n - (k - 1)),
                            utilities: Vec::new(),
                        }),
                        PlayerClass::Fringe(_) => Some(ExpectedGammaValue {
                            class,
                            valuation: Some((kp - 3) * n - 2),
                            utilities: Vec::new(),
                        }),
                        _ => None,
                    }
                }
                ReductionTarget::Thm3 => {
                    let al = |e: Expectation| vec![(UtilityModel::AVG_AL, e)];
                    match class {
                        PlayerClass::Distinguished(GadgetFamily::Incidence) => {
                            let ratio = Rational64::new(k + 4, 3);
                            Some(ExpectedGammaValue {
                                class,
                                valuation: None,
                                utilities: al(Expectation::PrimaryExact(ratio * n - (int(kp - 1) - ratio))),
                            })
                        }
                        PlayerClass::Distinguished(_) => Some(ExpectedGammaValue {
                            class,
                            valuation: None,
                            utilities: al(Expectation::PrimaryExact(int(3 * n - (kp - 4)))),
                        }),
                        PlayerClass::Mid(_) => {
                            let ratio = Rational64::new(2 * kp - 3, 3);
                            Some(ExpectedGammaValue {
                                class,
                                valuation: None,
                                utilities: al(Expectation::PrimaryAtLeast(ratio * n - (int(kp - 1) - ratio))),
                            })
                        }
                        _ => None,
                    }
                }
            };
            if let Some(e) = entry {
                out.insert(p, e);
            }
        }
        out
    }

    /// Compares engine-computed Γ values with [`expected_gamma_values`](Self::expected_gamma_values).
    pub fn check_closed_forms(&self) -> ClosedFormReport {
        let mut report = ClosedFormReport::default();
        for (p, expected) in self.expected_gamma_values() {
            report.players_checked += 1;
            let home = self.gamma.block_of(p);
            if let Some(val) = expected.valuation {
                report.values_checked += 1;
                let actual = self.game.valuation_unchecked(p, home);
                if actual != val {
                    report.mismatches.push(ClosedFormMismatch {
                        player: p,
                        class: expected.class,
                        what: "valuation".into(),
                        expected: val.to_string(),
                        actual: actual.to_string(),
                    });
                }
            }
            for (model, expectation) in &expected.utilities {
                report.values_checked += 1;
                let actual = self.game.utility_unchecked(p, home, *model);
                if !expectation.holds(&actual) {
                    report.mismatches.push(ClosedFormMismatch {
                        player: p,
                        class: expected.class,
                        what: format!("{model} utility"),
                        expected: format!("{expectation:?}"),
                        actual: format!("{actual:?}"),
                    });
                }
            }
        }
        report
    }

    fn clique_players(&self, clique: &[usize]) -> Vec<PlayerId> {
        let mut members: Vec<PlayerId> = clique.iter().map(|&v| self.vertex_players[v]).collect();
        for (idx, &x) in clique.iter().enumerate() {
            for &y in &clique[idx + 1..] {
                let e = self.source.edge_index(x, y).expect("clique pairs are edges");
                let (a, b) = self.source.edges()[e];
                members.push(self.edge_players[e]);
                members.push(self.incidence_players[&(a, e)]);
                members.push(self.incidence_players[&(b, e)]);
                members.extend(self.dummy_players.get(e).into_iter().flatten().copied());
            }
        }
        members
    }

    /// The blocking coalition built from a `k_effective`-clique of the source.
    ///
    /// Its size and its blocking property under every target model are
    /// checked before it is returned.
    pub fn witness_from_clique(&self, clique: &[usize]) -> Result<Coalition> {
        let mut clique = clique.to_vec();
        clique.sort_unstable();
        clique.dedup();
        if clique.len() != self.k_effective || !self.source.is_clique(&clique)? {
            return Err(Error::Contract(format!(
                "{clique:?} is not a clique of size {} in the preprocessed source graph",
                self.k_effective
            )));
        }
        let witness = Coalition::from_members(self.n(), self.clique_players(&clique))?;
        let expected_size = self.target.witness_size(self.k_effective);
        if witness.len() != expected_size {
            return Err(Error::Invariant(format!(
                "witness has {} players, expected {expected_size}",
                witness.len()
            )));
        }
        for &model in self.target.models() {
            if !blocks(&self.game, &witness, &self.gamma, model)? {
                return Err(Error::Invariant(format!(
                    "clique witness does not block Γ under {model}"
                )));
            }
        }
        Ok(witness)
    }

    /// The subgraph `H_C` of source vertices and edges whose players are in `c`.
    pub fn extract_candidate_subgraph(&self, c: &Coalition) -> Result<CandidateSubgraph> {
        if c.universe() != self.n() {
            return Err(Error::Contract(format!(
                "coalition over {} players used with an instance of {}",
                c.universe(),
                self.n()
            )));
        }
        let vertices: Vec<usize> = (0..self.source.num_vertices())
            .filter(|&v| c.contains(self.vertex_players[v]))
            .collect();
        let edges: Vec<(usize, usize)> = self
            .source
            .edges()
            .iter()
            .enumerate()
            .filter(|&(e, _)| c.contains(self.edge_players[e]))
            .map(|(_, &pair)| pair)
            .collect();
        let present = |v: usize| vertices.binary_search(&v).is_ok();
        let well_formed = edges.iter().all(|&(x, y)| present(x) && present(y));
        let graph = relabelled_subgraph(self.source.num_vertices(), &vertices, &edges)?;
        Ok(CandidateSubgraph {
            vertices,
            edges,
            well_formed,
            graph,
        })
    }
}

/// The graph on `vertices` (renumbered `0..`) with those of `edges` that lie inside it.
fn relabelled_subgraph(universe: usize, vertices: &[usize], edges: &[(usize, usize)]) -> Result<FriendshipGraph> {
    let mut to_new = vec![None; universe];
    for (new, &old) in vertices.iter().enumerate() {
        to_new[old] = Some(new);
    }
    let relabelled = edges.iter().filter_map(|&(a, b)| Some((to_new[a]?, to_new[b]?)));
    FriendshipGraph::new(vertices.len(), relabelled)
}

/// `H_C`, the part of the source graph selected by a coalition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSubgraph {
    /// Source vertices whose vertex player is in the coalition.
    pub vertices: Vec<usize>,
    /// Source edges whose edge player is in the coalition.
    pub edges: Vec<(usize, usize)>,
    /// False when some selected edge has an endpoint whose vertex player is missing.
    pub well_formed: bool,
    /// `vertices` relabelled to `0..`, with the selected edges between them.
    pub graph: FriendshipGraph,
}

/// A game on `outside.num_vertices() + k'` players: a `(d,k')`-dome on
/// players `0..k'` (top `0`) next to `outside` shifted by `k'`.
///
/// The top player is linked to the outside players in `top_links` (outside
/// ids); nothing else crosses the gadget boundary. Γ holds the dome and the
/// given outside blocks.
pub fn embed_dome_gadget(
    d: usize,
    k_prime: usize,
    outside: &FriendshipGraph,
    top_links: &[usize],
    outside_blocks: &[Vec<usize>],
) -> Result<(Game, CoalitionStructure, GadgetLayout)> {
    let (dome, layout) = make_dome(d, k_prime)?;
    let n = k_prime + outside.num_vertices();
    let mut edges: Vec<(usize, usize)> = dome.edges().to_vec();
    edges.extend(outside.edges().iter().map(|&(a, b)| (a + k_prime, b + k_prime)));
    for &t in top_links {
        if t >= outside.num_vertices() {
            return Err(Error::Structural(format!(
                "top link to outside player {t} is out of range"
            )));
        }
        edges.push((layout.distinguished, t + k_prime));
    }
    let mut blocks = vec![Coalition::from_members(n, layout.players())?];
    for b in outside_blocks {
        blocks.push(Coalition::from_members(n, b.iter().map(|&p| p + k_prime))?);
    }
    let gamma = CoalitionStructure::new(n, blocks)?;
    Ok((Game::new(FriendshipGraph::new(n, edges)?), gamma, layout))
}
