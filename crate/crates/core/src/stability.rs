//! Blocking predicates and (strict) core verification with certificates.
//!
//! All strategies share one search kernel. Candidate players are mapped to
//! local indices `0..m` (`m <= 64`) and a coalition is a `u64` mask over them.
//! Because a coalition only ever contains candidates, a member's friend count
//! inside it is a popcount of its local adjacency row, which makes one
//! blocking test `O(|C|)` word operations.
//!
//! Coalitions are visited by ascending size, then lexicographically by their
//! sorted member lists, so the first certificate found is reproducible. The
//! parallel strategy cuts each size level into chunks sharing a two-element
//! prefix; chunks are ordered like the sequential scan, which lets the
//! deterministic mode return exactly the sequential certificate.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::coalition::{Coalition, CoalitionStructure};
use crate::error::{Error, Result};
use crate::game::{Aggregate, Altruism, Game, PlayerId, UtilityModel, UtilityValue};

/// Default guard for strategies that enumerate all `2^n - 1` coalitions.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 25;
/// Hard limit on the number of candidate players of any search.
pub const MAX_CANDIDATES: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    Exhaustive,
    ExhaustiveParallel {
        /// Worker threads; `None` uses the global pool.
        threads: Option<usize>,
        /// Return the same certificate as [`Strategy::Exhaustive`].
        deterministic: bool,
    },
    /// Only coalitions of at most `max_size` players drawn from `candidates`.
    Restricted {
        max_size: usize,
        candidates: Vec<PlayerId>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictStatus {
    Stable,
    Blocked,
    StableUpToBound,
}

impl VerdictStatus {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            VerdictStatus::Stable => 0,
            VerdictStatus::Blocked => 10,
            VerdictStatus::StableUpToBound => 20,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VerdictStatus::Stable => "stable",
            VerdictStatus::Blocked => "blocked",
            VerdictStatus::StableUpToBound => "stable_up_to_bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBound {
    pub max_size: usize,
    pub candidates: Vec<PlayerId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreVerdict {
    pub status: VerdictStatus,
    pub certificate: Option<Coalition>,
    /// Coalitions tested. Approximate under the parallel strategy.
    pub explored: u64,
    pub bound: Option<SearchBound>,
}

/// Strict blocking (every member strictly better off) or weak blocking
/// (nobody worse off, somebody strictly better off).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockingKind {
    Strict,
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub exhaustive_max_players: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            exhaustive_max_players: DEFAULT_EXHAUSTIVE_LIMIT,
        }
    }
}

fn check_instance(game: &Game, gamma: &CoalitionStructure) -> Result<()> {
    if gamma.num_players() != game.n() {
        return Err(Error::Contract(format!(
            "coalition structure over {} players used in a game of {}",
            gamma.num_players(),
            game.n()
        )));
    }
    Ok(())
}

fn check_deviation(game: &Game, c: &Coalition, gamma: &CoalitionStructure) -> Result<()> {
    check_instance(game, gamma)?;
    if c.is_empty() {
        return Err(Error::Contract("blocking coalitions must be nonempty".into()));
    }
    if c.universe() != game.n() {
        return Err(Error::Contract(format!(
            "coalition over {} players used in a game of {}",
            c.universe(),
            game.n()
        )));
    }
    Ok(())
}

fn deviation_test(
    game: &Game,
    c: &Coalition,
    gamma: &CoalitionStructure,
    model: UtilityModel,
    kind: BlockingKind,
) -> bool {
    let mut strict_any = false;
    for i in c.members() {
        let now = game.utility_unchecked(i, gamma.block_of(i), model);
        let after = game.utility_unchecked(i, c, model);
        match (kind, after.cmp(&now)) {
            (_, Ordering::Less) | (BlockingKind::Strict, Ordering::Equal) => return false,
            (_, Ordering::Greater) => strict_any = true,
            (BlockingKind::Weak, Ordering::Equal) => {}
        }
    }
    strict_any
}

/// True iff every member of `c` strictly prefers `c` to its block in `gamma`.
pub fn blocks(game: &Game, c: &Coalition, gamma: &CoalitionStructure, model: UtilityModel) -> Result<bool> {
    check_deviation(game, c, gamma)?;
    Ok(deviation_test(game, c, gamma, model, BlockingKind::Strict))
}

/// True iff no member of `c` is worse off in `c` and at least one is better off.
pub fn weakly_blocks(game: &Game, c: &Coalition, gamma: &CoalitionStructure, model: UtilityModel) -> Result<bool> {
    check_deviation(game, c, gamma)?;
    Ok(deviation_test(game, c, gamma, model, BlockingKind::Weak))
}

pub fn verify_core(
    game: &Game,
    gamma: &CoalitionStructure,
    model: UtilityModel,
    strategy: &Strategy,
) -> Result<CoreVerdict> {
    verify(
        game,
        gamma,
        model,
        strategy,
        BlockingKind::Strict,
        SearchLimits::default(),
    )
}

pub fn verify_strict_core(
    game: &Game,
    gamma: &CoalitionStructure,
    model: UtilityModel,
    strategy: &Strategy,
) -> Result<CoreVerdict> {
    verify(
        game,
        gamma,
        model,
        strategy,
        BlockingKind::Weak,
        SearchLimits::default(),
    )
}

/// Core (`Strict` blocking) or strict-core (`Weak` blocking) verification.
pub fn verify(
    game: &Game,
    gamma: &CoalitionStructure,
    model: UtilityModel,
    strategy: &Strategy,
    kind: BlockingKind,
    limits: SearchLimits,
) -> Result<CoreVerdict> {
    check_instance(game, gamma)?;
    let (candidates, max_size, bounded) = match strategy {
        Strategy::Exhaustive | Strategy::ExhaustiveParallel { .. } => {
            check_exhaustive_size(game.n(), limits)?;
            ((0..game.n()).collect::<Vec<_>>(), game.n(), false)
        }
        Strategy::Restricted { max_size, candidates } => {
            let mut cands = candidates.clone();
            cands.sort_unstable();
            cands.dedup();
            if let Some(&bad) = cands.iter().find(|&&p| p >= game.n()) {
                return Err(Error::Structural(format!(
                    "candidate player {bad} out of range 0..{}",
                    game.n()
                )));
            }
            if cands.len() > MAX_CANDIDATES {
                return Err(Error::Capacity(format!(
                    "restricted search supports at most {MAX_CANDIDATES} candidate players, got {}",
                    cands.len()
                )));
            }
            let size = (*max_size).min(cands.len());
            (cands, size, true)
        }
    };

    let space = SearchSpace::new(game, gamma, model, kind, &candidates);
    let (found, explored) = match strategy {
        Strategy::ExhaustiveParallel { threads, deterministic } => {
            let run = || space.search_parallel(max_size, *deterministic);
            match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(*t)
                    .build()
                    .map_err(|e| Error::Parameter(format!("cannot start {t} worker threads: {e}")))?
                    .install(run),
                None => run(),
            }
        }
        _ => space.search_sequential(max_size),
    };

    let bound = bounded.then(|| SearchBound {
        max_size,
        candidates: candidates.clone(),
    });
    match found {
        Some(mask) => {
            let certificate = space.to_coalition(mask);
            if !deviation_test(game, &certificate, gamma, model, kind) {
                return Err(Error::Invariant(format!(
                    "search kernel reported {certificate} as blocking but the coalition does not block under {model}"
                )));
            }
            Ok(CoreVerdict {
                status: VerdictStatus::Blocked,
                certificate: Some(certificate),
                explored,
                bound,
            })
        }
        None => Ok(CoreVerdict {
            status: if bounded {
                VerdictStatus::StableUpToBound
            } else {
                VerdictStatus::Stable
            },
            certificate: None,
            explored,
            bound,
        }),
    }
}

fn check_exhaustive_size(n: usize, limits: SearchLimits) -> Result<()> {
    let limit = limits.exhaustive_max_players.min(MAX_CANDIDATES - 1);
    if n > limit {
        return Err(Error::Capacity(format!(
            "exhaustive search is limited to {limit} players but the game has {n}; \
             use the restricted strategy with a candidate set and size bound"
        )));
    }
    Ok(())
}

/// Every coalition that (weakly) blocks `gamma`, in search order.
pub fn all_blocking_coalitions(
    game: &Game,
    gamma: &CoalitionStructure,
    model: UtilityModel,
    kind: BlockingKind,
    limits: SearchLimits,
) -> Result<Vec<Coalition>> {
    check_instance(game, gamma)?;
    check_exhaustive_size(game.n(), limits)?;
    let candidates: Vec<_> = (0..game.n()).collect();
    let space = SearchSpace::new(game, gamma, model, kind, &candidates);
    let mut out = Vec::new();
    for size in 1..=game.n() {
        for_each_combination(space.len(), size, &[], |mask| {
            if space.deviates(mask) {
                out.push(space.to_coalition(mask));
            }
            true
        });
    }
    Ok(out)
}

/// Exact fraction with positive denominator; compared by cross-multiplication.
#[derive(Clone, Copy, Debug)]
struct Frac {
    num: i64,
    den: i64,
}

impl Frac {
    fn int(v: i64) -> Self {
        Frac { num: v, den: 1 }
    }

    fn from_ratio(r: &num_rational::Rational64) -> Self {
        Frac {
            num: *r.numer(),
            den: *r.denom(),
        }
    }

    fn cmp(self, other: Frac) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

fn cmp_pair(a: (Frac, Frac), b: (Frac, Frac)) -> Ordering {
    a.0.cmp(b.0).then_with(|| a.1.cmp(b.1))
}

struct SearchSpace {
    players: Vec<PlayerId>,
    universe: usize,
    /// Local adjacency rows over candidate indices.
    adj: Vec<u64>,
    gamma: Vec<(Frac, Frac)>,
    n: i64,
    model: UtilityModel,
    kind: BlockingKind,
}

impl SearchSpace {
    fn new(
        game: &Game,
        gamma: &CoalitionStructure,
        model: UtilityModel,
        kind: BlockingKind,
        candidates: &[PlayerId],
    ) -> Self {
        debug_assert!(candidates.len() <= MAX_CANDIDATES);
        let adj = candidates
            .iter()
            .map(|&p| {
                candidates
                    .iter()
                    .enumerate()
                    .filter(|&(_, &q)| game.graph().has_edge(p, q))
                    .fold(0u64, |acc, (idx, _)| acc | (1u64 << idx))
            })
            .collect();
        let gamma_utils = candidates
            .iter()
            .map(|&p| {
                let UtilityValue { primary, secondary } = game.utility_unchecked(p, gamma.block_of(p), model);
                (Frac::from_ratio(&primary), Frac::from_ratio(&secondary))
            })
            .collect();
        SearchSpace {
            players: candidates.to_vec(),
            universe: game.n(),
            adj,
            gamma: gamma_utils,
            n: game.n() as i64,
            model,
            kind,
        }
    }

    fn len(&self) -> usize {
        self.players.len()
    }

    fn to_coalition(&self, mask: u64) -> Coalition {
        Coalition::from_members(self.universe, bits(mask).map(|idx| self.players[idx]))
            .expect("candidates are in range")
    }

    fn aggregate(&self, vals: &[i64; 64], friends: u64, own: Option<i64>) -> Frac {
        let it = bits(friends).map(|j| vals[j]).chain(own);
        match self.model.aggregate {
            Aggregate::Avg => {
                let (sum, count) = it.fold((0i64, 0i64), |(s, k), v| (s + v, k + 1));
                if count == 0 {
                    Frac::int(0)
                } else {
                    Frac { num: sum, den: count }
                }
            }
            Aggregate::Min => it.min().map_or(Frac::int(0), Frac::int),
        }
    }

    /// Whether `mask` (weakly) blocks, depending on `kind`.
    fn deviates(&self, mask: u64) -> bool {
        let size = mask.count_ones() as i64;
        let mut vals = [0i64; 64];
        for i in bits(mask) {
            let f = (self.adj[i] & mask).count_ones() as i64;
            vals[i] = self.n * f - (size - 1 - f);
        }
        let mut strict_any = false;
        for i in bits(mask) {
            let friends = self.adj[i] & mask;
            let own = vals[i];
            let pair = match self.model.altruism {
                Altruism::SelfishFirst => (Frac::int(own), self.aggregate(&vals, friends, None)),
                Altruism::EqualTreatment => (self.aggregate(&vals, friends, Some(own)), Frac::int(0)),
                Altruism::Altruistic => (self.aggregate(&vals, friends, None), Frac::int(own)),
            };
            match (self.kind, cmp_pair(pair, self.gamma[i])) {
                (_, Ordering::Less) | (BlockingKind::Strict, Ordering::Equal) => return false,
                (_, Ordering::Greater) => strict_any = true,
                (BlockingKind::Weak, Ordering::Equal) => {}
            }
        }
        strict_any
    }

    fn search_sequential(&self, max_size: usize) -> (Option<u64>, u64) {
        let mut explored = 0u64;
        for size in 1..=max_size {
            let mut found = None;
            for_each_combination(self.len(), size, &[], |mask| {
                explored += 1;
                if self.deviates(mask) {
                    found = Some(mask);
                    false
                } else {
                    true
                }
            });
            if found.is_some() {
                return (found, explored);
            }
        }
        (None, explored)
    }

    fn search_parallel(&self, max_size: usize, deterministic: bool) -> (Option<u64>, u64) {
        let explored = AtomicU64::new(0);
        for size in 1..=max_size {
            let prefixes = prefixes(self.len(), size, size.min(2));
            let best = AtomicUsize::new(usize::MAX);
            let scan = |(idx, prefix): (usize, &Vec<usize>)| -> Option<u64> {
                let mut found = None;
                let mut local = 0u64;
                for_each_combination(self.len(), size, prefix, |mask| {
                    local += 1;
                    if local.is_multiple_of(1024) {
                        let b = best.load(AtomicOrdering::Relaxed);
                        if (deterministic && b < idx) || (!deterministic && b != usize::MAX) {
                            return false;
                        }
                    }
                    if self.deviates(mask) {
                        found = Some(mask);
                        false
                    } else {
                        true
                    }
                });
                explored.fetch_add(local, AtomicOrdering::Relaxed);
                if found.is_some() {
                    best.fetch_min(idx, AtomicOrdering::Relaxed);
                }
                found
            };
            let found = if deterministic {
                prefixes.par_iter().enumerate().find_map_first(scan)
            } else {
                prefixes.par_iter().enumerate().find_map_any(scan)
            };
            if found.is_some() {
                return (found, explored.into_inner());
            }
        }
        (None, explored.into_inner())
    }
}

fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// All lexicographically ordered `len`-prefixes of `size`-subsets of `0..m`.
fn prefixes(m: usize, size: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(m: usize, size: usize, len: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        // leave room for the remaining size - cur.len() - 1 elements
        let last = m + cur.len() + 1 - size;
        for v in from..last {
            cur.push(v);
            rec(m, size, len, v + 1, cur, out);
            cur.pop();
        }
    }
    if size <= m {
        rec(m, size, len, 0, &mut cur, &mut out);
    }
    out
}

/// Visits the `size`-subsets of `0..m` that start with `prefix`, in
/// lexicographic order, as bitmasks. Stops when `visit` returns false.
fn for_each_combination(m: usize, size: usize, prefix: &[usize], mut visit: impl FnMut(u64) -> bool) {
    if size > m || prefix.len() > size {
        return;
    }
    let base: u64 = prefix.iter().fold(0, |acc, &v| acc | (1u64 << v));
    let rest = size - prefix.len();
    let start = prefix.last().map_or(0, |&v| v + 1);
    if rest == 0 {
        visit(base);
        return;
    }
    if start + rest > m {
        return;
    }
    let mut idx: Vec<usize> = (start..start + rest).collect();
    loop {
        let mask = idx.iter().fold(base, |acc, &v| acc | (1u64 << v));
        if !visit(mask) {
            return;
        }
        // advance to the next combination in lexicographic order
        let mut pos = rest;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if idx[pos] < m - rest + pos {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..rest {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Independent reference implementation of core verification.
///
/// Written as a plain double loop over member lists and the edge relation,
/// sharing no code with the search kernel or with [`Game`]'s utility
/// evaluation. Only meant for cross-checking in tests.
pub mod oracle {
    use super::*;
    use num_rational::Rational64;

    pub const ORACLE_LIMIT: usize = 16;

    fn val(game: &Game, i: usize, members: &[usize]) -> i64 {
        let n = game.n() as i64;
        let mut friends = 0;
        let mut enemies = 0;
        for &j in members {
            if j == i {
                continue;
            }
            if game.graph().has_edge(i, j) {
                friends += 1;
            } else {
                enemies += 1;
            }
        }
        n * friends - enemies
    }

    fn utility(game: &Game, i: usize, members: &[usize], model: UtilityModel) -> (Rational64, Rational64) {
        let own = val(game, i, members);
        let mut friend_vals = Vec::new();
        for &j in members {
            if j != i && game.graph().has_edge(i, j) {
                friend_vals.push(val(game, j, members));
            }
        }
        let agg = |vals: &[i64]| -> Rational64 {
            if vals.is_empty() {
                return Rational64::from_integer(0);
            }
            match model.aggregate {
                Aggregate::Avg => Rational64::new(vals.iter().sum(), vals.len() as i64),
                Aggregate::Min => Rational64::from_integer(*vals.iter().min().unwrap()),
            }
        };
        match model.altruism {
            Altruism::SelfishFirst => (own.into(), agg(&friend_vals)),
            Altruism::EqualTreatment => {
                let mut with_self = friend_vals.clone();
                with_self.push(own);
                (agg(&with_self), Rational64::from_integer(0))
            }
            Altruism::Altruistic => (agg(&friend_vals), own.into()),
        }
    }

    fn subsets(n: usize) -> Vec<Vec<usize>> {
        let mut all = vec![Vec::new()];
        for p in 0..n {
            let extended: Vec<Vec<usize>> = all
                .iter()
                .map(|s| {
                    let mut t = s.clone();
                    t.push(p);
                    t
                })
                .collect();
            all.extend(extended);
        }
        all.retain(|s| !s.is_empty());
        all
    }

    pub fn brute_force(
        game: &Game,
        gamma: &CoalitionStructure,
        model: UtilityModel,
        kind: BlockingKind,
    ) -> Result<CoreVerdict> {
        let n = game.n();
        if n > ORACLE_LIMIT {
            return Err(Error::Capacity(format!(
                "brute-force oracle is limited to {ORACLE_LIMIT} players, got {n}"
            )));
        }
        let lists = gamma.to_lists();
        let mut home = vec![Vec::new(); n];
        for block in &lists {
            for &p in block {
                home[p] = block.clone();
            }
        }
        let mut explored = 0;
        for members in subsets(n) {
            explored += 1;
            let mut all_ok = true;
            let mut some_strict = false;
            for &i in &members {
                let after = utility(game, i, &members, model);
                let before = utility(game, i, &home[i], model);
                if after > before {
                    some_strict = true;
                } else if after < before || kind == BlockingKind::Strict {
                    all_ok = false;
                    break;
                }
            }
            if all_ok && some_strict {
                return Ok(CoreVerdict {
                    status: VerdictStatus::Blocked,
                    certificate: Some(Coalition::from_members(n, members)?),
                    explored,
                    bound: None,
                });
            }
        }
        Ok(CoreVerdict {
            status: VerdictStatus::Stable,
            certificate: None,
            explored,
            bound: None,
        })
    }

    pub fn brute_force_core(game: &Game, gamma: &CoalitionStructure, model: UtilityModel) -> Result<CoreVerdict> {
        brute_force(game, gamma, model, BlockingKind::Strict)
    }

    pub fn brute_force_strict_core(
        game: &Game,
        gamma: &CoalitionStructure,
        model: UtilityModel,
    ) -> Result<CoreVerdict> {
        brute_force(game, gamma, model, BlockingKind::Weak)
    }
}
