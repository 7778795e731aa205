//! Altruistic hedonic game semantics over a network of friends.
//!
//! A player's friend-oriented valuation of a coalition `C` is
//! `n * |F_i ∩ C| - |E_i ∩ C|`. Utilities combine it with an aggregate (average
//! or minimum) of the valuations of the player's friends in `C`, in one of
//! three orders: selfish-first (SF), equal treatment (EQ) and altruistic
//! treatment (AL).
//!
//! The SF and AL utilities are usually written with a large weight `w >= n^4`.
//! Here they are kept as exact lexicographic pairs instead, see
//! [`UtilityValue`]; [`to_numeric`] recovers the weighted number when needed.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::graph::FriendshipGraph;

pub type PlayerId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Aggregate {
    Avg,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Altruism {
    SelfishFirst,
    EqualTreatment,
    Altruistic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct UtilityModel {
    pub aggregate: Aggregate,
    pub altruism: Altruism,
}

impl UtilityModel {
    pub const AVG_SF: Self = Self::new(Aggregate::Avg, Altruism::SelfishFirst);
    pub const AVG_EQ: Self = Self::new(Aggregate::Avg, Altruism::EqualTreatment);
    pub const AVG_AL: Self = Self::new(Aggregate::Avg, Altruism::Altruistic);
    pub const MIN_SF: Self = Self::new(Aggregate::Min, Altruism::SelfishFirst);
    pub const MIN_EQ: Self = Self::new(Aggregate::Min, Altruism::EqualTreatment);
    pub const MIN_AL: Self = Self::new(Aggregate::Min, Altruism::Altruistic);

    pub const ALL: [Self; 6] = [
        Self::AVG_SF,
        Self::AVG_EQ,
        Self::AVG_AL,
        Self::MIN_SF,
        Self::MIN_EQ,
        Self::MIN_AL,
    ];

    pub const fn new(aggregate: Aggregate, altruism: Altruism) -> Self {
        UtilityModel { aggregate, altruism }
    }

    pub fn tag(&self) -> &'static str {
        match (self.aggregate, self.altruism) {
            (Aggregate::Avg, Altruism::SelfishFirst) => "avg-sf",
            (Aggregate::Avg, Altruism::EqualTreatment) => "avg-eq",
            (Aggregate::Avg, Altruism::Altruistic) => "avg-al",
            (Aggregate::Min, Altruism::SelfishFirst) => "min-sf",
            (Aggregate::Min, Altruism::EqualTreatment) => "min-eq",
            (Aggregate::Min, Altruism::Altruistic) => "min-al",
        }
    }
}

impl fmt::Display for UtilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for UtilityModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Validation {
                field: "model".into(),
                message: format!("unknown model `{s}`, expected one of avg-sf, avg-eq, avg-al, min-sf, min-eq, min-al"),
            })
    }
}

impl From<UtilityModel> for String {
    fn from(m: UtilityModel) -> String {
        m.tag().to_string()
    }
}

impl TryFrom<String> for UtilityModel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Exact utility as a lexicographically ordered pair.
///
/// - SF: `(own valuation, friend aggregate)`
/// - EQ: `(aggregate including self, 0)`
/// - AL: `(friend aggregate, own valuation)`
///
/// The derived ordering compares `primary` first, then `secondary`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UtilityValue {
    pub primary: Rational64,
    pub secondary: Rational64,
}

impl UtilityValue {
    pub fn new(primary: Rational64, secondary: Rational64) -> Self {
        UtilityValue { primary, secondary }
    }

    pub fn from_integers(primary: i64, secondary: i64) -> Self {
        Self::new(primary.into(), secondary.into())
    }

    /// Renders in the weighted notation: `14w+8` for SF/AL, `12.5` for EQ.
    pub fn render(&self, model: UtilityModel) -> String {
        if model.altruism == Altruism::EqualTreatment || self.primary.is_zero() {
            let value = if model.altruism == Altruism::EqualTreatment {
                self.primary
            } else {
                self.secondary
            };
            return format_rational(&value);
        }
        let mut out = format!("{}w", format_rational(&self.primary));
        if self.secondary.is_positive() {
            out.push('+');
            out.push_str(&format_rational(&self.secondary));
        } else if self.secondary.is_negative() {
            out.push('-');
            out.push_str(&format_rational(&-self.secondary));
        }
        out
    }
}

/// Integers as-is, terminating fractions in decimal (`12.5`), others as `p/q`.
pub fn format_rational(r: &Rational64) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    let mut den = *r.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = twos.max(fives);
    let scale = 10i128.pow(digits);
    let scaled = *r.numer() as i128 * scale / *r.denom() as i128;
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.unsigned_abs();
    let int = abs / scale as u128;
    let frac = abs % scale as u128;
    format!("{sign}{int}.{frac:0width$}", width = digits as usize)
}

/// Weighted numeric form of a utility pair for a concrete `w`.
///
/// SF: `w*val + aggregate`; AL: `val + w*aggregate`; EQ ignores `w`.
/// With the pair orientation of [`UtilityValue`] both SF and AL come out as
/// `w*primary + secondary`.
pub fn to_numeric(u: &UtilityValue, model: UtilityModel, w: &BigInt) -> BigRational {
    let big = |r: &Rational64| BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()));
    match model.altruism {
        Altruism::EqualTreatment => big(&u.primary),
        Altruism::SelfishFirst | Altruism::Altruistic => {
            BigRational::from_integer(w.clone()) * big(&u.primary) + big(&u.secondary)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preference {
    PrefersFirst,
    PrefersSecond,
    Indifferent,
}

/// Value assigned to an aggregate over an empty friend set. Applies to both
/// the average and the minimum.
#[inline]
pub fn empty_friend_aggregate() -> Rational64 {
    Rational64::zero()
}

/// An altruistic hedonic game given by its network of friends.
#[derive(Clone, Debug)]
pub struct Game {
    graph: FriendshipGraph,
}

impl Game {
    pub fn new(graph: FriendshipGraph) -> Self {
        Game { graph }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn graph(&self) -> &FriendshipGraph {
        &self.graph
    }

    /// `F_i` as a bitset.
    #[inline]
    pub fn friends(&self, i: PlayerId) -> &FixedBitSet {
        self.graph.neighbor_set(i)
    }

    /// `E_i = N \ (F_i ∪ {i})`.
    pub fn enemies(&self, i: PlayerId) -> FixedBitSet {
        let mut e = self.friends(i).clone();
        e.toggle_range(..);
        e.set(i, false);
        e
    }

    fn check_member(&self, i: PlayerId, c: &Coalition) -> Result<()> {
        if c.universe() != self.n() {
            return Err(Error::Contract(format!(
                "coalition over {} players used in a game of {}",
                c.universe(),
                self.n()
            )));
        }
        if i >= self.n() || !c.contains(i) {
            return Err(Error::Contract(format!("player {i} is not a member of {c}")));
        }
        Ok(())
    }

    /// Friends of `i` inside `c`.
    #[inline]
    fn friends_in(&self, i: PlayerId, c: &Coalition) -> usize {
        self.friends(i).intersection_count(c.bits())
    }

    #[inline]
    pub(crate) fn valuation_unchecked(&self, i: PlayerId, c: &Coalition) -> i64 {
        let friends = self.friends_in(i, c) as i64;
        let enemies = c.len() as i64 - 1 - friends;
        self.n() as i64 * friends - enemies
    }

    pub fn valuation(&self, i: PlayerId, c: &Coalition) -> Result<i64> {
        self.check_member(i, c)?;
        Ok(self.valuation_unchecked(i, c))
    }

    pub fn friend_aggregate(
        &self,
        i: PlayerId,
        c: &Coalition,
        aggregate: Aggregate,
        with_self: bool,
    ) -> Result<Rational64> {
        self.check_member(i, c)?;
        Ok(self.aggregate_unchecked(i, c, aggregate, with_self))
    }

    fn aggregate_unchecked(&self, i: PlayerId, c: &Coalition, aggregate: Aggregate, with_self: bool) -> Rational64 {
        let own = with_self.then(|| self.valuation_unchecked(i, c));
        let friend_vals = self
            .friends(i)
            .intersection(c.bits())
            .map(|j| self.valuation_unchecked(j, c));
        let mut vals = own.into_iter().chain(friend_vals);
        match aggregate {
            Aggregate::Avg => {
                let (sum, count) = vals.fold((0i64, 0i64), |(s, k), v| (s + v, k + 1));
                if count == 0 {
                    empty_friend_aggregate()
                } else {
                    Rational64::new(sum, count)
                }
            }
            Aggregate::Min => match vals.next() {
                None => empty_friend_aggregate(),
                Some(first) => Rational64::from_integer(vals.fold(first, i64::min)),
            },
        }
    }

    pub fn utility(&self, i: PlayerId, c: &Coalition, model: UtilityModel) -> Result<UtilityValue> {
        self.check_member(i, c)?;
        Ok(self.utility_unchecked(i, c, model))
    }

    pub(crate) fn utility_unchecked(&self, i: PlayerId, c: &Coalition, model: UtilityModel) -> UtilityValue {
        let agg = model.aggregate;
        match model.altruism {
            Altruism::SelfishFirst => UtilityValue::new(
                self.valuation_unchecked(i, c).into(),
                self.aggregate_unchecked(i, c, agg, false),
            ),
            Altruism::EqualTreatment => {
                UtilityValue::new(self.aggregate_unchecked(i, c, agg, true), Rational64::zero())
            }
            Altruism::Altruistic => UtilityValue::new(
                self.aggregate_unchecked(i, c, agg, false),
                self.valuation_unchecked(i, c).into(),
            ),
        }
    }

    /// How `i` ranks coalition `c` against coalition `d`.
    pub fn compare(&self, i: PlayerId, c: &Coalition, d: &Coalition, model: UtilityModel) -> Result<Preference> {
        let uc = self.utility(i, c, model)?;
        let ud = self.utility(i, d, model)?;
        Ok(match uc.cmp(&ud) {
            std::cmp::Ordering::Greater => Preference::PrefersFirst,
            std::cmp::Ordering::Less => Preference::PrefersSecond,
            std::cmp::Ordering::Equal => Preference::Indifferent,
        })
    }
}

/// `w = n^4`, the smallest weight for which the weighted utilities order
/// coalitions exactly like the lexicographic pairs.
pub fn minimal_weight(n: usize) -> BigInt {
    let n = BigInt::from(n.max(1));
    let sq = &n * &n;
    if sq.is_one() {
        BigInt::one()
    } else {
        &sq * &sq
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // a=0, b=1, c=2, d=3, e=4
    fn example1() -> Game {
        Game::new(FriendshipGraph::new(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap())
    }

    fn coalition(members: &[usize]) -> Coalition {
        Coalition::from_members(5, members.iter().copied()).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn valuations() {
        let g = example1();
        let n = Coalition::grand(5);
        assert_eq!(g.valuation(0, &n).unwrap(), 8);
        assert_eq!(g.valuation(0, &coalition(&[0, 1, 2, 3])).unwrap(), 9);
        assert_eq!(g.valuation(4, &coalition(&[4])).unwrap(), 0);
        assert!(matches!(g.valuation(4, &coalition(&[0, 1])), Err(Error::Contract(_))));
    }

    #[test]
    fn aggregates() {
        let g = example1();
        let n = Coalition::grand(5);
        assert_eq!(g.friend_aggregate(3, &n, Aggregate::Min, false).unwrap(), r(2, 1));
        assert_eq!(g.friend_aggregate(1, &n, Aggregate::Avg, true).unwrap(), r(25, 2));
        let lone = coalition(&[4]);
        assert!(g.friend_aggregate(4, &lone, Aggregate::Min, false).unwrap().is_zero());
        assert!(g.friend_aggregate(4, &lone, Aggregate::Avg, false).unwrap().is_zero());
    }

    #[test]
    fn utilities() {
        let g = example1();
        let n = Coalition::grand(5);
        let c = coalition(&[0, 1, 2, 3]);
        assert_eq!(
            g.utility(3, &c, UtilityModel::MIN_AL).unwrap(),
            UtilityValue::from_integers(15, 9)
        );
        assert_eq!(
            g.utility(1, &n, UtilityModel::AVG_EQ).unwrap(),
            UtilityValue::new(r(25, 2), r(0, 1))
        );
        assert_eq!(
            g.utility(4, &n, UtilityModel::MIN_SF).unwrap(),
            UtilityValue::from_integers(2, 14)
        );
    }

    #[test]
    fn numeric_forms() {
        let w = minimal_weight(5);
        assert_eq!(w, BigInt::from(625));
        let al = UtilityValue::from_integers(15, 9);
        assert_eq!(
            to_numeric(&al, UtilityModel::MIN_AL, &w),
            BigRational::from_integer(9384.into())
        );
        let eq = UtilityValue::new(r(25, 2), r(0, 1));
        assert_eq!(
            to_numeric(&eq, UtilityModel::AVG_EQ, &BigInt::from(7)),
            BigRational::new(25.into(), 2.into())
        );
        let sf = UtilityValue::from_integers(2, 14);
        assert_eq!(
            to_numeric(&sf, UtilityModel::MIN_SF, &w),
            BigRational::from_integer(1264.into())
        );
    }

    #[test]
    fn comparisons() {
        let g = example1();
        let n = Coalition::grand(5);
        let c = coalition(&[0, 1, 2, 3]);
        assert_eq!(
            g.compare(0, &c, &n, UtilityModel::MIN_EQ).unwrap(),
            Preference::PrefersFirst
        );
        assert_eq!(
            g.compare(0, &c, &c, UtilityModel::AVG_AL).unwrap(),
            Preference::Indifferent
        );
        assert_eq!(
            g.compare(1, &c, &n, UtilityModel::AVG_EQ).unwrap(),
            Preference::PrefersSecond
        );
        assert!(g.compare(4, &c, &n, UtilityModel::AVG_EQ).is_err());
    }

    #[test]
    fn eq_degenerates_to_valuation_without_friends() {
        let g = example1();
        let c = coalition(&[0, 3, 4]);
        for model in [UtilityModel::AVG_EQ, UtilityModel::MIN_EQ] {
            let u = g.utility(0, &c, model).unwrap();
            assert_eq!(u.primary, g.valuation(0, &c).unwrap().into());
        }
    }

    #[test]
    fn rendering() {
        assert_eq!(UtilityValue::from_integers(15, 9).render(UtilityModel::MIN_AL), "15w+9");
        assert_eq!(UtilityValue::from_integers(2, -3).render(UtilityModel::MIN_SF), "2w-3");
        assert_eq!(
            UtilityValue::new(r(25, 2), r(0, 1)).render(UtilityModel::AVG_EQ),
            "12.5"
        );
        assert_eq!(UtilityValue::from_integers(0, 0).render(UtilityModel::AVG_SF), "0");
        assert_eq!(format_rational(&r(-7, 4)), "-1.75");
        assert_eq!(format_rational(&r(1, 3)), "1/3");
    }

    #[test]
    fn model_tags_round_trip() {
        for m in UtilityModel::ALL {
            assert_eq!(m.tag().parse::<UtilityModel>().unwrap(), m);
        }
        assert!("max-eq".parse::<UtilityModel>().is_err());
    }
}
