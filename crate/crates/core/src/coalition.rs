//! Coalitions (player subsets) and coalition structures (partitions of `N`).

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A subset of the players `0..n`, stored as a bitset over the whole universe.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Coalition {
    bits: FixedBitSet,
}

impl Coalition {
    pub fn empty(n: usize) -> Self {
        Coalition {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn grand(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Coalition { bits }
    }

    pub fn singleton(n: usize, i: usize) -> Result<Self> {
        Self::from_members(n, [i])
    }

    pub fn from_members<I: IntoIterator<Item = usize>>(n: usize, members: I) -> Result<Self> {
        let mut bits = FixedBitSet::with_capacity(n);
        for p in members {
            if p >= n {
                return Err(Error::Structural(format!("player {p} out of range 0..{n}")));
            }
            bits.insert(p);
        }
        Ok(Coalition { bits })
    }

    /// Wraps a bitset whose length is the universe size.
    pub fn from_bits(bits: FixedBitSet) -> Self {
        Coalition { bits }
    }

    /// Size of the player universe, not of the coalition.
    #[inline]
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    #[inline]
    pub fn contains(&self, p: usize) -> bool {
        self.bits.contains(p)
    }

    pub fn insert(&mut self, p: usize) {
        self.bits.insert(p);
    }

    #[inline]
    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    /// Members in ascending order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.minimum()
    }

    pub fn is_subset(&self, other: &Coalition) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn intersects(&self, other: &Coalition) -> bool {
        !self.bits.is_disjoint(&other.bits)
    }

    pub fn difference(&self, other: &Coalition) -> Coalition {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Coalition { bits }
    }
}

/// Orders by ascending member lists; for disjoint blocks this is the order
/// of their smallest members.
impl Ord for Coalition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.members().cmp(other.members())
    }
}

impl PartialOrd for Coalition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (idx, p) in self.members().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// A partition of `0..n` into nonempty blocks, kept sorted by smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalitionStructure {
    blocks: Vec<Coalition>,
    owner: Vec<usize>,
}

impl CoalitionStructure {
    pub fn new(n: usize, mut blocks: Vec<Coalition>) -> Result<Self> {
        const UNSET: usize = usize::MAX;
        let mut owner = vec![UNSET; n];
        for b in &blocks {
            if b.universe() != n {
                return Err(Error::Structural(format!(
                    "block {b} is over {} players, expected {n}",
                    b.universe()
                )));
            }
            if b.is_empty() {
                return Err(Error::Structural("coalition structure contains an empty block".into()));
            }
        }
        blocks.sort();
        for (idx, b) in blocks.iter().enumerate() {
            for p in b.members() {
                if owner[p] != UNSET {
                    return Err(Error::Structural(format!(
                        "overlapping blocks: player {p} appears twice"
                    )));
                }
                owner[p] = idx;
            }
        }
        if let Some(p) = owner.iter().position(|&o| o == UNSET) {
            return Err(Error::Structural(format!("player {p} is not covered by any block")));
        }
        Ok(CoalitionStructure { blocks, owner })
    }

    pub fn from_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let blocks = lists
            .iter()
            .map(|l| Coalition::from_members(n, l.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, blocks)
    }

    pub fn grand(n: usize) -> Self {
        let blocks = if n == 0 { Vec::new() } else { vec![Coalition::grand(n)] };
        Self::new(n, blocks).expect("grand coalition is a partition")
    }

    pub fn singletons(n: usize) -> Self {
        let blocks = (0..n).map(|i| Coalition::singleton(n, i).unwrap()).collect();
        Self::new(n, blocks).expect("singletons form a partition")
    }

    #[inline]
    pub fn num_players(&self) -> usize {
        self.owner.len()
    }

    pub fn blocks(&self) -> &[Coalition] {
        &self.blocks
    }

    /// The block containing `i`. Panics when `i` is out of range.
    #[inline]
    pub fn block_of(&self, i: usize) -> &Coalition {
        &self.blocks[self.owner[i]]
    }

    pub fn block_index(&self, i: usize) -> usize {
        self.owner[i]
    }

    pub fn to_lists(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(Coalition::to_vec).collect()
    }

    /// The structure after the members of `c` leave their blocks to form `c`.
    pub fn move_to_empty(&self, c: &Coalition) -> Result<CoalitionStructure> {
        if c.is_empty() {
            return Err(Error::Contract("cannot deviate with an empty coalition".into()));
        }
        if c.universe() != self.num_players() {
            return Err(Error::Structural(format!(
                "coalition over {} players used with a structure over {}",
                c.universe(),
                self.num_players()
            )));
        }
        let mut blocks = vec![c.clone()];
        blocks.extend(self.blocks.iter().filter(|b| !b.is_subset(c)).map(|b| b.difference(c)));
        CoalitionStructure::new(self.num_players(), blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cs(n: usize, lists: &[&[usize]]) -> CoalitionStructure {
        let lists: Vec<Vec<usize>> = lists.iter().map(|l| l.to_vec()).collect();
        CoalitionStructure::from_lists(n, &lists).unwrap()
    }

    #[test]
    fn partition_validation() {
        let err = CoalitionStructure::from_lists(3, &[vec![0, 1], vec![1, 2]]).unwrap_err();
        assert!(err.to_string().contains("overlapping blocks"));
        assert!(CoalitionStructure::from_lists(3, &[vec![0, 1]]).is_err());
        assert!(CoalitionStructure::from_lists(3, &[vec![0, 1, 2], vec![]]).is_err());
        let p = cs(4, &[&[3, 1], &[2, 0]]);
        assert_eq!(p.to_lists(), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(p.block_of(3).to_vec(), vec![1, 3]);
    }

    #[test]
    fn move_to_empty_examples() {
        let grand = CoalitionStructure::grand(5);
        let c = Coalition::from_members(5, [0, 1, 2, 3]).unwrap();
        assert_eq!(grand.move_to_empty(&c).unwrap(), cs(5, &[&[0, 1, 2, 3], &[4]]));

        let g = cs(5, &[&[0, 1], &[2, 3], &[4]]);
        let block = Coalition::from_members(5, [2, 3]).unwrap();
        assert_eq!(g.move_to_empty(&block).unwrap(), g);

        let bc = Coalition::from_members(5, [1, 2]).unwrap();
        assert_eq!(g.move_to_empty(&bc).unwrap(), cs(5, &[&[1, 2], &[0], &[3], &[4]]));

        assert!(matches!(g.move_to_empty(&Coalition::empty(5)), Err(Error::Contract(_))));
    }

    fn partition_and_coalition() -> impl Strategy<Value = (usize, Vec<usize>, Vec<bool>)> {
        (1usize..12).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(0..n, n),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn move_to_empty_keeps_a_partition((n, labels, pick) in partition_and_coalition()) {
            let mut lists: Vec<Vec<usize>> = vec![Vec::new(); n];
            for (p, &l) in labels.iter().enumerate() {
                lists[l].push(p);
            }
            lists.retain(|l| !l.is_empty());
            let gamma = CoalitionStructure::from_lists(n, &lists).unwrap();
            let c = Coalition::from_members(n, (0..n).filter(|&p| pick[p])).unwrap();
            prop_assume!(!c.is_empty());
            let moved = gamma.move_to_empty(&c).unwrap();
            prop_assert!(moved.blocks().contains(&c));
            for p in 0..n {
                let b = moved.block_of(p);
                if c.contains(p) {
                    prop_assert_eq!(b, &c);
                } else {
                    prop_assert_eq!(b, &gamma.block_of(p).difference(&c));
                }
            }
        }
    }
}
