//! Sets materialized as bitsets over a finite carrier.

use std::sync::Arc;

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::group::{GroupElem, Universe};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaterializedSet {
    universe: Arc<Universe>,
    bits: BitSet,
    /// Points dropped because a product left the carrier (free group only).
    truncated: u64,
}

pub(crate) fn same_universe(a: &Arc<Universe>, b: &Arc<Universe>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl MaterializedSet {
    pub fn from_bits(universe: &Arc<Universe>, bits: BitSet) -> Self {
        assert_eq!(
            bits.len(),
            universe.size(),
            "bitset length must match the universe"
        );
        MaterializedSet {
            universe: universe.clone(),
            bits,
            truncated: 0,
        }
    }

    pub fn empty(universe: &Arc<Universe>) -> Self {
        Self::from_bits(universe, BitSet::new(universe.size()))
    }

    pub fn full(universe: &Arc<Universe>) -> Self {
        Self::from_bits(universe, BitSet::full(universe.size()))
    }

    pub fn from_predicate(universe: &Arc<Universe>, mut f: impl FnMut(usize) -> bool) -> Self {
        let n = universe.size();
        Self::from_bits(universe, BitSet::from_indices(n, (0..n).filter(|&i| f(i))))
    }

    /// Elements outside the carrier are rejected.
    pub fn from_elements<'a>(
        universe: &Arc<Universe>,
        elems: impl IntoIterator<Item = &'a GroupElem>,
    ) -> Result<Self> {
        let mut bits = BitSet::new(universe.size());
        for g in elems {
            let i = universe.index_of(g).ok_or_else(|| {
                Error::InvalidParam(format!(
                    "{g} is outside the {} carrier",
                    universe.kind_name()
                ))
            })?;
            bits.insert(i);
        }
        Ok(Self::from_bits(universe, bits))
    }

    pub fn empty_like(&self) -> Self {
        Self::empty(&self.universe)
    }

    pub fn full_like(&self) -> Self {
        Self::full(&self.universe)
    }

    pub fn with_bits(&self, bits: BitSet) -> Self {
        Self::from_bits(&self.universe, bits)
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn truncated(&self) -> u64 {
        self.truncated
    }

    pub fn count(&self) -> usize {
        self.bits.count()
    }

    pub fn count_core(&self) -> usize {
        let (lo, hi) = self.universe.core_range();
        self.bits.count_range(lo, hi)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_empty_on_core(&self) -> bool {
        let (lo, hi) = self.universe.core_range();
        !self.bits.any_in_range(lo, hi)
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        self.universe
            .index_of(g)
            .is_some_and(|i| self.bits.contains(i))
    }

    pub fn elements(&self) -> Vec<GroupElem> {
        self.bits.ones().map(|i| self.universe.elem(i)).collect()
    }

    pub fn core_elements(&self) -> Vec<GroupElem> {
        let (lo, hi) = self.universe.core_range();
        self.bits
            .ones_in(lo, hi)
            .map(|i| self.universe.elem(i))
            .collect()
    }

    /// The set with everything outside the core removed.
    pub fn restrict_to_core(&self) -> Self {
        let (lo, hi) = self.universe.core_range();
        let mut bits = BitSet::range(self.bits.len(), lo, hi);
        bits.intersect_with(&self.bits);
        self.with_bits(bits)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if same_universe(&self.universe, &other.universe) {
            Ok(())
        } else {
            Err(Error::ScaleMismatch)
        }
    }

    fn combine(&self, other: &Self, op: impl FnOnce(&mut BitSet, &BitSet)) -> Result<Self> {
        self.check_same(other)?;
        let mut bits = self.bits.clone();
        op(&mut bits, &other.bits);
        Ok(MaterializedSet {
            universe: self.universe.clone(),
            bits,
            truncated: self.truncated + other.truncated,
        })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.combine(other, BitSet::union_with)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.combine(other, BitSet::intersect_with)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, BitSet::difference_with)
    }

    pub fn complement(&self) -> Self {
        self.with_bits(self.bits.complement())
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }

    /// `gA`, failing when `g` exceeds the universe's translation budget.
    pub fn left_translate(&self, g: &GroupElem) -> Result<Self> {
        self.universe.check_translator(g)?;
        Ok(self.left_translate_unchecked(g))
    }

    /// `gA` without the budget check. On `ℤ` points shifted past the carrier are lost;
    /// on `F₂` products longer than the ball are dropped and added to the tally.
    ///
    /// Panics if `g` is not an element of the universe's group.
    pub fn left_translate_unchecked(&self, g: &GroupElem) -> Self {
        let n = self.bits.len();
        let mut truncated = self.truncated;
        let bits = match (self.universe.as_ref(), g) {
            (Universe::Integers(_), GroupElem::Int(k)) => self.bits.shifted(*k),
            (Universe::Cyclic { order }, GroupElem::Residue(k)) => {
                let k = (*k % order) as i64;
                let mut b = self.bits.shifted(k);
                if k != 0 {
                    b.union_with(&self.bits.shifted(k - *order as i64));
                }
                b
            }
            (Universe::Table(t), GroupElem::Index(x)) => {
                BitSet::from_indices(n, self.bits.ones().map(|i| t.mul(*x, i)))
            }
            (Universe::Free { ball, .. }, GroupElem::Word(w)) => {
                let mut b = BitSet::new(n);
                for i in self.bits.ones() {
                    match ball.rank(&w.product(&ball.unrank(i))) {
                        Some(j) => b.insert(j),
                        None => truncated += 1,
                    }
                }
                b
            }
            _ => panic!(
                "{g} is not an element of the {} universe",
                self.universe.kind_name()
            ),
        };
        MaterializedSet {
            universe: self.universe.clone(),
            bits,
            truncated,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{CayleyTable, Window};
    use proptest::prelude::*;

    fn zwin(lo: i64, hi: i64, margin: u64) -> Arc<Universe> {
        Arc::new(Universe::integers(Window::new(lo, hi, margin).unwrap()))
    }

    fn ints(s: &MaterializedSet) -> Vec<i64> {
        s.elements()
            .iter()
            .map(|g| match g {
                GroupElem::Int(x) => *x,
                GroupElem::Residue(x) => *x as i64,
                _ => panic!(),
            })
            .collect()
    }

    #[test]
    fn parity_shift() {
        let u = zwin(-20, 20, 4);
        let evens = MaterializedSet::from_predicate(&u, |i| (i as i64 - 20) % 2 == 0);
        assert_eq!(evens.left_translate(&GroupElem::Int(0)).unwrap(), evens);
        let odds = evens.left_translate(&GroupElem::Int(1)).unwrap();
        assert_eq!(
            odds.restrict_to_core(),
            evens.complement().restrict_to_core()
        );
        assert!(matches!(
            evens.left_translate(&GroupElem::Int(5)),
            Err(Error::ShiftOutOfBudget { .. })
        ));
    }

    #[test]
    fn cyclic_rotation_fixes_subgroup() {
        let u = Arc::new(Universe::cyclic(12).unwrap());
        let a = MaterializedSet::from_predicate(&u, |i| i % 3 == 0);
        assert_eq!(a.left_translate(&GroupElem::Residue(3)).unwrap(), a);
        let b = a.left_translate(&GroupElem::Residue(1)).unwrap();
        assert_eq!(ints(&b), vec![1, 4, 7, 10]);
    }

    #[test]
    fn table_translation() {
        let t = CayleyTable::new(
            vec![
                vec![0, 1, 2, 3],
                vec![1, 0, 3, 2],
                vec![2, 3, 0, 1],
                vec![3, 2, 1, 0],
            ],
            0,
        )
        .unwrap();
        let u = Arc::new(Universe::Table(Arc::new(t)));
        let a = MaterializedSet::from_elements(&u, &[GroupElem::Index(0), GroupElem::Index(1)])
            .unwrap();
        let b = a.left_translate(&GroupElem::Index(2)).unwrap();
        assert_eq!(b.elements(), vec![GroupElem::Index(2), GroupElem::Index(3)]);
    }

    #[test]
    fn free_translation_tallies_truncation() {
        let u = Arc::new(Universe::free(2, 1).unwrap());
        let all = MaterializedSet::full(&u);
        let w = GroupElem::Word("a".parse().unwrap());
        let t = all.left_translate(&w).unwrap();
        // Words of length 2 not starting with A leave the ball: 12 − 3 = 9 of them.
        assert_eq!(t.truncated(), 9);
        assert_eq!(t.count(), 17 - 9);
    }

    #[test]
    fn mismatched_universes() {
        let a = MaterializedSet::empty(&zwin(0, 10, 0));
        let b = MaterializedSet::empty(&zwin(0, 11, 0));
        assert!(matches!(a.union(&b), Err(Error::ScaleMismatch)));
    }

    proptest! {
        #[test]
        fn composition_on_core(bits in proptest::collection::vec(any::<bool>(), 81), g in -10i64..=10, h in -10i64..=10) {
            let u = zwin(-40, 40, 20);
            let a = MaterializedSet::from_predicate(&u, |i| bits[i]);
            let gh = a
                .left_translate(&GroupElem::Int(h)).unwrap()
                .left_translate(&GroupElem::Int(g)).unwrap();
            let direct = a.left_translate(&GroupElem::Int(g + h)).unwrap();
            prop_assert_eq!(gh.restrict_to_core(), direct.restrict_to_core());
        }

        #[test]
        fn shift_preserves_core_cardinality(bits in proptest::collection::vec(any::<bool>(), 81), g in -20i64..=20) {
            let u = zwin(-40, 40, 20);
            let a = MaterializedSet::from_predicate(&u, |i| bits[i]);
            let ga = a.left_translate(&GroupElem::Int(g)).unwrap();
            // |gA ∩ core| = |A ∩ (core − g)|.
            let (lo, hi) = u.core_range();
            let want = a.bits().count_range((lo as i64 - g) as usize, (hi as i64 - g) as usize);
            prop_assert_eq!(ga.count_core(), want);
        }

        #[test]
        fn cyclic_composition(bits in proptest::collection::vec(any::<bool>(), 17), g in 0u64..17, h in 0u64..17) {
            let u = Arc::new(Universe::cyclic(17).unwrap());
            let a = MaterializedSet::from_predicate(&u, |i| bits[i]);
            let gh = a.left_translate(&GroupElem::Residue(h)).unwrap().left_translate(&GroupElem::Residue(g)).unwrap();
            prop_assert_eq!(gh, a.left_translate(&GroupElem::Residue((g + h) % 17)).unwrap());
        }
    }
}
