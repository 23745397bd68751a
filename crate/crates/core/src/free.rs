//! Free group on `a`, `b`: reduced words, the shortlex word ball, the partition into
//! words starting with `a^{±1}` and the rest, and n-wise disjointness of translate families.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::combi::combinations;
use crate::error::{Error, Result};
use crate::group::Universe;
use crate::set::MaterializedSet;

/// Generator letters in shortlex order `a < a⁻¹ < b < b⁻¹`, printed `a A b B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    A = 0,
    AInv = 1,
    B = 2,
    BInv = 3,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    #[inline]
    pub fn inverse(self) -> Letter {
        Letter::from_code(self as u8 ^ 1)
    }

    #[inline]
    pub fn from_code(c: u8) -> Letter {
        Letter::ALL[(c & 3) as usize]
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        Some(match c {
            'a' => Letter::A,
            'A' => Letter::AInv,
            'b' => Letter::B,
            'B' => Letter::BInv,
            _ => return None,
        })
    }

    /// True for `a` and `a⁻¹`.
    pub fn is_a(self) -> bool {
        matches!(self, Letter::A | Letter::AInv)
    }
}

/// A freely reduced word: no letter is followed by its inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord(Vec<Letter>);

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_identity()
    }

    /// `letter^k`, with negative `k` meaning the inverse letter.
    pub fn power(letter: Letter, k: i64) -> Self {
        let l = if k < 0 { letter.inverse() } else { letter };
        ReducedWord(vec![l; k.unsigned_abs() as usize])
    }

    pub fn inverse(&self) -> Self {
        ReducedWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn product(&self, other: &ReducedWord) -> ReducedWord {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        ReducedWord(out)
    }

    /// Length of `self · other` without building it.
    pub fn product_len(&self, other: &ReducedWord) -> usize {
        let cancel = self
            .0
            .iter()
            .rev()
            .zip(&other.0)
            .take_while(|(x, y)| x.inverse() == **y)
            .count();
        self.len() + other.len() - 2 * cancel
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for ReducedWord {
    type Err = Error;

    /// Accepts `e`, letter strings like `abA`, and powers like `b^3` or `a^-2`, concatenated.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(ReducedWord::identity());
        }
        let chars: Vec<char> = s.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c == 'e' {
                i += 1;
                continue;
            }
            let l = Letter::from_char(c).ok_or_else(|| Error::Syntax {
                pos: i,
                expected: "one of a, A, b, B, e".into(),
            })?;
            i += 1;
            if chars.get(i) == Some(&'^') {
                i += 1;
                let start = i;
                if chars.get(i) == Some(&'-') {
                    i += 1;
                }
                while chars.get(i).is_some_and(|c| c.is_ascii_digit()) {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let k: i64 = digits.parse().map_err(|_| Error::Syntax {
                    pos: start,
                    expected: "an integer exponent".into(),
                })?;
                letters.extend(ReducedWord::power(l, k).0);
            } else {
                letters.push(l);
            }
        }
        reduce_word(&letters, None)
    }
}

impl Serialize for ReducedWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ReducedWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Free reduction to normal form; fails if the reduced word is longer than `max_len`.
pub fn reduce_word(letters: &[Letter], max_len: Option<usize>) -> Result<ReducedWord> {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    match max_len {
        Some(max) if out.len() > max => Err(Error::LengthExceeded {
            len: out.len(),
            max,
        }),
        _ => Ok(ReducedWord(out)),
    }
}

/// All reduced words of length `<= max_len`, indexed in shortlex order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WordBall {
    max_len: usize,
}

/// Largest supported word length; the ball then has 2·3^16 − 1 ≈ 8.6e7 words.
pub const MAX_BALL_LEN: usize = 16;

impl WordBall {
    pub fn new(max_len: usize) -> Result<Self> {
        if !(1..=MAX_BALL_LEN).contains(&max_len) {
            return Err(Error::InvalidParam(format!(
                "word length bound must be in 1..={MAX_BALL_LEN}, got {max_len}"
            )));
        }
        Ok(WordBall { max_len })
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Number of reduced words of length `< k`.
    fn offset(k: usize) -> usize {
        if k == 0 {
            0
        } else {
            2 * 3usize.pow(k as u32 - 1) - 1
        }
    }

    pub fn len(&self) -> usize {
        Self::offset(self.max_len + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of words of length `<= k` (clamped to the ball).
    pub fn count_up_to(&self, k: usize) -> usize {
        Self::offset(k.min(self.max_len) + 1)
    }

    pub fn rank(&self, w: &ReducedWord) -> Option<usize> {
        let k = w.len();
        if k > self.max_len {
            return None;
        }
        if k == 0 {
            return Some(0);
        }
        let mut r = w.0[0] as usize;
        for pair in w.0.windows(2) {
            let (prev, cur) = (pair[0], pair[1]);
            let inv = prev.inverse() as usize;
            let c = cur as usize;
            r = r * 3 + if c > inv { c - 1 } else { c };
        }
        Some(Self::offset(k) + r)
    }

    pub fn unrank(&self, idx: usize) -> ReducedWord {
        let mut k = 0;
        while Self::offset(k + 1) <= idx {
            k += 1;
        }
        if k == 0 {
            return ReducedWord::identity();
        }
        let mut r = idx - Self::offset(k);
        let mut digits = vec![0usize; k];
        for d in digits.iter_mut().skip(1).rev() {
            *d = r % 3;
            r /= 3;
        }
        digits[0] = r;
        let mut letters = Vec::with_capacity(k);
        letters.push(Letter::from_code(digits[0] as u8));
        for &d in &digits[1..] {
            let inv = letters.last().unwrap().inverse() as usize;
            let c = if d >= inv { d + 1 } else { d };
            letters.push(Letter::from_code(c as u8));
        }
        ReducedWord(letters)
    }

    pub fn words(&self) -> impl Iterator<Item = ReducedWord> + '_ {
        (0..self.len()).map(|i| self.unrank(i))
    }
}

/// Splits the word ball into `A` (words starting with `a^{±1}`) and its complement `B`.
pub fn f2_partition(max_len: usize) -> Result<(MaterializedSet, MaterializedSet)> {
    let universe = Arc::new(Universe::free(max_len, 0)?);
    let ball = WordBall::new(max_len)?;
    let a_part = MaterializedSet::from_predicate(&universe, |i| {
        ball.unrank(i).first().is_some_and(Letter::is_a)
    });
    let b_part = a_part.complement();
    Ok((a_part, b_part))
}

/// Translators `a^0, a^1, …, a^{count-1}`: their left translates of the complement of
/// the `a`-words are pairwise disjoint, since `a^k·B` consists of `a^k` and words
/// `a^k b^{±1}…` whose maximal `a`-prefix is exactly `a^k`.
pub fn complement_side_translators(count: usize) -> Vec<ReducedWord> {
    (0..count as i64)
        .map(|k| ReducedWord::power(Letter::A, k))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub n: usize,
    pub translators: Vec<ReducedWord>,
    pub disjoint: bool,
    /// Lexicographically least violating n-subset (as translators) and a word in its intersection.
    pub witness: Option<(Vec<ReducedWord>, ReducedWord)>,
    /// Products `t·x` that left the ball while translating; those points are undecided.
    pub truncated: u64,
    /// Words of each translate that stayed inside the ball.
    pub decided_sizes: Vec<usize>,
}

/// Checks that every `n` of the left translates `t·base` have empty intersection.
///
/// A word `x` lies in `t·base` iff `t⁻¹x ∈ base`; translates are built forward and
/// products leaving the ball are dropped and tallied, so every intersection is exact on
/// the words whose preimages under all translators of the subset lie in the ball.
pub fn family_disjoint(
    base: &MaterializedSet,
    translators: &[ReducedWord],
    n: usize,
) -> Result<DisjointnessReport> {
    let Universe::Free { ball, .. } = base.universe().as_ref() else {
        return Err(Error::KindMismatch(
            "free-group disjointness outside the free group".into(),
        ));
    };
    if n < 2 {
        return Err(Error::InvalidParam(format!("n must be >= 2, got {n}")));
    }
    let mut translates = Vec::with_capacity(translators.len());
    let mut truncated = 0;
    for t in translators {
        let tr = base.left_translate_unchecked(&crate::group::GroupElem::Word(t.clone()));
        if tr.is_empty() && !base.is_empty() {
            return Err(Error::LengthBudgetTooSmall {
                max_len: ball.max_len(),
                translator: t.to_string(),
            });
        }
        truncated += tr.truncated();
        translates.push(tr);
    }
    let decided_sizes = translates.iter().map(|t| t.count()).collect();
    let mut witness = None;
    if translators.len() >= n {
        for subset in combinations(translators.len(), n) {
            let mut acc = translates[subset[0]].bits().clone();
            for &j in &subset[1..] {
                acc.intersect_with(translates[j].bits());
            }
            if let Some(x) = acc.next_one(0) {
                witness = Some((
                    subset.iter().map(|&j| translators[j].clone()).collect(),
                    ball.unrank(x),
                ));
                break;
            }
        }
    }
    Ok(DisjointnessReport {
        n,
        translators: translators.to_vec(),
        disjoint: witness.is_none(),
        witness,
        truncated,
        decided_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> ReducedWord {
        s.parse().unwrap()
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_word(&[Letter::A, Letter::AInv, Letter::B], None).unwrap();
        assert_eq!(r.to_string(), "b");
        let r = reduce_word(&[Letter::A, Letter::B, Letter::BInv, Letter::A], None).unwrap();
        assert_eq!(r.to_string(), "aa");
        let already = w("abAB");
        assert_eq!(reduce_word(already.letters(), None).unwrap(), already);
    }

    #[test]
    fn reduction_respects_length_bound() {
        let err = reduce_word(&[Letter::A; 5], Some(4)).unwrap_err();
        assert!(matches!(err, Error::LengthExceeded { len: 5, max: 4 }));
        assert!(reduce_word(&[Letter::A, Letter::AInv], Some(0)).is_ok());
    }

    #[test]
    fn power_syntax() {
        assert_eq!(w("b^3").to_string(), "bbb");
        assert_eq!(w("a^-2b").to_string(), "AAb");
        assert_eq!(w("b^0"), ReducedWord::identity());
        assert_eq!(w("aA"), ReducedWord::identity());
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(WordBall::new(1).unwrap().len(), 5);
        assert_eq!(WordBall::new(2).unwrap().len(), 17);
        assert_eq!(WordBall::new(12).unwrap().len(), 2 * 3usize.pow(12) - 1);
        assert!(WordBall::new(0).is_err());
    }

    #[test]
    fn ball_enumeration_is_shortlex() {
        let ball = WordBall::new(3).unwrap();
        let words: Vec<_> = ball.words().collect();
        for pair in words.windows(2) {
            let key = |x: &ReducedWord| (x.len(), x.letters().to_vec());
            assert!(key(&pair[0]) < key(&pair[1]));
        }
        for (i, word) in words.iter().enumerate() {
            assert_eq!(ball.rank(word), Some(i));
        }
    }

    #[test]
    fn partition_at_length_one() {
        let (a, b) = f2_partition(1).unwrap();
        let names = |s: &MaterializedSet| -> Vec<String> {
            s.elements().iter().map(|e| e.to_string()).collect()
        };
        assert_eq!(names(&a), vec!["a", "A"]);
        assert_eq!(names(&b), vec!["e", "b", "B"]);
    }

    #[test]
    fn partition_counts_at_length_two() {
        let (a, b) = f2_partition(2).unwrap();
        assert_eq!(a.count() + b.count(), 17);
        assert!(a.bits().is_disjoint(b.bits()));
        assert!(b.contains(&crate::group::GroupElem::Word(ReducedWord::identity())));
    }

    #[test]
    fn b_powers_separate_a_words() {
        let (a, _) = f2_partition(10).unwrap();
        let ts: Vec<_> = (0..=5).map(|k| ReducedWord::power(Letter::B, k)).collect();
        let rep = family_disjoint(&a, &ts, 2).unwrap();
        assert!(rep.disjoint, "{rep:?}");
    }

    #[test]
    fn overlapping_translates_give_least_witness() {
        let (a, _) = f2_partition(6).unwrap();
        let rep = family_disjoint(&a, &[w("e"), w("a")], 2).unwrap();
        assert!(!rep.disjoint);
        let (subset, point) = rep.witness.unwrap();
        assert_eq!(subset, vec![w("e"), w("a")]);
        // Shortlex-least word of F_a ∩ a·F_a: A = a·AA.
        assert_eq!(point.to_string(), "A");
        // The word a·a lies in the intersection as well.
        let aa = crate::group::GroupElem::Word(w("aa"));
        assert!(a.contains(&aa));
        assert!(a
            .left_translate_unchecked(&crate::group::GroupElem::Word(w("a")))
            .contains(&aa));
    }

    #[test]
    fn empty_base_is_disjoint() {
        let (a, _) = f2_partition(4).unwrap();
        let empty = a.empty_like();
        let rep = family_disjoint(&empty, &[w("e"), w("a"), w("b")], 2).unwrap();
        assert!(rep.disjoint);
    }

    #[test]
    fn translate_leaving_the_ball_is_rejected() {
        let (a, _) = f2_partition(3).unwrap();
        let err = family_disjoint(&a, &[w("e"), w("b^4")], 2).unwrap_err();
        assert!(matches!(err, Error::LengthBudgetTooSmall { .. }));
    }

    fn letters() -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec((0u8..4).prop_map(Letter::from_code), 0..24)
    }

    proptest! {
        #[test]
        fn reduced_words_have_no_cancelling_pairs(ls in letters()) {
            let r = reduce_word(&ls, None).unwrap();
            for p in r.letters().windows(2) {
                prop_assert_ne!(p[0].inverse(), p[1]);
            }
            prop_assert_eq!(reduce_word(r.letters(), None).unwrap(), r.clone());
        }

        #[test]
        fn product_is_associative_with_inverses(x in letters(), y in letters(), z in letters()) {
            let (x, y, z) = (reduce_word(&x, None).unwrap(), reduce_word(&y, None).unwrap(), reduce_word(&z, None).unwrap());
            prop_assert_eq!(x.product(&y).product(&z), x.product(&y.product(&z)));
            prop_assert!(x.product(&x.inverse()).is_identity());
            prop_assert_eq!(x.product_len(&y), x.product(&y).len());
        }

        #[test]
        fn rank_roundtrip(ls in proptest::collection::vec((0u8..4).prop_map(Letter::from_code), 0..9)) {
            let ball = WordBall::new(8).unwrap();
            let r = reduce_word(&ls, None).unwrap();
            let i = ball.rank(&r).unwrap();
            prop_assert_eq!(ball.unrank(i), r);
        }
    }
}
