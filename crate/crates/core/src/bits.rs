//! Fixed-length bitset with the word-level operations the search kernels need:
//! shifting, ranged popcounts and run scanning.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = BitSet {
            len,
            words: vec![!0; words_for(len)],
        };
        s.trim();
        s
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = BitSet::new(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Bits `lo..=hi` set (clamped to the length).
    pub fn range(len: usize, lo: usize, hi: usize) -> Self {
        let mut s = BitSet::new(len);
        if len == 0 || lo > hi || lo >= len {
            return s;
        }
        let hi = hi.min(len - 1);
        for w in lo / WORD..=hi / WORD {
            s.words[w] = range_mask(w, lo, hi);
        }
        s
    }

    // Clears the bits past `len` in the last word.
    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits in `lo..=hi`.
    pub fn count_range(&self, lo: usize, hi: usize) -> usize {
        if self.len == 0 || lo > hi || lo >= self.len {
            return 0;
        }
        let hi = hi.min(self.len - 1);
        (lo / WORD..=hi / WORD)
            .map(|w| (self.words[w] & range_mask(w, lo, hi)).count_ones() as usize)
            .sum()
    }

    pub fn any_in_range(&self, lo: usize, hi: usize) -> bool {
        if self.len == 0 || lo > hi || lo >= self.len {
            return false;
        }
        let hi = hi.min(self.len - 1);
        (lo / WORD..=hi / WORD).any(|w| self.words[w] & range_mask(w, lo, hi) != 0)
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn complement(&self) -> BitSet {
        let mut s = BitSet {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Whether `self ∩ other` has a bit in `lo..=hi`.
    pub fn intersects_in_range(&self, other: &BitSet, lo: usize, hi: usize) -> bool {
        if self.len == 0 || lo > hi || lo >= self.len {
            return false;
        }
        let hi = hi.min(self.len - 1);
        (lo / WORD..=hi / WORD).any(|w| self.words[w] & other.words[w] & range_mask(w, lo, hi) != 0)
    }

    /// Bit `i` of the result is bit `i - k` of `self`; bits shifted past either end are dropped.
    pub fn shifted(&self, k: i64) -> BitSet {
        let mut out = BitSet::new(self.len);
        if k == 0 {
            out.words.copy_from_slice(&self.words);
            return out;
        }
        let n = self.words.len();
        let mag = k.unsigned_abs() as usize;
        if mag >= self.len {
            return out;
        }
        let (ws, bs) = (mag / WORD, mag % WORD);
        if k > 0 {
            for i in (ws..n).rev() {
                let src = i - ws;
                let mut v = self.words[src] << bs;
                if bs != 0 && src > 0 {
                    v |= self.words[src - 1] >> (WORD - bs);
                }
                out.words[i] = v;
            }
        } else {
            for i in 0..n - ws {
                let src = i + ws;
                let mut v = self.words[src] >> bs;
                if bs != 0 && src + 1 < n {
                    v |= self.words[src + 1] << (WORD - bs);
                }
                out.words[i] = v;
            }
        }
        out.trim();
        out
    }

    /// Smallest set bit `>= from`.
    pub fn next_one(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut w = from / WORD;
        let mut cur = self.words[w] & (!0u64 << (from % WORD));
        loop {
            if cur != 0 {
                let i = w * WORD + cur.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            w += 1;
            if w >= self.words.len() {
                return None;
            }
            cur = self.words[w];
        }
    }

    /// Smallest clear bit `>= from`.
    pub fn next_zero(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut w = from / WORD;
        let mut cur = !self.words[w] & (!0u64 << (from % WORD));
        loop {
            if cur != 0 {
                let i = w * WORD + cur.trailing_zeros() as usize;
                return (i < self.len).then_some(i);
            }
            w += 1;
            if w >= self.words.len() {
                return None;
            }
            cur = !self.words[w];
        }
    }

    /// Largest set bit `<= at`.
    pub fn prev_one(&self, at: usize) -> Option<usize> {
        if self.len == 0 {
            return None;
        }
        let at = at.min(self.len - 1);
        let mut w = at / WORD;
        let shift = WORD - 1 - at % WORD;
        let mut cur = self.words[w] << shift >> shift;
        loop {
            if cur != 0 {
                return Some(w * WORD + (WORD - 1 - cur.leading_zeros() as usize));
            }
            if w == 0 {
                return None;
            }
            w -= 1;
            cur = self.words[w];
        }
    }

    pub fn ones(&self) -> Ones<'_> {
        Ones {
            set: self,
            next: 0,
            end: self.len,
        }
    }

    /// Set bits in `lo..=hi`.
    pub fn ones_in(&self, lo: usize, hi: usize) -> Ones<'_> {
        Ones {
            set: self,
            next: lo,
            end: hi.saturating_add(1).min(self.len),
        }
    }

    /// Maximal runs of clear bits intersected with `lo..=hi`, as `(start, end)` inclusive;
    /// `start` is the true start of the run, which may lie before `lo`.
    pub fn zero_runs(&self, lo: usize, hi: usize) -> Vec<(usize, usize)> {
        let mut runs = Vec::new();
        if self.len == 0 || lo > hi || lo >= self.len {
            return runs;
        }
        let hi = hi.min(self.len - 1);
        let mut pos = lo;
        while pos <= hi {
            let Some(z) = self.next_zero(pos) else { break };
            if z > hi {
                break;
            }
            let start = if z == lo {
                self.prev_one(lo).map_or(0, |p| p + 1)
            } else {
                z
            };
            let end = self.next_one(z).map_or(self.len - 1, |o| o - 1);
            runs.push((start, end));
            pos = end + 1;
        }
        runs
    }

    pub fn raw_words(&self) -> &[u64] {
        &self.words
    }
}

#[inline]
fn range_mask(w: usize, lo: usize, hi: usize) -> u64 {
    let start = w * WORD;
    let a = lo.saturating_sub(start);
    let b = (hi - start).min(WORD - 1);
    if a > b {
        return 0;
    }
    let upper = if b == WORD - 1 {
        !0
    } else {
        (1u64 << (b + 1)) - 1
    };
    upper & (!0u64 << a)
}

pub struct Ones<'a> {
    set: &'a BitSet,
    next: usize,
    end: usize,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.next >= self.end {
            return None;
        }
        let i = self.set.next_one(self.next)?;
        if i >= self.end {
            self.next = self.end;
            return None;
        }
        self.next = i + 1;
        Some(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn shift_drops_bits_past_the_ends() {
        let s = BitSet::from_indices(10, [0, 5, 9]);
        assert_eq!(s.shifted(1).ones().collect::<Vec<_>>(), vec![1, 6]);
        assert_eq!(s.shifted(-5).ones().collect::<Vec<_>>(), vec![0, 4]);
        assert!(s.shifted(10).is_empty());
    }

    #[test]
    fn zero_runs_report_true_starts() {
        let s = BitSet::from_indices(20, [0, 1, 7, 8, 15]);
        assert_eq!(s.zero_runs(4, 16), vec![(2, 6), (9, 14), (16, 19)]);
        assert_eq!(s.zero_runs(0, 1), vec![]);
    }

    #[test]
    fn prev_one_at_word_boundary() {
        let s = BitSet::from_indices(200, [63, 64, 130]);
        assert_eq!(s.prev_one(63), Some(63));
        assert_eq!(s.prev_one(129), Some(64));
        assert_eq!(s.prev_one(62), None);
        assert_eq!(s.prev_one(500), Some(130));
    }

    fn model(len: usize) -> impl Strategy<Value = Vec<bool>> {
        proptest::collection::vec(any::<bool>(), len)
    }

    proptest! {
        #[test]
        fn shift_matches_pointwise(bits in model(300), k in -310i64..310) {
            let s = BitSet::from_indices(300, bits.iter().enumerate().filter(|p| *p.1).map(|p| p.0));
            let t = s.shifted(k);
            for i in 0..300i64 {
                let src = i - k;
                let want = (0..300).contains(&src) && bits[src as usize];
                prop_assert_eq!(t.contains(i as usize), want);
            }
        }

        #[test]
        fn ranged_counts_match_pointwise(bits in model(257), lo in 0usize..257, span in 0usize..257) {
            let s = BitSet::from_indices(257, bits.iter().enumerate().filter(|p| *p.1).map(|p| p.0));
            let hi = lo + span;
            let want = (lo..=hi.min(256)).filter(|&i| bits[i]).count();
            prop_assert_eq!(s.count_range(lo, hi), want);
            prop_assert_eq!(s.any_in_range(lo, hi), want > 0);
            prop_assert_eq!(s.ones_in(lo, hi).count(), want);
        }
    }
}
