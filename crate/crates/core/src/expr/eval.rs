use std::sync::Arc;

use super::{SetExpr, ShiftBy};
use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::free::ReducedWord;
use crate::group::{CayleyTable, Universe};
use crate::set::MaterializedSet;

fn mismatch(what: &str, universe: &str) -> Error {
    Error::KindMismatch(format!("{what} on {universe}"))
}

fn is_triangular(x: i64) -> bool {
    if x < 0 {
        return false;
    }
    let d = 8 * x as u128 + 1;
    let r = d.isqrt();
    r * r == d
}

/// Pointwise membership of an integer, for the integer-valued primitives.
pub fn contains_int(expr: &SetExpr, x: i64) -> Result<bool> {
    Ok(match expr {
        SetExpr::Evens => x.rem_euclid(2) == 0,
        SetExpr::Triangular => is_triangular(x),
        SetExpr::All => true,
        SetExpr::Empty => false,
        SetExpr::Ap { a, d } => {
            let diff = x as i128 - *a as i128;
            diff % *d as i128 == 0 && diff / *d as i128 >= 0
        }
        SetExpr::Powers(k) => {
            let mut p: i64 = 1;
            loop {
                if p == x {
                    break true;
                }
                if p > x {
                    break false;
                }
                match p.checked_mul(*k as i64) {
                    Some(q) => p = q,
                    None => break false,
                }
            }
        }
        SetExpr::List(xs) => xs.contains(&x),
        SetExpr::Interval(a, b) => (*a..=*b).contains(&x),
        SetExpr::Union(a, b) => contains_int(a, x)? || contains_int(b, x)?,
        SetExpr::Inter(a, b) => contains_int(a, x)? && contains_int(b, x)?,
        SetExpr::Diff(a, b) => contains_int(a, x)? && !contains_int(b, x)?,
        SetExpr::Compl(a) => !contains_int(a, x)?,
        SetExpr::Shift(a, ShiftBy::Int(k)) => match x.checked_sub(*k) {
            Some(y) => contains_int(a, y)?,
            None => false,
        },
        SetExpr::Shift(_, ShiftBy::Word(_)) => return Err(mismatch("word shift", "integers")),
        SetExpr::F2Start(_) => return Err(mismatch("f2start", "integers")),
        SetExpr::Name(n) => return Err(Error::UnknownPrimitive(n.clone())),
    })
}

/// Materializes `expr ⊆ ℤ` on `[lo, lo+len)`; bit `i` stands for `lo + i`.
pub fn materialize_int_range(expr: &SetExpr, lo: i64, len: usize) -> Result<BitSet> {
    let hi = lo + len as i64 - 1;
    let idx = |x: i64| (x - lo) as usize;
    Ok(match expr {
        SetExpr::Evens => {
            let first = lo + lo.rem_euclid(2);
            BitSet::from_indices(len, (first..=hi).step_by(2).map(idx))
        }
        SetExpr::Triangular => {
            let mut out = BitSet::new(len);
            let mut n: i64 = 0;
            if lo > 0 {
                // Start just below the first triangular number >= lo.
                n = ((2 * lo as u128).isqrt() as i64 - 1).max(0);
            }
            loop {
                let t = n * (n - 1) / 2;
                if t > hi {
                    break;
                }
                if t >= lo {
                    out.insert(idx(t));
                }
                n += 1;
            }
            out
        }
        SetExpr::All => BitSet::full(len),
        SetExpr::Empty => BitSet::new(len),
        SetExpr::Ap { a, d } => {
            let mut out = BitSet::new(len);
            let (a, d) = (*a as i128, *d as i128);
            let (lo, hi) = (lo as i128, hi as i128);
            // Smallest k >= 0 with a + d·k in range.
            let k0 = if d > 0 {
                if a >= lo {
                    0
                } else {
                    (lo - a + d - 1) / d
                }
            } else if a <= hi {
                0
            } else {
                (a - hi + (-d) - 1) / (-d)
            };
            let mut x = a + d * k0;
            while (lo..=hi).contains(&x) {
                out.insert((x - lo) as usize);
                x += d;
            }
            out
        }
        SetExpr::Powers(k) => {
            let mut out = BitSet::new(len);
            let mut p: i64 = 1;
            loop {
                if p > hi {
                    break;
                }
                if p >= lo {
                    out.insert(idx(p));
                }
                match p.checked_mul(*k as i64) {
                    Some(q) => p = q,
                    None => break,
                }
            }
            out
        }
        SetExpr::List(xs) => BitSet::from_indices(
            len,
            xs.iter().filter(|x| (lo..=hi).contains(x)).map(|&x| idx(x)),
        ),
        SetExpr::Interval(a, b) => {
            let (a, b) = ((*a).max(lo), (*b).min(hi));
            if a > b {
                BitSet::new(len)
            } else {
                BitSet::range(len, idx(a), idx(b))
            }
        }
        SetExpr::Union(a, b) => {
            let mut s = materialize_int_range(a, lo, len)?;
            s.union_with(&materialize_int_range(b, lo, len)?);
            s
        }
        SetExpr::Inter(a, b) => {
            let mut s = materialize_int_range(a, lo, len)?;
            s.intersect_with(&materialize_int_range(b, lo, len)?);
            s
        }
        SetExpr::Diff(a, b) => {
            let mut s = materialize_int_range(a, lo, len)?;
            s.difference_with(&materialize_int_range(b, lo, len)?);
            s
        }
        SetExpr::Compl(a) => materialize_int_range(a, lo, len)?.complement(),
        SetExpr::Shift(a, ShiftBy::Int(k)) => {
            let start = lo
                .checked_sub(*k)
                .ok_or_else(|| Error::InvalidParam(format!("shift {k} overflows")))?;
            materialize_int_range(a, start, len)?
        }
        SetExpr::Shift(_, ShiftBy::Word(_)) => return Err(mismatch("word shift", "integers")),
        SetExpr::F2Start(_) => return Err(mismatch("f2start", "integers")),
        SetExpr::Name(n) => return Err(Error::UnknownPrimitive(n.clone())),
    })
}

/// `ℤ_N`: primitives are evaluated on the representatives `0..N`, shifts rotate.
fn materialize_cyclic(expr: &SetExpr, order: u64) -> Result<BitSet> {
    let n = order as usize;
    Ok(match expr {
        SetExpr::Union(a, b) => {
            let mut s = materialize_cyclic(a, order)?;
            s.union_with(&materialize_cyclic(b, order)?);
            s
        }
        SetExpr::Inter(a, b) => {
            let mut s = materialize_cyclic(a, order)?;
            s.intersect_with(&materialize_cyclic(b, order)?);
            s
        }
        SetExpr::Diff(a, b) => {
            let mut s = materialize_cyclic(a, order)?;
            s.difference_with(&materialize_cyclic(b, order)?);
            s
        }
        SetExpr::Compl(a) => materialize_cyclic(a, order)?.complement(),
        SetExpr::Shift(a, ShiftBy::Int(k)) => {
            let s = materialize_cyclic(a, order)?;
            let k = k.rem_euclid(order as i64);
            let mut r = s.shifted(k);
            if k != 0 {
                r.union_with(&s.shifted(k - order as i64));
            }
            r
        }
        SetExpr::Shift(_, ShiftBy::Word(_)) => return Err(mismatch("word shift", "Z-mod-N")),
        SetExpr::F2Start(_) => return Err(mismatch("f2start", "Z-mod-N")),
        leaf => materialize_int_range(leaf, 0, n)?,
    })
}

fn materialize_table(expr: &SetExpr, t: &CayleyTable) -> Result<BitSet> {
    let n = t.order();
    Ok(match expr {
        SetExpr::All => BitSet::full(n),
        SetExpr::Empty => BitSet::new(n),
        SetExpr::List(xs) => {
            let mut s = BitSet::new(n);
            for &x in xs {
                if x < 0 || x as usize >= n {
                    return Err(Error::InvalidParam(format!(
                        "element index {x} out of range 0..{n}"
                    )));
                }
                s.insert(x as usize);
            }
            s
        }
        SetExpr::Union(a, b) => {
            let mut s = materialize_table(a, t)?;
            s.union_with(&materialize_table(b, t)?);
            s
        }
        SetExpr::Inter(a, b) => {
            let mut s = materialize_table(a, t)?;
            s.intersect_with(&materialize_table(b, t)?);
            s
        }
        SetExpr::Diff(a, b) => {
            let mut s = materialize_table(a, t)?;
            s.difference_with(&materialize_table(b, t)?);
            s
        }
        SetExpr::Compl(a) => materialize_table(a, t)?.complement(),
        SetExpr::Shift(a, ShiftBy::Int(g)) => {
            if *g < 0 || *g as usize >= n {
                return Err(Error::InvalidParam(format!(
                    "element index {g} out of range 0..{n}"
                )));
            }
            let s = materialize_table(a, t)?;
            BitSet::from_indices(n, s.ones().map(|i| t.mul(*g as usize, i)))
        }
        SetExpr::Name(n) => return Err(Error::UnknownPrimitive(n.clone())),
        other => return Err(mismatch(&other.to_string(), "a Cayley-table group")),
    })
}

fn check_free(expr: &SetExpr) -> Result<()> {
    match expr {
        SetExpr::All | SetExpr::Empty | SetExpr::F2Start(_) => Ok(()),
        SetExpr::Union(a, b) | SetExpr::Inter(a, b) | SetExpr::Diff(a, b) => {
            check_free(a)?;
            check_free(b)
        }
        SetExpr::Compl(a) | SetExpr::Shift(a, ShiftBy::Word(_)) => check_free(a),
        SetExpr::Name(n) => Err(Error::UnknownPrimitive(n.clone())),
        other => Err(mismatch(&other.to_string(), "the free group")),
    }
}

fn contains_word(expr: &SetExpr, w: &ReducedWord) -> bool {
    match expr {
        SetExpr::All => true,
        SetExpr::F2Start(l) => w.first() == Some(*l),
        SetExpr::Union(a, b) => contains_word(a, w) || contains_word(b, w),
        SetExpr::Inter(a, b) => contains_word(a, w) && contains_word(b, w),
        SetExpr::Diff(a, b) => contains_word(a, w) && !contains_word(b, w),
        SetExpr::Compl(a) => !contains_word(a, w),
        // x ∈ gE iff g⁻¹x ∈ E; evaluated symbolically, so no truncation arises.
        SetExpr::Shift(a, ShiftBy::Word(g)) => contains_word(a, &g.inverse().product(w)),
        _ => false,
    }
}

/// Evaluates `expr` pointwise on the universe's carrier. Names must be resolved first.
pub fn materialize(expr: &SetExpr, universe: &Arc<Universe>) -> Result<MaterializedSet> {
    let bits = match universe.as_ref() {
        Universe::Integers(w) => materialize_int_range(expr, w.lo, w.size())?,
        Universe::Cyclic { order } => materialize_cyclic(expr, *order)?,
        Universe::Table(t) => materialize_table(expr, t)?,
        Universe::Free { ball, .. } => {
            check_free(expr)?;
            BitSet::from_indices(
                ball.len(),
                (0..ball.len()).filter(|&i| contains_word(expr, &ball.unrank(i))),
            )
        }
    };
    Ok(MaterializedSet::from_bits(universe, bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_set_expr;
    use crate::expr::tests::int_expr;
    use crate::group::{GroupElem, Window};
    use proptest::prelude::*;

    fn zwin(lo: i64, hi: i64) -> Arc<Universe> {
        Arc::new(Universe::integers(Window::new(lo, hi, 0).unwrap()))
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

    fn mat(text: &str, u: &Arc<Universe>) -> MaterializedSet {
        materialize(&parse_set_expr(text).unwrap(), u).unwrap()
    }

    #[test]
    fn triangular_up_to_one_hundred() {
        // Oracle: the defining formula n(n−1)/2, independent of the square test.
        let want: Vec<i64> = (0..20)
            .map(|n: i64| n * (n - 1) / 2)
            .filter(|t| *t <= 100)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(ints(&mat("triangular", &zwin(0, 100))), want);
        assert_eq!(
            want,
            vec![0, 1, 3, 6, 10, 15, 21, 28, 36, 45, 55, 66, 78, 91]
        );
    }

    #[test]
    fn basic_sets() {
        let u = zwin(-10, 10);
        assert!(mat("compl(all)", &u).is_empty());
        assert_eq!(ints(&mat("ap(1, 3)", &u)), vec![1, 4, 7, 10]);
        assert_eq!(ints(&mat("ap(1, -3)", &u)), vec![-8, -5, -2, 1]);
        assert_eq!(ints(&mat("powers(2)", &u)), vec![1, 2, 4, 8]);
        assert_eq!(ints(&mat("shift(list{1, 2}, -3)", &u)), vec![-2, -1]);
        let c = Arc::new(Universe::cyclic(12).unwrap());
        assert_eq!(ints(&mat("evens", &c)), vec![0, 2, 4, 6, 8, 10]);
        assert_eq!(ints(&mat("shift(list{11}, 2)", &c)), vec![1]);
        assert_eq!(ints(&mat("ap(0, 3)", &c)), vec![0, 3, 6, 9]);
    }

    #[test]
    fn kind_mismatches() {
        let u = zwin(-10, 10);
        assert!(matches!(
            materialize(&parse_set_expr("f2start(a)").unwrap(), &u),
            Err(Error::KindMismatch(_))
        ));
        let f = Arc::new(Universe::free(3, 0).unwrap());
        assert!(matches!(
            materialize(&parse_set_expr("evens").unwrap(), &f),
            Err(Error::KindMismatch(_))
        ));
        assert!(matches!(
            materialize(&parse_set_expr("odds").unwrap(), &u),
            Err(Error::UnknownPrimitive(_))
        ));
    }

    #[test]
    fn free_words() {
        let f = Arc::new(Universe::free(2, 0).unwrap());
        let s = mat("union(f2start(a), f2start(A))", &f);
        assert_eq!(s.count(), 2 + 6);
        let t = mat("shift(f2start(b), a)", &f);
        let names: Vec<String> = t.elements().iter().map(|g| g.to_string()).collect();
        assert_eq!(names, vec!["ab"]);
    }

    #[test]
    fn large_window_is_fast_enough() {
        let s = materialize_int_range(&SetExpr::Triangular, 0, 1_000_001).unwrap();
        assert_eq!(s.count(), 1414);
    }

    proptest! {
        #[test]
        fn bitset_matches_pointwise(e in int_expr(), lo in -200i64..200) {
            let bits = materialize_int_range(&e, lo, 300).unwrap();
            for i in 0..300 {
                prop_assert_eq!(bits.contains(i), contains_int(&e, lo + i as i64).unwrap());
            }
        }

        #[test]
        fn homomorphism(a in int_expr(), b in int_expr()) {
            let u = zwin(-150, 150);
            let (ma, mb) = (materialize(&a, &u).unwrap(), materialize(&b, &u).unwrap());
            prop_assert_eq!(materialize(&SetExpr::union(a.clone(), b.clone()), &u).unwrap(), ma.union(&mb).unwrap());
            prop_assert_eq!(materialize(&SetExpr::inter(a.clone(), b.clone()), &u).unwrap(), ma.intersection(&mb).unwrap());
            prop_assert_eq!(materialize(&SetExpr::diff(a.clone(), b), &u).unwrap(), ma.difference(&mb).unwrap());
            prop_assert_eq!(materialize(&SetExpr::compl(a), &u).unwrap(), ma.complement());
        }
    }
}
