//! Set-description language: syntax tree, printer, parser, catalog files, materialization
//! and structural finiteness.

mod catalog;
mod eval;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::free::{Letter, ReducedWord};

pub use catalog::Catalog;
pub use eval::{contains_int, materialize, materialize_int_range};
pub use parse::parse_set_expr;

/// Reserved words; catalog names may not use them.
pub const KEYWORDS: &[&str] = &[
    "evens",
    "triangular",
    "all",
    "empty",
    "ap",
    "powers",
    "list",
    "interval",
    "f2start",
    "union",
    "inter",
    "diff",
    "compl",
    "shift",
];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ShiftBy {
    Int(i64),
    Word(ReducedWord),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SetExpr {
    /// Reference to a catalog entry.
    Name(String),
    Evens,
    /// `{n(n-1)/2 : n ≥ 0}` = `{0, 1, 3, 6, …}`.
    Triangular,
    All,
    Empty,
    /// `{a + d·k : k ≥ 0}`, `d ≠ 0`.
    Ap {
        a: i64,
        d: i64,
    },
    /// `{k^j : j ≥ 0}`, `k ≥ 2`.
    Powers(u64),
    List(Vec<i64>),
    /// `[a, b]`, empty when `a > b`.
    Interval(i64, i64),
    /// Reduced words whose first letter is the given one.
    F2Start(Letter),
    Union(Box<SetExpr>, Box<SetExpr>),
    Inter(Box<SetExpr>, Box<SetExpr>),
    Diff(Box<SetExpr>, Box<SetExpr>),
    Compl(Box<SetExpr>),
    /// Left translate `g·E`.
    Shift(Box<SetExpr>, ShiftBy),
}

impl SetExpr {
    pub fn union(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn inter(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Inter(Box::new(a), Box::new(b))
    }

    pub fn diff(a: SetExpr, b: SetExpr) -> Self {
        SetExpr::Diff(Box::new(a), Box::new(b))
    }

    pub fn compl(a: SetExpr) -> Self {
        SetExpr::Compl(Box::new(a))
    }

    pub fn shift(a: SetExpr, k: i64) -> Self {
        SetExpr::Shift(Box::new(a), ShiftBy::Int(k))
    }

    pub fn shift_word(a: SetExpr, w: ReducedWord) -> Self {
        SetExpr::Shift(Box::new(a), ShiftBy::Word(w))
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&SetExpr> {
        match self {
            SetExpr::Union(a, b) | SetExpr::Inter(a, b) | SetExpr::Diff(a, b) => vec![a, b],
            SetExpr::Compl(a) | SetExpr::Shift(a, _) => vec![a],
            _ => Vec::new(),
        }
    }

    /// Largest absolute value of an integer literal in a list or interval (0 if none).
    pub fn max_literal(&self) -> u64 {
        let own = match self {
            SetExpr::List(xs) => xs.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0),
            SetExpr::Interval(a, b) => a.unsigned_abs().max(b.unsigned_abs()),
            _ => 0,
        };
        self.children()
            .into_iter()
            .map(SetExpr::max_literal)
            .fold(own, u64::max)
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Name(n) => f.write_str(n),
            SetExpr::Evens => f.write_str("evens"),
            SetExpr::Triangular => f.write_str("triangular"),
            SetExpr::All => f.write_str("all"),
            SetExpr::Empty => f.write_str("empty"),
            SetExpr::Ap { a, d } => write!(f, "ap({a}, {d})"),
            SetExpr::Powers(k) => write!(f, "powers({k})"),
            SetExpr::List(xs) => {
                f.write_str("list{")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str("}")
            }
            SetExpr::Interval(a, b) => write!(f, "interval({a}, {b})"),
            SetExpr::F2Start(l) => write!(f, "f2start({})", l.as_char()),
            SetExpr::Union(a, b) => write!(f, "union({a}, {b})"),
            SetExpr::Inter(a, b) => write!(f, "inter({a}, {b})"),
            SetExpr::Diff(a, b) => write!(f, "diff({a}, {b})"),
            SetExpr::Compl(a) => write!(f, "compl({a})"),
            SetExpr::Shift(a, ShiftBy::Int(k)) => write!(f, "shift({a}, {k})"),
            SetExpr::Shift(a, ShiftBy::Word(w)) => write!(f, "shift({a}, {w})"),
        }
    }
}

impl Serialize for SetExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SetExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_set_expr(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Finiteness {
    Finite,
    Infinite,
    Unknown,
}

/// Structural finiteness judgment in an infinite ambient group. Only provable verdicts
/// are returned; everything else, including unresolved names, is `Unknown`.
pub fn symbolic_finiteness(expr: &SetExpr) -> Finiteness {
    use Finiteness::*;
    match expr {
        SetExpr::List(_) | SetExpr::Interval(..) | SetExpr::Empty => Finite,
        SetExpr::Evens
        | SetExpr::Triangular
        | SetExpr::All
        | SetExpr::Ap { .. }
        | SetExpr::Powers(_)
        | SetExpr::F2Start(_) => Infinite,
        SetExpr::Name(_) => Unknown,
        SetExpr::Union(a, b) => match (symbolic_finiteness(a), symbolic_finiteness(b)) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Finite, Finite) => Finite,
            _ => Unknown,
        },
        SetExpr::Inter(a, b) => match (symbolic_finiteness(a), symbolic_finiteness(b)) {
            (Finite, _) | (_, Finite) => Finite,
            _ => Unknown,
        },
        SetExpr::Diff(a, b) => match (symbolic_finiteness(a), symbolic_finiteness(b)) {
            (Finite, _) => Finite,
            (Infinite, Finite) => Infinite,
            _ => Unknown,
        },
        SetExpr::Compl(a) => match symbolic_finiteness(a) {
            Finite => Infinite,
            _ => Unknown,
        },
        SetExpr::Shift(a, _) => symbolic_finiteness(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> SetExpr {
        parse_set_expr(s).unwrap()
    }

    #[test]
    fn finiteness_examples() {
        assert_eq!(symbolic_finiteness(&p("list{1,2,3}")), Finiteness::Finite);
        assert_eq!(symbolic_finiteness(&p("triangular")), Finiteness::Infinite);
        assert_eq!(
            symbolic_finiteness(&p("diff(evens, triangular)")),
            Finiteness::Unknown
        );
        assert_eq!(
            symbolic_finiteness(&p("diff(evens, list{2})")),
            Finiteness::Infinite
        );
        assert_eq!(
            symbolic_finiteness(&p("inter(evens, interval(0, 9))")),
            Finiteness::Finite
        );
        assert_eq!(
            symbolic_finiteness(&p("compl(list{4})")),
            Finiteness::Infinite
        );
        assert_eq!(symbolic_finiteness(&p("compl(all)")), Finiteness::Unknown);
        assert_eq!(symbolic_finiteness(&p("odds")), Finiteness::Unknown);
    }

    fn leaf() -> impl Strategy<Value = SetExpr> {
        prop_oneof![
            Just(SetExpr::Evens),
            Just(SetExpr::Triangular),
            Just(SetExpr::All),
            Just(SetExpr::Empty),
            (-20i64..20, prop_oneof![1i64..6, -5i64..0]).prop_map(|(a, d)| SetExpr::Ap { a, d }),
            (2u64..5).prop_map(SetExpr::Powers),
            proptest::collection::vec(-30i64..30, 1..5).prop_map(SetExpr::List),
            (-30i64..30, 0i64..20).prop_map(|(a, l)| SetExpr::Interval(a, a + l)),
        ]
    }

    pub(crate) fn int_expr() -> impl Strategy<Value = SetExpr> {
        leaf().prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::union(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::inter(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SetExpr::diff(a, b)),
                inner.clone().prop_map(SetExpr::compl),
                (inner, -15i64..15).prop_map(|(a, k)| SetExpr::shift(a, k)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(e in int_expr()) {
            prop_assert_eq!(parse_set_expr(&e.to_string()).unwrap(), e);
        }

        #[test]
        fn finite_verdicts_are_sound(e in int_expr()) {
            if symbolic_finiteness(&e) == Finiteness::Finite {
                let r = 10 * (e.max_literal() as i64 + 1) + 15 * 8;
                let count = |radius: i64| {
                    materialize_int_range(&e, -radius, (2 * radius + 1) as usize).unwrap().count()
                };
                prop_assert_eq!(count(r), count(2 * r));
            }
        }

        #[test]
        fn infinite_verdicts_grow(e in int_expr()) {
            if symbolic_finiteness(&e) == Finiteness::Infinite {
                let r = 10 * (e.max_literal() as i64 + 1) + 15 * 8;
                let count = |radius: i64| {
                    materialize_int_range(&e, -radius, (2 * radius + 1) as usize).unwrap().count()
                };
                prop_assert!(count(8 * r) > count(r));
            }
        }
    }
}
