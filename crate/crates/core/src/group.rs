//! The four supported ambient groups and their finite carriers.
//!
//! `ℤ` is modeled on a window `[lo, hi]` with a shift margin `S`: translates by
//! `|g| <= S` are exact on the core `[lo+S, hi-S]`. `F₂` is modeled on the ball of
//! reduced words of length `<= L`; translators have length `<= margin` and the core is
//! the ball of radius `L - margin`. Finite groups need no truncation.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free::{ReducedWord, WordBall};

/// Largest carrier we are willing to materialize as a bitset.
pub const MAX_UNIVERSE: usize = 1 << 28;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    /// `ℤ` on `[-radius, radius]`.
    IntegerWindow {
        radius: u64,
    },
    Cyclic {
        order: u64,
    },
    Cayley {
        table: Vec<Vec<usize>>,
        identity: usize,
    },
    FreeTwo {
        max_len: usize,
    },
}

/// Multiplication table of a finite group, validated on construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CayleyTable {
    order: usize,
    table: Vec<u32>,
    identity: usize,
    inverses: Vec<u32>,
}

impl CayleyTable {
    pub fn new(rows: Vec<Vec<usize>>, identity: usize) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParam("Cayley table must be non-empty".into()));
        }
        if identity >= n {
            return Err(Error::InvalidTable(format!(
                "identity index {identity} out of range 0..{n}"
            )));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::InvalidTable(format!(
                        "entry {v} out of range in row {i}"
                    )));
                }
                table.push(v as u32);
            }
        }
        let at = |i: usize, j: usize| table[i * n + j] as usize;
        for x in 0..n {
            if at(identity, x) != x || at(x, identity) != x {
                return Err(Error::InvalidTable(format!(
                    "{identity} is not a two-sided identity (fails at {x})"
                )));
            }
        }
        let mut inverses = Vec::with_capacity(n);
        for x in 0..n {
            let Some(y) = (0..n).find(|&y| at(x, y) == identity && at(y, x) == identity) else {
                return Err(Error::InvalidTable(format!("element {x} has no inverse")));
            };
            inverses.push(y as u32);
        }
        for x in 0..n {
            for y in 0..n {
                let xy = at(x, y);
                for z in 0..n {
                    if at(xy, z) != at(x, at(y, z)) {
                        return Err(Error::InvalidTable(format!(
                            "not associative: ({x}·{y})·{z} != {x}·({y}·{z})"
                        )));
                    }
                }
            }
        }
        Ok(CayleyTable {
            order: n,
            table,
            identity,
            inverses,
        })
    }

    /// Parses the plain-text format: `N`, then `N` rows of `N` indices, then the identity index.
    pub fn parse(text: &str) -> Result<Self> {
        let mut nums = text.split_whitespace().map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidTable(format!("not an index: `{t}`")))
        });
        let mut next = |what: &str| -> Result<usize> {
            nums.next()
                .unwrap_or_else(|| Err(Error::InvalidTable(format!("missing {what}"))))
        };
        let n = next("order")?;
        if n == 0 || n > 4096 {
            return Err(Error::InvalidTable(format!("unsupported order {n}")));
        }
        let mut rows = vec![Vec::with_capacity(n); n];
        for (i, row) in rows.iter_mut().enumerate() {
            for _ in 0..n {
                row.push(next(&format!("entries of row {i}"))?);
            }
        }
        let identity = next("identity index")?;
        if nums.next().is_some() {
            return Err(Error::InvalidTable("trailing data after identity".into()));
        }
        CayleyTable::new(rows, identity)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y] as usize
    }

    #[inline]
    pub fn inv(&self, x: usize) -> usize {
        self.inverses[x] as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    Integers,
    Cyclic { order: u64 },
    Table(Arc<CayleyTable>),
    FreeTwo { max_len: usize },
}

/// Validates a spec and builds the group handle.
pub fn make_group(spec: &GroupSpec) -> Result<Group> {
    match spec {
        GroupSpec::IntegerWindow { radius } => {
            if *radius < 1 {
                return Err(Error::InvalidParam("window radius must be >= 1".into()));
            }
            Ok(Group::Integers)
        }
        GroupSpec::Cyclic { order } => {
            if *order < 1 {
                return Err(Error::InvalidParam("modulus must be >= 1".into()));
            }
            Ok(Group::Cyclic { order: *order })
        }
        GroupSpec::Cayley { table, identity } => Ok(Group::Table(Arc::new(CayleyTable::new(
            table.clone(),
            *identity,
        )?))),
        GroupSpec::FreeTwo { max_len } => {
            WordBall::new(*max_len)?;
            Ok(Group::FreeTwo { max_len: *max_len })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElem {
    Int(i64),
    Residue(u64),
    Index(usize),
    Word(ReducedWord),
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Int(v) => write!(f, "{v}"),
            GroupElem::Residue(v) => write!(f, "{v}"),
            GroupElem::Index(v) => write!(f, "{v}"),
            GroupElem::Word(w) => write!(f, "{w}"),
        }
    }
}

/// JSON-friendly label of an element: integers stay numbers, words become strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElemLabel {
    Int(i64),
    Text(String),
}

impl From<&GroupElem> for ElemLabel {
    fn from(g: &GroupElem) -> Self {
        match g {
            GroupElem::Int(v) => ElemLabel::Int(*v),
            GroupElem::Residue(v) => ElemLabel::Int(*v as i64),
            GroupElem::Index(v) => ElemLabel::Int(*v as i64),
            GroupElem::Word(w) => ElemLabel::Text(w.to_string()),
        }
    }
}

impl Group {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Group::Integers => "Z-window",
            Group::Cyclic { .. } => "Z-mod-N",
            Group::Table(_) => "cayley-table",
            Group::FreeTwo { .. } => "free-2",
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Group::Cyclic { .. } | Group::Table(_))
    }

    pub fn identity(&self) -> GroupElem {
        match self {
            Group::Integers => GroupElem::Int(0),
            Group::Cyclic { .. } => GroupElem::Residue(0),
            Group::Table(t) => GroupElem::Index(t.identity()),
            Group::FreeTwo { .. } => GroupElem::Word(ReducedWord::identity()),
        }
    }

    fn mismatch(&self, g: &GroupElem) -> Error {
        Error::KindMismatch(format!("element {g} in a {} group", self.kind_name()))
    }

    /// Checks that `g` is a well-formed element of this group.
    pub fn check(&self, g: &GroupElem) -> Result<()> {
        match (self, g) {
            (Group::Integers, GroupElem::Int(_)) => Ok(()),
            (Group::Cyclic { order }, GroupElem::Residue(v)) if v < order => Ok(()),
            (Group::Table(t), GroupElem::Index(i)) if *i < t.order() => Ok(()),
            (Group::FreeTwo { .. }, GroupElem::Word(_)) => Ok(()),
            _ => Err(self.mismatch(g)),
        }
    }

    pub fn product(&self, g: &GroupElem, h: &GroupElem) -> Result<GroupElem> {
        self.check(g)?;
        self.check(h)?;
        Ok(match (self, g, h) {
            (Group::Integers, GroupElem::Int(x), GroupElem::Int(y)) => GroupElem::Int(
                x.checked_add(*y)
                    .ok_or_else(|| Error::InvalidParam("integer overflow".into()))?,
            ),
            (Group::Cyclic { order }, GroupElem::Residue(x), GroupElem::Residue(y)) => {
                GroupElem::Residue(((*x as u128 + *y as u128) % *order as u128) as u64)
            }
            (Group::Table(t), GroupElem::Index(x), GroupElem::Index(y)) => {
                GroupElem::Index(t.mul(*x, *y))
            }
            (Group::FreeTwo { .. }, GroupElem::Word(x), GroupElem::Word(y)) => {
                GroupElem::Word(x.product(y))
            }
            _ => unreachable!("checked above"),
        })
    }

    pub fn inverse(&self, g: &GroupElem) -> Result<GroupElem> {
        self.check(g)?;
        Ok(match (self, g) {
            (Group::Integers, GroupElem::Int(x)) => GroupElem::Int(-x),
            (Group::Cyclic { order }, GroupElem::Residue(x)) => {
                GroupElem::Residue((order - x) % order)
            }
            (Group::Table(t), GroupElem::Index(x)) => GroupElem::Index(t.inv(*x)),
            (Group::FreeTwo { .. }, GroupElem::Word(w)) => GroupElem::Word(w.inverse()),
            _ => unreachable!("checked above"),
        })
    }

    /// Parses an element written the way `Display` prints it.
    pub fn parse_elem(&self, text: &str) -> Result<GroupElem> {
        let text = text.trim();
        let bad = || {
            Error::InvalidParam(format!(
                "`{text}` is not an element of {}",
                self.kind_name()
            ))
        };
        let g = match self {
            Group::Integers => GroupElem::Int(text.parse().map_err(|_| bad())?),
            Group::Cyclic { order } => {
                let v: i64 = text.parse().map_err(|_| bad())?;
                GroupElem::Residue(v.rem_euclid(*order as i64) as u64)
            }
            Group::Table(_) => GroupElem::Index(text.parse().map_err(|_| bad())?),
            Group::FreeTwo { .. } => GroupElem::Word(text.parse()?),
        };
        self.check(&g)?;
        Ok(g)
    }
}

/// Finite window `[lo, hi]` of `ℤ` with shift margin `margin`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
    pub margin: u64,
}

impl Window {
    pub fn new(lo: i64, hi: i64, margin: u64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParam(format!("window [{lo}, {hi}] is empty")));
        }
        let w = Window { lo, hi, margin };
        if w.core().is_none() {
            return Err(Error::InvalidParam(format!(
                "margin {margin} leaves an empty core in [{lo}, {hi}]"
            )));
        }
        if (hi - lo) as u128 + 1 > MAX_UNIVERSE as u128 {
            return Err(Error::InvalidParam(format!(
                "window [{lo}, {hi}] is too large"
            )));
        }
        Ok(w)
    }

    /// Window whose core is exactly `[lo, hi]`: the carrier is padded by `margin` on both sides.
    pub fn with_core(lo: i64, hi: i64, margin: u64) -> Result<Self> {
        let m = i64::try_from(margin)
            .map_err(|_| Error::InvalidParam(format!("margin {margin} is too large")))?;
        Window::new(lo - m, hi + m, margin)
    }

    /// `[-radius, radius]`.
    pub fn symmetric(radius: u64, margin: u64) -> Result<Self> {
        Window::new(-(radius as i64), radius as i64, margin)
    }

    pub fn size(&self) -> usize {
        (self.hi - self.lo) as usize + 1
    }

    /// The core `[lo+margin, hi-margin]`, if non-empty.
    pub fn core(&self) -> Option<(i64, i64)> {
        let m = i64::try_from(self.margin).ok()?;
        let (a, b) = (self.lo.checked_add(m)?, self.hi.checked_sub(m)?);
        (a <= b).then_some((a, b))
    }

    pub fn with_margin(&self, margin: u64) -> Result<Self> {
        Window::new(self.lo, self.hi, margin)
    }
}

/// A group together with the finite carrier its sets are materialized on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Universe {
    Integers(Window),
    Cyclic { order: u64 },
    Table(Arc<CayleyTable>),
    Free { ball: WordBall, margin: usize },
}

impl Universe {
    pub fn integers(window: Window) -> Self {
        Universe::Integers(window)
    }

    pub fn cyclic(order: u64) -> Result<Self> {
        if order < 1 || order as usize > MAX_UNIVERSE {
            return Err(Error::InvalidParam(format!("unsupported modulus {order}")));
        }
        Ok(Universe::Cyclic { order })
    }

    pub fn free(max_len: usize, margin: usize) -> Result<Self> {
        let ball = WordBall::new(max_len)?;
        if margin > max_len {
            return Err(Error::InvalidParam(format!(
                "translator length budget {margin} exceeds word length bound {max_len}"
            )));
        }
        Ok(Universe::Free { ball, margin })
    }

    /// Builds the universe for a group; `margin` is the translation budget for the
    /// unbounded kinds and ignored for finite groups.
    pub fn from_group(group: &Group, spec: &GroupSpec, margin: u64) -> Result<Self> {
        match (group, spec) {
            (Group::Integers, GroupSpec::IntegerWindow { radius }) => {
                Ok(Universe::Integers(Window::symmetric(*radius, margin)?))
            }
            (Group::Cyclic { order }, _) => Universe::cyclic(*order),
            (Group::Table(t), _) => Ok(Universe::Table(t.clone())),
            (Group::FreeTwo { max_len }, _) => Universe::free(*max_len, margin as usize),
            _ => Err(Error::InvalidParam("group does not match its spec".into())),
        }
    }

    pub fn group(&self) -> Group {
        match self {
            Universe::Integers(_) => Group::Integers,
            Universe::Cyclic { order } => Group::Cyclic { order: *order },
            Universe::Table(t) => Group::Table(t.clone()),
            Universe::Free { ball, .. } => Group::FreeTwo {
                max_len: ball.max_len(),
            },
        }
    }

    pub fn kind_name(&self) -> &'static str {
        self.group().kind_name()
    }

    pub fn is_finite_group(&self) -> bool {
        matches!(self, Universe::Cyclic { .. } | Universe::Table(_))
    }

    pub fn size(&self) -> usize {
        match self {
            Universe::Integers(w) => w.size(),
            Universe::Cyclic { order } => *order as usize,
            Universe::Table(t) => t.order(),
            Universe::Free { ball, .. } => ball.len(),
        }
    }

    pub fn window(&self) -> Option<Window> {
        match self {
            Universe::Integers(w) => Some(*w),
            _ => None,
        }
    }

    /// Translation budget: shift bound on `ℤ`, word length on `F₂`, unbounded otherwise.
    pub fn margin(&self) -> Option<u64> {
        match self {
            Universe::Integers(w) => Some(w.margin),
            Universe::Free { margin, .. } => Some(*margin as u64),
            _ => None,
        }
    }

    pub fn with_margin(&self, margin: u64) -> Result<Self> {
        match self {
            Universe::Integers(w) => Ok(Universe::Integers(w.with_margin(margin)?)),
            Universe::Free { ball, .. } => Universe::free(ball.max_len(), margin as usize),
            other => Ok(other.clone()),
        }
    }

    /// Index range `[lo, hi]` of the core: positions where translates within budget are exact.
    pub fn core_range(&self) -> (usize, usize) {
        match self {
            Universe::Integers(w) => {
                let (a, b) = w.core().expect("validated window has a core");
                ((a - w.lo) as usize, (b - w.lo) as usize)
            }
            Universe::Free { ball, margin } => (0, ball.count_up_to(ball.max_len() - margin) - 1),
            _ => (0, self.size() - 1),
        }
    }

    pub fn core_size(&self) -> usize {
        let (a, b) = self.core_range();
        b - a + 1
    }

    pub fn elem(&self, i: usize) -> GroupElem {
        match self {
            Universe::Integers(w) => GroupElem::Int(w.lo + i as i64),
            Universe::Cyclic { .. } => GroupElem::Residue(i as u64),
            Universe::Table(_) => GroupElem::Index(i),
            Universe::Free { ball, .. } => GroupElem::Word(ball.unrank(i)),
        }
    }

    pub fn index_of(&self, g: &GroupElem) -> Option<usize> {
        match (self, g) {
            (Universe::Integers(w), GroupElem::Int(x)) => {
                (w.lo..=w.hi).contains(x).then(|| (x - w.lo) as usize)
            }
            (Universe::Cyclic { order }, GroupElem::Residue(x)) => {
                (x < order).then_some(*x as usize)
            }
            (Universe::Table(t), GroupElem::Index(i)) => (*i < t.order()).then_some(*i),
            (Universe::Free { ball, .. }, GroupElem::Word(w)) => ball.rank(w),
            _ => None,
        }
    }

    /// Size of a translator against the budget: `|g|` on `ℤ`, word length on `F₂`.
    pub fn translator_size(&self, g: &GroupElem) -> u64 {
        match g {
            GroupElem::Int(x) => x.unsigned_abs(),
            GroupElem::Word(w) => w.len() as u64,
            _ => 0,
        }
    }

    /// Fails with `ShiftOutOfBudget` when `g` exceeds the translation budget.
    pub fn check_translator(&self, g: &GroupElem) -> Result<()> {
        self.group().check(g)?;
        if let Some(m) = self.margin() {
            if self.translator_size(g) > m {
                return Err(Error::ShiftOutOfBudget {
                    shift: g.to_string(),
                    margin: m,
                });
            }
        }
        Ok(())
    }

    /// Translators within budget `s` in canonical order: `0, 1, -1, 2, -2, …` on `ℤ`
    /// (clamped to the margin), shortlex words of length `<= s` on `F₂`, all elements of a
    /// finite group in index order.
    pub fn translators_within(&self, s: u64) -> Vec<GroupElem> {
        match self {
            Universe::Integers(w) => {
                let s = s.min(w.margin) as i64;
                std::iter::once(0)
                    .chain((1..=s).flat_map(|k| [k, -k]))
                    .map(GroupElem::Int)
                    .collect()
            }
            Universe::Free { ball, margin } => {
                let n = ball.count_up_to((s as usize).min(*margin));
                (0..n).map(|i| GroupElem::Word(ball.unrank(i))).collect()
            }
            _ => (0..self.size()).map(|i| self.elem(i)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn klein() -> Vec<Vec<usize>> {
        vec![
            vec![0, 1, 2, 3],
            vec![1, 0, 3, 2],
            vec![2, 3, 0, 1],
            vec![3, 2, 1, 0],
        ]
    }

    #[test]
    fn cyclic_group_of_order_twelve() {
        let g = make_group(&GroupSpec::Cyclic { order: 12 }).unwrap();
        let u = Universe::from_group(&g, &GroupSpec::Cyclic { order: 12 }, 0).unwrap();
        assert_eq!(u.size(), 12);
        let x = g
            .product(&GroupElem::Residue(7), &GroupElem::Residue(9))
            .unwrap();
        assert_eq!(x, GroupElem::Residue(4));
        assert_eq!(
            g.inverse(&GroupElem::Residue(0)).unwrap(),
            GroupElem::Residue(0)
        );
    }

    #[test]
    fn klein_four_is_accepted() {
        let g = make_group(&GroupSpec::Cayley {
            table: klein(),
            identity: 0,
        })
        .unwrap();
        let Group::Table(t) = g else { panic!() };
        assert!((0..4).all(|x| t.inv(x) == x));
    }

    #[test]
    fn non_associative_table_is_rejected() {
        // Identity 0, every element self-inverse, but (1·2)·3 = 1·3 ≠ 1·(2·3).
        let table = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        let err = make_group(&GroupSpec::Cayley { table, identity: 0 }).unwrap_err();
        assert!(
            matches!(err, Error::InvalidTable(ref m) if m.contains("associative")),
            "{err}"
        );
    }

    #[test]
    fn bad_params() {
        assert!(matches!(
            make_group(&GroupSpec::IntegerWindow { radius: 0 }),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            make_group(&GroupSpec::Cyclic { order: 0 }),
            Err(Error::InvalidParam(_))
        ));
        assert!(matches!(
            make_group(&GroupSpec::FreeTwo { max_len: 0 }),
            Err(Error::InvalidParam(_))
        ));
        let missing_identity = vec![vec![1, 0], vec![0, 1]];
        assert!(matches!(
            CayleyTable::new(missing_identity, 0),
            Err(Error::InvalidTable(_))
        ));
    }

    #[test]
    fn table_text_format() {
        let t = CayleyTable::parse("4\n0 1 2 3\n1 0 3 2\n2 3 0 1\n3 2 1 0\n0\n").unwrap();
        assert_eq!(t.order(), 4);
        assert!(CayleyTable::parse("2\n0 1\n1 0\n").is_err());
        assert!(CayleyTable::parse("2\n0 1\n1 0\n0\n7\n").is_err());
    }

    #[test]
    fn integer_core_and_budget() {
        let u = Universe::integers(Window::new(0, 100, 10).unwrap());
        assert_eq!(u.core_range(), (10, 90));
        assert!(u.check_translator(&GroupElem::Int(-10)).is_ok());
        assert!(matches!(
            u.check_translator(&GroupElem::Int(11)),
            Err(Error::ShiftOutOfBudget { .. })
        ));
        assert!(Window::new(0, 10, 6).is_err());
    }

    #[test]
    fn translator_order_is_by_absolute_value() {
        let u = Universe::integers(Window::new(-50, 50, 5).unwrap());
        let ts: Vec<String> = u
            .translators_within(2)
            .iter()
            .map(|g| g.to_string())
            .collect();
        assert_eq!(ts, ["0", "1", "-1", "2", "-2"]);
    }

    #[test]
    fn free_core_is_inner_ball() {
        let u = Universe::free(4, 1).unwrap();
        assert_eq!(u.core_size(), WordBall::new(3).unwrap().len());
        assert_eq!(u.translators_within(1).len(), 5);
    }
}
