//! Translation-invariant ideals as decision procedures on materialized sets.
//!
//! Membership is judged on the core of the universe. Finite semantics per kind:
//!
//! * `trivial`: the set misses the core.
//! * `finite-sets`: the set meets the core only inside the radius-`R` ball around the
//!   identity (`[-R, R]` on `ℤ`, words of length `<= R` on `F₂`). Expressions can also be
//!   judged structurally with [`Ideal::member_expr`].
//! * `density-zero`: outside the radius-`R` ball, every length-`L` window of the core
//!   (largest scheduled `L`) holds at most `threshold·L` points. Reported as a proxy.
//! * `generated`: the set is covered by at most `E` translates of the generators, up to a
//!   remainder in the base ideal (`trivial` or `finite-sets`).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::expr::{materialize, symbolic_finiteness, Catalog, Finiteness, SetExpr};
use crate::group::{GroupElem, Universe};
use crate::measure::max_window_count;
use crate::set::{same_universe, MaterializedSet};

/// Node cap for the covering search of generated ideals.
pub const GENERATED_NODE_CAP: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IdealSpec {
    Trivial,
    FiniteSets {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<u64>,
    },
    DensityZero {
        lengths: Vec<usize>,
        threshold: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<u64>,
    },
    Generated {
        base: Box<IdealSpec>,
        generators: Vec<SetExpr>,
        max_translates: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shift_range: Option<u64>,
    },
}

impl IdealSpec {
    pub fn density_zero_default() -> Self {
        IdealSpec::DensityZero {
            lengths: vec![64, 256, 1024],
            threshold: 0.02,
            radius: None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            IdealSpec::Trivial => "trivial",
            IdealSpec::FiniteSets { .. } => "finite-sets",
            IdealSpec::DensityZero { .. } => "density-zero",
            IdealSpec::Generated { .. } => "generated",
        }
    }

    /// Whether membership relies on the density-zero stand-in for the null ideal.
    pub fn is_proxy(&self) -> bool {
        match self {
            IdealSpec::DensityZero { .. } => true,
            IdealSpec::Generated { base, .. } => base.is_proxy(),
            _ => false,
        }
    }

    /// Substitutes catalog names in generator expressions.
    pub fn resolve(&self, catalog: &Catalog) -> Result<Self> {
        Ok(match self {
            IdealSpec::Generated {
                base,
                generators,
                max_translates,
                shift_range,
            } => IdealSpec::Generated {
                base: Box::new(base.resolve(catalog)?),
                generators: generators
                    .iter()
                    .map(|g| catalog.resolve(g))
                    .collect::<Result<_>>()?,
                max_translates: *max_translates,
                shift_range: *shift_range,
            },
            other => other.clone(),
        })
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Trivial,
    Finite {
        allowed: BitSet,
        radius: u64,
    },
    Density {
        length: usize,
        threshold: f64,
        allowed: BitSet,
        radius: u64,
    },
    Generated {
        base: Box<Kind>,
        generators: Vec<MaterializedSet>,
        translators: Vec<GroupElem>,
        max_translates: usize,
    },
}

/// An ideal bound to a universe.
#[derive(Clone, Debug)]
pub struct Ideal {
    spec: IdealSpec,
    universe: Arc<Universe>,
    kind: Kind,
}

/// Default radius of the finite ball: 1% of the core span on `ℤ`, half the word length on `F₂`.
pub fn default_radius(universe: &Universe) -> u64 {
    match universe {
        Universe::Integers(_) => (universe.core_size() as u64 / 100).max(1),
        Universe::Free { ball, .. } => (ball.max_len() / 2) as u64,
        _ => 0,
    }
}

fn ball_mask(universe: &Universe, radius: u64) -> BitSet {
    let n = universe.size();
    match universe {
        Universe::Integers(w) => {
            let r = radius.min(i64::MAX as u64 / 2) as i64;
            let (a, b) = ((-r).max(w.lo), r.min(w.hi));
            if a > b {
                BitSet::new(n)
            } else {
                BitSet::range(n, (a - w.lo) as usize, (b - w.lo) as usize)
            }
        }
        Universe::Free { ball, .. } => {
            let k = ball.count_up_to(radius as usize);
            BitSet::range(n, 0, k - 1)
        }
        _ => BitSet::new(n),
    }
}

fn build_kind(spec: &IdealSpec, universe: &Arc<Universe>) -> Result<Kind> {
    Ok(match spec {
        IdealSpec::Trivial => Kind::Trivial,
        IdealSpec::FiniteSets { radius } => {
            if universe.is_finite_group() {
                return Err(Error::InvalidParam(
                    "finite-sets ideal is all of P(G) on a finite group".into(),
                ));
            }
            let radius = radius.unwrap_or_else(|| default_radius(universe));
            Kind::Finite {
                allowed: ball_mask(universe, radius),
                radius,
            }
        }
        IdealSpec::DensityZero {
            lengths,
            threshold,
            radius,
        } => {
            if !matches!(
                universe.as_ref(),
                Universe::Integers(_) | Universe::Cyclic { .. }
            ) {
                return Err(Error::KindMismatch(format!(
                    "density-zero ideal on {}",
                    universe.kind_name()
                )));
            }
            let &length = lengths
                .iter()
                .max()
                .ok_or_else(|| Error::InvalidParam("empty density schedule".into()))?;
            if lengths.contains(&0) || length > universe.core_size() {
                return Err(Error::InvalidParam(format!(
                    "schedule lengths must lie in 1..={}",
                    universe.core_size()
                )));
            }
            if !(0.0..1.0).contains(threshold) {
                return Err(Error::InvalidParam(format!(
                    "density threshold {threshold} must lie in [0, 1)"
                )));
            }
            let radius = match universe.as_ref() {
                Universe::Cyclic { .. } => 0,
                _ => radius.unwrap_or_else(|| default_radius(universe)),
            };
            let allowed = match universe.as_ref() {
                Universe::Cyclic { .. } => BitSet::new(universe.size()),
                u => ball_mask(u, radius),
            };
            Kind::Density {
                length,
                threshold: *threshold,
                allowed,
                radius,
            }
        }
        IdealSpec::Generated {
            base,
            generators,
            max_translates,
            shift_range,
        } => {
            if !matches!(**base, IdealSpec::Trivial | IdealSpec::FiniteSets { .. }) {
                return Err(Error::InvalidParam(
                    "generated ideals take a trivial or finite-sets base".into(),
                ));
            }
            let shift = shift_range.unwrap_or_else(|| universe.margin().unwrap_or(u64::MAX));
            if let Some(m) = universe.margin() {
                if shift > m {
                    return Err(Error::RangeExceedsMargin(format!(
                        "generator shift range {shift} exceeds margin {m}"
                    )));
                }
            }
            Kind::Generated {
                base: Box::new(build_kind(base, universe)?),
                generators: generators
                    .iter()
                    .map(|g| materialize(g, universe))
                    .collect::<Result<_>>()?,
                translators: universe.translators_within(shift),
                max_translates: *max_translates,
            }
        }
    })
}

/// Builds an ideal on `universe`, rejecting improper ones (those containing the whole group).
pub fn make_ideal(spec: &IdealSpec, universe: &Arc<Universe>) -> Result<Ideal> {
    let ideal = Ideal::build(spec, universe)?;
    if !ideal.is_proper()? {
        return Err(Error::InvalidParam(format!(
            "{} ideal contains the whole group at this scale",
            spec.kind_name()
        )));
    }
    Ok(ideal)
}

impl Ideal {
    /// Builds the decision procedure without the properness check.
    pub fn build(spec: &IdealSpec, universe: &Arc<Universe>) -> Result<Self> {
        Ok(Ideal {
            spec: spec.clone(),
            universe: universe.clone(),
            kind: build_kind(spec, universe)?,
        })
    }

    pub fn trivial(universe: &Arc<Universe>) -> Self {
        Ideal {
            spec: IdealSpec::Trivial,
            universe: universe.clone(),
            kind: Kind::Trivial,
        }
    }

    pub fn spec(&self) -> &IdealSpec {
        &self.spec
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.kind, Kind::Trivial)
    }

    pub fn is_proxy(&self) -> bool {
        self.spec.is_proxy()
    }

    /// Points any member may contain beyond what the kind otherwise checks: a set whose
    /// core part lies inside this mask is always a member.
    pub fn allowance(&self) -> Option<&BitSet> {
        match &self.kind {
            Kind::Finite { allowed, .. } | Kind::Density { allowed, .. } => Some(allowed),
            Kind::Generated { base, .. } => match base.as_ref() {
                Kind::Finite { allowed, .. } => Some(allowed),
                _ => None,
            },
            Kind::Trivial => None,
        }
    }

    /// True when membership is exactly "core part inside the allowance".
    pub fn is_exact_cover_kind(&self) -> bool {
        matches!(self.kind, Kind::Trivial | Kind::Finite { .. })
    }

    pub fn is_proper(&self) -> Result<bool> {
        Ok(!self.member(&MaterializedSet::full(&self.universe))?)
    }

    /// Short identifier with the scale parameters, for reports.
    pub fn id(&self) -> String {
        fn go(k: &Kind, spec: &IdealSpec) -> String {
            match (k, spec) {
                (Kind::Trivial, _) => "trivial".into(),
                (Kind::Finite { radius, .. }, _) => format!("finite-sets(R={radius})"),
                (
                    Kind::Density {
                        length,
                        threshold,
                        radius,
                        ..
                    },
                    _,
                ) => format!("density-zero(L={length}, eps={threshold}, R={radius})"),
                (
                    Kind::Generated {
                        base,
                        max_translates,
                        translators,
                        ..
                    },
                    IdealSpec::Generated {
                        base: bspec,
                        generators,
                        ..
                    },
                ) => format!(
                    "generated(base={}, E={max_translates}, translators={}, by=[{}])",
                    go(base, bspec),
                    translators.len(),
                    generators
                        .iter()
                        .map(|g| g.to_string())
                        .collect::<Vec<_>>()
                        .join("; ")
                ),
                _ => unreachable!("kind follows spec"),
            }
        }
        go(&self.kind, &self.spec)
    }

    /// Membership of a materialized set, judged on the core.
    pub fn member(&self, a: &MaterializedSet) -> Result<bool> {
        if !same_universe(&self.universe, a.universe()) {
            return Err(Error::ScaleMismatch);
        }
        let core = a.restrict_to_core();
        self.member_core(&self.kind, core.bits())
    }

    /// Membership of an expression. `finite-sets` judges structurally and treats
    /// `unknown` as non-membership; other kinds materialize.
    pub fn member_expr(&self, expr: &SetExpr) -> Result<bool> {
        match &self.kind {
            Kind::Finite { .. } => Ok(symbolic_finiteness(expr) == Finiteness::Finite),
            _ => self.member(&materialize(expr, &self.universe)?),
        }
    }

    /// `A ⊂_I B`: `A ∖ B ∈ I`.
    pub fn subset_mod(&self, a: &MaterializedSet, b: &MaterializedSet) -> Result<bool> {
        self.member(&a.difference(b)?)
    }

    /// `A =_I B`.
    pub fn eq_mod(&self, a: &MaterializedSet, b: &MaterializedSet) -> Result<bool> {
        Ok(self.subset_mod(a, b)? && self.subset_mod(b, a)?)
    }

    // `bits` is already restricted to the core.
    fn member_core(&self, kind: &Kind, bits: &BitSet) -> Result<bool> {
        match kind {
            Kind::Trivial => Ok(bits.is_empty()),
            Kind::Finite { allowed, .. } => Ok(bits.is_subset(allowed)),
            Kind::Density {
                length,
                threshold,
                allowed,
                ..
            } => {
                let mut rest = bits.clone();
                rest.difference_with(allowed);
                let (lo, hi) = self.universe.core_range();
                let cyclic = matches!(self.universe.as_ref(), Universe::Cyclic { .. });
                let max = max_window_count(&rest, lo, hi, *length, cyclic);
                Ok(max as f64 <= threshold * *length as f64 + 1e-9)
            }
            Kind::Generated {
                base,
                generators,
                translators,
                max_translates,
            } => {
                let mut must = bits.clone();
                match base.as_ref() {
                    Kind::Finite { allowed, .. } => must.difference_with(allowed),
                    Kind::Trivial => {}
                    _ => unreachable!("validated in build"),
                }
                if must.is_empty() {
                    return Ok(true);
                }
                let mut nodes = 0;
                self.cover(&must, generators, translators, *max_translates, &mut nodes)
            }
        }
    }

    /// Whether `must` is covered by at most `budget` translates `g·Gen_i`. Branches on the
    /// first uncovered point, which every cover must handle.
    fn cover(
        &self,
        must: &BitSet,
        generators: &[MaterializedSet],
        translators: &[GroupElem],
        budget: usize,
        nodes: &mut u64,
    ) -> Result<bool> {
        let Some(x) = must.next_one(0) else {
            return Ok(true);
        };
        let widest = generators.iter().map(|g| g.count()).max().unwrap_or(0);
        if budget == 0 || must.count() > budget * widest {
            return Ok(false);
        }
        *nodes += 1;
        if *nodes > GENERATED_NODE_CAP {
            return Err(Error::BudgetExceeded {
                needed: *nodes as u128,
                cap: GENERATED_NODE_CAP as u128,
            });
        }
        let group = self.universe.group();
        let xe = self.universe.elem(x);
        for gen in generators {
            for g in translators {
                // x ∈ g·Gen iff g⁻¹x ∈ Gen.
                let pre = group.product(&group.inverse(g)?, &xe)?;
                if !gen.contains(&pre) {
                    continue;
                }
                let t = gen.left_translate_unchecked(g);
                let mut rest = must.clone();
                rest.difference_with(t.bits());
                if self.cover(&rest, generators, translators, budget - 1, nodes)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_set_expr;
    use crate::group::Window;
    use proptest::prelude::*;

    fn zcore(lo: i64, hi: i64, margin: u64) -> Arc<Universe> {
        Arc::new(Universe::integers(
            Window::with_core(lo, hi, margin).unwrap(),
        ))
    }

    fn mat(s: &str, u: &Arc<Universe>) -> MaterializedSet {
        materialize(&parse_set_expr(s).unwrap(), u).unwrap()
    }

    #[test]
    fn trivial_ideal() {
        let u = zcore(-100, 100, 10);
        let i = make_ideal(&IdealSpec::Trivial, &u).unwrap();
        assert!(i.member(&mat("empty", &u)).unwrap());
        assert!(!i.member(&mat("list{0}", &u)).unwrap());
        assert!(!i.member(&mat("evens", &u)).unwrap());
        let (e, o) = (mat("evens", &u), mat("shift(evens, 1)", &u));
        assert!(i.eq_mod(&e, &e).unwrap());
        assert!(!i.subset_mod(&e, &o).unwrap());
    }

    #[test]
    fn finite_sets_ideal() {
        let u = zcore(-1000, 1000, 10);
        let i = make_ideal(&IdealSpec::FiniteSets { radius: None }, &u).unwrap();
        assert!(i
            .member_expr(&parse_set_expr("list{1,2}").unwrap())
            .unwrap());
        assert!(!i
            .member_expr(&parse_set_expr("diff(evens, triangular)").unwrap())
            .unwrap());
        assert!(i.member(&mat("list{1,2}", &u)).unwrap());
        assert!(!i.member(&mat("triangular", &u)).unwrap());
        let a = mat("union(evens, list{1,3,5})", &u);
        assert!(i.subset_mod(&a, &mat("evens", &u)).unwrap());
        let c = Arc::new(Universe::cyclic(12).unwrap());
        assert!(make_ideal(&IdealSpec::FiniteSets { radius: None }, &c).is_err());
    }

    #[test]
    fn density_zero_on_a_million() {
        let u = zcore(0, 1_000_000, 0);
        let i = make_ideal(&IdealSpec::density_zero_default(), &u).unwrap();
        assert!(i.is_proxy());
        assert!(i.member(&mat("triangular", &u)).unwrap());
        assert!(!i.member(&mat("evens", &u)).unwrap());
        assert!(i.member(&mat("powers(2)", &u)).unwrap());
        let f = Arc::new(Universe::free(4, 0).unwrap());
        assert!(matches!(
            Ideal::build(&IdealSpec::density_zero_default(), &f),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn generated_by_triangular() {
        let u = zcore(-2000, 2000, 16);
        let spec = IdealSpec::Generated {
            base: Box::new(IdealSpec::Trivial),
            generators: vec![SetExpr::Triangular],
            max_translates: 3,
            shift_range: None,
        };
        let i = make_ideal(&spec, &u).unwrap();
        assert!(i.member(&mat("shift(triangular, 7)", &u)).unwrap());
        assert!(i
            .member(&mat("union(shift(triangular, -3), list{10, 13})", &u))
            .unwrap());
        assert!(!i.member(&mat("evens", &u)).unwrap());
        assert!(!i.member(&mat("shift(triangular, 40)", &u)).unwrap());
    }

    #[test]
    fn improper_generated_ideal_is_rejected() {
        let u = zcore(-200, 200, 4);
        let spec = IdealSpec::Generated {
            base: Box::new(IdealSpec::Trivial),
            generators: vec![SetExpr::Evens],
            max_translates: 2,
            shift_range: None,
        };
        assert!(matches!(make_ideal(&spec, &u), Err(Error::InvalidParam(_))));
        assert!(!Ideal::build(&spec, &u).unwrap().is_proper().unwrap());
    }

    #[test]
    fn scale_mismatch() {
        let u = zcore(-10, 10, 1);
        let v = zcore(-11, 11, 1);
        let i = make_ideal(&IdealSpec::Trivial, &u).unwrap();
        assert!(matches!(
            i.member(&mat("empty", &v)),
            Err(Error::ScaleMismatch)
        ));
    }

    fn cyclic_specs() -> Vec<IdealSpec> {
        vec![
            IdealSpec::Trivial,
            IdealSpec::DensityZero {
                lengths: vec![8, 16],
                threshold: 0.2,
                radius: None,
            },
            IdealSpec::Generated {
                base: Box::new(IdealSpec::Trivial),
                generators: vec![parse_set_expr("list{0, 1, 5}").unwrap()],
                max_translates: 2,
                shift_range: None,
            },
        ]
    }

    fn random_pair() -> impl Strategy<Value = (Vec<bool>, Vec<bool>)> {
        (
            proptest::collection::vec(any::<bool>(), 48),
            proptest::collection::vec(any::<bool>(), 48),
        )
    }

    proptest! {
        #[test]
        fn downward_closed((b, keep) in random_pair()) {
            let u = Arc::new(Universe::cyclic(48).unwrap());
            let big = MaterializedSet::from_predicate(&u, |i| b[i]);
            let small = MaterializedSet::from_predicate(&u, |i| b[i] && keep[i]);
            for spec in cyclic_specs() {
                let i = make_ideal(&spec, &u).unwrap();
                if i.member(&big).unwrap() {
                    prop_assert!(i.member(&small).unwrap(), "{}", i.id());
                }
            }
        }

        #[test]
        fn translation_invariant(b in proptest::collection::vec(any::<bool>(), 48), g in 0u64..48) {
            let u = Arc::new(Universe::cyclic(48).unwrap());
            let a = MaterializedSet::from_predicate(&u, |i| b[i]);
            let ga = a.left_translate(&GroupElem::Residue(g)).unwrap();
            for spec in cyclic_specs() {
                let i = make_ideal(&spec, &u).unwrap();
                prop_assert_eq!(i.member(&a).unwrap(), i.member(&ga).unwrap(), "{}", i.id());
            }
        }

        #[test]
        fn union_closed_up_to_doubling((x, y) in random_pair()) {
            let u = Arc::new(Universe::cyclic(48).unwrap());
            let a = MaterializedSet::from_predicate(&u, |i| x[i] && i % 7 == 0);
            let b = MaterializedSet::from_predicate(&u, |i| y[i] && i % 5 == 0);
            let ab = a.union(&b).unwrap();
            let t = make_ideal(&IdealSpec::Trivial, &u).unwrap();
            if t.member(&a).unwrap() && t.member(&b).unwrap() {
                prop_assert!(t.member(&ab).unwrap());
            }
            let eps = 0.2;
            let d = |eps: f64| make_ideal(&IdealSpec::DensityZero { lengths: vec![16], threshold: eps, radius: None }, &u).unwrap();
            if d(eps).member(&a).unwrap() && d(eps).member(&b).unwrap() {
                prop_assert!(d(2.0 * eps).member(&ab).unwrap());
            }
            let gen = |e: usize| Ideal::build(&IdealSpec::Generated {
                base: Box::new(IdealSpec::Trivial),
                generators: vec![parse_set_expr("list{0, 1, 2}").unwrap()],
                max_translates: e,
                shift_range: None,
            }, &u).unwrap();
            if gen(2).member(&a).unwrap() && gen(2).member(&b).unwrap() {
                prop_assert!(gen(4).member(&ab).unwrap());
            }
        }

        #[test]
        fn finite_sets_translation_invariant_inside_radius(xs in proptest::collection::vec(-30i64..30, 0..6), g in -20i64..=20) {
            let u = zcore(-10_000, 10_000, 20);
            let i = make_ideal(&IdealSpec::FiniteSets { radius: None }, &u).unwrap();
            let a = MaterializedSet::from_elements(&u, &xs.iter().map(|&x| GroupElem::Int(x)).collect::<Vec<_>>()).unwrap();
            let ga = a.left_translate(&GroupElem::Int(g)).unwrap();
            prop_assert!(i.member(&a).unwrap());
            prop_assert!(i.member(&ga).unwrap());
            let t = a.union(&mat("ap(0, 97)", &u)).unwrap();
            prop_assert!(!i.member(&t).unwrap());
            prop_assert!(!i.member(&t.left_translate(&GroupElem::Int(g)).unwrap()).unwrap());
        }
    }

    #[test]
    fn proper_on_tested_configurations() {
        let z = zcore(-500, 500, 8);
        for spec in [
            IdealSpec::Trivial,
            IdealSpec::FiniteSets { radius: None },
            IdealSpec::DensityZero {
                lengths: vec![64],
                threshold: 0.02,
                radius: None,
            },
        ] {
            assert!(make_ideal(&spec, &z).unwrap().is_proper().unwrap());
        }
        let c = Arc::new(Universe::cyclic(48).unwrap());
        for spec in cyclic_specs() {
            assert!(make_ideal(&spec, &c).unwrap().is_proper().unwrap());
        }
    }
}
