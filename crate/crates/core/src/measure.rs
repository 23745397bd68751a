//! Følner sets, finite-stage measures `μ_d(B) = |B ∩ F_d·y_d| / |F_d|`, sliding-window
//! upper density and the counting bound `μ(A) <= n/m` for n-disjoint translate families.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::bits::BitSet;
use crate::combi::combinations;
use crate::error::{Error, Result};
use crate::group::{ElemLabel, GroupElem, Universe};
use crate::set::{same_universe, MaterializedSet};

/// Exact rational, serialized as `"p/q"` (or `"p"` when integral).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exact(pub Ratio<i64>);

impl Exact {
    pub fn new(num: i64, den: i64) -> Self {
        Exact(Ratio::new(num, den))
    }

    pub fn zero() -> Self {
        Exact(Ratio::zero())
    }
}

impl Deref for Exact {
    type Target = Ratio<i64>;
    fn deref(&self) -> &Ratio<i64> {
        &self.0
    }
}

impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Serialize for GroupElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ElemLabel::from(self).serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum FolnerSet {
    /// `[start, start+len)` in `ℤ`.
    Interval {
        start: i64,
        len: u64,
    },
    WholeGroup {
        order: usize,
    },
}

impl FolnerSet {
    pub fn size(&self) -> u64 {
        match self {
            FolnerSet::Interval { len, .. } => *len,
            FolnerSet::WholeGroup { order } => *order as u64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioEntry {
    pub x: GroupElem,
    /// `|F_d △ x·F_d| / |F_d|`.
    pub ratio: Exact,
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerCertificate {
    pub test_set: Vec<GroupElem>,
    pub n: u64,
    pub set: FolnerSet,
    pub ratios: Vec<RatioEntry>,
}

/// `|[0, L) △ (x + [0, L))|`, by interval overlap.
fn interval_sym_diff(len: u64, x: i64) -> u64 {
    let overlap = len.saturating_sub(x.unsigned_abs());
    2 * (len - overlap)
}

/// A Følner set for the test set `f` at tolerance `1/n`: `[0, 2n·max|x| + 1)` on `ℤ`,
/// the whole group for finite groups.
pub fn folner_set(f: &[GroupElem], n: u64, universe: &Universe) -> Result<FolnerCertificate> {
    if n < 1 {
        return Err(Error::InvalidParam("tolerance index n must be >= 1".into()));
    }
    let group = universe.group();
    for x in f {
        group.check(x)?;
    }
    let set = match universe {
        Universe::Integers(_) => {
            let max = f
                .iter()
                .map(|x| match x {
                    GroupElem::Int(v) => v.unsigned_abs(),
                    _ => 0,
                })
                .max()
                .unwrap_or(0);
            FolnerSet::Interval {
                start: 0,
                len: 2 * n * max + 1,
            }
        }
        Universe::Cyclic { .. } | Universe::Table(_) => FolnerSet::WholeGroup {
            order: universe.size(),
        },
        Universe::Free { .. } => {
            return Err(Error::KindMismatch(
                "Følner sets in the free group (it is not amenable)".into(),
            ))
        }
    };
    let ratios: Vec<RatioEntry> = f
        .iter()
        .map(|x| {
            let sym = match (&set, x) {
                (FolnerSet::Interval { len, .. }, GroupElem::Int(v)) => interval_sym_diff(*len, *v),
                _ => 0,
            };
            RatioEntry {
                x: x.clone(),
                ratio: Exact::new(sym as i64, set.size() as i64),
            }
        })
        .collect();
    debug_assert!(ratios.iter().all(|r| *r.ratio < Ratio::new(1, n as i64)));
    Ok(FolnerCertificate {
        test_set: f.to_vec(),
        n,
        set,
        ratios,
    })
}

fn int_of(g: &GroupElem) -> i64 {
    match g {
        GroupElem::Int(v) => *v,
        _ => 0,
    }
}

/// Least `|y|` (ties toward positive) with `(F_d + y) ∩ A = ∅` and `F_d + y` inside the core.
pub fn avoid_translate(
    cert: &FolnerCertificate,
    a: &MaterializedSet,
    bound: u64,
) -> Result<GroupElem> {
    let universe = a.universe();
    match (&cert.set, universe.as_ref()) {
        (FolnerSet::Interval { len, .. }, Universe::Integers(w)) => {
            let (clo, chi) = w.core().expect("validated window");
            let len = *len as i64;
            let bound = bound.min(i64::MAX as u64 / 4) as i64;
            let ys = std::iter::once(0).chain((1..=bound).flat_map(|k| [k, -k]));
            for y in ys {
                if y < clo || y + len - 1 > chi {
                    continue;
                }
                let (i, j) = ((y - w.lo) as usize, (y + len - 1 - w.lo) as usize);
                if !a.bits().any_in_range(i, j) {
                    return Ok(GroupElem::Int(y));
                }
            }
            Err(Error::AvoidanceNotFound {
                bound: bound as u64,
            })
        }
        (FolnerSet::WholeGroup { .. }, _) if universe.is_finite_group() => {
            if a.is_empty() {
                Ok(universe.group().identity())
            } else {
                Err(Error::AvoidanceNotFound { bound })
            }
        }
        _ => Err(Error::KindMismatch(format!(
            "Følner certificate does not fit {}",
            universe.kind_name()
        ))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FolnerMeasure {
    pub certificate: FolnerCertificate,
    pub y: GroupElem,
    #[serde(skip)]
    universe: Arc<Universe>,
}

/// Builds `μ_d` with `F_d` from [`folner_set`] and `y_d` from [`avoid_translate`].
pub fn measure_build(
    f: &[GroupElem],
    n: u64,
    avoid: &MaterializedSet,
    bound: u64,
) -> Result<FolnerMeasure> {
    let certificate = folner_set(f, n, avoid.universe())?;
    let y = avoid_translate(&certificate, avoid, bound)?;
    let m = FolnerMeasure {
        certificate,
        y,
        universe: avoid.universe().clone(),
    };
    debug_assert!(m.mu(avoid)?.is_zero());
    Ok(m)
}

impl FolnerMeasure {
    pub fn support_size(&self) -> u64 {
        self.certificate.set.size()
    }

    /// Index range of `F_d + y` in the carrier (`ℤ` only).
    fn support_range(&self, offset: i64) -> Option<(usize, usize)> {
        match (&self.certificate.set, self.universe.as_ref()) {
            (FolnerSet::Interval { len, .. }, Universe::Integers(w)) => {
                let start = int_of(&self.y) + offset - w.lo;
                Some((start as usize, (start + *len as i64 - 1) as usize))
            }
            _ => None,
        }
    }

    fn count_shifted(&self, b: &MaterializedSet, offset: i64) -> u64 {
        match self.support_range(offset) {
            Some((i, j)) => b.bits().count_range(i, j) as u64,
            None => b.count() as u64,
        }
    }

    /// `μ_d(B)`.
    pub fn mu(&self, b: &MaterializedSet) -> Result<Exact> {
        if !same_universe(&self.universe, b.universe()) {
            return Err(Error::ScaleMismatch);
        }
        Ok(Exact::new(
            self.count_shifted(b, 0) as i64,
            self.support_size() as i64,
        ))
    }

    /// `|μ_d(B) − μ_d(xB)|` together with the bound `|F_d △ x⁻¹F_d| / |F_d|`.
    pub fn invariance_defect(&self, x: &GroupElem, b: &MaterializedSet) -> Result<Defect> {
        if !same_universe(&self.universe, b.universe()) {
            return Err(Error::ScaleMismatch);
        }
        self.universe.check_translator(x)?;
        let size = self.support_size() as i64;
        let (mu_b, mu_xb, bound) = match self.certificate.set {
            FolnerSet::Interval { len, .. } => {
                let v = int_of(x);
                // |xB ∩ S| = |B ∩ (S − x)|.
                let mu_b = self.count_shifted(b, 0) as i64;
                let mu_xb = self.count_shifted(b, -v) as i64;
                (mu_b, mu_xb, interval_sym_diff(len, -v) as i64)
            }
            FolnerSet::WholeGroup { .. } => {
                let c = b.count() as i64;
                (c, c, 0)
            }
        };
        Ok(Defect {
            x: x.clone(),
            defect: Exact(Ratio::new(mu_b - mu_xb, size).abs()),
            bound: Exact::new(bound, size),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Defect {
    pub x: GroupElem,
    pub defect: Exact,
    pub bound: Exact,
}

/// Largest number of set bits in a length-`len` window inside `[lo, hi]`, and the first
/// window start achieving it. With `cyclic`, windows wrap around `[lo, hi]`.
pub fn max_window(bits: &BitSet, lo: usize, hi: usize, len: usize, cyclic: bool) -> (usize, usize) {
    let span = hi - lo + 1;
    if len == 0 {
        return (0, lo);
    }
    if len >= span {
        return (bits.count_range(lo, hi), lo);
    }
    let at = |i: usize| bits.contains(if cyclic { lo + (i - lo) % span } else { i }) as usize;
    let mut c = bits.count_range(lo, lo + len - 1);
    let (mut best, mut arg) = (c, lo);
    let last = if cyclic { hi } else { hi + 1 - len };
    for p in lo + 1..=last {
        c = c + at(p + len - 1) - at(p - 1);
        if c > best {
            best = c;
            arg = p;
        }
    }
    (best, arg)
}

pub fn max_window_count(bits: &BitSet, lo: usize, hi: usize, len: usize, cyclic: bool) -> usize {
    max_window(bits, lo, hi, len, cyclic).0
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityEntry {
    pub length: usize,
    pub max_count: usize,
    pub density: Exact,
    /// Start of the first densest window.
    pub at: GroupElem,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityProfile {
    pub entries: Vec<DensityEntry>,
}

/// Exact max sliding-window densities on the core, one entry per scheduled length.
pub fn upper_density(a: &MaterializedSet, schedule: &[usize]) -> Result<DensityProfile> {
    let universe = a.universe();
    let cyclic = match universe.as_ref() {
        Universe::Integers(_) => false,
        Universe::Cyclic { .. } => true,
        other => {
            return Err(Error::KindMismatch(format!(
                "upper density on {}",
                other.kind_name()
            )))
        }
    };
    let (lo, hi) = universe.core_range();
    if let Some(&bad) = schedule.iter().find(|&&l| l == 0 || l > hi - lo + 1) {
        return Err(Error::InvalidParam(format!(
            "schedule length {bad} not in 1..={}",
            hi - lo + 1
        )));
    }
    let entries = schedule
        .par_iter()
        .map(|&len| {
            let (max_count, start) = max_window(a.bits(), lo, hi, len, cyclic);
            DensityEntry {
                length: len,
                max_count,
                density: Exact::new(max_count as i64, len as i64),
                at: universe.elem(start),
            }
        })
        .collect();
    Ok(DensityProfile { entries })
}

#[derive(Clone, Copy, Debug)]
pub enum CountingMeasure<'a> {
    /// Normalized counting measure on a finite group.
    Uniform,
    Folner(&'a FolnerMeasure),
    /// `|A ∩ core| / |core|` on a `ℤ` window.
    WindowDensity,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingVerdict {
    pub n: usize,
    pub family_size: usize,
    pub measure: Exact,
    pub bound: Exact,
    pub tolerance: Exact,
    pub holds: bool,
}

/// Checks `μ(A) <= n/|B| (+ tolerance)` after verifying that every `n` translates `b·A`,
/// `b ∈ B`, have a null intersection.
pub fn counting_bound_check(
    a: &MaterializedSet,
    family: &[GroupElem],
    n: usize,
    measure: CountingMeasure<'_>,
) -> Result<CountingVerdict> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("n must be >= 2, got {n}")));
    }
    if family.is_empty() {
        return Err(Error::InvalidParam("empty translate family".into()));
    }
    let universe = a.universe();
    match measure {
        CountingMeasure::Uniform if !universe.is_finite_group() => {
            return Err(Error::KindMismatch(
                "uniform measure on an infinite group".into(),
            ))
        }
        CountingMeasure::WindowDensity if !matches!(universe.as_ref(), Universe::Integers(_)) => {
            return Err(Error::KindMismatch("window density outside ℤ".into()))
        }
        _ => {}
    }
    let translates: Vec<MaterializedSet> = family
        .iter()
        .map(|b| a.left_translate(b))
        .collect::<Result<_>>()?;
    let is_null = |s: &MaterializedSet| -> Result<bool> {
        Ok(match measure {
            CountingMeasure::Uniform => s.is_empty(),
            CountingMeasure::Folner(m) => m.mu(s)?.is_zero(),
            CountingMeasure::WindowDensity => s.is_empty_on_core(),
        })
    };
    if family.len() >= n {
        for subset in combinations(family.len(), n) {
            let mut acc = translates[subset[0]].clone();
            for &j in &subset[1..] {
                acc = acc.intersection(&translates[j])?;
            }
            if !is_null(&acc)? {
                let names: Vec<String> = subset.iter().map(|&j| family[j].to_string()).collect();
                return Err(Error::PreconditionFailed(format!(
                    "translates by {{{}}} meet in a non-null set",
                    names.join(", ")
                )));
            }
        }
    }
    let (mu, tol) = match measure {
        CountingMeasure::Uniform => (
            Exact::new(a.count() as i64, universe.size() as i64),
            Exact::zero(),
        ),
        CountingMeasure::Folner(m) => {
            let mu = m.mu(a)?;
            let mut tol = Exact::zero();
            for t in &translates {
                let d = Exact((*m.mu(t)? - *mu).abs());
                tol = tol.max(d);
            }
            (mu, tol)
        }
        CountingMeasure::WindowDensity => {
            let core = universe.core_size() as i64;
            let max_shift = family
                .iter()
                .map(|b| universe.translator_size(b))
                .max()
                .unwrap_or(0);
            (
                Exact::new(a.count_core() as i64, core),
                Exact::new(2 * max_shift as i64, core),
            )
        }
    };
    let bound = Exact::new(n as i64, family.len() as i64);
    Ok(CountingVerdict {
        n,
        family_size: family.len(),
        measure: mu,
        bound,
        tolerance: tol,
        holds: *mu <= *bound + *tol,
    })
}
