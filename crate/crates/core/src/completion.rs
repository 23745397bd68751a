//! Finite-stage completions of an ideal over a catalog of named sets.
//!
//! An ideal in progress is the base ideal together with the admitted catalog sets. Its
//! decision procedure is a `generated` ideal: a set belongs when at most `E` translates of
//! admitted sets cover it up to a base-ideal remainder. Admitted sets that are finite
//! switch the base to `finite-sets`, since the invariant ideal they generate contains every
//! finite set.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{materialize, symbolic_finiteness, Catalog, Finiteness, SetExpr};
use crate::group::{GroupElem, Universe};
use crate::ideal::{Ideal, IdealSpec};
use crate::largeness::{is_i_small, SmallBounds, SmallVerdict};
use crate::packing::{pack_exact, pack_greedy, PackOptions, PackStatus, PackingReport};
use crate::set::MaterializedSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CompletionKind {
    /// `Pack_n` for one arity.
    Pack { n: usize },
    /// `Pack_n` for every arity in the range at each stage.
    PackBelowOmega { ns: Vec<usize> },
    /// `I`-smallness.
    Small,
}

impl CompletionKind {
    /// `pack2`, `pack3`, …, `pack<w` (arities 2..=4) or `s`.
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "s" | "small" => Ok(CompletionKind::Small),
            "pack<w" | "pack-below-omega" => {
                Ok(CompletionKind::PackBelowOmega { ns: vec![2, 3, 4] })
            }
            t => t
                .strip_prefix("pack")
                .and_then(|n| n.trim_start_matches('_').parse::<usize>().ok())
                .filter(|&n| n >= 2)
                .map(|n| CompletionKind::Pack { n })
                .ok_or_else(|| Error::InvalidParam(format!("unknown completion kind `{t}`"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletionConfig {
    pub kind: CompletionKind,
    /// Stage cap `k`.
    pub stages: usize,
    /// Admission threshold `t` on the packing value.
    pub threshold: usize,
    pub candidates: Vec<GroupElem>,
    pub pack: PackOptions,
    pub small: SmallBounds,
    /// `E`: translates of admitted sets allowed in one cover.
    pub max_translates: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Rule {
    Initial,
    PackIndex {
        n: usize,
        value: usize,
        status: PackStatus,
    },
    AdditiveClosure {
        summands: (String, String),
    },
    Small {
        family_size: u64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Admission {
    pub name: String,
    #[serde(flatten)]
    pub rule: Rule,
}

/// Outcome of one test on a set that was not admitted.
#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub name: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub index: usize,
    pub ideal: String,
    pub admitted: Vec<Admission>,
    pub rejected: Vec<Rejection>,
    /// Catalog names in the ideal after this stage, in catalog order.
    pub members: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletionTrace {
    pub config: CompletionConfig,
    pub base: String,
    pub stages: Vec<Stage>,
    pub fixpoint: bool,
    /// Set when a stage admitted a set covering the whole core.
    pub improper: Option<String>,
}

impl CompletionTrace {
    pub fn final_members(&self) -> &[String] {
        self.stages
            .last()
            .map(|s| s.members.as_slice())
            .unwrap_or(&[])
    }

    /// First stage whose membership equals the previous one.
    pub fn fixpoint_stage(&self) -> Option<usize> {
        self.stages
            .windows(2)
            .find(|w| w[0].members == w[1].members)
            .map(|w| w[1].index)
    }
}

/// The catalog materialized on one universe.
pub struct Workspace {
    pub universe: Arc<Universe>,
    pub base: IdealSpec,
    names: Vec<String>,
    exprs: Vec<SetExpr>,
    sets: Vec<MaterializedSet>,
}

impl Workspace {
    pub fn new(catalog: &Catalog, universe: &Arc<Universe>, base: &IdealSpec) -> Result<Self> {
        if !matches!(base, IdealSpec::Trivial | IdealSpec::FiniteSets { .. }) {
            return Err(Error::InvalidParam(
                "completion runs over a trivial or finite-sets base ideal".into(),
            ));
        }
        let mut names = Vec::new();
        let mut exprs = Vec::new();
        for (name, e) in catalog.entries() {
            names.push(name.clone());
            exprs.push(catalog.resolve(e)?);
        }
        let sets = exprs
            .par_iter()
            .map(|e| materialize(e, universe))
            .collect::<Result<Vec<_>>>()?;
        Ok(Workspace {
            universe: universe.clone(),
            base: base.clone(),
            names,
            exprs,
            sets,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn set(&self, name: &str) -> Option<&MaterializedSet> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.sets[i])
    }

    /// Decision procedure for the base ideal extended by the admitted sets.
    pub fn ideal(&self, admitted: &BTreeSet<usize>, max_translates: usize) -> Result<Ideal> {
        let mut base = self.base.clone();
        let mut generators = Vec::new();
        for &i in admitted {
            if self.sets[i].is_empty_on_core() {
                continue;
            }
            if symbolic_finiteness(&self.exprs[i]) == Finiteness::Finite
                && !self.universe.is_finite_group()
            {
                if base == IdealSpec::Trivial {
                    base = IdealSpec::FiniteSets { radius: None };
                }
            } else {
                generators.push(self.exprs[i].clone());
            }
        }
        let spec = if generators.is_empty() {
            base
        } else {
            IdealSpec::Generated {
                base: Box::new(base),
                generators,
                max_translates,
                shift_range: None,
            }
        };
        Ideal::build(&spec, &self.universe)
    }

    fn members(&self, admitted: &BTreeSet<usize>) -> Vec<String> {
        admitted.iter().map(|&i| self.names[i].clone()).collect()
    }
}

fn arities(kind: &CompletionKind) -> Vec<usize> {
    match kind {
        CompletionKind::Pack { n } => vec![*n],
        CompletionKind::PackBelowOmega { ns } => ns.clone(),
        CompletionKind::Small => Vec::new(),
    }
}

/// Best packing report for admission: greedy first, exact search when greedy falls short.
/// An exhausted search still contributes its incumbent.
fn pack_for_admission(
    a: &MaterializedSet,
    ideal: &Ideal,
    cfg: &CompletionConfig,
    n: usize,
) -> Result<PackingReport> {
    let greedy = pack_greedy(a, ideal, &cfg.candidates, n)?;
    if greedy.value >= cfg.threshold || greedy.is_saturated() {
        return Ok(greedy);
    }
    match pack_exact(a, ideal, &cfg.candidates, n, &cfg.pack) {
        Ok(r) => Ok(r),
        Err(Error::SearchBudgetExceeded(r)) => Ok(*r),
        Err(Error::BudgetExceeded { .. }) => Ok(greedy),
        Err(e) => Err(e),
    }
}

enum Test {
    Admit(Rule),
    Reject(String),
}

/// Admits every catalog set passing the stage test, then closes under catalog unions:
/// a set contained in `A ∪ B` on the core, for admitted `A` and `B`, is admitted.
fn stage(
    ws: &Workspace,
    cfg: &CompletionConfig,
    admitted: &BTreeSet<usize>,
    index: usize,
) -> Result<(Stage, BTreeSet<usize>)> {
    let ideal = ws.ideal(admitted, cfg.max_translates)?;
    let pending: Vec<usize> = (0..ws.sets.len())
        .filter(|i| !admitted.contains(i))
        .collect();
    let tests: Vec<Result<Test>> = pending
        .par_iter()
        .map(|&i| -> Result<Test> {
            let a = &ws.sets[i];
            if ideal.member(a)? {
                return Ok(Test::Admit(Rule::Initial));
            }
            match &cfg.kind {
                CompletionKind::Small => {
                    let ev = is_i_small(a, &ideal, &cfg.small)?;
                    Ok(match ev.verdict {
                        SmallVerdict::SmallAtScale => Test::Admit(Rule::Small {
                            family_size: ev.family_size,
                        }),
                        SmallVerdict::NotSmall { translators } => Test::Reject(format!(
                            "not small: F = {{{}}}",
                            translators
                                .iter()
                                .map(|g| g.to_string())
                                .collect::<Vec<_>>()
                                .join(", ")
                        )),
                        SmallVerdict::Inconclusive { reason, .. } => {
                            Test::Reject(format!("inconclusive: {reason}"))
                        }
                    })
                }
                kind => {
                    let mut details = Vec::new();
                    for n in arities(kind) {
                        let r = pack_for_admission(a, &ideal, cfg, n)?;
                        if r.value >= cfg.threshold || r.is_saturated() {
                            return Ok(Test::Admit(Rule::PackIndex {
                                n,
                                value: r.value,
                                status: r.status,
                            }));
                        }
                        details.push(format!("pack_{n} = {} ({:?})", r.value, r.status));
                    }
                    Ok(Test::Reject(details.join(", ")))
                }
            }
        })
        .collect();

    let mut next = admitted.clone();
    let mut admissions = Vec::new();
    let mut rejected = Vec::new();
    for (&i, t) in pending.iter().zip(tests) {
        match t? {
            Test::Admit(rule) => {
                next.insert(i);
                admissions.push(Admission {
                    name: ws.names[i].clone(),
                    rule,
                });
            }
            Test::Reject(detail) => rejected.push((i, detail)),
        }
    }

    // Additive closure over catalog members, repeated until nothing changes.
    loop {
        let mut grew = false;
        for (i, _) in &rejected {
            if next.contains(i) {
                continue;
            }
            let c = &ws.sets[*i];
            let members: Vec<usize> = next.iter().copied().collect();
            let found = members.iter().enumerate().find_map(|(p, &a)| {
                members[p..].iter().find_map(|&b| {
                    let ab = ws.sets[a].union(&ws.sets[b]).ok()?;
                    let rest = c.difference(&ab).ok()?;
                    rest.is_empty_on_core().then_some((a, b))
                })
            });
            if let Some((a, b)) = found {
                next.insert(*i);
                admissions.push(Admission {
                    name: ws.names[*i].clone(),
                    rule: Rule::AdditiveClosure {
                        summands: (ws.names[a].clone(), ws.names[b].clone()),
                    },
                });
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let rejected = rejected
        .into_iter()
        .filter(|(i, _)| !next.contains(i))
        .map(|(i, detail)| Rejection {
            name: ws.names[i].clone(),
            detail,
        })
        .collect();
    Ok((
        Stage {
            index,
            ideal: ideal.id(),
            admitted: admissions,
            rejected,
            members: ws.members(&next),
        },
        next,
    ))
}

/// Runs stage 0 (members of the base ideal) and up to `cfg.stages` completion stages,
/// stopping early at a fixpoint or when the ideal in progress becomes improper.
pub fn iterate_completion(ws: &Workspace, cfg: &CompletionConfig) -> Result<CompletionTrace> {
    if cfg.stages == 0 {
        return Err(Error::InvalidParam(
            "completion needs at least one stage".into(),
        ));
    }
    if cfg.threshold > cfg.candidates.len() {
        return Err(Error::InvalidParam(format!(
            "threshold {} exceeds the {} candidate translators",
            cfg.threshold,
            cfg.candidates.len()
        )));
    }
    if arities(&cfg.kind).iter().any(|&n| n < 2) {
        return Err(Error::InvalidParam(
            "packing arity must be at least 2".into(),
        ));
    }
    let base = Ideal::build(&ws.base, &ws.universe)?;
    let mut admitted = BTreeSet::new();
    let mut initial = Vec::new();
    for (i, a) in ws.sets.iter().enumerate() {
        if base.member(a)? {
            admitted.insert(i);
            initial.push(Admission {
                name: ws.names[i].clone(),
                rule: Rule::Initial,
            });
        }
    }
    let mut stages = vec![Stage {
        index: 0,
        ideal: base.id(),
        admitted: initial,
        rejected: Vec::new(),
        members: ws.members(&admitted),
    }];
    let mut fixpoint = false;
    let mut improper = None;
    for index in 1..=cfg.stages {
        let (st, next) = stage(ws, cfg, &admitted, index)?;
        let done = next == admitted;
        let whole = next
            .iter()
            .find(|&&i| ws.sets[i].restrict_to_core().count() == ws.universe.core_size());
        if let Some(&i) = whole {
            improper = Some(ws.names[i].clone());
        }
        stages.push(st);
        admitted = next;
        if done {
            fixpoint = true;
            break;
        }
        if improper.is_some() {
            break;
        }
    }
    Ok(CompletionTrace {
        config: cfg.clone(),
        base: base.id(),
        stages,
        fixpoint,
        improper,
    })
}

/// One stage applied to the given members, for idempotence checks.
pub fn completion_stage(
    ws: &Workspace,
    cfg: &CompletionConfig,
    members: &[String],
) -> Result<Vec<String>> {
    let admitted = members
        .iter()
        .map(|m| {
            ws.names
                .iter()
                .position(|n| n == m)
                .ok_or_else(|| Error::UnknownPrimitive(m.clone()))
        })
        .collect::<Result<BTreeSet<usize>>>()?;
    Ok(stage(ws, cfg, &admitted, 0)?.0.members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Window;
    use crate::largeness::LargeBounds;

    fn universe() -> Arc<Universe> {
        Arc::new(Universe::integers(
            Window::with_core(0, 100_000, 48).unwrap(),
        ))
    }

    fn config(
        kind: CompletionKind,
        candidates: Vec<GroupElem>,
        threshold: usize,
    ) -> CompletionConfig {
        CompletionConfig {
            kind,
            stages: 5,
            threshold,
            candidates,
            pack: PackOptions::default(),
            small: SmallBounds::new(2, 16, LargeBounds::new(16, 16)),
            max_translates: 2,
        }
    }

    fn shifts(lo: i64, hi: i64) -> Vec<GroupElem> {
        (lo..=hi).map(GroupElem::Int).collect()
    }

    #[test]
    fn kinds_parse() {
        assert_eq!(
            CompletionKind::parse("pack2").unwrap(),
            CompletionKind::Pack { n: 2 }
        );
        assert_eq!(
            CompletionKind::parse("pack_3").unwrap(),
            CompletionKind::Pack { n: 3 }
        );
        assert_eq!(CompletionKind::parse("s").unwrap(), CompletionKind::Small);
        assert!(CompletionKind::parse("pack1").is_err());
        assert!(CompletionKind::parse("other").is_err());
    }

    #[test]
    fn triple_disjoint_triangular_is_admitted() {
        let cat =
            Catalog::parse("ev = evens\ntri = triangular\neverything = all\nnothing = empty\n")
                .unwrap();
        let u = universe();
        let ws = Workspace::new(&cat, &u, &IdealSpec::Trivial).unwrap();
        let pows = (4..=12).map(|m| GroupElem::Int(1 << m)).collect();
        let u2 = Arc::new(Universe::integers(
            Window::with_core(0, 100_000, 4096).unwrap(),
        ));
        let ws2 = Workspace::new(&cat, &u2, &IdealSpec::Trivial).unwrap();
        let tr = iterate_completion(&ws2, &config(CompletionKind::Pack { n: 3 }, pows, 8)).unwrap();
        assert_eq!(tr.stages[0].members, vec!["nothing"]);
        assert_eq!(tr.stages[1].members, vec!["tri", "nothing"]);
        assert!(tr.fixpoint);
        let tr = iterate_completion(&ws, &config(CompletionKind::Pack { n: 2 }, shifts(0, 9), 8))
            .unwrap();
        assert_eq!(tr.final_members(), ["nothing"]);
        assert!(tr.stages[1]
            .rejected
            .iter()
            .any(|r| r.name == "ev" && r.detail.starts_with("pack_2 = 2")));
    }

    #[test]
    fn pack2_chain_over_small_catalog() {
        let cat = Catalog::parse(
            "ev = evens\ntri = triangular\ntri7 = shift(triangular, 7)\nfew = list{1, 2, 3}\n\
             both = union(triangular, list{1, 2, 3})\neverything = all\n",
        )
        .unwrap();
        let ws = Workspace::new(&cat, &universe(), &IdealSpec::Trivial).unwrap();
        let cfg = config(CompletionKind::Pack { n: 2 }, shifts(0, 31), 8);
        let tr = iterate_completion(&ws, &cfg).unwrap();
        assert_eq!(tr.stages[1].members, vec!["few"]);
        assert_eq!(tr.stages[2].members, vec!["tri", "tri7", "few", "both"]);
        assert!(tr.fixpoint && tr.improper.is_none());
        assert_eq!(tr.fixpoint_stage(), Some(3));
        for w in tr.stages.windows(2) {
            assert!(w[0].members.iter().all(|m| w[1].members.contains(m)));
        }
        let again = completion_stage(&ws, &cfg, tr.final_members()).unwrap();
        assert_eq!(again, tr.final_members());
    }

    #[test]
    fn s_completion() {
        let cat =
            Catalog::parse("tri = triangular\nev = evens\nfew = list{1, 2, 3}\neverything = all\n")
                .unwrap();
        let ws = Workspace::new(&cat, &universe(), &IdealSpec::Trivial).unwrap();
        let tr = iterate_completion(&ws, &config(CompletionKind::Small, shifts(0, 9), 1)).unwrap();
        assert_eq!(tr.stages[1].members, vec!["tri", "few"]);
        assert!(tr.fixpoint);
        let fin =
            Workspace::new(&cat, &universe(), &IdealSpec::FiniteSets { radius: None }).unwrap();
        let tr = iterate_completion(&fin, &config(CompletionKind::Small, shifts(0, 9), 1)).unwrap();
        assert!(tr.stages[0].members.contains(&"few".to_string()));
    }

    #[test]
    fn rejects_bad_configs() {
        let cat = Catalog::parse("tri = triangular\n").unwrap();
        let u = universe();
        assert!(Workspace::new(&cat, &u, &IdealSpec::density_zero_default()).is_err());
        let ws = Workspace::new(&cat, &u, &IdealSpec::Trivial).unwrap();
        let mut cfg = config(CompletionKind::Pack { n: 2 }, shifts(0, 3), 8);
        assert!(iterate_completion(&ws, &cfg).is_err());
        cfg.threshold = 2;
        cfg.stages = 0;
        assert!(iterate_completion(&ws, &cfg).is_err());
    }
}
