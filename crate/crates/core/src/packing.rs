//! Packing indices: the largest candidate family whose `n`-wise intersections of translates
//! of `A` all lie in the ideal.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::combi::combinations;
use crate::error::{Error, Result};
use crate::group::{ElemLabel, GroupElem, Universe};
use crate::ideal::Ideal;
use crate::set::{same_universe, MaterializedSet};

/// How candidate translators are chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CandidateSpec {
    /// `lo..=hi` on `ℤ` (residues on `ℤ_N`).
    Range {
        lo: i64,
        hi: i64,
    },
    /// Every element of a finite group.
    All,
    /// Reduced words of length `<= max_len` on `F₂`.
    Words {
        max_len: usize,
    },
    List {
        elems: Vec<GroupElem>,
    },
}

impl CandidateSpec {
    /// Default for a universe: `0..=9` on `ℤ`, all elements when finite, words of length
    /// `<= 2` on `F₂`.
    pub fn default_for(universe: &Universe) -> Self {
        match universe {
            Universe::Integers(_) => CandidateSpec::Range { lo: 0, hi: 9 },
            Universe::Free { .. } => CandidateSpec::Words { max_len: 2 },
            _ => CandidateSpec::All,
        }
    }
}

pub fn candidate_translators(universe: &Universe, spec: &CandidateSpec) -> Result<Vec<GroupElem>> {
    let out: Vec<GroupElem> = match (spec, universe) {
        (CandidateSpec::Range { lo, hi }, Universe::Integers(w)) => {
            if lo > hi {
                return Err(Error::InvalidParam(format!("empty shift range {lo}..{hi}")));
            }
            let reach = lo.unsigned_abs().max(hi.unsigned_abs());
            if reach > w.margin {
                return Err(Error::RangeExceedsMargin(format!(
                    "shifts {lo}..{hi} exceed margin {}",
                    w.margin
                )));
            }
            (*lo..=*hi).map(GroupElem::Int).collect()
        }
        (CandidateSpec::Range { lo, hi }, Universe::Cyclic { order }) => {
            if lo > hi || hi - lo >= *order as i64 {
                return Err(Error::InvalidParam(format!(
                    "shift range {lo}..{hi} is empty or wraps around ℤ_{order}"
                )));
            }
            (*lo..=*hi)
                .map(|k| GroupElem::Residue(k.rem_euclid(*order as i64) as u64))
                .collect()
        }
        (CandidateSpec::All, u) if u.is_finite_group() => {
            (0..u.size()).map(|i| u.elem(i)).collect()
        }
        (CandidateSpec::Words { max_len }, u @ Universe::Free { .. }) => {
            let m = u.margin().unwrap_or(0) as usize;
            if *max_len > m {
                return Err(Error::RangeExceedsMargin(format!(
                    "word length {max_len} exceeds margin {m}"
                )));
            }
            u.translators_within(*max_len as u64)
        }
        (CandidateSpec::List { elems }, u) => {
            let mut seen = HashSet::new();
            for g in elems {
                u.check_translator(g).map_err(|e| match e {
                    Error::ShiftOutOfBudget { shift, margin } => Error::RangeExceedsMargin(
                        format!("translator {shift} exceeds margin {margin}"),
                    ),
                    other => other,
                })?;
                if !seen.insert(g.clone()) {
                    return Err(Error::InvalidParam(format!("translator {g} listed twice")));
                }
            }
            elems.clone()
        }
        (spec, u) => {
            return Err(Error::KindMismatch(format!(
                "candidate spec {spec:?} on {}",
                u.kind_name()
            )))
        }
    };
    if out.is_empty() {
        return Err(Error::InvalidParam("no candidate translators".into()));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ConflictHypergraph {
    pub candidates: Vec<GroupElem>,
    pub n: usize,
    /// Sorted index tuples, in lexicographic order.
    pub edges: Vec<Vec<usize>>,
    pub evaluated: u64,
}

impl ConflictHypergraph {
    pub fn is_edge(&self, subset: &[usize]) -> bool {
        self.edges
            .binary_search_by(|e| e.as_slice().cmp(subset))
            .is_ok()
    }
}

/// Decides whether an `n`-subset of candidates conflicts.
struct EdgeOracle<'a> {
    a: &'a MaterializedSet,
    ideal: &'a Ideal,
    cands: &'a [GroupElem],
    /// Index offsets for `ℤ` and `ℤ_N` with the trivial ideal.
    offsets: Option<Vec<i64>>,
    translates: Vec<std::sync::OnceLock<BitSet>>,
}

impl<'a> EdgeOracle<'a> {
    fn new(a: &'a MaterializedSet, ideal: &'a Ideal, cands: &'a [GroupElem]) -> Self {
        let offsets = ideal.is_trivial().then(|| {
            cands
                .iter()
                .map(|g| match g {
                    GroupElem::Int(k) => Some(*k),
                    GroupElem::Residue(k) => Some(*k as i64),
                    _ => None,
                })
                .collect::<Option<Vec<i64>>>()
        });
        EdgeOracle {
            a,
            ideal,
            cands,
            offsets: offsets.flatten(),
            translates: (0..cands.len())
                .map(|_| std::sync::OnceLock::new())
                .collect(),
        }
    }

    fn translate(&self, i: usize) -> &BitSet {
        self.translates[i].get_or_init(|| {
            self.a
                .left_translate_unchecked(&self.cands[i])
                .bits()
                .clone()
        })
    }

    fn conflict(&self, subset: &[usize]) -> Result<bool> {
        if let Some(off) = &self.offsets {
            return Ok(self.direct_conflict(subset, off));
        }
        let mut acc = self.translate(subset[0]).clone();
        for &i in &subset[1..] {
            acc.intersect_with(self.translate(i));
        }
        Ok(!self
            .ideal
            .member(&MaterializedSet::from_bits(self.a.universe(), acc))?)
    }

    /// Scans `x = a + c_0` over `a ∈ A` and tests `x − c_i ∈ A` for the other members.
    fn direct_conflict(&self, subset: &[usize], off: &[i64]) -> bool {
        let bits = self.a.bits();
        let n = bits.len() as i64;
        let (lo, hi) = self.a.universe().core_range();
        let cyclic = matches!(self.a.universe().as_ref(), Universe::Cyclic { .. });
        let c0 = off[subset[0]];
        let at = |i: i64| -> Option<usize> {
            if cyclic {
                Some(i.rem_euclid(n) as usize)
            } else {
                (0..n).contains(&i).then_some(i as usize)
            }
        };
        let (from, to) = if cyclic {
            (0, bits.len() - 1)
        } else {
            let f = lo as i64 - c0;
            let t = hi as i64 - c0;
            if t < 0 || f >= n {
                return false;
            }
            (f.max(0) as usize, t.min(n - 1) as usize)
        };
        bits.ones_in(from, to).any(|a| {
            let x = a as i64 + c0;
            subset[1..]
                .iter()
                .all(|&j| at(x - off[j]).is_some_and(|p| bits.contains(p)))
        })
    }
}

fn check_inputs(a: &MaterializedSet, ideal: &Ideal, cands: &[GroupElem], n: usize) -> Result<()> {
    if !same_universe(a.universe(), ideal.universe()) {
        return Err(Error::ScaleMismatch);
    }
    if n < 2 {
        return Err(Error::InvalidParam(format!("arity n = {n}, need n >= 2")));
    }
    for g in cands {
        a.universe().check_translator(g).map_err(|e| match e {
            Error::ShiftOutOfBudget { shift, margin } => {
                Error::RangeExceedsMargin(format!("translator {shift} exceeds margin {margin}"))
            }
            other => other,
        })?;
    }
    Ok(())
}

/// Evaluates every `n`-subset of the candidates, in parallel.
pub fn conflict_hypergraph(
    a: &MaterializedSet,
    ideal: &Ideal,
    candidates: &[GroupElem],
    n: usize,
) -> Result<ConflictHypergraph> {
    check_inputs(a, ideal, candidates, n)?;
    let oracle = EdgeOracle::new(a, ideal, candidates);
    let subsets: Vec<Vec<usize>> = combinations(candidates.len(), n).collect();
    let flags: Vec<Result<bool>> = subsets.par_iter().map(|s| oracle.conflict(s)).collect();
    let mut edges = Vec::new();
    for (s, f) in subsets.iter().zip(flags) {
        if f? {
            edges.push(s.clone());
        }
    }
    Ok(ConflictHypergraph {
        candidates: candidates.to_vec(),
        n,
        edges,
        evaluated: subsets.len() as u64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PackStatus {
    Exact,
    LowerBound,
    /// The family uses every candidate.
    Saturated,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub edges: u64,
    /// Answered by membership of `A` itself.
    pub shortcut: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub n: usize,
    pub ideal: String,
    #[serde(rename = "proxy-for-N")]
    pub proxy: bool,
    pub candidates: usize,
    pub family: Vec<ElemLabel>,
    pub value: usize,
    pub status: PackStatus,
    pub vacuous_floor: usize,
    pub edges_evaluated: u64,
    pub stats: SearchStats,
}

impl PackingReport {
    pub fn is_saturated(&self) -> bool {
        self.status == PackStatus::Saturated
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackOptions {
    /// Largest candidate list for exact search when `n >= 3`.
    pub exact_cap: usize,
    /// Largest candidate list for exact search when `n = 2`.
    pub exact_cap_pairs: usize,
    pub node_budget: u64,
}

impl Default for PackOptions {
    fn default() -> Self {
        PackOptions {
            exact_cap: 64,
            exact_cap_pairs: 2048,
            node_budget: 5_000_000,
        }
    }
}

fn report(
    ideal: &Ideal,
    cands: &[GroupElem],
    n: usize,
    family: &[usize],
    exact: bool,
    stats: SearchStats,
) -> PackingReport {
    let status = if family.len() == cands.len() {
        PackStatus::Saturated
    } else if exact {
        PackStatus::Exact
    } else {
        PackStatus::LowerBound
    };
    PackingReport {
        n,
        ideal: ideal.id(),
        proxy: ideal.is_proxy(),
        candidates: cands.len(),
        family: family.iter().map(|&i| ElemLabel::from(&cands[i])).collect(),
        value: family.len(),
        status,
        vacuous_floor: (n - 1).min(cands.len()),
        edges_evaluated: stats.edges,
        stats,
    }
}

fn shortcut(
    a: &MaterializedSet,
    ideal: &Ideal,
    cands: &[GroupElem],
    n: usize,
) -> Result<Option<PackingReport>> {
    Ok(ideal.member(a)?.then(|| {
        let all: Vec<usize> = (0..cands.len()).collect();
        let stats = SearchStats {
            shortcut: true,
            ..Default::default()
        };
        report(ideal, cands, n, &all, true, stats)
    }))
}

/// Adds `c` in candidate order when no `n`-subset through `c` conflicts.
fn greedy_with(
    cands: usize,
    n: usize,
    mut is_edge: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<(Vec<usize>, u64)> {
    let mut family: Vec<usize> = Vec::new();
    let mut evaluated = 0;
    for c in 0..cands {
        let mut ok = true;
        if family.len() + 1 >= n {
            for sub in combinations(family.len(), n - 1) {
                let mut tuple: Vec<usize> = sub.iter().map(|&i| family[i]).collect();
                tuple.push(c);
                evaluated += 1;
                if is_edge(&tuple)? {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            family.push(c);
        }
    }
    Ok((family, evaluated))
}

/// Greedy lower bound; edges are evaluated on demand.
pub fn pack_greedy(
    a: &MaterializedSet,
    ideal: &Ideal,
    candidates: &[GroupElem],
    n: usize,
) -> Result<PackingReport> {
    check_inputs(a, ideal, candidates, n)?;
    if let Some(r) = shortcut(a, ideal, candidates, n)? {
        return Ok(r);
    }
    let oracle = EdgeOracle::new(a, ideal, candidates);
    let (family, evaluated) = greedy_with(candidates.len(), n, |t| oracle.conflict(t))?;
    let stats = SearchStats {
        nodes: 0,
        edges: evaluated,
        shortcut: false,
    };
    Ok(report(ideal, candidates, n, &family, false, stats))
}

struct Search<'a> {
    /// Edges incident to each candidate.
    incident: Vec<Vec<&'a [usize]>>,
    /// Conflict-graph adjacency when `n = 2`.
    adj: Option<Vec<BitSet>>,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Upper bound on how many of `p` can join: greedy clique cover for `n = 2`.
    fn bound(&self, p: &[usize]) -> usize {
        let Some(adj) = &self.adj else { return p.len() };
        let mut cliques: Vec<Vec<usize>> = Vec::new();
        for &v in p {
            match cliques
                .iter_mut()
                .find(|c| c.iter().all(|&u| adj[v].contains(u)))
            {
                Some(c) => c.push(v),
                None => cliques.push(vec![v]),
            }
        }
        cliques.len()
    }

    /// Whether adding `v` to `s` completes an edge.
    fn blocked(&self, v: usize, in_s: &[bool]) -> bool {
        self.incident[v]
            .iter()
            .any(|e| e.iter().all(|&u| u == v || in_s[u]))
    }

    fn run(&mut self, s: &mut Vec<usize>, in_s: &mut Vec<bool>, p: Vec<usize>) -> Result<(), ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        if s.len() > self.best.len() {
            self.best = s.clone();
        }
        if p.is_empty() || s.len() + self.bound(&p) <= self.best.len() {
            return Ok(());
        }
        let v = p[0];
        // Include v.
        s.push(v);
        in_s[v] = true;
        let next: Vec<usize> = p[1..]
            .iter()
            .copied()
            .filter(|&u| !self.blocked(u, in_s))
            .collect();
        self.run(s, in_s, next)?;
        s.pop();
        in_s[v] = false;
        // Exclude v.
        if s.len() + self.bound(&p[1..]) > self.best.len() {
            self.run(s, in_s, p[1..].to_vec())?;
        }
        Ok(())
    }
}

/// Maximum conflict-free family by branch and bound, seeded with the greedy family.
/// Vertices are ordered by conflict degree (descending, ties by candidate index).
pub fn pack_exact(
    a: &MaterializedSet,
    ideal: &Ideal,
    candidates: &[GroupElem],
    n: usize,
    opts: &PackOptions,
) -> Result<PackingReport> {
    check_inputs(a, ideal, candidates, n)?;
    let cap = if n == 2 {
        opts.exact_cap_pairs
    } else {
        opts.exact_cap
    };
    if candidates.len() > cap {
        return Err(Error::BudgetExceeded {
            needed: candidates.len() as u128,
            cap: cap as u128,
        });
    }
    if let Some(r) = shortcut(a, ideal, candidates, n)? {
        return Ok(r);
    }
    let graph = conflict_hypergraph(a, ideal, candidates, n)?;
    let k = candidates.len();
    let (greedy, _) = greedy_with(k, n, |t| Ok(graph.is_edge(t)))?;

    let mut incident: Vec<Vec<&[usize]>> = vec![Vec::new(); k];
    for e in &graph.edges {
        for &v in e {
            incident[v].push(e.as_slice());
        }
    }
    let adj = (n == 2).then(|| {
        let mut adj = vec![BitSet::new(k); k];
        for e in &graph.edges {
            adj[e[0]].insert(e[1]);
            adj[e[1]].insert(e[0]);
        }
        adj
    });
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(incident[v].len()), v));
    let mut search = Search {
        incident,
        adj,
        best: greedy,
        nodes: 0,
        budget: opts.node_budget,
    };
    let outcome = search.run(&mut Vec::new(), &mut vec![false; k], order);
    let mut family = search.best.clone();
    family.sort_unstable();
    let stats = SearchStats {
        nodes: search.nodes,
        edges: graph.evaluated,
        shortcut: false,
    };
    let rep = report(ideal, candidates, n, &family, outcome.is_ok(), stats);
    match outcome {
        Ok(()) => Ok(rep),
        Err(()) if rep.is_saturated() => Ok(rep),
        Err(()) => Err(Error::SearchBudgetExceeded(Box::new(rep))),
    }
}

/// Exact reports for each arity in `ns`.
pub fn pack_profile(
    a: &MaterializedSet,
    ideal: &Ideal,
    ns: &[usize],
    candidates: &[GroupElem],
    opts: &PackOptions,
) -> Result<Vec<PackingReport>> {
    ns.iter()
        .map(|&n| pack_exact(a, ideal, candidates, n, opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::expr::{materialize, parse_set_expr};
    use crate::group::Window;
    use crate::ideal::{make_ideal, IdealSpec};
    use proptest::prelude::*;

    fn zcore(lo: i64, hi: i64, margin: u64) -> Arc<Universe> {
        Arc::new(Universe::integers(
            Window::with_core(lo, hi, margin).unwrap(),
        ))
    }

    fn mat(s: &str, u: &Arc<Universe>) -> MaterializedSet {
        materialize(&parse_set_expr(s).unwrap(), u).unwrap()
    }

    fn range(u: &Universe, lo: i64, hi: i64) -> Vec<GroupElem> {
        candidate_translators(u, &CandidateSpec::Range { lo, hi }).unwrap()
    }

    /// Largest family whose `n`-subsets avoid conflicts, over all subsets of candidates.
    fn brute(a: &MaterializedSet, ideal: &Ideal, cands: &[GroupElem], n: usize) -> usize {
        let k = cands.len();
        let tr: Vec<BitSet> = cands
            .iter()
            .map(|g| a.left_translate_unchecked(g).bits().clone())
            .collect();
        let conflict = |t: &[usize]| {
            let mut acc = tr[t[0]].clone();
            for &i in &t[1..] {
                acc.intersect_with(&tr[i]);
            }
            !ideal
                .member(&MaterializedSet::from_bits(a.universe(), acc))
                .unwrap()
        };
        let mut best = 0;
        for mask in 0u32..(1 << k) {
            let fam: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
            if fam.len() <= best {
                continue;
            }
            let ok = combinations(fam.len(), n)
                .all(|s| !conflict(&s.iter().map(|&i| fam[i]).collect::<Vec<_>>()));
            if ok {
                best = fam.len();
            }
        }
        best
    }

    #[test]
    fn candidate_lists() {
        let u = zcore(-100, 100, 20);
        assert_eq!(range(&u, 0, 9).len(), 10);
        assert!(matches!(
            candidate_translators(&u, &CandidateSpec::Range { lo: 0, hi: 21 }),
            Err(Error::RangeExceedsMargin(_))
        ));
        let c = Universe::cyclic(12).unwrap();
        assert_eq!(
            candidate_translators(&c, &CandidateSpec::All)
                .unwrap()
                .len(),
            12
        );
        let f = Universe::free(6, 2).unwrap();
        let w = candidate_translators(&f, &CandidateSpec::Words { max_len: 2 }).unwrap();
        assert_eq!(w.len(), 1 + 4 + 4 * 3);
        assert!(candidate_translators(&u, &CandidateSpec::All).is_err());
    }

    #[test]
    fn hypergraph_examples() {
        let u = zcore(-200, 200, 60);
        let triv = Ideal::trivial(&u);
        let g = conflict_hypergraph(&mat("evens", &u), &triv, &range(&u, 0, 3), 2).unwrap();
        assert_eq!(g.edges, vec![vec![0, 2], vec![1, 3]]);
        let g = conflict_hypergraph(&mat("empty", &u), &triv, &range(&u, 0, 3), 2).unwrap();
        assert!(g.edges.is_empty());
        let u = zcore(0, 10_000, 60);
        let triv = Ideal::trivial(&u);
        let g = conflict_hypergraph(&mat("triangular", &u), &triv, &range(&u, 0, 50), 2).unwrap();
        assert_eq!(g.edges.len(), 51 * 50 / 2);
        // The slow path agrees with the direct scan.
        let cands = range(&u, 0, 50);
        let a = mat("triangular", &u);
        let generic = EdgeOracle {
            offsets: None,
            ..EdgeOracle::new(&a, &triv, &cands)
        };
        for t in combinations(51, 2).step_by(37) {
            assert!(generic.conflict(&t).unwrap());
        }
    }

    #[test]
    fn evens_packing() {
        let u = zcore(-10_000, 10_000, 64);
        let triv = Ideal::trivial(&u);
        let a = mat("evens", &u);
        let c = range(&u, 0, 9);
        let g = pack_greedy(&a, &triv, &c, 2).unwrap();
        assert_eq!(
            (g.value, &g.family[..]),
            (2, &[ElemLabel::Int(0), ElemLabel::Int(1)][..])
        );
        assert_eq!(g.status, PackStatus::LowerBound);
        let e = pack_exact(&a, &triv, &c, 2, &PackOptions::default()).unwrap();
        assert_eq!((e.value, e.status), (2, PackStatus::Exact));
        // Three translates of mixed parity meet in the empty set; no three of one parity.
        let e3 = pack_exact(&a, &triv, &c, 3, &PackOptions::default()).unwrap();
        assert_eq!((e3.value, e3.status), (4, PackStatus::Exact));
        let all = pack_exact(&mat("all", &u), &triv, &c, 2, &PackOptions::default()).unwrap();
        assert_eq!(all.value, 1);
        let none = pack_exact(&mat("empty", &u), &triv, &c, 2, &PackOptions::default()).unwrap();
        assert!(none.is_saturated() && none.stats.shortcut);
    }

    #[test]
    fn cyclic_thirds() {
        let u = Arc::new(Universe::cyclic(12).unwrap());
        let triv = Ideal::trivial(&u);
        let a = mat("ap(0, 3)", &u);
        let c = candidate_translators(&u, &CandidateSpec::All).unwrap();
        let e = pack_exact(&a, &triv, &c, 2, &PackOptions::default()).unwrap();
        assert_eq!(e.value, 3);
        assert_eq!(brute(&a, &triv, &c, 2), 3);
    }

    #[test]
    fn triangular_pairs_and_triples() {
        let u = zcore(0, 100_000, 4096);
        let triv = Ideal::trivial(&u);
        let a = mat("triangular", &u);
        let e = pack_exact(&a, &triv, &range(&u, 0, 200), 2, &PackOptions::default()).unwrap();
        assert_eq!((e.value, e.status), (1, PackStatus::Exact));
        let pows: Vec<GroupElem> = (4..=12).map(|m| GroupElem::Int(1 << m)).collect();
        let e3 = pack_exact(&a, &triv, &pows, 3, &PackOptions::default()).unwrap();
        assert_eq!((e3.value, e3.status), (9, PackStatus::Saturated));
    }

    #[test]
    fn budget_reports_incumbent() {
        let u = Arc::new(Universe::cyclic(60).unwrap());
        let triv = Ideal::trivial(&u);
        let a = mat("list{0, 1, 7, 19, 30}", &u);
        let c = candidate_translators(&u, &CandidateSpec::All).unwrap();
        let opts = PackOptions {
            node_budget: 3,
            ..Default::default()
        };
        match pack_exact(&a, &triv, &c, 2, &opts) {
            Err(Error::SearchBudgetExceeded(r)) => {
                assert_eq!(r.status, PackStatus::LowerBound);
                assert!(r.value >= 1);
            }
            other => panic!("{other:?}"),
        }
        let small = PackOptions {
            exact_cap_pairs: 10,
            ..Default::default()
        };
        assert!(matches!(
            pack_exact(&a, &triv, &c, 2, &small),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn ideal_relaxes_conflicts() {
        let u = zcore(0, 2000, 16);
        let a = mat("union(evens, list{1, 3})", &u);
        let c = range(&u, 0, 9);
        let triv = Ideal::trivial(&u);
        let fin = make_ideal(&IdealSpec::FiniteSets { radius: Some(20) }, &u).unwrap();
        let t = pack_exact(&a, &triv, &c, 2, &PackOptions::default()).unwrap();
        let f = pack_exact(&a, &fin, &c, 2, &PackOptions::default()).unwrap();
        assert_eq!((t.value, f.value), (1, 2));
    }

    fn small_cyclic() -> impl Strategy<Value = (u64, Vec<bool>)> {
        prop::sample::select(vec![6u64, 8, 10, 12]).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(prop::bool::weighted(0.35), n as usize),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exact_matches_brute_force((order, bits) in small_cyclic(), n in 2usize..4) {
            let u = Arc::new(Universe::cyclic(order).unwrap());
            let triv = Ideal::trivial(&u);
            let a = MaterializedSet::from_predicate(&u, |i| bits[i]);
            let c = candidate_translators(&u, &CandidateSpec::All).unwrap();
            let e = pack_exact(&a, &triv, &c, n, &PackOptions::default()).unwrap();
            prop_assert_eq!(e.value, brute(&a, &triv, &c, n));
            let g = pack_greedy(&a, &triv, &c, n).unwrap();
            prop_assert!(g.value <= e.value);
            prop_assert!(e.value >= e.vacuous_floor);
        }

        #[test]
        fn monotone_in_n_and_antitone_in_a((order, bits) in small_cyclic(), extra in proptest::collection::vec(any::<bool>(), 12)) {
            let u = Arc::new(Universe::cyclic(order).unwrap());
            let triv = Ideal::trivial(&u);
            let a = MaterializedSet::from_predicate(&u, |i| bits[i]);
            let b = MaterializedSet::from_predicate(&u, |i| bits[i] || extra[i]);
            let c = candidate_translators(&u, &CandidateSpec::All).unwrap();
            let p = pack_profile(&a, &triv, &[2, 3, 4], &c, &PackOptions::default()).unwrap();
            prop_assert!(p.windows(2).all(|w| w[0].value <= w[1].value));
            let pb = pack_exact(&b, &triv, &c, 2, &PackOptions::default()).unwrap();
            prop_assert!(pb.value <= p[0].value);
        }

        #[test]
        fn translate_invariant(bits in proptest::collection::vec(prop::bool::weighted(0.3), 201), g in -8i64..=8) {
            let u = zcore(-60, 60, 24);
            let triv = Ideal::trivial(&u);
            let a = MaterializedSet::from_predicate(&u, |i| bits[i] && (40..=128).contains(&i));
            let ga = a.left_translate(&GroupElem::Int(g)).unwrap();
            let c = range(&u, 0, 7);
            let v = pack_exact(&a, &triv, &c, 2, &PackOptions::default()).unwrap().value;
            let w = pack_exact(&ga, &triv, &c, 2, &PackOptions::default()).unwrap().value;
            prop_assert_eq!(v, w);
        }

        #[test]
        fn reported_family_is_conflict_free((order, bits) in small_cyclic(), n in 2usize..4) {
            let u = Arc::new(Universe::cyclic(order).unwrap());
            let triv = Ideal::trivial(&u);
            let a = MaterializedSet::from_predicate(&u, |i| bits[i]);
            let c = candidate_translators(&u, &CandidateSpec::All).unwrap();
            let e = pack_exact(&a, &triv, &c, n, &PackOptions::default()).unwrap();
            let idx: Vec<usize> = e.family.iter().map(|l| match l { ElemLabel::Int(x) => *x as usize, _ => unreachable!() }).collect();
            let g = conflict_hypergraph(&a, &triv, &c, n).unwrap();
            for s in combinations(idx.len(), n) {
                let t: Vec<usize> = s.iter().map(|&i| idx[i]).collect();
                prop_assert!(!g.is_edge(&t));
            }
        }
    }
}
