//! The ten acceptance checks, shared by `idealpack verify-paper` and the `acceptance` test
//! target. Each check compares library results with an independent computation that does
//! not go through the search code.

use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::combi::combinations;
use crate::completion::{iterate_completion, CompletionConfig, CompletionKind, Workspace};
use crate::error::Result;
use crate::expr::{materialize, parse_set_expr, Catalog};
use crate::free::{
    complement_side_translators, f2_partition, family_disjoint, Letter, ReducedWord,
};
use crate::group::{ElemLabel, GroupElem, Universe, Window};
use crate::ideal::{make_ideal, Ideal, IdealSpec};
use crate::largeness::{is_small, LargeBounds, SmallBounds, SmallVerdict};
use crate::measure::{counting_bound_check, measure_build, CountingMeasure};
use crate::packing::{
    candidate_translators, conflict_hypergraph, pack_exact, pack_greedy, CandidateSpec,
    PackOptions, PackStatus,
};
use crate::set::MaterializedSet;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2}: {} ({} ms) - {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed_ms,
            self.detail
        )
    }
}

pub const TITLES: [&str; 10] = [
    "pack_2 of the even numbers is 2",
    "pack_2 of the triangular numbers is 1",
    "triangular translates by 2^m are 3-disjoint",
    "Følner stage measure on the triangular numbers",
    "counting bound on Z_64",
    "F2 decomposition families are disjoint",
    "exact packing matches brute force on Z_N",
    "monotonicity in n, in the ideal and in A",
    "smallness evidence for triangular and even numbers",
    "Pack_2 completion over the shipped catalog",
];

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(limit: Duration, start: Instant) -> std::result::Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn zcore(lo: i64, hi: i64, margin: u64) -> std::result::Result<Arc<Universe>, String> {
    Ok(Arc::new(Universe::integers(lib(Window::with_core(
        lo, hi, margin,
    ))?)))
}

fn mat(text: &str, u: &Arc<Universe>) -> std::result::Result<MaterializedSet, String> {
    lib(materialize(&lib(parse_set_expr(text))?, u))
}

fn is_triangular(x: i64) -> bool {
    // x = k(k+1)/2 iff 8x + 1 is an odd square.
    x >= 0 && {
        let d = 8 * x as u64 + 1;
        let r = d.isqrt();
        r * r == d
    }
}

pub fn criterion_1() -> Check {
    let start = Instant::now();
    let u = zcore(0, 10_000, 9)?;
    let evens = mat("evens", &u)?;
    let cands = lib(candidate_translators(
        &u,
        &CandidateSpec::Range { lo: 0, hi: 9 },
    ))?;
    let r = lib(pack_exact(
        &evens,
        &Ideal::trivial(&u),
        &cands,
        2,
        &PackOptions::default(),
    ))?;
    let c = Arc::new(lib(Universe::cyclic(12))?);
    let evens12 = mat("evens", &c)?;
    let all12 = lib(candidate_translators(&c, &CandidateSpec::All))?;
    let r12 = lib(pack_exact(
        &evens12,
        &Ideal::trivial(&c),
        &all12,
        2,
        &PackOptions::default(),
    ))?;
    within(Duration::from_millis(100), start)?;
    // Parity: any two shifts of equal parity give equal translates, opposite parities are
    // disjoint, so the answer is the number of parity classes among the candidates.
    ensure(r.value == 2 && r.status == PackStatus::Exact, || {
        format!("Z window: {r:?}")
    })?;
    ensure(r12.value == 2 && r12.status == PackStatus::Exact, || {
        format!("Z_12: {r12:?}")
    })?;
    Ok(format!(
        "value 2 on [0, 10^4] (family {}) and on Z_12 (family {})",
        serde_json::json!(r.family),
        serde_json::json!(r12.family)
    ))
}

pub fn criterion_2() -> Check {
    let start = Instant::now();
    let u = zcore(0, 1_000_000, 1000)?;
    let a = mat("triangular", &u)?;
    let cands = lib(candidate_translators(
        &u,
        &CandidateSpec::Range { lo: 0, hi: 1000 },
    ))?;
    let r = lib(pack_exact(
        &a,
        &Ideal::trivial(&u),
        &cands,
        2,
        &PackOptions::default(),
    ))?;
    within(Duration::from_secs(5), start)?;
    // Oracle: for shift b the point T_b = b(b+1)/2 lies in A ∩ (b + A) since
    // T_b − b = T_{b−1}; the same point moved by c certifies the pair {c, c + b}.
    for b in 1..=1000i64 {
        let t = b * (b + 1) / 2;
        ensure(
            is_triangular(t) && is_triangular(t - b) && t + 1000 <= 1_000_000,
            || format!("oracle fails at b = {b}"),
        )?;
    }
    ensure(r.value == 1 && r.status == PackStatus::Exact, || {
        format!("{r:?}")
    })?;
    Ok(format!(
        "exact value 1 over 1001 candidates, {} pairs evaluated; oracle certifies every shift 1..1000",
        r.edges_evaluated
    ))
}

pub fn criterion_3() -> Check {
    let start = Instant::now();
    let shifts: Vec<i64> = (4..=12).map(|m| 1i64 << m).collect();
    // Oracle: scan every point of [0, 10^5] for each triple.
    let mut triples = 0;
    for t in combinations(shifts.len(), 3) {
        triples += 1;
        let hit = (0..=100_000i64).find(|&x| t.iter().all(|&i| is_triangular(x - shifts[i])));
        ensure(hit.is_none(), || format!("triple {t:?} meets at {hit:?}"))?;
    }
    let u = zcore(0, 100_000, 4096)?;
    let a = mat("triangular", &u)?;
    let cands: Vec<GroupElem> = shifts.iter().map(|&s| GroupElem::Int(s)).collect();
    let g = lib(conflict_hypergraph(&a, &Ideal::trivial(&u), &cands, 3))?;
    let r = lib(pack_exact(
        &a,
        &Ideal::trivial(&u),
        &cands,
        3,
        &PackOptions::default(),
    ))?;
    within(Duration::from_secs(5), start)?;
    ensure(
        triples == 84 && g.evaluated == 84 && g.edges.is_empty(),
        || {
            format!(
                "{triples} triples, {} evaluated, {} edges",
                g.evaluated,
                g.edges.len()
            )
        },
    )?;
    ensure(r.value >= 9 && r.status == PackStatus::Saturated, || {
        format!("{r:?}")
    })?;
    Ok(format!(
        "84 empty triple intersections; pack_3 = {} saturated",
        r.value
    ))
}

pub fn criterion_4() -> Check {
    let u = zcore(0, 10_000, 1)?;
    let tri = mat("triangular", &u)?;
    let evens = mat("evens", &u)?;
    let m = lib(measure_build(&[GroupElem::Int(1)], 10, &tri, 10_000))?;
    let len = m.support_size() as i64;
    // Oracle: least y >= 0 with no triangular number in [y, y + 21).
    let y_oracle = (0i64..)
        .find(|&y| (y..y + 21).all(|x| !is_triangular(x)))
        .unwrap();
    let evens_oracle = (y_oracle..y_oracle + 21).filter(|x| x % 2 == 0).count() as i64;
    ensure(len == 21, || format!("L = {len}"))?;
    ensure(m.y == GroupElem::Int(232) && y_oracle == 232, || {
        format!("y = {} (oracle {y_oracle})", m.y)
    })?;
    let mu_tri = lib(m.mu(&tri))?;
    let mu_ev = lib(m.mu(&evens))?;
    ensure(*mu_tri == Ratio::new(0, 1), || {
        format!("mu(tri) = {mu_tri}")
    })?;
    ensure(*mu_ev == Ratio::new(11, 21) && evens_oracle == 11, || {
        format!("mu(evens) = {mu_ev}")
    })?;
    let mu_all = lib(m.mu(&mat("all", &u)?))?;
    ensure(*mu_all == Ratio::new(1, 1), || {
        format!("mu(all) = {mu_all}")
    })?;

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let bound = Ratio::new(2, 21);
    let mut worst = Ratio::new(0, 1);
    for _ in 0..100 {
        let b = MaterializedSet::from_predicate(&u, |_| rng.gen_bool(0.5));
        let d = lib(m.invariance_defect(&GroupElem::Int(1), &b))?;
        // Oracle: |B ∩ [y, y+21)| − |B ∩ [y−1, y+20)| by direct counting.
        let inside = |lo: i64| {
            (lo..lo + 21)
                .filter(|&x| b.contains(&GroupElem::Int(x)))
                .count() as i64
        };
        let direct = Ratio::new((inside(232) - inside(231)).abs(), 21);
        ensure(*d.defect == direct, || {
            format!("defect {} vs direct {direct}", d.defect)
        })?;
        ensure(direct <= bound && direct < Ratio::new(1, 10), || {
            format!("defect {direct}")
        })?;
        worst = worst.max(direct);
    }
    Ok(format!(
        "L = 21, y = 232, mu(tri) = 0, mu(evens) = 11/21, worst defect {worst} <= 2/21"
    ))
}

pub fn criterion_5() -> Check {
    let u = Arc::new(lib(Universe::cyclic(64))?);
    let triv = Ideal::trivial(&u);
    let all = lib(candidate_translators(&u, &CandidateSpec::All))?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut families = 0;
    for _ in 0..100 {
        let p = rng.gen_range(0.02..0.4);
        let a = MaterializedSet::from_predicate(&u, |_| rng.gen_bool(p));
        // Greedy pairwise-disjoint families from every starting rotation.
        for s in 0..64 {
            let order: Vec<GroupElem> = (0..64).map(|k| all[(s + k) % 64].clone()).collect();
            let r = lib(pack_greedy(&a, &triv, &order, 2))?;
            let family: Vec<GroupElem> = r
                .family
                .iter()
                .filter_map(|l| match l {
                    ElemLabel::Int(v) => Some(GroupElem::Residue(*v as u64)),
                    ElemLabel::Text(_) => None,
                })
                .collect();
            let v = lib(counting_bound_check(
                &a,
                &family,
                2,
                CountingMeasure::Uniform,
            ))?;
            let m = family.len() as i64;
            let count = a.count() as i64;
            ensure(v.holds && count * m <= 2 * 64, || {
                format!("|A| = {count}, m = {m}: {v:?}")
            })?;
            families += 1;
        }
    }
    Ok(format!(
        "{families} greedy families checked, density <= 2/m in every case"
    ))
}

/// Reduced product of letter strings, computed on plain characters.
fn reduce_chars(s: &str) -> String {
    let mut out: Vec<char> = Vec::new();
    for c in s.chars() {
        let inv = if c.is_ascii_lowercase() {
            c.to_ascii_uppercase()
        } else {
            c.to_ascii_lowercase()
        };
        if out.last() == Some(&inv) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out.into_iter().collect()
}

pub fn criterion_6() -> Check {
    let start = Instant::now();
    let (a, b) = lib(f2_partition(12))?;
    let bs: Vec<ReducedWord> = (0..=8).map(|k| ReducedWord::power(Letter::B, k)).collect();
    let ra = lib(family_disjoint(&a, &bs, 2))?;
    let as_ = complement_side_translators(6);
    let rb = lib(family_disjoint(&b, &as_, 2))?;
    within(Duration::from_secs(10), start)?;
    ensure(ra.disjoint && ra.translators.len() == 9, || {
        format!("{:?}", ra.witness)
    })?;
    ensure(rb.disjoint && rb.translators.len() == 6, || {
        format!("{:?}", rb.witness)
    })?;
    ensure(
        ra.decided_sizes
            .iter()
            .chain(&rb.decided_sizes)
            .all(|&s| s > 0),
        || "a translate has no decided words".into(),
    )?;
    // Oracle on words of length <= 6 as strings: x ∈ b^k·A iff b^{-k}x starts with a or A.
    let words: Vec<String> = {
        let mut all = vec![String::new()];
        let mut frontier = vec![String::new()];
        for _ in 0..6 {
            let mut next = Vec::new();
            for w in &frontier {
                for c in ['a', 'A', 'b', 'B'] {
                    let cand = format!("{w}{c}");
                    if reduce_chars(&cand).len() == cand.len() {
                        next.push(cand);
                    }
                }
            }
            all.extend(next.iter().cloned());
            frontier = next;
        }
        all
    };
    for x in &words {
        let hits = (0..=8)
            .filter(|&k| {
                let y = reduce_chars(&format!("{}{x}", "B".repeat(k)));
                y.starts_with(['a', 'A'])
            })
            .count();
        ensure(hits <= 1, || format!("{x} lies in {hits} translates of A"))?;
        let hits_b = (0..6)
            .filter(|&k| {
                let y = reduce_chars(&format!("{}{x}", "A".repeat(k)));
                !y.starts_with(['a', 'A'])
            })
            .count();
        ensure(hits_b <= 1, || {
            format!("{x} lies in {hits_b} translates of B")
        })?;
    }
    Ok(format!(
        "9 translates b^k F_a and 6 translates a^k B pairwise disjoint at depth 12 ({} words cross-checked)",
        words.len()
    ))
}

/// Largest translator family with every `n`-subset of residue translates disjoint, by
/// enumerating all subsets of `Z_N`.
fn brute_pack(a: &[bool], n: usize) -> usize {
    let order = a.len();
    let mut best = 0;
    for mask in 0u32..(1 << order) {
        let fam: Vec<usize> = (0..order).filter(|&i| mask >> i & 1 == 1).collect();
        if fam.len() <= best {
            continue;
        }
        let ok = combinations(fam.len(), n).all(|s| {
            // x ∈ c + A iff x − c ∈ A.
            !(0..order).any(|x| s.iter().all(|&i| a[(x + order - fam[i]) % order]))
        });
        if ok {
            best = fam.len();
        }
    }
    best
}

pub fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    for order in [6u64, 8, 10, 12] {
        let u = Arc::new(lib(Universe::cyclic(order))?);
        let triv = Ideal::trivial(&u);
        let cands = lib(candidate_translators(&u, &CandidateSpec::All))?;
        for _ in 0..50 {
            let p = rng.gen_range(0.1..0.6);
            let bits: Vec<bool> = (0..order).map(|_| rng.gen_bool(p)).collect();
            let a = MaterializedSet::from_predicate(&u, |i| bits[i]);
            for n in [2, 3] {
                let r = lib(pack_exact(&a, &triv, &cands, n, &PackOptions::default()))?;
                let b = brute_pack(&bits, n);
                ensure(r.value == b, || {
                    format!("Z_{order}, n = {n}, A = {bits:?}: {} vs {b}", r.value)
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases agree with exhaustive search"))
}

pub fn criterion_8() -> Check {
    let cat = Catalog::shipped();
    let u = zcore(0, 10_000, 48)?;
    let cands = lib(candidate_translators(
        &u,
        &CandidateSpec::Range { lo: 0, hi: 15 },
    ))?;
    let opts = PackOptions::default();
    let triv = Ideal::trivial(&u);
    let fin = lib(make_ideal(&IdealSpec::FiniteSets { radius: Some(100) }, &u))?;
    let dens = lib(make_ideal(
        &IdealSpec::DensityZero {
            lengths: vec![64, 256, 1024],
            threshold: 0.02,
            radius: Some(100),
        },
        &u,
    ))?;
    let mut rows = 0;
    for (name, expr) in cat.entries() {
        let a = lib(materialize(&lib(cat.resolve(expr))?, &u))?;
        let by_n: Vec<usize> = [2, 3, 4]
            .iter()
            .map(|&n| lib(pack_exact(&a, &triv, &cands, n, &opts)).map(|r| r.value))
            .collect::<std::result::Result<_, _>>()?;
        ensure(by_n.windows(2).all(|w| w[0] <= w[1]), || {
            format!("{name}: pack_n = {by_n:?}")
        })?;
        let by_ideal: Vec<usize> = [&triv, &fin, &dens]
            .iter()
            .map(|i| lib(pack_exact(&a, i, &cands, 2, &opts)).map(|r| r.value))
            .collect::<std::result::Result<_, _>>()?;
        ensure(by_ideal.windows(2).all(|w| w[0] <= w[1]), || {
            format!("{name}: pack_2 over the ideal chain = {by_ideal:?}")
        })?;
        rows += 1;
    }

    let w = zcore(0, 2000, 20)?;
    let bounds = SmallBounds::new(2, 6, LargeBounds::new(14, 14));
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut small_supersets = 0;
    for _ in 0..50 {
        let p = rng.gen_range(0.005..0.95);
        let b = MaterializedSet::from_predicate(&w, |_| rng.gen_bool(p));
        let a = MaterializedSet::from_predicate(&w, |i| b.bits().contains(i) && rng.gen_bool(0.5));
        let sb = lib(is_small(&b, &bounds))?;
        let sa = lib(is_small(&a, &bounds))?;
        if sb.is_small() {
            small_supersets += 1;
            ensure(sa.is_small(), || {
                format!("A ⊆ B, B small, A not: {:?}", sa.verdict)
            })?;
        }
    }
    ensure(small_supersets > 0 && small_supersets < 50, || {
        format!("{small_supersets}/50 random supersets small; both verdicts are needed")
    })?;
    Ok(format!(
        "{rows} catalog sets monotone in n and along the ideal chain; {small_supersets}/50 nested pairs with small B"
    ))
}

pub fn criterion_9() -> Check {
    let start = Instant::now();
    let bounds = smallness_bounds();
    let u = zcore(0, 1_000_000, bounds.reach())?;
    let tri = lib(is_small(&mat("triangular", &u)?, &bounds))?;
    let ev = lib(is_small(&mat("evens", &u)?, &bounds))?;
    within(Duration::from_secs(30), start)?;
    ensure(tri.is_small(), || format!("triangular: {:?}", tri.verdict))?;
    ensure(
        ev.verdict
            == SmallVerdict::NotSmall {
                translators: vec![GroupElem::Int(0), GroupElem::Int(1)],
            },
        || format!("evens: {:?}", ev.verdict),
    )?;
    Ok(format!(
        "triangular small over {} translator sets (largest inner witness {}); evens fails at F = {{0, 1}}",
        tri.family_size,
        tri.max_inner_witness.unwrap_or(0)
    ))
}

/// Smallness bounds of the smallness and completion checks: `|F| <= 3` from `[-32, 32]`,
/// inner witnesses of at most 24 translators from `[0, 24]`.
pub fn smallness_bounds() -> SmallBounds {
    SmallBounds::new(3, 32, LargeBounds::new(24, 24))
}

/// Scale used by the completion check.
pub fn completion_setup() -> Result<(Workspace, CompletionConfig)> {
    let small = smallness_bounds();
    let u = Arc::new(Universe::integers(Window::with_core(
        0,
        100_000,
        small.reach(),
    )?));
    let ws = Workspace::new(&Catalog::shipped(), &u, &IdealSpec::Trivial)?;
    let cfg = CompletionConfig {
        kind: CompletionKind::Pack { n: 2 },
        stages: 5,
        threshold: 8,
        candidates: candidate_translators(&u, &CandidateSpec::Range { lo: 0, hi: 31 })?,
        pack: PackOptions::default(),
        small,
        max_translates: 2,
    };
    Ok((ws, cfg))
}

pub fn criterion_10() -> Check {
    let (ws, cfg) = lib(completion_setup())?;
    let trace = lib(iterate_completion(&ws, &cfg))?;
    for w in trace.stages.windows(2) {
        ensure(
            w[0].members.iter().all(|m| w[1].members.contains(m)),
            || format!("stage {} drops members", w[1].index),
        )?;
    }
    ensure(trace.fixpoint && trace.stages.len() <= 6, || {
        format!(
            "no fixpoint within 5 stages ({} stages run)",
            trace.stages.len() - 1
        )
    })?;
    ensure(trace.improper.is_none(), || {
        format!("improper: {:?}", trace.improper)
    })?;
    for name in trace.final_members() {
        let a = ws.set(name).expect("member of the catalog");
        let ev = lib(is_small(a, &cfg.small))?;
        ensure(ev.is_small(), || {
            format!("{name} admitted but {:?}", ev.verdict)
        })?;
    }
    Ok(format!(
        "fixpoint at stage {}; admitted {:?}, all small",
        trace.fixpoint_stage().unwrap_or(0),
        trace.final_members()
    ))
}

pub fn run_criterion(id: usize) -> CriterionResult {
    let start = Instant::now();
    let checks: [fn() -> Check; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let outcome = checks[id - 1]();
    CriterionResult {
        id,
        title: TITLES[id - 1],
        passed: outcome.is_ok(),
        detail: outcome.unwrap_or_else(|e| e),
        elapsed_ms: start.elapsed().as_millis(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=10).map(run_criterion).collect()
}
