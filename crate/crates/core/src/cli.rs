//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 usage or configuration error,
//! 3 exhausted search budget.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::completion::{iterate_completion, CompletionConfig, CompletionKind, Workspace};
use crate::config::{load_config, merge_args};
use crate::error::{Error, Result};
use crate::expr::{materialize, Catalog};
use crate::free::{
    complement_side_translators, f2_partition, family_disjoint, Letter, ReducedWord,
};
use crate::group::{CayleyTable, Group, GroupElem, Universe, Window};
use crate::ideal::{Ideal, IdealSpec};
use crate::largeness::{gap_profile, is_i_small, is_large, LargeBounds, SmallBounds, SmallVerdict};
use crate::measure::{folner_set, measure_build, upper_density};
use crate::packing::{
    candidate_translators, pack_exact, pack_greedy, pack_profile, CandidateSpec, PackOptions,
};
use crate::report::{CommandEcho, Provenance, Report, Scale};
use crate::set::MaterializedSet;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "idealpack",
    version,
    about = "Packing indices, largeness, smallness and Følner measures on finite scales"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Packing index of a set.
    Pack(PackArgs),
    /// Smallness evidence.
    Small(SmallArgs),
    /// Largeness witness search.
    Large(LargeArgs),
    /// Upper density over sliding windows.
    Density(DensityArgs),
    /// Følner set for a finite test set.
    Folner(FolnerArgs),
    /// Finite-stage measure avoiding a set.
    Measure(MeasureArgs),
    /// Staged completion over a catalog.
    Complete(CompleteArgs),
    /// Disjoint translate families in the free group.
    F2(F2Args),
    /// Runs the acceptance suite.
    VerifyPaper(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GroupKind {
    Integers,
    Cyclic,
    Table,
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IdealKind {
    Trivial,
    FiniteSets,
    DensityZero,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// TOML config file; flags on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = GroupKind::Integers)]
    pub group: GroupKind,
    /// Modulus for `--group cyclic`.
    #[arg(long)]
    pub order: Option<u64>,
    /// Cayley table file for `--group table`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Word length bound on the free group.
    #[arg(long, default_value_t = 12)]
    pub depth: usize,
    /// Core of the `ℤ` window: `N` for `[0, N]` or `lo..hi`.
    #[arg(long, default_value = "10000", allow_hyphen_values = true)]
    pub window: String,
    /// Shift margin around the core; defaults to what the command needs.
    #[arg(long)]
    pub margin: Option<u64>,
    /// Catalog file of named sets; the shipped catalog otherwise.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    #[arg(long, visible_alias = "report", value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct IdealArgs {
    #[arg(long, value_enum, default_value_t = IdealKind::Trivial)]
    pub ideal: IdealKind,
    /// Radius of the finite part.
    #[arg(long)]
    pub radius: Option<u64>,
    /// Window lengths of the density-zero proxy.
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 256, 1024])]
    pub lengths: Vec<usize>,
    #[arg(long, default_value_t = 0.02)]
    pub density_threshold: f64,
}

#[derive(Args, Debug, Clone)]
pub struct SmallFlags {
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 32)]
    pub s: u64,
    #[arg(long, default_value_t = 24)]
    pub inner_size: usize,
    #[arg(long, default_value_t = 24)]
    pub inner_shift: u64,
}

impl SmallFlags {
    fn bounds(&self) -> SmallBounds {
        SmallBounds::new(
            self.m,
            self.s,
            LargeBounds::new(self.inner_size, self.inner_shift),
        )
    }
}

#[derive(Args, Debug, Clone)]
pub struct PackArgs {
    #[command(flatten)]
    pub g: GroupArgs,
    #[command(flatten)]
    pub i: IdealArgs,
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    /// Arity range `lo..hi` for an exact profile; overrides `--n`.
    #[arg(long)]
    pub ns: Option<String>,
    /// Candidate shifts `lo..hi` on `ℤ` or `ℤ_N`.
    #[arg(long, allow_hyphen_values = true)]
    pub shifts: Option<String>,
    /// Candidate list; `x^i..x^j` expands to powers on the free group.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub translators: Vec<String>,
    /// Candidate words up to this length on the free group.
    #[arg(long)]
    pub words: Option<usize>,
    /// Branch and bound instead of the greedy lower bound.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value_t = 5_000_000)]
    pub node_budget: u64,
}

#[derive(Args, Debug, Clone)]
pub struct SmallArgs {
    #[command(flatten)]
    pub g: GroupArgs,
    #[command(flatten)]
    pub i: IdealArgs,
    #[command(flatten)]
    pub b: SmallFlags,
    #[arg(long)]
    pub set: String,
}

#[derive(Args, Debug, Clone)]
pub struct LargeArgs {
    #[command(flatten)]
    pub g: GroupArgs,
    #[command(flatten)]
    pub i: IdealArgs,
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 8)]
    pub max_size: usize,
    #[arg(long, default_value_t = 16)]
    pub shift: u64,
}

#[derive(Args, Debug, Clone)]
pub struct DensityArgs {
    #[command(flatten)]
    pub g: GroupArgs,
    #[arg(long)]
    pub set: String,
    #[arg(long, value_delimiter = ',', default_values_t = [64usize, 256, 1024])]
    pub lengths: Vec<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct FolnerArgs {
    #[command(flatten)]
    pub g: GroupArgs,
    /// Test set, e.g. `{1, -2}`.
    #[arg(long = "F", allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, default_value_t = 10)]
    pub n: u64,
}

#[derive(Args, Debug, Clone)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub g: GroupArgs,
    /// Set the measure must vanish on.
    #[arg(long)]
    pub avoid: String,
    #[arg(long = "F", allow_hyphen_values = true)]
    pub f: String,
    #[arg(long, default_value_t = 10)]
    pub n: u64,
    /// Sets to measure; repeatable.
    #[arg(long)]
    pub eval: Vec<String>,
    /// Elements for the invariance defect; the test set by default.
    #[arg(long, allow_hyphen_values = true)]
    pub defect_x: Option<String>,
    /// Largest `|y|` tried for the avoiding translate; the core span by default.
    #[arg(long)]
    pub bound: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct CompleteArgs {
    #[command(flatten)]
    pub g: GroupArgs,
    #[command(flatten)]
    pub i: IdealArgs,
    #[command(flatten)]
    pub b: SmallFlags,
    /// `pack2`, `pack3`, …, `pack<w` or `s`.
    #[arg(long, default_value = "pack2")]
    pub kind: String,
    #[arg(long, default_value_t = 5)]
    pub stages: usize,
    #[arg(long, default_value_t = 8)]
    pub threshold: usize,
    #[arg(long, default_value = "0..31", allow_hyphen_values = true)]
    pub shifts: String,
    #[arg(long, default_value_t = 2)]
    pub max_translates: usize,
    #[arg(long, default_value_t = 5_000_000)]
    pub node_budget: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    /// Words starting with `a` or `A`.
    A,
    /// The complement.
    B,
}

#[derive(Args, Debug, Clone)]
pub struct F2Args {
    #[command(flatten)]
    pub g: GroupArgs,
    #[arg(long, value_enum, default_value_t = Side::A)]
    pub side: Side,
    /// Translators; `b^0..b^8` on side `a` and `a^0..a^5` on side `b` by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub translators: Vec<String>,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Run one criterion only.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=10))]
    pub criterion: Option<u64>,
    #[arg(long, visible_alias = "report", value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

/// Result of a run: the report (absent on hard errors) and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: Option<Report>,
    pub format: Format,
    pub code: i32,
    pub message: Option<String>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        e if e.is_budget() => EXIT_BUDGET,
        Error::AvoidanceNotFound { .. } => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

fn subcommand_names() -> Vec<String> {
    Cli::command()
        .get_subcommands()
        .map(|c| c.get_name().to_string())
        .collect()
}

fn accepts(cmd: &str, flag: &str) -> bool {
    Cli::command()
        .find_subcommand(cmd)
        .is_some_and(|c| c.get_arguments().any(|a| a.get_long() == Some(flag)))
}

fn config_path(argv: &[String]) -> Option<PathBuf> {
    argv.iter().enumerate().find_map(|(i, a)| {
        a.strip_prefix("--config=").map(PathBuf::from).or_else(|| {
            (a == "--config")
                .then(|| argv.get(i + 1).map(PathBuf::from))
                .flatten()
        })
    })
}

/// Parses `argv` (program name first), merges the config file and runs the command.
pub fn execute(argv: &[String]) -> Outcome {
    let fail = |code, message: String| Outcome {
        report: None,
        format: Format::Json,
        code,
        message: Some(message),
    };
    let argv = match config_path(argv) {
        Some(path) => {
            let names = subcommand_names();
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            match load_config(&path).and_then(|flags| merge_args(argv, &flags, &names, accepts)) {
                Ok(a) => a,
                Err(e) => return fail(EXIT_USAGE, format!("error: {e}")),
            }
        }
        None => argv.to_vec(),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => return fail(e.exit_code(), e.render().to_string()),
    };
    let start = Instant::now();
    let echo = CommandEcho {
        name: argv.get(1).cloned().unwrap_or_default(),
        args: argv.iter().skip(2).cloned().collect(),
    };
    let format = match &cli.command {
        Command::Pack(a) => a.g.format,
        Command::Small(a) => a.g.format,
        Command::Large(a) => a.g.format,
        Command::Density(a) => a.g.format,
        Command::Folner(a) => a.g.format,
        Command::Measure(a) => a.g.format,
        Command::Complete(a) => a.g.format,
        Command::F2(a) => a.g.format,
        Command::VerifyPaper(a) => a.format,
    };
    let outcome = match &cli.command {
        Command::Pack(a) => cmd_pack(a),
        Command::Small(a) => cmd_small(a),
        Command::Large(a) => cmd_large(a),
        Command::Density(a) => cmd_density(a),
        Command::Folner(a) => cmd_folner(a),
        Command::Measure(a) => cmd_measure(a),
        Command::Complete(a) => cmd_complete(a),
        Command::F2(a) => cmd_f2(a),
        Command::VerifyPaper(a) => Ok(cmd_verify(a)),
    };
    match outcome {
        Ok(run) => Outcome {
            report: Some(Report {
                command: echo,
                scale: run.scale,
                result: run.result,
                provenance: run.provenance,
                elapsed_ms: start.elapsed().as_millis() as u64,
            }),
            format,
            code: run.code,
            message: run.message,
        },
        Err(e) => fail(exit_code(&e), format!("error: {e}")),
    }
}

/// Runs the CLI, printing the report to standard output and diagnostics to standard error.
pub fn run(argv: &[String]) -> i32 {
    let out = execute(argv);
    let mut stdout = std::io::stdout().lock();
    // A closed pipe downstream is not an error of the run.
    if let Some(r) = &out.report {
        let _ = match out.format {
            Format::Json => writeln!(stdout, "{}", r.to_json()),
            Format::Text => write!(stdout, "{}", r.to_text()),
        };
    }
    if let Some(m) = &out.message {
        if out.code == EXIT_OK {
            let _ = write!(stdout, "{m}");
        } else {
            let _ = writeln!(std::io::stderr(), "{}", m.trim_end());
        }
    }
    out.code
}

struct Run {
    scale: Scale,
    result: Value,
    provenance: Provenance,
    code: i32,
    message: Option<String>,
}

impl Run {
    fn new(ctx: &Ctx, result: impl Serialize, evidence: &str) -> Self {
        Run {
            scale: ctx.scale.clone(),
            result: serde_json::to_value(result).expect("results serialize"),
            provenance: Provenance {
                proxy: false,
                evidence: evidence.into(),
                notes: Vec::new(),
            },
            code: EXIT_OK,
            message: None,
        }
    }

    fn ideal(mut self, ideal: &Ideal) -> Self {
        self.scale.ideal = Some(ideal.id());
        if ideal.is_proxy() {
            self.provenance.proxy = true;
            self.provenance
                .notes
                .push("density-zero sets stand in for the absolute null ideal".into());
        }
        self
    }

    fn code(mut self, code: i32) -> Self {
        self.code = code;
        self
    }
}

struct Ctx {
    catalog: Catalog,
    universe: Arc<Universe>,
    scale: Scale,
}

impl Ctx {
    fn set(&self, text: &str) -> Result<MaterializedSet> {
        materialize(&self.catalog.expr(text)?, &self.universe)
    }

    fn group(&self) -> Group {
        self.universe.group()
    }
}

fn parse_range(text: &str) -> Result<(i64, i64)> {
    let bad = || Error::InvalidParam(format!("`{text}` is not a range `lo..hi`"));
    let (lo, hi) = text.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo: i64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: i64 = hi.trim().parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_window(text: &str) -> Result<(i64, i64)> {
    if text.contains("..") {
        return parse_range(text);
    }
    let n: i64 = text
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParam(format!("`{text}` is not a window size or range")))?;
    Ok((0, n))
}

/// `x^i..x^j` (or `x^i..j`) for a letter `x`.
fn word_power_range(token: &str) -> Option<Result<Vec<ReducedWord>>> {
    let (lo, hi) = token.split_once("..")?;
    let (letter, i) = lo.trim().split_once('^')?;
    let hi = hi.trim();
    let j = hi.split_once('^').map_or(hi, |(_, j)| j);
    let mut chars = letter.chars();
    let (Some(c), None) = (chars.next(), chars.next()) else {
        return None;
    };
    let l = Letter::from_char(c)?;
    let range = || -> Result<Vec<ReducedWord>> {
        let bad = || Error::InvalidParam(format!("`{token}` is not a power range"));
        let i: i64 = i.parse().map_err(|_| bad())?;
        let j: i64 = j.parse().map_err(|_| bad())?;
        Ok((i.min(j)..=i.max(j))
            .map(|k| ReducedWord::power(l, k))
            .collect())
    };
    Some(range())
}

fn parse_words(tokens: &[String]) -> Result<Vec<ReducedWord>> {
    let mut out = Vec::new();
    for t in tokens {
        match word_power_range(t) {
            Some(r) => out.extend(r?),
            None => out.push(t.parse()?),
        }
    }
    Ok(out)
}

fn parse_elems(group: &Group, tokens: &[String]) -> Result<Vec<GroupElem>> {
    if let Group::FreeTwo { .. } = group {
        let words = parse_words(tokens)?;
        return words
            .into_iter()
            .map(|w| {
                let g = GroupElem::Word(w);
                group.check(&g)?;
                Ok(g)
            })
            .collect();
    }
    let mut out = Vec::new();
    for t in tokens {
        if t.contains("..") {
            let (lo, hi) = parse_range(t)?;
            for v in lo..=hi {
                out.push(group.parse_elem(&v.to_string())?);
            }
        } else {
            out.push(group.parse_elem(t)?);
        }
    }
    Ok(out)
}

/// `{1, -2}` or `1,-2`.
fn parse_elem_set(group: &Group, text: &str) -> Result<Vec<GroupElem>> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    let tokens: Vec<String> = inner
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    parse_elems(group, &tokens)
}

/// Translation budget of a list of elements: `|x|` on `ℤ`, word length on `F₂`.
fn reach_of(elems: &[GroupElem]) -> u64 {
    elems
        .iter()
        .map(|g| match g {
            GroupElem::Int(v) => v.unsigned_abs(),
            GroupElem::Word(w) => w.len() as u64,
            _ => 0,
        })
        .max()
        .unwrap_or(0)
}

fn group_of(g: &GroupArgs) -> Result<Group> {
    Ok(match g.group {
        GroupKind::Integers => Group::Integers,
        GroupKind::Cyclic => Group::Cyclic {
            order: g
                .order
                .ok_or_else(|| Error::InvalidParam("--group cyclic needs --order".into()))?,
        },
        GroupKind::Table => {
            let path = g
                .table
                .as_ref()
                .ok_or_else(|| Error::InvalidParam("--group table needs --table".into()))?;
            Group::Table(Arc::new(CayleyTable::load(path)?))
        }
        GroupKind::Free => Group::FreeTwo { max_len: g.depth },
    })
}

/// Builds the universe with margin `--margin` or `needed`.
fn setup(g: &GroupArgs, needed: u64) -> Result<Ctx> {
    let catalog = match &g.catalog {
        Some(p) => Catalog::load(p)?,
        None => Catalog::shipped(),
    };
    let margin = g.margin.unwrap_or(needed);
    let (universe, mut scale) = match group_of(g)? {
        Group::Integers => {
            let (lo, hi) = parse_window(&g.window)?;
            let u = Universe::integers(Window::with_core(lo, hi, margin)?);
            let scale = Scale {
                group: "integers".into(),
                core: Some((lo, hi)),
                margin: Some(margin),
                ..Scale::default()
            };
            (u, scale)
        }
        Group::Cyclic { order } => (
            Universe::cyclic(order)?,
            Scale {
                group: "cyclic".into(),
                order: Some(order),
                ..Scale::default()
            },
        ),
        Group::Table(t) => {
            let order = t.order() as u64;
            (
                Universe::Table(t),
                Scale {
                    group: "table".into(),
                    order: Some(order),
                    ..Scale::default()
                },
            )
        }
        Group::FreeTwo { max_len } => (
            Universe::free(max_len, margin as usize)?,
            Scale {
                group: "free".into(),
                depth: Some(max_len),
                margin: Some(margin),
                ..Scale::default()
            },
        ),
    };
    scale.ideal = None;
    Ok(Ctx {
        catalog,
        universe: Arc::new(universe),
        scale,
    })
}

fn ideal_spec(i: &IdealArgs) -> IdealSpec {
    match i.ideal {
        IdealKind::Trivial => IdealSpec::Trivial,
        IdealKind::FiniteSets => IdealSpec::FiniteSets { radius: i.radius },
        IdealKind::DensityZero => IdealSpec::DensityZero {
            lengths: i.lengths.clone(),
            threshold: i.density_threshold,
            radius: i.radius,
        },
    }
}

fn candidate_spec(a: &PackArgs, group: &Group) -> Result<CandidateSpec> {
    if let Some(s) = &a.shifts {
        let (lo, hi) = parse_range(s)?;
        return Ok(CandidateSpec::Range { lo, hi });
    }
    if !a.translators.is_empty() {
        return Ok(CandidateSpec::List {
            elems: parse_elems(group, &a.translators)?,
        });
    }
    if let Some(max_len) = a.words {
        return Ok(CandidateSpec::Words { max_len });
    }
    Ok(match group {
        Group::Integers => CandidateSpec::Range { lo: 0, hi: 9 },
        Group::FreeTwo { .. } => CandidateSpec::Words { max_len: 2 },
        _ => CandidateSpec::All,
    })
}

fn spec_reach(spec: &CandidateSpec) -> u64 {
    match spec {
        CandidateSpec::Range { lo, hi } => lo.unsigned_abs().max(hi.unsigned_abs()),
        CandidateSpec::Words { max_len } => *max_len as u64,
        CandidateSpec::List { elems } => reach_of(elems),
        CandidateSpec::All => 0,
    }
}

fn cmd_pack(a: &PackArgs) -> Result<Run> {
    let group = group_of(&a.g)?;
    let spec = candidate_spec(a, &group)?;
    let ctx = setup(&a.g, spec_reach(&spec))?;
    let set = ctx.set(&a.set)?;
    let ideal = Ideal::build(&ideal_spec(&a.i), &ctx.universe)?;
    let cands = candidate_translators(&ctx.universe, &spec)?;
    let opts = PackOptions {
        node_budget: a.node_budget,
        ..PackOptions::default()
    };
    if let Some(ns) = &a.ns {
        let (lo, hi) = parse_range(ns)?;
        if lo < 2 {
            return Err(Error::InvalidParam(format!("arity must be >= 2, got {lo}")));
        }
        let ns: Vec<usize> = (lo as usize..=hi as usize).collect();
        let reps = pack_profile(&set, &ideal, &ns, &cands, &opts)?;
        return Ok(Run::new(&ctx, reps, "exact").ideal(&ideal));
    }
    let n = a.n as usize;
    let outcome = if a.exact {
        pack_exact(&set, &ideal, &cands, n, &opts)
    } else {
        pack_greedy(&set, &ideal, &cands, n)
    };
    match outcome {
        Ok(rep) => Ok(Run::new(&ctx, rep, "exact").ideal(&ideal)),
        Err(Error::SearchBudgetExceeded(rep)) => {
            let mut run = Run::new(&ctx, &*rep, "exact")
                .ideal(&ideal)
                .code(EXIT_BUDGET);
            run.provenance.notes.push(format!(
                "node budget {} exhausted; value is a lower bound",
                a.node_budget
            ));
            run.message = Some(format!("error: node budget {} exhausted", a.node_budget));
            Ok(run)
        }
        Err(e) => Err(e),
    }
}

fn cmd_small(a: &SmallArgs) -> Result<Run> {
    let bounds = a.b.bounds();
    let ctx = setup(&a.g, bounds.reach())?;
    let set = ctx.set(&a.set)?;
    let ideal = Ideal::build(&ideal_spec(&a.i), &ctx.universe)?;
    let ev = is_i_small(&set, &ideal, &bounds)?;
    let code = match ev.verdict {
        SmallVerdict::SmallAtScale => EXIT_OK,
        SmallVerdict::NotSmall { .. } => EXIT_NEGATIVE,
        SmallVerdict::Inconclusive { .. } => EXIT_BUDGET,
    };
    Ok(Run::new(&ctx, ev, "evidence-at-scale")
        .ideal(&ideal)
        .code(code))
}

fn cmd_large(a: &LargeArgs) -> Result<Run> {
    let ctx = setup(&a.g, a.shift)?;
    let set = ctx.set(&a.set)?;
    let ideal = Ideal::build(&ideal_spec(&a.i), &ctx.universe)?;
    let verdict = is_large(&set, &ideal, &LargeBounds::new(a.max_size, a.shift))?;
    let gap = match ctx.universe.as_ref() {
        Universe::Integers(_) | Universe::Cyclic { .. } => Some(gap_profile(&set)?),
        _ => None,
    };
    let code = if verdict.is_large() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let result = json!({ "largeness": verdict, "gap": gap });
    Ok(Run::new(&ctx, result, "evidence-at-scale")
        .ideal(&ideal)
        .code(code))
}

fn cmd_density(a: &DensityArgs) -> Result<Run> {
    let ctx = setup(&a.g, 0)?;
    let set = ctx.set(&a.set)?;
    let profile = upper_density(&set, &a.lengths)?;
    let mut run = Run::new(&ctx, profile, "exact");
    run.provenance.proxy = true;
    run.provenance
        .notes
        .push("finite-window densities approximate upper Banach density".into());
    Ok(run)
}

fn cmd_folner(a: &FolnerArgs) -> Result<Run> {
    let ctx = setup(&a.g, 0)?;
    let f = parse_elem_set(&ctx.group(), &a.f)?;
    let cert = folner_set(&f, a.n, &ctx.universe)?;
    Ok(Run::new(&ctx, cert, "exact"))
}

fn cmd_measure(a: &MeasureArgs) -> Result<Run> {
    let group = group_of(&a.g)?;
    let f = parse_elem_set(&group, &a.f)?;
    let xs = match &a.defect_x {
        Some(t) => parse_elem_set(&group, t)?,
        None => f.clone(),
    };
    let ctx = setup(&a.g, reach_of(&xs))?;
    let avoid = ctx.set(&a.avoid)?;
    let bound = a.bound.unwrap_or(ctx.universe.core_size() as u64);
    let m = measure_build(&f, a.n, &avoid, bound)?;
    let mut mu_eval = BTreeMap::new();
    let mut defects = BTreeMap::new();
    let mut targets = vec![(a.avoid.clone(), avoid.clone())];
    for text in &a.eval {
        let b = ctx.set(text)?;
        mu_eval.insert(text.clone(), m.mu(&b)?.to_string());
        targets.push((text.clone(), b));
    }
    for (text, b) in &targets {
        let ds = xs
            .iter()
            .map(|x| m.invariance_defect(x, b))
            .collect::<Result<Vec<_>>>()?;
        defects.insert(text.clone(), ds);
    }
    let result = json!({
        "L": m.support_size(),
        "y": m.y,
        "certificate": m.certificate,
        "mu_avoid": m.mu(&avoid)?.to_string(),
        "mu_eval": mu_eval,
        "defects": defects,
    });
    Ok(Run::new(&ctx, result, "exact"))
}

fn cmd_complete(a: &CompleteArgs) -> Result<Run> {
    let kind = CompletionKind::parse(&a.kind)?;
    let small = a.b.bounds();
    let (lo, hi) = parse_range(&a.shifts)?;
    let spec = CandidateSpec::Range { lo, hi };
    let mut needed = spec_reach(&spec);
    if kind == CompletionKind::Small {
        needed = needed.max(small.reach());
    }
    let ctx = setup(&a.g, needed)?;
    let base = ideal_spec(&a.i);
    let ws = Workspace::new(&ctx.catalog, &ctx.universe, &base)?;
    let cfg = CompletionConfig {
        kind,
        stages: a.stages,
        threshold: a.threshold,
        candidates: candidate_translators(&ctx.universe, &spec)?,
        pack: PackOptions {
            node_budget: a.node_budget,
            ..PackOptions::default()
        },
        small,
        max_translates: a.max_translates,
    };
    let trace = iterate_completion(&ws, &cfg)?;
    let code = if trace.improper.is_some() {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    };
    let base_ideal = Ideal::build(&base, &ctx.universe)?;
    Ok(Run::new(&ctx, trace, "evidence-at-scale")
        .ideal(&base_ideal)
        .code(code))
}

fn cmd_f2(a: &F2Args) -> Result<Run> {
    let (side_a, side_b) = f2_partition(a.g.depth)?;
    let (base, translators, constructed) = match (a.side, a.translators.is_empty()) {
        (Side::A, true) => (
            side_a,
            (0..=8).map(|k| ReducedWord::power(Letter::B, k)).collect(),
            false,
        ),
        (Side::B, true) => (side_b, complement_side_translators(6), true),
        (Side::A, false) => (side_a, parse_words(&a.translators)?, false),
        (Side::B, false) => (side_b, parse_words(&a.translators)?, false),
    };
    let rep = family_disjoint(&base, &translators, a.n as usize)?;
    let ctx = Ctx {
        catalog: Catalog::shipped(),
        universe: base.universe().clone(),
        scale: Scale {
            group: "free".into(),
            depth: Some(a.g.depth),
            ..Scale::default()
        },
    };
    let side = match a.side {
        Side::A => "a-words",
        Side::B => "complement of the a-words",
    };
    let code = if rep.disjoint { EXIT_OK } else { EXIT_NEGATIVE };
    let mut run = Run::new(&ctx, json!({ "side": side, "report": rep }), "exact").code(code);
    if constructed {
        run.provenance
            .notes
            .push("translator family a^0..a^5 is a construction of this tool".into());
    }
    Ok(run)
}

fn cmd_verify(a: &VerifyArgs) -> Run {
    let results = match a.criterion {
        Some(k) => vec![verify::run_criterion(k as usize)],
        None => verify::run_all(),
    };
    let failed = results.iter().filter(|r| !r.passed).count();
    let lines: String = results.iter().map(|r| r.line() + "\n").collect();
    Run {
        scale: Scale {
            group: "suite".into(),
            ..Scale::default()
        },
        result: json!({
            "passed": results.len() - failed,
            "failed": failed,
            "criteria": results,
        }),
        provenance: Provenance {
            proxy: false,
            evidence: "acceptance".into(),
            notes: Vec::new(),
        },
        code: if failed == 0 { EXIT_OK } else { EXIT_NEGATIVE },
        message: (a.format == Format::Text).then_some(lines),
    }
}
