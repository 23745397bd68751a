//! C interface.
//!
//! Universes and sets are opaque heap handles released with their `_free` function.
//! Every call returns an [`IpStatus`]; on failure [`ip_last_error`] describes the cause.
//! Output pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use idealpack::expr::{materialize, Catalog};
use idealpack::group::{GroupElem, Universe, Window};
use idealpack::ideal::Ideal;
use idealpack::largeness::{gap_profile, is_small, Gap, LargeBounds, SmallBounds};
use idealpack::measure::measure_build;
use idealpack::packing::{
    candidate_translators, pack_exact, pack_greedy, CandidateSpec, PackOptions, PackStatus,
};
use idealpack::set::MaterializedSet;
use idealpack::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Syntax = 3,
    UnknownName = 4,
    KindMismatch = 5,
    OutOfMargin = 6,
    BudgetExceeded = 7,
    NotFound = 8,
    Io = 9,
    Internal = 10,
}

/// Status of a packing value.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IpPackStatus {
    Exact = 0,
    LowerBound = 1,
    Saturated = 2,
}

/// A group with the finite carrier sets live on.
pub struct IpUniverse(Arc<Universe>);

/// A set materialized on a universe.
pub struct IpSet(MaterializedSet);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> IpStatus {
    match e {
        Error::Syntax { .. } => IpStatus::Syntax,
        Error::UnknownPrimitive(_) => IpStatus::UnknownName,
        Error::KindMismatch(_) | Error::ScaleMismatch => IpStatus::KindMismatch,
        Error::ShiftOutOfBudget { .. }
        | Error::RangeExceedsMargin(_)
        | Error::LengthExceeded { .. } => IpStatus::OutOfMargin,
        Error::BudgetExceeded { .. } | Error::SearchBudgetExceeded(_) => IpStatus::BudgetExceeded,
        Error::AvoidanceNotFound { .. } => IpStatus::NotFound,
        Error::Io(_) => IpStatus::Io,
        _ => IpStatus::InvalidArgument,
    }
}

/// Runs `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), IpStatus>) -> IpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            IpStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            IpStatus::Internal
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, IpStatus>;
}

impl<T> OrStatus<T> for idealpack::Result<T> {
    fn or_status(self) -> Result<T, IpStatus> {
        self.map_err(|e| {
            set_error(&e.to_string());
            status_of(&e)
        })
    }
}

fn null() -> IpStatus {
    set_error("null pointer argument");
    IpStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, IpStatus> {
    p.as_ref().ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), IpStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread; empty after a success. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ip_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ip_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

fn boxed_universe(
    u: idealpack::Result<Universe>,
    out: *mut *mut IpUniverse,
) -> Result<(), IpStatus> {
    let u = u.or_status()?;
    unsafe { write(out, Box::into_raw(Box::new(IpUniverse(Arc::new(u))))) }
}

/// `ℤ` with core `[lo, hi]` and shift margin `margin`.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_universe_integers(
    lo: i64,
    hi: i64,
    margin: u64,
    out: *mut *mut IpUniverse,
) -> IpStatus {
    guard(|| {
        boxed_universe(
            Window::with_core(lo, hi, margin).map(Universe::integers),
            out,
        )
    })
}

/// `ℤ_N`.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_universe_cyclic(order: u64, out: *mut *mut IpUniverse) -> IpStatus {
    guard(|| boxed_universe(Universe::cyclic(order), out))
}

/// Reduced words of length `<= max_len` in the free group on `a`, `b`.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_universe_free_group(
    max_len: usize,
    margin: usize,
    out: *mut *mut IpUniverse,
) -> IpStatus {
    guard(|| boxed_universe(Universe::free(max_len, margin), out))
}

/// Number of points in the carrier.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_universe_size(u: *const IpUniverse, out: *mut u64) -> IpStatus {
    guard(|| unsafe { write(out, deref(u)?.0.size() as u64) })
}

/// # Safety
/// `u` must come from an `ip_universe_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ip_universe_free(u: *mut IpUniverse) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// Materializes a set expression; names from the shipped catalog are available.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_set_parse(
    u: *const IpUniverse,
    expr: *const c_char,
    out: *mut *mut IpSet,
) -> IpStatus {
    guard(|| unsafe {
        let u = deref(u)?;
        if expr.is_null() {
            return Err(null());
        }
        let text = CStr::from_ptr(expr).to_str().map_err(|_| {
            set_error("expression is not UTF-8");
            IpStatus::InvalidArgument
        })?;
        let e = Catalog::shipped().expr(text).or_status()?;
        let s = materialize(&e, &u.0).or_status()?;
        write(out, Box::into_raw(Box::new(IpSet(s))))
    })
}

/// Number of elements of the set on the core.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_set_count(s: *const IpSet, out: *mut u64) -> IpStatus {
    guard(|| unsafe { write(out, deref(s)?.0.count_core() as u64) })
}

/// # Safety
/// `s` must come from [`ip_set_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ip_set_free(s: *mut IpSet) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Packing index for the trivial ideal over shifts `lo..=hi` (residues on `ℤ_N`).
/// Without `exact` the value is a greedy lower bound.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_pack(
    s: *const IpSet,
    n: usize,
    lo: i64,
    hi: i64,
    exact: bool,
    out_value: *mut u64,
    out_status: *mut IpPackStatus,
) -> IpStatus {
    guard(|| unsafe {
        let a = &deref(s)?.0;
        if out_value.is_null() || out_status.is_null() {
            return Err(null());
        }
        let u = a.universe();
        let cands = candidate_translators(u, &CandidateSpec::Range { lo, hi }).or_status()?;
        let ideal = Ideal::trivial(u);
        let rep = if exact {
            pack_exact(a, &ideal, &cands, n, &PackOptions::default())
        } else {
            pack_greedy(a, &ideal, &cands, n)
        }
        .or_status()?;
        write(out_value, rep.value as u64)?;
        write(
            out_status,
            match rep.status {
                PackStatus::Exact => IpPackStatus::Exact,
                PackStatus::LowerBound => IpPackStatus::LowerBound,
                PackStatus::Saturated => IpPackStatus::Saturated,
            },
        )
    })
}

/// Largest gap on the core; `UINT64_MAX` when the set misses the core.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_gap(s: *const IpSet, out: *mut u64) -> IpStatus {
    guard(|| unsafe {
        let g = gap_profile(&deref(s)?.0).or_status()?;
        write(
            out,
            match g {
                Gap::Finite(v) => v,
                Gap::Infinite => u64::MAX,
            },
        )
    })
}

/// Smallness at scale: every `F` with `|F| <= m` from `[-s, s]` leaves a large complement
/// within `inner_size` translators from `[0, inner_shift]`.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_is_small(
    set: *const IpSet,
    m: usize,
    s: u64,
    inner_size: usize,
    inner_shift: u64,
    out: *mut bool,
) -> IpStatus {
    guard(|| unsafe {
        let a = &deref(set)?.0;
        let bounds = SmallBounds::new(m, s, LargeBounds::new(inner_size, inner_shift));
        let ev = is_small(a, &bounds).or_status()?;
        write(out, ev.is_small())
    })
}

/// Builds the Følner measure for the test set `f[0..f_len]` at tolerance `1/n` that
/// vanishes on `avoid`, and returns `μ(eval)` as `num/den` in lowest terms.
///
/// # Safety
/// Handle and output pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn ip_measure(
    avoid: *const IpSet,
    f: *const i64,
    f_len: usize,
    n: u64,
    eval: *const IpSet,
    out_num: *mut i64,
    out_den: *mut i64,
) -> IpStatus {
    guard(|| unsafe {
        let avoid = &deref(avoid)?.0;
        let eval = &deref(eval)?.0;
        if f.is_null() && f_len > 0 {
            return Err(null());
        }
        let elems: Vec<GroupElem> = if f_len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(f, f_len)
                .iter()
                .map(|&v| GroupElem::Int(v))
                .collect()
        };
        let bound = avoid.universe().core_size() as u64;
        let m = measure_build(&elems, n, avoid, bound).or_status()?;
        let mu = m.mu(eval).or_status()?;
        write(out_num, *mu.numer())?;
        write(out_den, *mu.denom())
    })
}

/// Runs the command line with `argc` arguments (program name first) and returns its exit
/// code. When `out_report` is not null it receives the JSON report, or null if none was
/// produced; release it with [`ip_string_free`].
///
/// # Safety
/// `argv` must hold `argc` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn ip_run(
    argc: usize,
    argv: *const *const c_char,
    out_report: *mut *mut c_char,
) -> i32 {
    let run = catch_unwind(AssertUnwindSafe(|| {
        if argv.is_null() && argc > 0 {
            set_error("null pointer argument");
            return idealpack::cli::EXIT_USAGE;
        }
        let args: Vec<String> = (0..argc)
            .map(|i| CStr::from_ptr(*argv.add(i)).to_string_lossy().into_owned())
            .collect();
        let outcome = idealpack::cli::execute(&args);
        set_error(outcome.message.as_deref().unwrap_or("").trim_end());
        if !out_report.is_null() {
            let json = outcome
                .report
                .map(|r| CString::new(r.to_json()).unwrap_or_default().into_raw())
                .unwrap_or(ptr::null_mut());
            out_report.write(json);
        }
        outcome.code
    }));
    run.unwrap_or_else(|_| {
        set_error("internal panic");
        idealpack::cli::EXIT_USAGE
    })
}

/// # Safety
/// `s` must come from [`ip_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ip_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
