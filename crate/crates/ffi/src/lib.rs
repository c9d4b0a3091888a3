//! C ABI for greedylab.
//!
//! Objects cross the boundary as opaque handles created by `gl_*_new` /
//! `gl_run_*` and released with the matching `gl_*_free`. Every fallible
//! call returns a [`GlStatus`]; the message of the last failure on the
//! calling thread is available from [`gl_last_error_message`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use greedylab::analysis::{audit_run, check_sequential};
use greedylab::arboral::{greedy_initial_tree, run_greedy_future, run_splay, BSTree};
use greedylab::geometry::is_satisfied_set_indexed;
use greedylab::greedyass;
use greedylab::{AccessSequence, CostLedger, Error, Point, PointSet, WeightAssignment};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    TooLarge = 4,
    Internal = 5,
}

/// Initial tree for the tree algorithms.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlInitialTree {
    /// Greedy arrangement of all keys for the whole sequence.
    Greedy = 0,
    Balanced = 1,
    ChainLeft = 2,
    ChainRight = 3,
    /// Random insertion order from the seed argument.
    Random = 4,
}

/// A search sequence over `1..=n`.
pub struct GlSequence(AccessSequence);

/// Per-search costs of one run.
pub struct GlRun(CostLedger);

/// Potential audit of a geometric greedy run.
pub struct GlAudit {
    rows: Vec<GlAuditRow>,
    exact: bool,
}

/// One audited search.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GlAuditRow {
    pub searched: u32,
    pub cost: u64,
    pub phi_before: i64,
    pub phi_after: i64,
    pub amortized: i64,
    pub bound: i64,
    pub stubborn_left: u32,
    pub stubborn_right: u32,
}

/// Outcome of the sequential-access check.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GlSequentialReport {
    pub total: u64,
    pub bound: u64,
    pub spine_violations: u32,
    pub deep_access_violations: u32,
    pub holds: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> GlStatus {
    match e {
        Error::ElementOutOfRange { .. } | Error::PointOutOfBounds { .. } => GlStatus::OutOfRange,
        Error::TooLarge(_) | Error::ExceedsBudget { .. } => GlStatus::TooLarge,
        _ => GlStatus::InvalidArgument,
    }
}

fn fail(e: Error) -> GlStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null(what: &str) -> GlStatus {
    set_error(format!("{what} is null"));
    GlStatus::NullArgument
}

fn guard(f: impl FnOnce() -> GlStatus) -> GlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == GlStatus::Ok {
                set_error(String::new());
            }
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            GlStatus::Internal
        }
    }
}

/// # Safety
/// `ptr` must be null or valid for `len` reads.
unsafe fn view<'a, T>(ptr: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(ptr, len))
    }
}

fn hand_out<T>(out: *mut *mut T, value: T) -> GlStatus {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    GlStatus::Ok
}

fn initial_tree(seq: &AccessSequence, kind: GlInitialTree, seed: u64) -> BSTree {
    let n = seq.n();
    match kind {
        GlInitialTree::Greedy => greedy_initial_tree(n, seq),
        GlInitialTree::Balanced => BSTree::balanced(n),
        GlInitialTree::ChainLeft => BSTree::chain_left(n),
        GlInitialTree::ChainRight => BSTree::chain_right(n),
        GlInitialTree::Random => BSTree::random(n, &mut ChaCha8Rng::seed_from_u64(seed)),
    }
}

/// Length in bytes of the last error message on this thread, excluding the
/// terminating NUL.
#[no_mangle]
pub extern "C" fn gl_last_error_length() -> usize {
    LAST_ERROR.with(|e| e.borrow().len())
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to
/// `len - 1` bytes). Returns the number of bytes written without the NUL.
///
/// # Safety
/// `buf` must be null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn gl_last_error_message(buf: *mut c_char, len: usize) -> usize {
    if buf.is_null() || len == 0 {
        return 0;
    }
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let k = msg.len().min(len - 1);
        ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, k);
        *buf.add(k) = 0;
        k
    })
}

/// Creates a sequence of `m` searches over `1..=n`.
///
/// # Safety
/// `keys` must be valid for `m` reads (may be null when `m == 0`); `out`
/// must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gl_sequence_new(n: usize, keys: *const u32, m: usize, out: *mut *mut GlSequence) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let Some(keys) = view(keys, m) else { return null("keys") };
        match AccessSequence::from_keys(n, keys) {
            Ok(s) => hand_out(out, GlSequence(s)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `seq` must be null or a handle from [`gl_sequence_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gl_sequence_free(seq: *mut GlSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Universe size; 0 for a null handle.
///
/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_sequence_n(seq: *const GlSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.n())
}

/// Number of searches; 0 for a null handle.
///
/// # Safety
/// `seq` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_sequence_m(seq: *const GlSequence) -> usize {
    seq.as_ref().map_or(0, |s| s.0.m())
}

/// Runs the geometric greedy algorithm.
///
/// # Safety
/// `seq` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gl_run_greedyass(seq: *const GlSequence, out: *mut *mut GlRun) -> GlStatus {
    guard(|| {
        let Some(seq) = seq.as_ref() else { return null("seq") };
        if out.is_null() {
            return null("out");
        }
        hand_out(out, GlRun(greedyass::run(&seq.0).ledger))
    })
}

/// Runs the offline greedy tree algorithm from the chosen initial tree.
/// `seed` is read only for [`GlInitialTree::Random`].
///
/// # Safety
/// `seq` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gl_run_greedyfuture(
    seq: *const GlSequence,
    t0: GlInitialTree,
    seed: u64,
    out: *mut *mut GlRun,
) -> GlStatus {
    guard(|| {
        let Some(seq) = seq.as_ref() else { return null("seq") };
        if out.is_null() {
            return null("out");
        }
        match run_greedy_future(&initial_tree(&seq.0, t0, seed), &seq.0) {
            Ok((_, ledger)) => hand_out(out, GlRun(ledger)),
            Err(e) => fail(e),
        }
    })
}

/// Runs splaying from the chosen initial tree.
///
/// # Safety
/// `seq` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gl_run_splay(
    seq: *const GlSequence,
    t0: GlInitialTree,
    seed: u64,
    out: *mut *mut GlRun,
) -> GlStatus {
    guard(|| {
        let Some(seq) = seq.as_ref() else { return null("seq") };
        if out.is_null() {
            return null("out");
        }
        match run_splay(&initial_tree(&seq.0, t0, seed), &seq.0) {
            Ok((_, ledger)) => hand_out(out, GlRun(ledger)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_run_free(run: *mut GlRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Total cost; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_run_total(run: *const GlRun) -> u64 {
    run.as_ref().map_or(0, |r| r.0.total())
}

/// Number of searches; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_run_len(run: *const GlRun) -> usize {
    run.as_ref().map_or(0, |r| r.0.len())
}

/// Cost of search `i` (1-based).
///
/// # Safety
/// `run` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gl_run_cost(run: *const GlRun, i: usize, out: *mut u64) -> GlStatus {
    guard(|| {
        let Some(run) = run.as_ref() else { return null("run") };
        if out.is_null() {
            return null("out");
        }
        match i.checked_sub(1).and_then(|k| run.0.per_search().get(k)) {
            Some(c) => {
                *out = c.accessed;
                GlStatus::Ok
            }
            None => {
                set_error(format!("search {i} outside 1..={}", run.0.len()));
                GlStatus::OutOfRange
            }
        }
    })
}

/// Audits the geometric greedy run. Weights are `num[k] / den[k]` for key
/// `k + 1`; pass null for both to use unit weights.
///
/// # Safety
/// `seq` must be a live handle; `num` and `den` must be null or valid for
/// `n` reads; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gl_audit_new(
    seq: *const GlSequence,
    num: *const i64,
    den: *const i64,
    out: *mut *mut GlAudit,
) -> GlStatus {
    guard(|| {
        let Some(seq) = seq.as_ref() else { return null("seq") };
        if out.is_null() {
            return null("out");
        }
        let n = seq.0.n();
        let weights = match (num.is_null(), den.is_null()) {
            (true, true) => WeightAssignment::uniform(n),
            (false, false) => {
                let (num, den) = (slice::from_raw_parts(num, n), slice::from_raw_parts(den, n));
                if let Some(k) = den.iter().position(|&d| d == 0) {
                    set_error(format!("zero denominator for element {}", k + 1));
                    return GlStatus::InvalidArgument;
                }
                let ws =
                    num.iter().zip(den).map(|(&p, &q)| BigRational::new(BigInt::from(p), BigInt::from(q))).collect();
                match WeightAssignment::new(ws) {
                    Ok(w) => w,
                    Err(e) => return fail(e),
                }
            }
            _ => return null("num or den"),
        };
        let trace = audit_run(&seq.0, &weights);
        let rows = trace
            .audits()
            .iter()
            .map(|a| GlAuditRow {
                searched: a.searched.get(),
                cost: a.cost,
                phi_before: a.potential_before,
                phi_after: a.potential_after,
                amortized: a.amortized,
                bound: a.bound,
                stubborn_left: a.stubborn_left.len() as u32,
                stubborn_right: a.stubborn_right.len() as u32,
            })
            .collect();
        hand_out(out, GlAudit { rows, exact: trace.is_exact() })
    })
}

/// # Safety
/// `audit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_audit_free(audit: *mut GlAudit) {
    if !audit.is_null() {
        drop(Box::from_raw(audit));
    }
}

/// Number of audited searches; 0 for a null handle.
///
/// # Safety
/// `audit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_audit_len(audit: *const GlAudit) -> usize {
    audit.as_ref().map_or(0, |a| a.rows.len())
}

/// Row of search `i` (1-based).
///
/// # Safety
/// `audit` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gl_audit_row(audit: *const GlAudit, i: usize, out: *mut GlAuditRow) -> GlStatus {
    guard(|| {
        let Some(audit) = audit.as_ref() else { return null("audit") };
        if out.is_null() {
            return null("out");
        }
        match i.checked_sub(1).and_then(|k| audit.rows.get(k)) {
            Some(r) => {
                *out = *r;
                GlStatus::Ok
            }
            None => {
                set_error(format!("search {i} outside 1..={}", audit.rows.len()));
                GlStatus::OutOfRange
            }
        }
    })
}

/// Every search within its bound and the amortized sum exact.
///
/// # Safety
/// `audit` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gl_audit_holds(audit: *const GlAudit) -> bool {
    audit.as_ref().is_some_and(|a| a.exact && a.rows.iter().all(|r| r.amortized <= r.bound))
}

/// Runs the tree algorithm on `1, 2, ..., n` with the invariant checks.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gl_check_sequential(
    n: usize,
    t0: GlInitialTree,
    seed: u64,
    out: *mut GlSequentialReport,
) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        if n == 0 {
            set_error("n must be at least 1".into());
            return GlStatus::InvalidArgument;
        }
        let keys: Vec<u32> = (1..=n as u32).collect();
        let seq = match AccessSequence::from_keys(n, &keys) {
            Ok(s) => s,
            Err(e) => return fail(e),
        };
        match check_sequential(&initial_tree(&seq, t0, seed)) {
            Ok(r) => {
                *out = GlSequentialReport {
                    total: r.total,
                    bound: r.bound,
                    spine_violations: r.spine_violations.len() as u32,
                    deep_access_violations: r.deep_access_violations.len() as u32,
                    holds: r.holds(),
                };
                GlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Whether the `count` points `(xs[k], ys[k])` on the `n x m` grid are
/// arborally satisfied.
///
/// # Safety
/// `xs` and `ys` must be valid for `count` reads; `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn gl_is_satisfied(
    n: usize,
    m: usize,
    xs: *const u32,
    ys: *const u32,
    count: usize,
    out: *mut bool,
) -> GlStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        let (Some(xs), Some(ys)) = (view(xs, count), view(ys, count)) else { return null("xs or ys") };
        match PointSet::from_points(n, m, xs.iter().zip(ys).map(|(&x, &y)| Point::new(x, y))) {
            Ok(set) => {
                *out = is_satisfied_set_indexed(&set);
                GlStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
