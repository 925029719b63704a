//! C ABI over `warpcluster`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `wc_*_free`. Every fallible call returns a [`WcStatus`];
//! on failure a description is available from [`wc_last_error`] on the same
//! thread until the next failing call. Window arguments use a negative
//! half-width for an unlimited band.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use warpcluster::io::{ingest, IngestOptions};
use warpcluster::{
    dtw, kmedoids, silhouette, Certificate, ClusterResult, DistanceMatrix, Error, ExactSolver, KMedoidsConfig,
    MatrixBuilder, TimeSeries, WarpWindow,
};

/// Result of every fallible call. Values 2 to 9 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    InvalidSeries = 5,
    BandInfeasible = 6,
    KOutOfRange = 7,
    InvalidMatrix = 8,
    Unsupported = 9,
    Panic = 10,
}

/// A list of validated time series.
pub struct WcDataset(Vec<TimeSeries>);

/// A condensed pairwise distance matrix.
pub struct WcMatrix(DistanceMatrix);

/// Medoids, assignment and cost of one clustering run.
pub struct WcResult(ClusterResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> WcStatus {
    match err.exit_code() {
        2 => WcStatus::InvalidArgument,
        3 => WcStatus::Io,
        4 => WcStatus::Parse,
        5 => WcStatus::InvalidSeries,
        6 => WcStatus::BandInfeasible,
        7 => WcStatus::KOutOfRange,
        8 => WcStatus::InvalidMatrix,
        _ => WcStatus::Unsupported,
    }
}

struct Fail(WcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(WcStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> WcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WcStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            WcStatus::Panic
        }
    }
}

fn window(half_width: i64) -> WarpWindow {
    match usize::try_from(half_width) {
        Ok(w) => WarpWindow::HalfWidth(w),
        Err(_) => WarpWindow::Unlimited,
    }
}

unsafe fn slice<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(unsafe { std::slice::from_raw_parts(data, len) })
}

unsafe fn string(s: *const c_char, what: &str) -> Result<String, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Fail(WcStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a, T>(h: *const T, what: &str) -> Result<&'a T, Fail> {
    unsafe { h.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message for the last failing call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// DTW cost between two sample arrays.
///
/// # Safety
/// `x` and `y` must point to `n` and `m` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn wc_dtw(
    x: *const f64,
    n: usize,
    y: *const f64,
    m: usize,
    half_width: i64,
    out: *mut f64,
) -> WcStatus {
    guard(|| {
        let x = unsafe { slice(x, n, "x") }?;
        let y = unsafe { slice(y, m, "y") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cost = dtw(x, y, window(half_width))?;
        unsafe { *out = cost };
        Ok(())
    })
}

/// An empty dataset.
#[no_mangle]
pub extern "C" fn wc_dataset_new() -> *mut WcDataset {
    Box::into_raw(Box::new(WcDataset(Vec::new())))
}

/// Append a series. Ids must be unique within the dataset.
///
/// # Safety
/// `ds` must come from this library; `id` must be a NUL-terminated string
/// and `samples` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn wc_dataset_push(
    ds: *mut WcDataset,
    id: *const c_char,
    samples: *const f64,
    len: usize,
) -> WcStatus {
    guard(|| {
        let ds = unsafe { ds.as_mut() }.ok_or_else(|| null("dataset"))?;
        let id = unsafe { string(id, "id") }?;
        let samples = unsafe { slice(samples, len, "samples") }?;
        if ds.0.iter().any(|s| s.id() == id) {
            return Err(Error::DuplicateId(id).into());
        }
        ds.0.push(TimeSeries::new(id, samples.to_vec())?);
        Ok(())
    })
}

/// Read one series per row from a CSV file (or tab-separated for `.tsv`).
/// With `labels` set, the first cell of each row is dropped.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wc_dataset_load_csv(path: *const c_char, labels: bool, out: *mut *mut WcDataset) -> WcStatus {
    guard(|| {
        let path = PathBuf::from(unsafe { string(path, "path") }?);
        let opts = IngestOptions {
            labels,
            ..IngestOptions::default()
        };
        let data = ingest(&[path], opts)?;
        unsafe { put(out, WcDataset(data)) }
    })
}

/// Number of series, or 0 for a null handle.
///
/// # Safety
/// `ds` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn wc_dataset_len(ds: *const WcDataset) -> usize {
    unsafe { ds.as_ref() }.map_or(0, |d| d.0.len())
}

/// # Safety
/// `ds` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wc_dataset_free(ds: *mut WcDataset) {
    if !ds.is_null() {
        drop(unsafe { Box::from_raw(ds) });
    }
}

/// All pairwise distances. `workers` of 0 uses one worker per CPU.
///
/// # Safety
/// `ds` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_matrix_build(
    ds: *const WcDataset,
    half_width: i64,
    auto_widen: bool,
    workers: usize,
    out: *mut *mut WcMatrix,
) -> WcStatus {
    guard(|| {
        let ds = unsafe { handle(ds, "dataset") }?;
        let workers = if workers == 0 {
            std::thread::available_parallelism().map_or(1, usize::from)
        } else {
            workers
        };
        let m = MatrixBuilder::new(window(half_width))
            .auto_widen(auto_widen)
            .workers(workers)
            .build(&ds.0)?;
        unsafe { put(out, WcMatrix(m)) }
    })
}

/// Number of series covered, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn wc_matrix_size(m: *const WcMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.0.len())
}

/// # Safety
/// `m` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_matrix_get(m: *const WcMatrix, i: usize, j: usize, out: *mut f64) -> WcStatus {
    guard(|| {
        let m = unsafe { handle(m, "matrix") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = m.0.checked_get(i, j)?;
        unsafe { *out = v };
        Ok(())
    })
}

/// # Safety
/// `m` must come from this library and `path` be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn wc_matrix_save(m: *const WcMatrix, path: *const c_char) -> WcStatus {
    guard(|| {
        let m = unsafe { handle(m, "matrix") }?;
        let path = unsafe { string(path, "path") }?;
        m.0.save(path)?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wc_matrix_load(path: *const c_char, out: *mut *mut WcMatrix) -> WcStatus {
    guard(|| {
        let path = unsafe { string(path, "path") }?;
        let m = DistanceMatrix::load(path)?;
        unsafe { put(out, WcMatrix(m)) }
    })
}

/// # Safety
/// `m` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wc_matrix_free(m: *mut WcMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Exact clustering. `node_limit` of 0 keeps the default budget.
///
/// # Safety
/// `m` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_solve_exact(
    m: *const WcMatrix,
    k: usize,
    node_limit: u64,
    out: *mut *mut WcResult,
) -> WcStatus {
    guard(|| {
        let m = unsafe { handle(m, "matrix") }?;
        let solver = if node_limit == 0 {
            ExactSolver::default()
        } else {
            ExactSolver::with_node_limit(node_limit)
        };
        let r = solver.solve(&m.0, k)?;
        unsafe { put(out, WcResult(r)) }
    })
}

/// k-medoids with `restarts` seeded restarts of at most `max_iterations`
/// steps each.
///
/// # Safety
/// `m` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_kmedoids(
    m: *const WcMatrix,
    k: usize,
    restarts: usize,
    max_iterations: usize,
    seed: u64,
    out: *mut *mut WcResult,
) -> WcStatus {
    guard(|| {
        let m = unsafe { handle(m, "matrix") }?;
        let cfg = KMedoidsConfig::new(k)
            .with_restarts(restarts)
            .with_max_iterations(max_iterations)
            .with_seed(seed);
        let r = kmedoids(&m.0, &cfg)?;
        unsafe { put(out, WcResult(r)) }
    })
}

/// Number of medoids, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn wc_result_k(r: *const WcResult) -> usize {
    unsafe { r.as_ref() }.map_or(0, |r| r.0.k())
}

/// Number of series assigned, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn wc_result_len(r: *const WcResult) -> usize {
    unsafe { r.as_ref() }.map_or(0, |r| r.0.assignment.len())
}

unsafe fn copy_out(values: &[usize], out: *mut usize, cap: usize) -> Result<(), Fail> {
    if cap < values.len() {
        return Err(Fail(
            WcStatus::InvalidArgument,
            format!("buffer holds {cap} values but {} are needed", values.len()),
        ));
    }
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), out, values.len()) };
    Ok(())
}

/// Copy the ascending medoid indices into `out`, which holds `cap` values.
///
/// # Safety
/// `r` must come from this library and `out` point to `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn wc_result_medoids(r: *const WcResult, out: *mut usize, cap: usize) -> WcStatus {
    guard(|| {
        let r = unsafe { handle(r, "result") }?;
        unsafe { copy_out(&r.0.medoids, out, cap) }
    })
}

/// Copy each series' medoid index into `out`, which holds `cap` values.
///
/// # Safety
/// `r` must come from this library and `out` point to `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn wc_result_assignment(r: *const WcResult, out: *mut usize, cap: usize) -> WcStatus {
    guard(|| {
        let r = unsafe { handle(r, "result") }?;
        unsafe { copy_out(&r.0.assignment, out, cap) }
    })
}

/// Total cost, or NaN for a null handle.
///
/// # Safety
/// `r` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn wc_result_total_cost(r: *const WcResult) -> f64 {
    unsafe { r.as_ref() }.map_or(f64::NAN, |r| r.0.total_cost)
}

/// True when the exact solver proved the result optimal.
///
/// # Safety
/// `r` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn wc_result_is_global_optimal(r: *const WcResult) -> bool {
    unsafe { r.as_ref() }.is_some_and(|r| r.0.certificate == Certificate::GlobalOptimal)
}

/// # Safety
/// `r` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wc_result_free(r: *mut WcResult) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r) });
    }
}

/// Mean silhouette of a result over the matrix it was computed from.
///
/// # Safety
/// `m` and `r` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn wc_silhouette_mean(m: *const WcMatrix, r: *const WcResult, out: *mut f64) -> WcStatus {
    guard(|| {
        let m = unsafe { handle(m, "matrix") }?;
        let r = unsafe { handle(r, "result") }?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = silhouette(&m.0, &r.0)?;
        unsafe { *out = s.mean };
        Ok(())
    })
}
