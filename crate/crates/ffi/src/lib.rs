//! C ABI for the answer-set counter.
//!
//! Programs and results are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`AspcStatus`]; on failure a
//! description is available from [`aspc_last_error`] on the same thread.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`aspc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::{Duration, Instant};

use aspcount::engine::{self, EngineConfig, LimitKind};
use aspcount::{build_pair, emit_dimacs, parse_program, BigCount, Program, RunStats};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AspcStatus {
    Ok = 0,
    ParseError = 1,
    ResourceLimit = 2,
    NullPointer = 3,
    InvalidUtf8 = 4,
    Panic = 5,
}

/// A parsed ground program.
pub struct AspcProgram {
    program: Program,
}

/// Outcome of a successful count.
pub struct AspcResult {
    count: BigCount,
    stats: RunStats,
    wall: Duration,
}

/// Counting options. Obtain defaults from [`aspc_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct AspcOptions {
    pub use_cache: bool,
    /// Component cache limit in MiB.
    pub cache_limit_mb: u64,
    /// Time budget in milliseconds; 0 means unlimited.
    pub budget_ms: u64,
    pub has_seed: bool,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AspcStats {
    pub decisions: u64,
    pub propagations: u64,
    pub bcp_seconds: f64,
    pub cache_lookups: u64,
    pub cache_hits: u64,
    pub cache_entries: u64,
    pub wall_seconds: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes removed")));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> AspcStatus) -> AspcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            AspcStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, AspcStatus> {
    if text.is_null() {
        set_error("null string argument");
        return Err(AspcStatus::NullPointer);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        AspcStatus::InvalidUtf8
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s)
        .expect("output has no interior nul")
        .into_raw()
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn aspc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aspc_program_parse(
    text: *const c_char,
    out: *mut *mut AspcProgram,
) -> AspcStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer");
            return AspcStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_program(text) {
            Ok(program) => {
                *out = Box::into_raw(Box::new(AspcProgram { program }));
                AspcStatus::Ok
            }
            Err(d) => {
                set_error(d.to_string());
                AspcStatus::ParseError
            }
        }
    })
}

/// # Safety
/// `program` must come from [`aspc_program_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn aspc_program_free(program: *mut AspcProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Number of distinct atoms, or 0 for NULL.
///
/// # Safety
/// `program` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aspc_program_num_atoms(program: *const AspcProgram) -> usize {
    program.as_ref().map_or(0, |p| p.program.num_atoms())
}

#[no_mangle]
pub extern "C" fn aspc_options_default() -> AspcOptions {
    let d = EngineConfig::default();
    AspcOptions {
        use_cache: d.use_cache,
        cache_limit_mb: (d.cache_limit_bytes >> 20) as u64,
        budget_ms: 0,
        has_seed: false,
        seed: 0,
    }
}

/// Counts answer sets. `options` may be NULL for defaults.
///
/// # Safety
/// `program` must be a live handle, `options` NULL or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn aspc_count(
    program: *const AspcProgram,
    options: *const AspcOptions,
    out: *mut *mut AspcResult,
) -> AspcStatus {
    guard(|| {
        if out.is_null() || program.is_null() {
            set_error("null handle or output pointer");
            return AspcStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let opts = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| aspc_options_default());
        let start = Instant::now();
        let cfg = EngineConfig {
            use_cache: opts.use_cache,
            cache_limit_bytes: usize::try_from(opts.cache_limit_mb)
                .unwrap_or(usize::MAX)
                .saturating_mul(1 << 20),
            deadline: (opts.budget_ms > 0).then(|| start + Duration::from_millis(opts.budget_ms)),
            seed: opts.has_seed.then_some(opts.seed),
            log_decisions: false,
        };
        let pair = build_pair(&(*program).program);
        match engine::with_large_stack(|| engine::count_with(&pair, cfg)) {
            Ok((count, stats)) => {
                *out = Box::into_raw(Box::new(AspcResult {
                    count,
                    stats,
                    wall: start.elapsed(),
                }));
                AspcStatus::Ok
            }
            Err(limit) => {
                let what = match limit.kind {
                    LimitKind::Budget => "time budget exhausted",
                    LimitKind::Cache => "component cache limit exceeded",
                };
                set_error(format!("{what} after {} decisions", limit.stats.decisions));
                AspcStatus::ResourceLimit
            }
        }
    })
}

/// Decimal count as a new string, or NULL for a NULL handle.
///
/// # Safety
/// `result` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aspc_result_count(result: *const AspcResult) -> *mut c_char {
    match result.as_ref() {
        Some(r) => into_c_string(r.count.to_string()),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `result` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aspc_result_stats(
    result: *const AspcResult,
    out: *mut AspcStats,
) -> AspcStatus {
    guard(|| {
        let (Some(r), false) = (result.as_ref(), out.is_null()) else {
            set_error("null handle or output pointer");
            return AspcStatus::NullPointer;
        };
        *out = AspcStats {
            decisions: r.stats.decisions,
            propagations: r.stats.propagations,
            bcp_seconds: r.stats.bcp_time.as_secs_f64(),
            cache_lookups: r.stats.cache_lookups,
            cache_hits: r.stats.cache_hits,
            cache_entries: r.stats.cache_entries,
            wall_seconds: r.wall.as_secs_f64(),
        };
        AspcStatus::Ok
    })
}

/// # Safety
/// `result` must come from [`aspc_count`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn aspc_result_free(result: *mut AspcResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Annotated DIMACS for `F ∧ G` as a new string.
///
/// # Safety
/// `program` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aspc_translate(
    program: *const AspcProgram,
    out: *mut *mut c_char,
) -> AspcStatus {
    guard(|| {
        if out.is_null() || program.is_null() {
            set_error("null handle or output pointer");
            return AspcStatus::NullPointer;
        }
        *out = into_c_string(emit_dimacs(&build_pair(&(*program).program)));
        AspcStatus::Ok
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn aspc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
