//! C ABI over the `soltes` crate.
//!
//! Digraphs live behind the opaque `SoltesDigraph` handle. Every fallible call
//! returns a `SoltesStatus`; on failure `soltes_last_error_message` describes
//! the cause on the calling thread. Strings returned through out-parameters
//! are owned by the caller and released with `soltes_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use soltes::construct::{appendix_c_spec, construct_z_soltes, ConstructOptions};
use soltes::distance::wiener;
use soltes::io::{parse_edge_list, parse_json_spec, write, Format};
use soltes::soltes::{delta, delta_profile, is_z_soltes_with, DeltaValue, Verification};
use soltes::{
    build_circulant, build_rule_digraph, degree_stats, CirculantSpec, Digraph, SoltesError,
};

/// Written in place of a delta when deleting the vertex disconnects the digraph.
pub const SOLTES_DELTA_DISCONNECTED: i64 = -9_223_372_036_854_775_807 - 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoltesStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    NotStronglyConnected = 4,
    /// The construction search found no certificate.
    SearchMiss = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoltesMode {
    Symmetric = 0,
    Exhaustive = 1,
    /// Brute-force check of `sample_size` evenly spaced vertices.
    Sample = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SoltesFormat {
    EdgeList = 0,
    Json = 1,
    Dot = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SoltesDegreeStats {
    pub min_out: usize,
    pub max_out: usize,
    pub min_in: usize,
    pub max_in: usize,
}

/// Opaque digraph handle.
pub struct SoltesDigraph {
    inner: Digraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail {
    status: SoltesStatus,
    message: String,
}

impl Fail {
    fn new(status: SoltesStatus, message: impl Into<String>) -> Self {
        Fail {
            status,
            message: message.into(),
        }
    }

    fn null(what: &str) -> Self {
        Fail::new(SoltesStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<SoltesError> for Fail {
    fn from(e: SoltesError) -> Self {
        let status = match e {
            SoltesError::Parse(_) => SoltesStatus::Parse,
            SoltesError::NotStronglyConnected => SoltesStatus::NotStronglyConnected,
            _ => SoltesStatus::InvalidArgument,
        };
        Fail::new(status, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("no interior NUL"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> SoltesStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(None);
            SoltesStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(Some(fail.message));
            fail.status
        }
        Err(_) => {
            set_last_error(Some("internal panic".into()));
            SoltesStatus::Panic
        }
    }
}

unsafe fn handle<'a>(d: *const SoltesDigraph) -> Result<&'a Digraph, Fail> {
    d.as_ref()
        .map(|h| &h.inner)
        .ok_or_else(|| Fail::null("digraph"))
}

unsafe fn store_handle(out: *mut *mut SoltesDigraph, d: Digraph) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::null("out"));
    }
    *out = Box::into_raw(Box::new(SoltesDigraph { inner: d }));
    Ok(())
}

unsafe fn store<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::null("out"));
    }
    *out = value;
    Ok(())
}

unsafe fn read_str<'a>(text: *const c_char) -> Result<&'a str, Fail> {
    if text.is_null() {
        return Err(Fail::null("text"));
    }
    CStr::from_ptr(text)
        .to_str()
        .map_err(|e| Fail::new(SoltesStatus::Parse, format!("text is not UTF-8: {e}")))
}

unsafe fn store_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|e| Fail::new(SoltesStatus::InvalidArgument, e.to_string()))?;
    store(out, c.into_raw())
}

fn delta_code(v: DeltaValue) -> i64 {
    match v {
        DeltaValue::Finite(x) => x,
        DeltaValue::Disconnected => SOLTES_DELTA_DISCONNECTED,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn soltes_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn soltes_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds `D(n, S)` from `len` differences at `s`.
///
/// # Safety
/// `s` must point to `len` readable values (it may be NULL when `len` is 0);
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_circulant_new(
    n: usize,
    s: *const usize,
    len: usize,
    out: *mut *mut SoltesDigraph,
) -> SoltesStatus {
    guard(|| {
        let diffs: &[usize] = if len == 0 {
            &[]
        } else if s.is_null() {
            return Err(Fail::null("s"));
        } else {
            std::slice::from_raw_parts(s, len)
        };
        let spec = CirculantSpec::new(n, diffs.iter().copied())?;
        store_handle(out, build_circulant(&spec))
    })
}

/// Builds the order-3306 mixed construction.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_appendix_c_new(
    include_backward: bool,
    out: *mut *mut SoltesDigraph,
) -> SoltesStatus {
    guard(|| store_handle(out, build_rule_digraph(&appendix_c_spec(include_backward))))
}

/// Builds a digraph from `len` arcs `tails[i] -> heads[i]` on vertices `0..n`.
///
/// # Safety
/// `tails` and `heads` must each point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_digraph_from_arcs(
    n: usize,
    tails: *const usize,
    heads: *const usize,
    len: usize,
    out: *mut *mut SoltesDigraph,
) -> SoltesStatus {
    guard(|| {
        if len > 0 && (tails.is_null() || heads.is_null()) {
            return Err(Fail::null("arc array"));
        }
        let arcs: Vec<(usize, usize)> = (0..len).map(|i| (*tails.add(i), *heads.add(i))).collect();
        store_handle(out, Digraph::from_arcs(n, arcs)?)
    })
}

/// Parses a JSON spec (`circulant`, `rule` or `arcs`).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_digraph_from_json(
    text: *const c_char,
    out: *mut *mut SoltesDigraph,
) -> SoltesStatus {
    guard(|| store_handle(out, parse_json_spec(read_str(text)?)?))
}

/// Parses an edge list.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_digraph_from_edge_list(
    text: *const c_char,
    out: *mut *mut SoltesDigraph,
) -> SoltesStatus {
    guard(|| store_handle(out, parse_edge_list(read_str(text)?)?))
}

/// # Safety
/// `d` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn soltes_digraph_free(d: *mut SoltesDigraph) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of vertices; 0 for NULL.
///
/// # Safety
/// `d` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn soltes_digraph_order(d: *const SoltesDigraph) -> usize {
    d.as_ref().map_or(0, |h| h.inner.order())
}

/// Number of arcs; 0 for NULL.
///
/// # Safety
/// `d` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn soltes_digraph_arc_count(d: *const SoltesDigraph) -> usize {
    d.as_ref().map_or(0, |h| h.inner.arc_count())
}

/// Total distance over ordered pairs.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_wiener(d: *const SoltesDigraph, out: *mut u64) -> SoltesStatus {
    guard(|| store(out, wiener(handle(d)?)?))
}

/// `W(D) - W(D - v)`, or `SOLTES_DELTA_DISCONNECTED`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_delta(
    d: *const SoltesDigraph,
    v: usize,
    out: *mut i64,
) -> SoltesStatus {
    guard(|| store(out, delta_code(delta(handle(d)?, v)?)))
}

/// Writes the delta of every vertex `v` to `out[v]`; `len` must be at least the order.
///
/// # Safety
/// `d` must be a live handle and `out` must have room for `len` values.
#[no_mangle]
pub unsafe extern "C" fn soltes_delta_profile(
    d: *const SoltesDigraph,
    out: *mut i64,
    len: usize,
) -> SoltesStatus {
    guard(|| {
        let g = handle(d)?;
        if out.is_null() {
            return Err(Fail::null("out"));
        }
        if len < g.n() {
            return Err(Fail::new(
                SoltesStatus::InvalidArgument,
                format!("buffer holds {len} values, need {}", g.n()),
            ));
        }
        let profile = delta_profile(g)?;
        let buf = std::slice::from_raw_parts_mut(out, g.n());
        buf.fill(SOLTES_DELTA_DISCONNECTED);
        for e in &profile.per_vertex {
            buf[e.v] = delta_code(e.delta);
        }
        Ok(())
    })
}

/// Decides whether every vertex deletion lowers the total distance by `z`.
/// `sample_size` is read only in `SOLTES_MODE_SAMPLE`.
///
/// # Safety
/// `d` must be a live handle and `out_holds` writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_is_z_soltes(
    d: *const SoltesDigraph,
    z: i64,
    mode: SoltesMode,
    sample_size: usize,
    out_holds: *mut bool,
) -> SoltesStatus {
    guard(|| {
        let mode = match mode {
            SoltesMode::Symmetric => Verification::Symmetric,
            SoltesMode::Exhaustive => Verification::Exhaustive,
            SoltesMode::Sample => Verification::Sample(sample_size),
        };
        let verdict = is_z_soltes_with(handle(d)?, z, mode, None)?;
        store(out_holds, verdict.holds)
    })
}

/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_degree_stats(
    d: *const SoltesDigraph,
    out: *mut SoltesDegreeStats,
) -> SoltesStatus {
    guard(|| {
        let s = degree_stats(handle(d)?);
        store(
            out,
            SoltesDegreeStats {
                min_out: s.min_out,
                max_out: s.max_out,
                min_in: s.min_in,
                max_in: s.max_in,
            },
        )
    })
}

/// Serializes `d`; free the result with `soltes_string_free`.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn soltes_export(
    d: *const SoltesDigraph,
    format: SoltesFormat,
    one_based: bool,
    out: *mut *mut c_char,
) -> SoltesStatus {
    guard(|| {
        let format = match format {
            SoltesFormat::EdgeList => Format::EdgeList,
            SoltesFormat::Json => Format::Json,
            SoltesFormat::Dot => Format::Dot,
        };
        store_string(out, write(handle(d)?, format, one_based))
    })
}

/// Runs the z-Šoltés circulant search and returns the certificate as JSON.
/// `mode` must be symmetric or exhaustive.
///
/// # Safety
/// `out_json` must be writable; free the result with `soltes_string_free`.
#[no_mangle]
pub unsafe extern "C" fn soltes_construct(
    z: i64,
    m: u64,
    mode: SoltesMode,
    force: bool,
    out_json: *mut *mut c_char,
) -> SoltesStatus {
    guard(|| {
        let verification = match mode {
            SoltesMode::Symmetric => Verification::Symmetric,
            SoltesMode::Exhaustive => Verification::Exhaustive,
            SoltesMode::Sample => {
                return Err(Fail::new(
                    SoltesStatus::InvalidArgument,
                    "construct supports symmetric or exhaustive verification",
                ))
            }
        };
        let opts = ConstructOptions {
            force,
            verification,
            progress: None,
        };
        match construct_z_soltes(z, m, opts) {
            Ok((cert, _)) => store_string(
                out_json,
                serde_json::to_string(&cert).expect("certificate serializes"),
            ),
            Err(f) => Err(match f.error {
                soltes::construct::ConstructError::Guard { .. } => {
                    Fail::new(SoltesStatus::InvalidArgument, f.error.to_string())
                }
                soltes::construct::ConstructError::Graph(e) => e.into(),
                other => Fail::new(SoltesStatus::SearchMiss, other.to_string()),
            }),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn soltes_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
