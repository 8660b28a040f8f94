//! C interface to the clique network.
//!
//! Networks live behind an opaque `CnNetwork*` handle created by
//! [`cn_network_new`], [`cn_network_load`] or [`cn_network_from_snapshot`]
//! and released with [`cn_network_free`]. Every fallible call returns a
//! [`CnStatus`]; on failure a message is kept per thread and can be read with
//! [`cn_last_error_message`]. Panics never cross the boundary.
//!
//! Fanal patterns are arrays of `c` unsigned indices, with [`CN_ERASED`]
//! marking a cluster that carries no information.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use cliquenet::analysis;
use cliquenet::{
    ClusterState, ClusterTopology, CliqueNetwork, DecodeParams, Error, FanalPattern, Message,
};

/// Sentinel for an erased cluster in pattern arrays.
pub const CN_ERASED: u32 = u32::MAX;

/// Result of a call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument is out of range or inconsistent with the network.
    InvalidArgument = 2,
    /// A snapshot, message or path string is malformed.
    Format = 3,
    Io = 4,
    /// An output buffer is too small.
    BufferTooSmall = 5,
    /// Internal failure; the library caught a panic.
    Internal = 6,
}

/// Per-cluster or overall outcome of a retrieval.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnOutcome {
    Unique = 0,
    Ambiguous = 1,
    Silent = 2,
}

/// Decoding parameters: memory effect, threshold and iteration cap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CnDecodeParams {
    pub gamma: u32,
    pub sigma: i64,
    pub max_iters: u32,
}

/// Opaque network handle.
pub struct CnNetwork {
    inner: CliqueNetwork,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: CnStatus, msg: impl Into<String>) -> CnStatus {
    set_last_error(msg);
    status
}

fn status_of(e: &Error) -> CnStatus {
    match e {
        Error::Io(_) => CnStatus::Io,
        Error::Parse { .. } | Error::Format(_) | Error::Csv(_) => CnStatus::Format,
        _ => CnStatus::InvalidArgument,
    }
}

fn from_error(e: Error) -> CnStatus {
    fail(status_of(&e), e.to_string())
}

/// Runs `f`, converting panics into [`CnStatus::Internal`].
fn guard(f: impl FnOnce() -> CnStatus) -> CnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(CnStatus::Internal, "internal panic"),
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(CnStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message of the last failed call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Retrieval defaults: `gamma = 1`, `sigma = 0`, `max_iters = 4`.
#[no_mangle]
pub extern "C" fn cn_decode_params_retrieval() -> CnDecodeParams {
    CnDecodeParams {
        gamma: 1,
        sigma: 0,
        max_iters: 4,
    }
}

fn to_params(p: &CnDecodeParams) -> Result<DecodeParams, CnStatus> {
    if p.max_iters == 0 {
        return Err(fail(CnStatus::InvalidArgument, "max_iters must be at least 1"));
    }
    Ok(DecodeParams {
        gamma: p.gamma,
        sigma: p.sigma,
        max_iters: p.max_iters as usize,
        stop_on_fixed_point: true,
    })
}

fn boxed(net: CliqueNetwork, out: *mut *mut CnNetwork) -> CnStatus {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(CnNetwork { inner: net })) };
    CnStatus::Ok
}

/// Creates an empty network of `clusters` clusters of `fanals` fanals
/// (`fanals` a power of two).
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn cn_network_new(clusters: u32, fanals: u32, out: *mut *mut CnNetwork) -> CnStatus {
    guard(|| {
        non_null!(out);
        match ClusterTopology::new(clusters as usize, fanals as usize) {
            Ok(t) => boxed(CliqueNetwork::new(t), out),
            Err(e) => from_error(e),
        }
    })
}

/// Releases a network. Null is ignored.
///
/// # Safety
/// `net` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn cn_network_free(net: *mut CnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of clusters, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_network_clusters(net: *const CnNetwork) -> u32 {
    net.as_ref().map_or(0, |n| n.inner.topology().clusters() as u32)
}

/// Fanals per cluster, or 0 for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_network_fanals(net: *const CnNetwork) -> u32 {
    net.as_ref().map_or(0, |n| n.inner.topology().fanals() as u32)
}

/// Number of connections present.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_network_edge_count(net: *const CnNetwork) -> u64 {
    net.as_ref().map_or(0, |n| n.inner.edge_count())
}

/// Number of messages learnt so far, duplicates included.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_network_learned_count(net: *const CnNetwork) -> u64 {
    net.as_ref().map_or(0, |n| n.inner.learned_count())
}

/// Fraction of possible connections present, or NaN for a null handle.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_network_density(net: *const CnNetwork) -> f64 {
    net.as_ref().map_or(f64::NAN, |n| n.inner.density())
}

unsafe fn read_pattern(fanals: *const u32, len: usize) -> FanalPattern {
    let raw = if len == 0 { &[][..] } else { slice::from_raw_parts(fanals, len) };
    FanalPattern::new(raw.iter().map(|&f| (f != CN_ERASED).then_some(f)).collect())
}

/// Learns a complete pattern of `len` fanal indices.
///
/// # Safety
/// `net` must be a live handle and `fanals` valid for reading `len` values.
#[no_mangle]
pub unsafe extern "C" fn cn_network_learn(net: *mut CnNetwork, fanals: *const u32, len: usize) -> CnStatus {
    guard(|| {
        non_null!(net, fanals);
        let pattern = read_pattern(fanals, len);
        match (*net).inner.learn_pattern(&pattern) {
            Ok(()) => CnStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// Learns a message given as `⌈k/4⌉` hex digits, high bits first.
///
/// # Safety
/// `net` must be a live handle and `hex` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cn_network_learn_hex(net: *mut CnNetwork, hex: *const c_char) -> CnStatus {
    guard(|| {
        non_null!(net, hex);
        let Ok(text) = CStr::from_ptr(hex).to_str() else {
            return fail(CnStatus::Format, "message is not UTF-8");
        };
        let net = &mut (*net).inner;
        let message = match Message::from_hex(text, net.topology().message_bits()) {
            Ok(m) => m,
            Err(e) => return fail(CnStatus::Format, e.to_string()),
        };
        match net.learn(&message) {
            Ok(()) => CnStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// Decides whether a complete pattern is accepted in the classification
/// setting (`sigma = c`, `gamma = 1`, one iteration).
///
/// # Safety
/// `net` must be a live handle, `fanals` valid for reading `len` values and
/// `accepted` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cn_network_is_accepted(
    net: *const CnNetwork,
    fanals: *const u32,
    len: usize,
    accepted: *mut bool,
) -> CnStatus {
    guard(|| {
        non_null!(net, fanals, accepted);
        let net = &(*net).inner;
        let params = DecodeParams::classification(net.topology().clusters());
        match net.is_pattern_accepted(&read_pattern(fanals, len), &params) {
            Ok(a) => {
                *accepted = a;
                CnStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Completes a probe. `probe` and `out_fanals` both hold `len` entries, one
/// per cluster; erased clusters are [`CN_ERASED`]. On return `out_fanals`
/// holds the unique winner of each cluster or [`CN_ERASED`] where the
/// cluster ended ambiguous or silent. `outcome` receives `Ambiguous` if any
/// cluster is ambiguous, else `Silent` if any is silent, else `Unique`.
/// `iterations` (optional) receives the number of iterations run.
///
/// # Safety
/// Pointers must be valid for `len` reads and writes respectively;
/// `params`, `outcome` must be valid; `iterations` may be null.
#[no_mangle]
pub unsafe extern "C" fn cn_network_retrieve(
    net: *const CnNetwork,
    probe: *const u32,
    len: usize,
    params: *const CnDecodeParams,
    out_fanals: *mut u32,
    outcome: *mut CnOutcome,
    iterations: *mut u32,
) -> CnStatus {
    guard(|| {
        non_null!(net, probe, params, out_fanals, outcome);
        let net = &(*net).inner;
        let params = match to_params(&*params) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let result = match net.decode(&read_pattern(probe, len), &params) {
            Ok(r) => r,
            Err(e) => return from_error(e),
        };
        let out = slice::from_raw_parts_mut(out_fanals, len);
        for (slot, state) in out.iter_mut().zip(&result.clusters) {
            *slot = match state {
                ClusterState::Unique(f) => *f,
                _ => CN_ERASED,
            };
        }
        *outcome = if result.any_ambiguous() {
            CnOutcome::Ambiguous
        } else if result.any_silent() {
            CnOutcome::Silent
        } else {
            CnOutcome::Unique
        };
        if !iterations.is_null() {
            *iterations = result.iterations as u32;
        }
        CnStatus::Ok
    })
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a str, CnStatus> {
    CStr::from_ptr(path)
        .to_str()
        .map_err(|_| fail(CnStatus::Format, "path is not UTF-8"))
}

/// Writes a snapshot file.
///
/// # Safety
/// `net` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cn_network_save(net: *const CnNetwork, path: *const c_char) -> CnStatus {
    guard(|| {
        non_null!(net, path);
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match (*net).inner.save(path) {
            Ok(()) => CnStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// Reads a snapshot file into a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn cn_network_load(path: *const c_char, out: *mut *mut CnNetwork) -> CnStatus {
    guard(|| {
        non_null!(path, out);
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match CliqueNetwork::load(path) {
            Ok(net) => boxed(net, out),
            Err(e) => from_error(e),
        }
    })
}

/// Size in bytes of the network's snapshot.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cn_network_snapshot_len(net: *const CnNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.inner.to_snapshot_bytes().len())
}

/// Copies the snapshot into `buf` of capacity `cap` and stores its size in
/// `written`. Fails with `BufferTooSmall` (and still sets `written`) when
/// `cap` is insufficient.
///
/// # Safety
/// `buf` must be valid for `cap` writes and `written` for one write.
#[no_mangle]
pub unsafe extern "C" fn cn_network_snapshot(
    net: *const CnNetwork,
    buf: *mut u8,
    cap: usize,
    written: *mut usize,
) -> CnStatus {
    guard(|| {
        non_null!(net, written);
        let bytes = (*net).inner.to_snapshot_bytes();
        *written = bytes.len();
        if cap < bytes.len() {
            return fail(
                CnStatus::BufferTooSmall,
                format!("snapshot needs {} bytes, buffer has {cap}", bytes.len()),
            );
        }
        non_null!(buf);
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        CnStatus::Ok
    })
}

/// Builds a network from snapshot bytes.
///
/// # Safety
/// `bytes` must be valid for `len` reads and `out` for one write.
#[no_mangle]
pub unsafe extern "C" fn cn_network_from_snapshot(
    bytes: *const u8,
    len: usize,
    out: *mut *mut CnNetwork,
) -> CnStatus {
    guard(|| {
        non_null!(bytes, out);
        match CliqueNetwork::from_snapshot_bytes(slice::from_raw_parts(bytes, len)) {
            Ok(net) => boxed(net, out),
            Err(e) => from_error(e),
        }
    })
}

/// Expected density after `m` uniform random messages with `l` fanals per cluster.
#[no_mangle]
pub extern "C" fn cn_expected_density(m: f64, l: f64) -> f64 {
    analysis::expected_density(m, l)
}

/// Probability that a random message is accepted at density `d` with `c` clusters.
#[no_mangle]
pub extern "C" fn cn_accept_probability(d: f64, c: u32) -> f64 {
    analysis::accept_prob(d, c as usize)
}

/// Single-iteration retrieval error with `erased` clusters missing.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cn_retrieval_error(m: f64, l: u32, c: u32, erased: u32, out: *mut f64) -> CnStatus {
    guard(|| {
        non_null!(out);
        match analysis::retrieval_error(m, l as usize, c as usize, erased as usize) {
            Ok(v) => {
                *out = v;
                CnStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
