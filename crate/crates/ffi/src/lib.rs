//! C bindings for `bethe-core`.
//!
//! Every fallible function returns a [`BetheStatus`]. On failure a message is
//! available from [`bethe_last_error`] on the same thread. Handles are opaque
//! and must be released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use bethe_core::clustering::{algorithm2, ClusterOptions, ClusteringResult};
use bethe_core::estimation::estimate_k;
use bethe_core::scoring::{dcsbm_log_likelihood, modularity, overlap};
use bethe_core::spectral::spectral_radius_b;
use bethe_core::{EdgePolicy, Error, SparseGraph};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetheStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed graph, labels or parameters.
    InvalidInput = 2,
    /// The numerical pipeline failed to converge or produce a usable result.
    AlgorithmFailure = 3,
    /// Output buffer shorter than required.
    BufferTooSmall = 4,
    Panic = 5,
}

/// Opaque graph handle.
pub struct BetheGraph(SparseGraph);

/// Opaque clustering result handle.
pub struct BetheClustering(ClusteringResult);

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct BetheClusterOptions {
    /// Number of classes; 0 to estimate it.
    pub k: usize,
    pub row_norm: bool,
    pub seed: u64,
    /// Eigensolver tolerance.
    pub tol: f64,
    pub restarts: usize,
    pub iters: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> BetheStatus {
    if err.is_algorithmic() {
        BetheStatus::AlgorithmFailure
    } else {
        BetheStatus::InvalidInput
    }
}

fn guard(f: impl FnOnce() -> Result<(), (BetheStatus, String)>) -> BetheStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BetheStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            BetheStatus::Panic
        }
    }
}

fn lib<T>(r: bethe_core::Result<T>) -> Result<T, (BetheStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(name: &str) -> (BetheStatus, String) {
    (BetheStatus::NullPointer, format!("{name} is null"))
}

unsafe fn slice_or_empty<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], (BetheStatus, String)> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(name))
    } else {
        Ok(slice::from_raw_parts(p, len))
    }
}

unsafe fn graph_ref<'a>(g: *const BetheGraph) -> Result<&'a SparseGraph, (BetheStatus, String)> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| null("graph"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (BetheStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bethe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a graph from `m` undirected edges `(src[i], dst[i])`.
///
/// `n = 0` infers the node count. With `lenient` set, self-loops and
/// duplicates are dropped instead of rejected.
///
/// # Safety
/// `src` and `dst` must point to `m` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bethe_graph_from_edges(
    src: *const usize,
    dst: *const usize,
    m: usize,
    n: usize,
    lenient: bool,
    out: *mut *mut BetheGraph,
) -> BetheStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let src = slice_or_empty(src, m, "src")?;
        let dst = slice_or_empty(dst, m, "dst")?;
        let edges: Vec<(usize, usize)> = src.iter().copied().zip(dst.iter().copied()).collect();
        let policy = if lenient { EdgePolicy::Lenient } else { EdgePolicy::Strict };
        let g = lib(SparseGraph::from_edge_list(&edges, (n > 0).then_some(n), policy))?;
        out.write(Box::into_raw(Box::new(BetheGraph(g))));
        Ok(())
    })
}

/// # Safety
/// `g` must be NULL or a handle from [`bethe_graph_from_edges`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bethe_graph_free(g: *mut BetheGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn bethe_graph_node_count(g: *const BetheGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `g` must be NULL or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn bethe_graph_edge_count(g: *const BetheGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.m())
}

#[no_mangle]
pub extern "C" fn bethe_cluster_options_default() -> BetheClusterOptions {
    let d = ClusterOptions::default();
    BetheClusterOptions { k: 0, row_norm: d.row_norm, seed: d.seed, tol: d.tol, restarts: d.restarts, iters: d.iters }
}

/// Clusters the giant component of `g`. `opts` may be NULL for defaults.
///
/// # Safety
/// `g` must be a live graph handle, `opts` NULL or readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bethe_cluster(
    g: *const BetheGraph,
    opts: *const BetheClusterOptions,
    out: *mut *mut BetheClustering,
) -> BetheStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let o = opts.as_ref().copied().unwrap_or_else(|| bethe_cluster_options_default());
        let options = ClusterOptions {
            k: (o.k > 0).then_some(o.k),
            row_norm: o.row_norm,
            seed: o.seed,
            tol: o.tol,
            restarts: o.restarts,
            iters: o.iters,
            ..ClusterOptions::default()
        };
        let res = lib(algorithm2(g, &options))?;
        out.write(Box::into_raw(Box::new(BetheClustering(res))));
        Ok(())
    })
}

/// # Safety
/// `c` must be NULL or a handle from [`bethe_cluster`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn bethe_clustering_free(c: *mut BetheClustering) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of classes used, or 0 for NULL.
///
/// # Safety
/// `c` must be NULL or a live clustering handle.
#[no_mangle]
pub unsafe extern "C" fn bethe_clustering_k(c: *const BetheClustering) -> usize {
    c.as_ref().map_or(0, |c| c.0.k_hat)
}

/// Nodes outside the giant component, or 0 for NULL.
///
/// # Safety
/// `c` must be NULL or a live clustering handle.
#[no_mangle]
pub unsafe extern "C" fn bethe_clustering_unassigned_count(c: *const BetheClustering) -> usize {
    c.as_ref().map_or(0, |c| c.0.unassigned_count())
}

/// Copies one label per input node into `labels`, which must hold the node
/// count. Unassigned nodes get label 0.
///
/// # Safety
/// `c` must be a live clustering handle and `labels` writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn bethe_clustering_labels(c: *const BetheClustering, labels: *mut usize, len: usize) -> BetheStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("clustering"))?;
        copy_out(&c.0.labels, labels, len)
    })
}

/// Copies `ζ_1..ζ_k` into `zeta`, which must hold `k` values.
///
/// # Safety
/// `c` must be a live clustering handle and `zeta` writable for `len` values.
#[no_mangle]
pub unsafe extern "C" fn bethe_clustering_zeta(c: *const BetheClustering, zeta: *mut f64, len: usize) -> BetheStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("clustering"))?;
        copy_out(&c.0.zeta.zeta, zeta, len)
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], dst: *mut T, len: usize) -> Result<(), (BetheStatus, String)> {
    if len < src.len() {
        return Err((BetheStatus::BufferTooSmall, format!("buffer holds {len}, need {}", src.len())));
    }
    if dst.is_null() {
        return Err(null("buffer"));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// # Safety
/// `g` must be a live graph handle, `labels` readable for `len` values and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bethe_modularity(g: *const BetheGraph, labels: *const usize, len: usize, out: *mut f64) -> BetheStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let labels = slice_or_empty(labels, len, "labels")?;
        write_out(out, lib(modularity(g, labels))?)
    })
}

/// Normalized negative log-likelihood of the fitted degree-corrected block model.
///
/// # Safety
/// As for [`bethe_modularity`].
#[no_mangle]
pub unsafe extern "C" fn bethe_log_likelihood(g: *const BetheGraph, labels: *const usize, len: usize, out: *mut f64) -> BetheStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let labels = slice_or_empty(labels, len, "labels")?;
        write_out(out, lib(dcsbm_log_likelihood(g, labels))?)
    })
}

/// Overlap between two labelings with labels in `0..k`.
///
/// # Safety
/// `hat` and `truth` must be readable for `len` values and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bethe_overlap(
    hat: *const usize,
    truth: *const usize,
    len: usize,
    k: usize,
    out: *mut f64,
) -> BetheStatus {
    guard(|| {
        let hat = slice_or_empty(hat, len, "hat")?;
        let truth = slice_or_empty(truth, len, "truth")?;
        write_out(out, lib(overlap(hat, truth, k))?)
    })
}

/// Spectral radius of the non-backtracking matrix.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bethe_spectral_radius(g: *const BetheGraph, tol: f64, out: *mut f64) -> BetheStatus {
    guard(|| {
        let g = graph_ref(g)?;
        write_out(out, lib(spectral_radius_b(g, tol))?)
    })
}

/// Estimated number of classes.
///
/// # Safety
/// `g` must be a live graph handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bethe_estimate_k(g: *const BetheGraph, tol: f64, out: *mut usize) -> BetheStatus {
    guard(|| {
        let g = graph_ref(g)?;
        write_out(out, lib(estimate_k(g, tol))?.k_hat)
    })
}
