//! C ABI for flowsum.
//!
//! Graphs and summaries are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! a [`FlowsumStatus`]; on failure [`flowsum_last_error`] describes the
//! problem for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use flowsum::document::{summarize_document, DocumentOptions, SummaryDocument};
use flowsum::graph::{load_graph_files, maximal_influence_graph, InfluenceGraph, LoadOptions};
use flowsum::summarize::SummarizeConfig;
use flowsum::Error;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowsumStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    InvalidArgument = 5,
    UnknownNode = 6,
    Numeric = 7,
    OutOfRange = 8,
    Internal = 9,
    Panic = 10,
}

/// Opaque directed influence graph.
pub struct FlowsumGraph(InfluenceGraph);

/// Opaque summary document.
pub struct FlowsumSummary(SummaryDocument);

/// One retained flow between two clusters.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FlowsumFlow {
    pub src: usize,
    pub dst: usize,
    pub raw_sum: f64,
    pub rate: f64,
    pub normalized_rate: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(FlowsumStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => FlowsumStatus::Io,
            Error::Parse { .. } | Error::Json(_) => FlowsumStatus::Parse,
            Error::UnknownNode(_) => FlowsumStatus::UnknownNode,
            Error::Numeric { .. } => FlowsumStatus::Numeric,
            Error::Validation(_) | Error::Argument(_) | Error::Dimension(_) | Error::TooLarge(_) => {
                FlowsumStatus::InvalidArgument
            }
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FlowsumStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FlowsumStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FlowsumStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {message}"));
            FlowsumStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(FlowsumStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn flowsum_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn flowsum_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a graph from an edge TSV file and an optional metadata JSONL file
/// (`meta_path` may be null).
///
/// # Safety
/// Path arguments must be null or NUL-terminated strings; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flowsum_graph_load(
    edges_path: *const c_char,
    meta_path: *const c_char,
    out: *mut *mut FlowsumGraph,
) -> FlowsumStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let edges = str_arg(edges_path, "edges_path")?;
        let meta = opt_str_arg(meta_path, "meta_path")?;
        let g = load_graph_files(Path::new(edges), meta.map(Path::new), LoadOptions::default())?;
        *out = Box::into_raw(Box::new(FlowsumGraph(g)));
        Ok(())
    })
}

/// Builds a graph over nodes `0..node_count` (ids are their decimal
/// indices) from parallel edge arrays. `weights` may be null for unit
/// weights.
///
/// # Safety
/// `src` and `dst` (and `weights` when non-null) must point to
/// `edge_count` elements; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flowsum_graph_from_edges(
    node_count: usize,
    src: *const usize,
    dst: *const usize,
    weights: *const f64,
    edge_count: usize,
    out: *mut *mut FlowsumGraph,
) -> FlowsumStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if edge_count > 0 && (src.is_null() || dst.is_null()) {
            return Err(null(if src.is_null() { "src" } else { "dst" }));
        }
        let edges: Vec<(usize, usize, f64)> = (0..edge_count)
            .map(|e| {
                let w = if weights.is_null() { 1.0 } else { *weights.add(e) };
                (*src.add(e), *dst.add(e), w)
            })
            .collect();
        let g = InfluenceGraph::from_edge_list(node_count, &edges)?;
        *out = Box::into_raw(Box::new(FlowsumGraph(g)));
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowsum_graph_free(graph: *mut FlowsumGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Node count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flowsum_graph_node_count(graph: *const FlowsumGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.node_count())
}

/// Edge count, or 0 for a null handle.
///
/// # Safety
/// `graph` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flowsum_graph_edge_count(graph: *const FlowsumGraph) -> usize {
    graph.as_ref().map_or(0, |g| g.0.edge_count())
}

/// Summarizes the graph reachable from `source`, or the whole graph with
/// node 0 as source when `source` is null. `config_json` is a JSON object
/// of configuration fields (null for defaults); `l` follows `2k` when
/// omitted.
///
/// # Safety
/// `graph` must be a live handle, string arguments null or NUL-terminated,
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flowsum_summarize(
    graph: *const FlowsumGraph,
    source: *const c_char,
    config_json: *const c_char,
    out: *mut *mut FlowsumSummary,
) -> FlowsumStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let g = &handle(graph, "graph")?.0;
        let cfg = match opt_str_arg(config_json, "config_json")? {
            None => SummarizeConfig::default(),
            Some(text) => {
                let value: serde_json::Value = serde_json::from_str(text).map_err(Error::from)?;
                let l_given = value.get("l").is_some();
                let mut cfg: SummarizeConfig = serde_json::from_value(value).map_err(Error::from)?;
                if !l_given {
                    cfg.l = 2 * cfg.k;
                }
                cfg
            }
        };
        let sub;
        let target = match opt_str_arg(source, "source")? {
            Some(id) => {
                sub = maximal_influence_graph(g, id)?;
                &sub
            }
            None => g,
        };
        cfg.validate(Some(target.node_count()))?;
        let doc = summarize_document(target, &cfg, &DocumentOptions::default())?;
        *out = Box::into_raw(Box::new(FlowsumSummary(doc)));
        Ok(())
    })
}

/// # Safety
/// `summary` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowsum_summary_free(summary: *mut FlowsumSummary) {
    if !summary.is_null() {
        drop(Box::from_raw(summary));
    }
}

/// # Safety
/// `summary` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flowsum_summary_cluster_count(summary: *const FlowsumSummary) -> usize {
    summary.as_ref().map_or(0, |s| s.0.clusters.len())
}

/// Size of cluster `cluster`, or 0 when out of range.
///
/// # Safety
/// `summary` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flowsum_summary_cluster_size(summary: *const FlowsumSummary, cluster: usize) -> usize {
    summary
        .as_ref()
        .and_then(|s| s.0.clusters.get(cluster))
        .map_or(0, |c| c.size)
}

/// Cluster holding the source node.
///
/// # Safety
/// `summary` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flowsum_summary_source_cluster(summary: *const FlowsumSummary) -> usize {
    summary.as_ref().map_or(0, |s| s.0.source_cluster)
}

/// # Safety
/// `summary` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn flowsum_summary_flow_count(summary: *const FlowsumSummary) -> usize {
    summary.as_ref().map_or(0, |s| s.0.flows.len())
}

/// Copies flow `index` into `out`.
///
/// # Safety
/// `summary` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flowsum_summary_flow(
    summary: *const FlowsumSummary,
    index: usize,
    out: *mut FlowsumFlow,
) -> FlowsumStatus {
    guard(|| {
        let s = &handle(summary, "summary")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let f = s.flows.get(index).ok_or_else(|| {
            Failure(
                FlowsumStatus::OutOfRange,
                format!("flow {index} out of range ({} flows)", s.flows.len()),
            )
        })?;
        *out = FlowsumFlow {
            src: f.src,
            dst: f.dst,
            raw_sum: f.raw_sum,
            rate: f.rate,
            normalized_rate: f.normalized_rate,
        };
        Ok(())
    })
}

/// Serializes the summary as pretty JSON into a new string that must be
/// released with [`flowsum_string_free`].
///
/// # Safety
/// `summary` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn flowsum_summary_to_json(
    summary: *const FlowsumSummary,
    out: *mut *mut c_char,
) -> FlowsumStatus {
    guard(|| {
        let s = &handle(summary, "summary")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = s.to_json_pretty()?;
        let c = CString::new(text).map_err(|e| Failure(FlowsumStatus::Internal, e.to_string()))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn flowsum_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
