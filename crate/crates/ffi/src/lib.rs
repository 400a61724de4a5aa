//! C bindings for the click-graph toolkit.
//!
//! Objects cross the boundary as opaque pointers created and destroyed
//! here; every fallible call returns a [`CgStatus`] and reports results
//! through out-pointers. Failure details go to a thread-local message
//! readable with [`cg_last_error`]. The generated header lives in
//! `include/clickgraph.h`.
//!
//! One pointer contract for the whole surface: handles must come from
//! this library and not be used after their `_free` call, string
//! arguments must be NUL-terminated, and out-pointers must be writable.
//! Null handles are tolerated everywhere and reported as
//! `NullArgument` (or a zero/None result for the plain getters).

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, Cursor};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use clickgraph::graph::{build_graph, BipartiteClickGraph};
use clickgraph::ingest::{read_edge_file, IngestError};
use clickgraph::similarity::{normalize, top_k_similar, SimMethod, TransitionMatrices};
use clickgraph::weighting::{weigh_edges, TotalsOverride, WeightModel, WeightedGraph};

/// Result of every fallible call. Non-`Ok` values leave a message in
/// the thread-local buffer behind `cg_last_error`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    Io = 3,
    /// Malformed edge data.
    Parse = 4,
    /// Graph construction failed (duplicate edges, inconsistent input).
    Graph = 5,
    /// Weighting failed (total overrides smaller than observed counts).
    Weight = 6,
    /// Similarity query failed (unknown query, bad walk parameters).
    Similarity = 7,
    /// Index or key lookup out of range.
    OutOfRange = 8,
    /// A panic was caught at the boundary; state may be inconsistent.
    Internal = 9,
}

/// Edge weighting model.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgModel {
    Uf = 0,
    UfIqf = 1,
    UfwIqf = 2,
    UfwIuf = 3,
}

impl From<CgModel> for WeightModel {
    fn from(m: CgModel) -> WeightModel {
        match m {
            CgModel::Uf => WeightModel::Uf,
            CgModel::UfIqf => WeightModel::UfIqf,
            CgModel::UfwIqf => WeightModel::UfwIqf,
            CgModel::UfwIuf => WeightModel::UfwIuf,
        }
    }
}

/// Similar-query retrieval method.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CgMethod {
    Cosine = 0,
    Jaccard = 1,
    JaccardBinary = 2,
    /// Personalized PageRank; honors the `alpha` and `steps` arguments.
    Ppr = 3,
}

/// Opaque bipartite click graph.
pub struct CgGraph {
    inner: Arc<BipartiteClickGraph>,
}

/// Opaque similarity engine: one graph weighted under one model, with
/// its transition matrices precomputed.
pub struct CgEngine {
    weighted: WeightedGraph,
    matrices: TransitionMatrices,
}

/// Opaque ranked list of (query, score) results.
pub struct CgSimilarList {
    entries: Vec<(CString, f64)>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let msg = CString::new(msg.to_string())
        .unwrap_or_else(|_| CString::new("error message contained NUL").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn ingest_status(e: &IngestError) -> CgStatus {
    match e {
        IngestError::Io { .. } => CgStatus::Io,
        _ => CgStatus::Parse,
    }
}

/// Catches panics so they cannot unwind across the C boundary.
fn guard<F: FnOnce() -> CgStatus>(f: F) -> CgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            CgStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, CgStatus> {
    if p.is_null() {
        set_error("null string argument");
        return Err(CgStatus::NullArgument);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CgStatus::InvalidUtf8
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on the calling thread. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn graph_from_triples(
    triples: Result<Vec<clickgraph::UfTriple>, IngestError>,
    out: *mut *mut CgGraph,
) -> CgStatus {
    let triples = match triples {
        Ok(t) => t,
        Err(e) => {
            let status = ingest_status(&e);
            set_error(e);
            return status;
        }
    };
    match build_graph(&triples) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(CgGraph { inner: Arc::new(g) }));
            CgStatus::Ok
        }
        Err(e) => {
            set_error(e);
            CgStatus::Graph
        }
    }
}

/// Build a graph from an edge file of `query \t url \t uf` lines
/// (`#` comments allowed). On success `*out` owns the new graph.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_from_edge_file(
    path: *const c_char,
    out: *mut *mut CgGraph,
) -> CgStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return CgStatus::NullArgument;
        }
        let path = match str_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) => {
                set_error(format!("open {path}: {e}"));
                return CgStatus::Io;
            }
        };
        graph_from_triples(read_edge_file(BufReader::new(file)), out)
    })
}

/// Build a graph from edge data held in memory: a NUL-terminated string
/// with the same format as an edge file.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_from_edge_data(
    data: *const c_char,
    out: *mut *mut CgGraph,
) -> CgStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return CgStatus::NullArgument;
        }
        let data = match str_arg(data) {
            Ok(d) => d,
            Err(s) => return s,
        };
        graph_from_triples(read_edge_file(Cursor::new(data)), out)
    })
}

/// Destroy a graph. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_free(g: *mut CgGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of distinct queries; 0 if `g` is null.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_query_count(g: *const CgGraph) -> u64 {
    g.as_ref().map_or(0, |g| g.inner.query_count() as u64)
}

/// Number of distinct URLs; 0 if `g` is null.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_url_count(g: *const CgGraph) -> u64 {
    g.as_ref().map_or(0, |g| g.inner.url_count() as u64)
}

/// Number of edges; 0 if `g` is null.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_edge_count(g: *const CgGraph) -> u64 {
    g.as_ref().map_or(0, |g| g.inner.edge_count() as u64)
}

/// Sum of user frequencies over all edges; 0 if `g` is null.
#[no_mangle]
pub unsafe extern "C" fn cg_graph_total_uf(g: *const CgGraph) -> u64 {
    g.as_ref().map_or(0, |g| g.inner.total_uf())
}

/// Weight a graph under `model` and precompute its transition matrices.
/// `q_total` / `u_total` of 0 mean "use the graph's own counts"; larger
/// corpus totals can be passed when the graph is a filtered slice.
/// The graph handle stays owned by the caller and may be freed once
/// this returns; the engine keeps its own reference.
#[no_mangle]
pub unsafe extern "C" fn cg_engine_new(
    g: *const CgGraph,
    model: CgModel,
    q_total: u64,
    u_total: u64,
    out: *mut *mut CgEngine,
) -> CgStatus {
    guard(|| {
        if out.is_null() || g.is_null() {
            set_error("null pointer argument");
            return CgStatus::NullArgument;
        }
        let base = Arc::clone(&(*g).inner);
        let totals = TotalsOverride {
            q_total: (q_total > 0).then_some(q_total),
            u_total: (u_total > 0).then_some(u_total),
        };
        match weigh_edges(base, model.into(), totals) {
            Ok(weighted) => {
                let matrices = normalize(&weighted);
                *out = Box::into_raw(Box::new(CgEngine { weighted, matrices }));
                CgStatus::Ok
            }
            Err(e) => {
                set_error(e);
                CgStatus::Weight
            }
        }
    })
}

/// Destroy an engine. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cg_engine_free(e: *mut CgEngine) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Weighted value of the edge (`query`, `url`), or `OutOfRange` when
/// either name is unknown or the edge is absent.
#[no_mangle]
pub unsafe extern "C" fn cg_engine_edge_weight(
    e: *const CgEngine,
    query: *const c_char,
    url: *const c_char,
    out: *mut f64,
) -> CgStatus {
    guard(|| {
        if e.is_null() || out.is_null() {
            set_error("null pointer argument");
            return CgStatus::NullArgument;
        }
        let query = match str_arg(query) {
            Ok(q) => q,
            Err(s) => return s,
        };
        let url = match str_arg(url) {
            Ok(u) => u,
            Err(s) => return s,
        };
        let engine = &*e;
        let base = engine.weighted.base();
        let value = base
            .query_id(query)
            .zip(base.url_id(url))
            .and_then(|(q, d)| engine.weighted.edge_value(q, d));
        match value {
            Some(v) => {
                *out = v;
                CgStatus::Ok
            }
            None => {
                set_error(format!("no edge ({query}, {url})"));
                CgStatus::OutOfRange
            }
        }
    })
}

/// Top-`k` queries most similar to `query`. `alpha` and `steps` are
/// only read for `CgMethod_Ppr`. On success `*out` owns a ranked list;
/// it may be empty when the source shares no URL with other queries.
#[no_mangle]
pub unsafe extern "C" fn cg_engine_similar(
    e: *const CgEngine,
    query: *const c_char,
    method: CgMethod,
    alpha: f64,
    steps: u32,
    k: usize,
    out: *mut *mut CgSimilarList,
) -> CgStatus {
    guard(|| {
        if e.is_null() || out.is_null() {
            set_error("null pointer argument");
            return CgStatus::NullArgument;
        }
        let query = match str_arg(query) {
            Ok(q) => q,
            Err(s) => return s,
        };
        let engine = &*e;
        let base = engine.weighted.base();
        let Some(source) = base.query_id(query) else {
            set_error(format!("query `{query}` not found in graph"));
            return CgStatus::OutOfRange;
        };
        let method = match method {
            CgMethod::Cosine => SimMethod::Cosine,
            CgMethod::Jaccard => SimMethod::Jaccard,
            CgMethod::JaccardBinary => SimMethod::JaccardBinary,
            CgMethod::Ppr => SimMethod::Ppr { alpha, steps },
        };
        match top_k_similar(&engine.matrices, source, method, k) {
            Ok(result) => {
                let entries = result
                    .entries
                    .iter()
                    .map(|&(id, score)| {
                        // Names come from TSV lines, so embedded NULs
                        // cannot occur.
                        (CString::new(base.query_name(id)).unwrap(), score)
                    })
                    .collect();
                *out = Box::into_raw(Box::new(CgSimilarList { entries }));
                CgStatus::Ok
            }
            Err(err) => {
                set_error(err);
                CgStatus::Similarity
            }
        }
    })
}

/// Number of entries in a result list; 0 if `list` is null.
#[no_mangle]
pub unsafe extern "C" fn cg_similar_len(list: *const CgSimilarList) -> usize {
    list.as_ref().map_or(0, |l| l.entries.len())
}

/// Query text at `index`, or null when out of range. The pointer stays
/// valid until the list is freed.
#[no_mangle]
pub unsafe extern "C" fn cg_similar_query(
    list: *const CgSimilarList,
    index: usize,
) -> *const c_char {
    list.as_ref()
        .and_then(|l| l.entries.get(index))
        .map_or(std::ptr::null(), |(name, _)| name.as_ptr())
}

/// Score at `index`, or NaN when out of range.
#[no_mangle]
pub unsafe extern "C" fn cg_similar_score(list: *const CgSimilarList, index: usize) -> f64 {
    list.as_ref().and_then(|l| l.entries.get(index)).map_or(f64::NAN, |&(_, score)| score)
}

/// Destroy a result list. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn cg_similar_free(list: *mut CgSimilarList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}
