//! The sparse bipartite click graph and its degree statistics.
//!
//! Both adjacency views (query -> URLs and URL -> queries) are kept so
//! row and column walks are cheap. Ids are dense and assigned in
//! lexicographic string order, which makes every artifact derived from
//! the graph reproducible across runs and platforms.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::{read_edge_file, IngestError, UfTriple};
use crate::powerlaw::{degree_histogram, fit_power_law, PowerLawFit};

const EDGES_HEADER: &str = "# clickgraph edges v1";
const DICT_HEADER: &str = "# clickgraph dict v1";

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate edge ({query}, {url})")]
    DuplicateEdge { query: String, url: String },
    #[error("snapshot {path}: {source}")]
    SnapshotIo { path: PathBuf, source: io::Error },
    #[error("snapshot {path} line {line}: malformed dictionary entry")]
    SnapshotDict { path: PathBuf, line: u64 },
    #[error("snapshot {path}: unsupported or missing format header")]
    SnapshotVersion { path: PathBuf },
    #[error("snapshot dictionary disagrees with edge list: id {id} is {found}, expected {expected}")]
    SnapshotMismatch { id: u32, found: String, expected: String },
    #[error(transparent)]
    Edges(#[from] IngestError),
}

/// Per-URL degree quantities.
///
/// `q_of_d[j]` is the number of distinct queries clicking URL `j`.
/// `u_of_d[j]` is the number of distinct URLs reachable from `j` in one
/// query hop; it always includes `j` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrlDegreeProfile {
    pub q_of_d: Vec<u32>,
    pub u_of_d: Vec<u32>,
}

/// Immutable sparse query-URL graph with user-frequency edges and
/// bidirectional string dictionaries.
#[derive(Debug)]
pub struct BipartiteClickGraph {
    queries: Vec<String>,
    urls: Vec<String>,
    query_index: HashMap<String, u32>,
    url_index: HashMap<String, u32>,
    /// Per query id, (url id, uf) sorted by url id.
    by_query: Vec<Vec<(u32, u32)>>,
    /// Per url id, (query id, uf) sorted by query id.
    by_url: Vec<Vec<(u32, u32)>>,
    profile: OnceLock<UrlDegreeProfile>,
}

impl BipartiteClickGraph {
    /// Number of distinct queries (M).
    pub fn query_count(&self) -> usize {
        self.queries.len()
    }

    /// Number of distinct URLs (N).
    pub fn url_count(&self) -> usize {
        self.urls.len()
    }

    pub fn query_id(&self, query: &str) -> Option<u32> {
        self.query_index.get(query).copied()
    }

    pub fn url_id(&self, url: &str) -> Option<u32> {
        self.url_index.get(url).copied()
    }

    pub fn query_name(&self, id: u32) -> &str {
        &self.queries[id as usize]
    }

    pub fn url_name(&self, id: u32) -> &str {
        &self.urls[id as usize]
    }

    /// (url id, uf) pairs of one query, ascending by url id.
    pub fn edges_of_query(&self, id: u32) -> &[(u32, u32)] {
        &self.by_query[id as usize]
    }

    /// (query id, uf) pairs of one URL, ascending by query id.
    pub fn edges_of_url(&self, id: u32) -> &[(u32, u32)] {
        &self.by_url[id as usize]
    }

    pub fn edge_count(&self) -> usize {
        self.by_query.iter().map(Vec::len).sum()
    }

    /// Sum of user frequencies over all edges.
    pub fn total_uf(&self) -> u64 {
        self.by_query.iter().flatten().map(|&(_, uf)| u64::from(uf)).sum()
    }

    /// All edges as (query id, url id, uf), ordered by (query, url).
    pub fn iter_edges(&self) -> impl Iterator<Item = (u32, u32, u32)> + '_ {
        self.by_query
            .iter()
            .enumerate()
            .flat_map(|(q, row)| row.iter().map(move |&(d, uf)| (q as u32, d, uf)))
    }

    /// The cached degree profile, computed on first use.
    pub fn degree_profile(&self) -> &UrlDegreeProfile {
        self.profile.get_or_init(|| compute_degree_profile(self))
    }

    /// Edges as triples in dictionary string form, sorted by (query, url).
    pub fn to_triples(&self) -> Vec<UfTriple> {
        let mut triples: Vec<UfTriple> = self
            .iter_edges()
            .map(|(q, d, uf)| UfTriple::new(self.query_name(q), self.url_name(d), uf))
            .collect();
        triples.sort();
        triples
    }
}

/// Build the graph from deduplicated triples. Ids are assigned in
/// lexicographic order of the query / URL strings.
pub fn build_graph(triples: &[UfTriple]) -> Result<BipartiteClickGraph, GraphError> {
    let mut queries: Vec<String> = triples.iter().map(|t| t.query.clone()).collect();
    queries.sort();
    queries.dedup();
    let mut urls: Vec<String> = triples.iter().map(|t| t.url.clone()).collect();
    urls.sort();
    urls.dedup();

    let query_index: HashMap<String, u32> =
        queries.iter().enumerate().map(|(i, q)| (q.clone(), i as u32)).collect();
    let url_index: HashMap<String, u32> =
        urls.iter().enumerate().map(|(i, u)| (u.clone(), i as u32)).collect();

    let mut by_query: Vec<Vec<(u32, u32)>> = vec![Vec::new(); queries.len()];
    let mut by_url: Vec<Vec<(u32, u32)>> = vec![Vec::new(); urls.len()];
    for t in triples {
        let q = query_index[&t.query];
        let d = url_index[&t.url];
        by_query[q as usize].push((d, t.uf));
    }
    for (q, row) in by_query.iter_mut().enumerate() {
        row.sort_unstable();
        if row.windows(2).any(|w| w[0].0 == w[1].0) {
            let dup = row.windows(2).find(|w| w[0].0 == w[1].0).unwrap()[0].0;
            return Err(GraphError::DuplicateEdge {
                query: queries[q].clone(),
                url: urls[dup as usize].clone(),
            });
        }
        for &(d, uf) in row.iter() {
            by_url[d as usize].push((q as u32, uf));
        }
    }
    // by_url rows are already sorted: queries were visited in ascending id order.

    Ok(BipartiteClickGraph {
        queries,
        urls,
        query_index,
        url_index,
        by_query,
        by_url,
        profile: OnceLock::new(),
    })
}

/// Compute q(d) and u(d) for every URL. The one-hop URL set of `j` is the
/// union of the URL sets of every query incident to `j`, so it always
/// contains `j` itself.
pub fn compute_degree_profile(g: &BipartiteClickGraph) -> UrlDegreeProfile {
    let n = g.url_count();
    let q_of_d: Vec<u32> = (0..n).map(|j| g.by_url[j].len() as u32).collect();
    let u_of_d: Vec<u32> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut reachable: Vec<u32> = g.by_url[j]
                .iter()
                .flat_map(|&(q, _)| g.by_query[q as usize].iter().map(|&(d, _)| d))
                .collect();
            reachable.sort_unstable();
            reachable.dedup();
            reachable.len() as u32
        })
        .collect();
    UrlDegreeProfile { q_of_d, u_of_d }
}

/// Aggregate graph statistics, including degree histograms and the
/// power-law fits of both degree distributions.
#[derive(Debug, Clone, Serialize)]
pub struct GraphStats {
    pub query_count: usize,
    pub url_count: usize,
    pub edge_count: usize,
    pub total_uf: u64,
    pub avg_clicks_per_query: f64,
    pub avg_clicks_per_url: f64,
    pub q_of_d_histogram: Vec<(u32, u64)>,
    pub u_of_d_histogram: Vec<(u32, u64)>,
    pub q_of_d_fit: Option<PowerLawFit>,
    pub u_of_d_fit: Option<PowerLawFit>,
}

pub fn compute_stats(g: &BipartiteClickGraph) -> GraphStats {
    let profile = g.degree_profile();
    let total_uf = g.total_uf();
    let q_hist = degree_histogram(&profile.q_of_d);
    let u_hist = degree_histogram(&profile.u_of_d);
    let to_points = |hist: &[(u32, u64)]| -> Vec<(f64, f64)> {
        hist.iter().map(|&(x, y)| (f64::from(x), y as f64)).collect()
    };
    GraphStats {
        query_count: g.query_count(),
        url_count: g.url_count(),
        edge_count: g.edge_count(),
        total_uf,
        avg_clicks_per_query: total_uf as f64 / g.query_count() as f64,
        avg_clicks_per_url: total_uf as f64 / g.url_count() as f64,
        q_of_d_fit: fit_power_law(&to_points(&q_hist)).ok(),
        u_of_d_fit: fit_power_law(&to_points(&u_hist)).ok(),
        q_of_d_histogram: q_hist,
        u_of_d_histogram: u_hist,
    }
}

/// Write a versioned TSV snapshot: `<base>.edges.tsv` plus the two id
/// dictionaries `<base>.queries.tsv` and `<base>.urls.tsv`.
pub fn save_snapshot(g: &BipartiteClickGraph, base: &Path) -> Result<(), GraphError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| GraphError::SnapshotIo { path, source }
    };

    let edges_path = with_suffix(base, "edges.tsv");
    let mut w = BufWriter::new(File::create(&edges_path).map_err(io_err(&edges_path))?);
    writeln!(w, "{EDGES_HEADER}").map_err(io_err(&edges_path))?;
    for (q, d, uf) in g.iter_edges() {
        writeln!(w, "{}\t{}\t{}", g.query_name(q), g.url_name(d), uf)
            .map_err(io_err(&edges_path))?;
    }
    w.flush().map_err(io_err(&edges_path))?;

    for (suffix, names) in [("queries.tsv", &g.queries), ("urls.tsv", &g.urls)] {
        let path = with_suffix(base, suffix);
        let mut w = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        writeln!(w, "{DICT_HEADER}").map_err(io_err(&path))?;
        for (id, name) in names.iter().enumerate() {
            writeln!(w, "{id}\t{name}").map_err(io_err(&path))?;
        }
        w.flush().map_err(io_err(&path))?;
    }
    Ok(())
}

/// Load a snapshot written by [`save_snapshot`], verifying that the
/// dictionary files agree with the ids the edge list reproduces.
pub fn load_snapshot(base: &Path) -> Result<BipartiteClickGraph, GraphError> {
    let edges_path = with_suffix(base, "edges.tsv");
    let file = File::open(&edges_path)
        .map_err(|source| GraphError::SnapshotIo { path: edges_path.clone(), source })?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader
        .read_line(&mut first)
        .map_err(|source| GraphError::SnapshotIo { path: edges_path.clone(), source })?;
    if first.trim_end() != EDGES_HEADER {
        return Err(GraphError::SnapshotVersion { path: edges_path });
    }
    let triples = read_edge_file(reader)?;
    let graph = build_graph(&triples)?;

    for (suffix, expected) in [("queries.tsv", &graph.queries), ("urls.tsv", &graph.urls)] {
        let path = with_suffix(base, suffix);
        let names = read_dict(&path)?;
        for (id, name) in names.iter().enumerate() {
            if expected.get(id) != Some(name) {
                return Err(GraphError::SnapshotMismatch {
                    id: id as u32,
                    found: name.clone(),
                    expected: expected.get(id).cloned().unwrap_or_default(),
                });
            }
        }
        if names.len() != expected.len() {
            return Err(GraphError::SnapshotMismatch {
                id: names.len() as u32,
                found: String::new(),
                expected: expected.get(names.len()).cloned().unwrap_or_default(),
            });
        }
    }
    Ok(graph)
}

fn read_dict(path: &Path) -> Result<Vec<String>, GraphError> {
    let file = File::open(path)
        .map_err(|source| GraphError::SnapshotIo { path: path.to_path_buf(), source })?;
    let mut names = Vec::new();
    let mut line_no = 0u64;
    for line in BufReader::new(file).lines() {
        line_no += 1;
        let line = line
            .map_err(|source| GraphError::SnapshotIo { path: path.to_path_buf(), source })?;
        if line_no == 1 {
            if line.trim_end() != DICT_HEADER {
                return Err(GraphError::SnapshotVersion { path: path.to_path_buf() });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let Some((id, name)) = line.split_once('\t') else {
            return Err(GraphError::SnapshotDict { path: path.to_path_buf(), line: line_no });
        };
        let id: usize = id
            .parse()
            .map_err(|_| GraphError::SnapshotDict { path: path.to_path_buf(), line: line_no })?;
        if id != names.len() {
            return Err(GraphError::SnapshotDict { path: path.to_path_buf(), line: line_no });
        }
        names.push(name.to_string());
    }
    Ok(names)
}

fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    base.with_file_name(name)
}
