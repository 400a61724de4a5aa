//! Automatic result-quality scoring against a directory-path catalog.
//!
//! Each query maps to up to five taxonomy paths. Two queries are as
//! similar as their closest pair of paths; a ranked result list is then
//! scored by rank-n precision (mean path similarity over the top n) and
//! by specificity (mean word count of the returned queries).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::{normalize_query, CleaningConfig};
use crate::similarity::{normalize, top_k_similar, SimMethod, SimilarityError};
use crate::weighting::WeightedGraph;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("query `{0}` has no catalog entry")]
    MissingCategory(String),
    #[error("none of the sampled queries has catalog coverage")]
    EmptySample,
    #[error("all weighted graphs must share one base graph")]
    GraphMismatch,
    #[error("catalog {path}: {source}")]
    CatalogIo { path: PathBuf, source: io::Error },
    #[error("catalog {path} line {line}: expected `query<TAB>path | path | ...`")]
    CatalogFormat { path: PathBuf, line: u64 },
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

/// One taxonomy path, e.g. `Regional > Caribbean > Haiti`. Segments are
/// trimmed at parse time and compared case-insensitively.
#[derive(Debug, Clone)]
pub struct CategoryPath {
    segments: Vec<String>,
    folded: Vec<String>,
}

impl CategoryPath {
    /// Split on `>`; returns `None` if no non-empty segment remains.
    pub fn parse(s: &str) -> Option<CategoryPath> {
        let segments: Vec<String> =
            s.split('>').map(str::trim).filter(|p| !p.is_empty()).map(str::to_string).collect();
        if segments.is_empty() {
            return None;
        }
        let folded = segments.iter().map(|p| p.to_lowercase()).collect();
        Some(CategoryPath { segments, folded })
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }
}

impl PartialEq for CategoryPath {
    fn eq(&self, other: &Self) -> bool {
        self.folded == other.folded
    }
}
impl Eq for CategoryPath {}

impl std::fmt::Display for CategoryPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.segments.join(" > "))
    }
}

/// Longest run of consecutive matching segments, divided by the longer
/// path's length. A shared run anywhere in the two paths counts, so
/// paths reaching the same region through different roots still score.
pub fn path_similarity(a: &CategoryPath, b: &CategoryPath) -> f64 {
    let mut best = 0usize;
    let mut prev = vec![0usize; b.folded.len() + 1];
    let mut cur = vec![0usize; b.folded.len() + 1];
    for sa in &a.folded {
        for (j, sb) in b.folded.iter().enumerate() {
            cur[j + 1] = if sa == sb { prev[j] + 1 } else { 0 };
            best = best.max(cur[j + 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best as f64 / a.len().max(b.len()) as f64
}

pub const DEFAULT_MAX_PATHS: usize = 5;

/// Query-to-paths lookup table. Keys are normalized exactly like the
/// ingest pipeline normalizes queries, so graph vertices and catalog
/// entries meet on the same strings.
#[derive(Debug, Default)]
pub struct CategoryCatalog {
    entries: BTreeMap<String, Vec<CategoryPath>>,
    max_paths: usize,
}

impl CategoryCatalog {
    pub fn from_entries<I, S>(entries: I) -> CategoryCatalog
    where
        I: IntoIterator<Item = (S, Vec<CategoryPath>)>,
        S: Into<String>,
    {
        let mut catalog =
            CategoryCatalog { entries: BTreeMap::new(), max_paths: DEFAULT_MAX_PATHS };
        for (query, paths) in entries {
            catalog.insert(query.into(), paths);
        }
        catalog
    }

    /// Load a `query \t path | path | ...` TSV, normalizing the query
    /// column with `config`. Lines starting with `#` are comments.
    pub fn load(path: &Path, config: &CleaningConfig) -> Result<CategoryCatalog, EvalError> {
        Self::load_with_limit(path, config, DEFAULT_MAX_PATHS)
    }

    pub fn load_with_limit(
        path: &Path,
        config: &CleaningConfig,
        max_paths: usize,
    ) -> Result<CategoryCatalog, EvalError> {
        let file = File::open(path)
            .map_err(|source| EvalError::CatalogIo { path: path.to_path_buf(), source })?;
        let mut catalog = CategoryCatalog { entries: BTreeMap::new(), max_paths };
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line
                .map_err(|source| EvalError::CatalogIo { path: path.to_path_buf(), source })?;
            let trimmed = line.trim_end_matches(['\r', '\n']);
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((raw_query, raw_paths)) = trimmed.split_once('\t') else {
                return Err(EvalError::CatalogFormat {
                    path: path.to_path_buf(),
                    line: idx as u64 + 1,
                });
            };
            let query = normalize_query(raw_query, config);
            if query.is_empty() {
                continue;
            }
            let paths: Vec<CategoryPath> =
                raw_paths.split('|').filter_map(CategoryPath::parse).collect();
            catalog.insert(query, paths);
        }
        Ok(catalog)
    }

    fn insert(&mut self, query: String, paths: Vec<CategoryPath>) {
        if paths.is_empty() {
            return;
        }
        let slot = self.entries.entry(query).or_default();
        slot.extend(paths);
        slot.truncate(self.max_paths);
    }

    pub fn get(&self, query: &str) -> Option<&[CategoryPath]> {
        self.entries.get(query).map(Vec::as_slice)
    }

    pub fn contains(&self, query: &str) -> bool {
        self.entries.contains_key(query)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Best path similarity over all pairs, or 0 when either query has
    /// no entry. Result-side misses score 0 by design; callers decide
    /// separately whether a missing source query skips the sample.
    pub fn pair_similarity_or_zero(&self, q: &str, r: &str) -> f64 {
        query_pair_similarity(self, q, r).unwrap_or(0.0)
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (query, paths) in &self.entries {
            let joined: Vec<String> = paths.iter().map(|p| p.segments.join(" > ")).collect();
            writeln!(out, "{query}\t{}", joined.join(" | "))?;
        }
        out.flush()
    }
}

/// Similarity of two queries: the maximum path similarity over every
/// pair of their catalog paths.
pub fn query_pair_similarity(
    catalog: &CategoryCatalog,
    q: &str,
    r: &str,
) -> Result<f64, EvalError> {
    let qp = catalog.get(q).ok_or_else(|| EvalError::MissingCategory(q.to_string()))?;
    let rp = catalog.get(r).ok_or_else(|| EvalError::MissingCategory(r.to_string()))?;
    let mut best = 0.0f64;
    for a in qp {
        for b in rp {
            best = best.max(path_similarity(a, b));
        }
    }
    Ok(best)
}

/// Mean path similarity between `query` and the top n results. Lists
/// shorter than n count the missing slots as similarity 0.
pub fn precision_at_n(
    catalog: &CategoryCatalog,
    query: &str,
    results: &[String],
    n: usize,
) -> f64 {
    assert!(n >= 1);
    let top = &results[..results.len().min(n)];
    top.iter().map(|r| catalog.pair_similarity_or_zero(query, r)).sum::<f64>() / n as f64
}

/// Mean whitespace-token count of the top n results, missing slots
/// counting 0.
pub fn length_at_n(results: &[String], n: usize) -> f64 {
    assert!(n >= 1);
    let top = &results[..results.len().min(n)];
    top.iter().map(|r| r.split_whitespace().count() as f64).sum::<f64>() / n as f64
}

#[derive(Debug, Clone, Copy)]
pub struct EvalConfig {
    pub sample_size: usize,
    pub k: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { sample_size: 500, k: 10, seed: 0 }
    }
}

/// One model/method combination's averaged metrics.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EvalRow {
    pub model: String,
    pub method: String,
    /// p_at[n-1] is P@n, for n = 1..=k.
    pub p_at: Vec<f64>,
    pub l_at: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub seed: u64,
    pub sample_size: usize,
    /// Queries actually drawn (min of sample_size and the query count).
    pub sampled: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub k: usize,
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    /// Fixed-width table: models as columns, P@1 / P@k / L@k rows
    /// grouped per method.
    pub fn to_table_string(&self) -> String {
        let mut models: Vec<&str> = Vec::new();
        let mut methods: Vec<&str> = Vec::new();
        for row in &self.rows {
            if !models.contains(&row.model.as_str()) {
                models.push(&row.model);
            }
            if !methods.contains(&row.method.as_str()) {
                methods.push(&row.method);
            }
        }
        let metric_names =
            ["P@1".to_string(), format!("P@{}", self.k), format!("L@{}", self.k)];
        let method_w = methods.iter().map(|m| m.len()).max().unwrap_or(6).max("method".len());
        let metric_w = metric_names.iter().map(String::len).max().unwrap().max("metric".len());
        let col_w = models.iter().map(|m| m.len()).max().unwrap_or(2).max(6);

        let mut out = String::new();
        let _ = writeln!(
            out,
            "# seed={} sample_size={} sampled={} evaluated={} skipped={} k={}",
            self.seed, self.sample_size, self.sampled, self.evaluated, self.skipped, self.k
        );
        let _ = write!(out, "{:method_w$}  {:metric_w$}", "method", "metric");
        for m in &models {
            let _ = write!(out, "  {m:>col_w$}");
        }
        out.push('\n');
        for method in &methods {
            for (mi, metric) in metric_names.iter().enumerate() {
                let _ = write!(out, "{method:method_w$}  {metric:metric_w$}");
                for model in &models {
                    let value = self
                        .rows
                        .iter()
                        .find(|r| r.model == *model && r.method == *method)
                        .map(|r| match mi {
                            0 => r.p_at[0],
                            1 => r.p_at[self.k - 1],
                            _ => r.l_at,
                        });
                    match value {
                        Some(v) => {
                            let _ = write!(out, "  {v:>col_w$.4}");
                        }
                        None => {
                            let _ = write!(out, "  {:>col_w$}", "-");
                        }
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Score every model x method combination on one shared seeded sample
/// of queries. Sampled queries without catalog coverage are skipped and
/// counted; the same surviving set feeds every combination.
pub fn run_evaluation(
    graphs: &[WeightedGraph],
    methods: &[SimMethod],
    catalog: &CategoryCatalog,
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    let Some(first) = graphs.first() else {
        return Ok(EvalReport {
            seed: config.seed,
            sample_size: config.sample_size,
            sampled: 0,
            evaluated: 0,
            skipped: 0,
            k: config.k,
            rows: Vec::new(),
        });
    };
    let base = first.base();
    if graphs.iter().any(|g| !std::sync::Arc::ptr_eq(g.base(), base)) {
        return Err(EvalError::GraphMismatch);
    }

    let m = base.query_count();
    let mut sampled: Vec<u32> = if config.sample_size >= m {
        (0..m as u32).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut ids: Vec<u32> =
            rand::seq::index::sample(&mut rng, m, config.sample_size)
                .into_iter()
                .map(|i| i as u32)
                .collect();
        ids.sort_unstable();
        ids
    };
    let total_sampled = sampled.len();
    sampled.retain(|&q| catalog.contains(base.query_name(q)));
    let evaluated = sampled.len();
    let skipped = total_sampled - evaluated;
    if evaluated == 0 {
        return Err(EvalError::EmptySample);
    }

    let mut rows = Vec::new();
    for w in graphs {
        let t = normalize(w);
        for &method in methods {
            let per_query: Vec<(Vec<f64>, f64)> = sampled
                .par_iter()
                .map(|&q| -> Result<(Vec<f64>, f64), EvalError> {
                    let source_name = base.query_name(q);
                    let result = top_k_similar(&t, q, method, config.k)?;
                    let names: Vec<&str> =
                        result.entries.iter().map(|&(r, _)| base.query_name(r)).collect();
                    let mut p_at = vec![0.0; config.k];
                    let mut acc = 0.0;
                    for n in 1..=config.k {
                        if let Some(name) = names.get(n - 1) {
                            acc += catalog.pair_similarity_or_zero(source_name, name);
                        }
                        p_at[n - 1] = acc / n as f64;
                    }
                    let l_at = names
                        .iter()
                        .map(|name| name.split_whitespace().count() as f64)
                        .sum::<f64>()
                        / config.k as f64;
                    Ok((p_at, l_at))
                })
                .collect::<Result<_, _>>()?;
            let mut p_at = vec![0.0; config.k];
            let mut l_at = 0.0;
            for (p, l) in &per_query {
                for (sum, v) in p_at.iter_mut().zip(p) {
                    *sum += v;
                }
                l_at += l;
            }
            for v in p_at.iter_mut() {
                *v /= evaluated as f64;
            }
            l_at /= evaluated as f64;
            rows.push(EvalRow {
                model: w.model().name().to_string(),
                method: method.to_string(),
                p_at,
                l_at,
            });
        }
    }

    Ok(EvalReport {
        seed: config.seed,
        sample_size: config.sample_size,
        sampled: total_sampled,
        evaluated,
        skipped,
        k: config.k,
        rows,
    })
}
