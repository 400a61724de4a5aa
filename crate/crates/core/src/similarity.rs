//! Transition matrices and similar-query retrieval.
//!
//! A weighted graph is normalized into two sparse stochastic matrices:
//! query-to-URL (rows normalized) and URL-to-query (columns of the same
//! values, normalized per URL). Queries are then compared as rows of
//! the query-to-URL matrix; the random-walk methods chain both matrices
//! without ever materializing dense storage.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::weighting::WeightedGraph;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("query id {0} is out of range")]
    UnknownQuery(u32),
    #[error("query id {0} has an all-zero representation")]
    ZeroVector(u32),
    #[error("jumping constant must be in (0,1), got {0}")]
    InvalidAlpha(f64),
}

/// Sparse row-major stochastic matrices derived from one weighted graph.
/// Entries mirror the graph's sparsity pattern; rows (or columns) whose
/// value sum is zero keep explicit zero entries and are flagged.
#[derive(Debug)]
pub struct TransitionMatrices {
    /// Per query, (url, p(d|q)) ascending by url id.
    q2d: Vec<Vec<(u32, f64)>>,
    /// Per url, (query, p(q|d)) ascending by query id.
    d2q: Vec<Vec<(u32, f64)>>,
    zero_query_rows: Vec<bool>,
    zero_url_rows: Vec<bool>,
}

impl TransitionMatrices {
    pub fn query_count(&self) -> usize {
        self.q2d.len()
    }

    pub fn url_count(&self) -> usize {
        self.d2q.len()
    }

    pub fn q2d_row(&self, q: u32) -> &[(u32, f64)] {
        &self.q2d[q as usize]
    }

    pub fn d2q_row(&self, d: u32) -> &[(u32, f64)] {
        &self.d2q[d as usize]
    }

    pub fn is_zero_query_row(&self, q: u32) -> bool {
        self.zero_query_rows[q as usize]
    }

    pub fn is_zero_url_row(&self, d: u32) -> bool {
        self.zero_url_rows[d as usize]
    }
}

/// Row-normalize into p(d|q) and column-normalize into p(q|d).
pub fn normalize(w: &WeightedGraph) -> TransitionMatrices {
    let g = w.base();
    let m = g.query_count();
    let n = g.url_count();
    let mut row_sum = vec![0f64; m];
    let mut col_sum = vec![0f64; n];
    for (q, d, v) in w.iter_values() {
        row_sum[q as usize] += v;
        col_sum[d as usize] += v;
    }

    let q2d: Vec<Vec<(u32, f64)>> = (0..m as u32)
        .into_par_iter()
        .map(|q| {
            let rs = row_sum[q as usize];
            g.edges_of_query(q)
                .iter()
                .zip(w.values_of_query(q))
                .map(|(&(d, _), &v)| (d, if rs > 0.0 { v / rs } else { 0.0 }))
                .collect()
        })
        .collect();

    let mut d2q: Vec<Vec<(u32, f64)>> = (0..n)
        .map(|d| Vec::with_capacity(g.edges_of_url(d as u32).len()))
        .collect();
    for q in 0..m as u32 {
        for (&(d, _), &v) in g.edges_of_query(q).iter().zip(w.values_of_query(q)) {
            let cs = col_sum[d as usize];
            d2q[d as usize].push((q, if cs > 0.0 { v / cs } else { 0.0 }));
        }
    }

    TransitionMatrices {
        q2d,
        d2q,
        zero_query_rows: row_sum.iter().map(|&s| s == 0.0).collect(),
        zero_url_rows: col_sum.iter().map(|&s| s == 0.0).collect(),
    }
}

fn check_query(t: &TransitionMatrices, q: u32) -> Result<(), SimilarityError> {
    if (q as usize) < t.query_count() {
        Ok(())
    } else {
        Err(SimilarityError::UnknownQuery(q))
    }
}

fn nonzero_row(t: &TransitionMatrices, q: u32) -> Result<(), SimilarityError> {
    check_query(t, q)?;
    if t.is_zero_query_row(q) {
        Err(SimilarityError::ZeroVector(q))
    } else {
        Ok(())
    }
}

/// Cosine of two query rows. Both rows must be nonzero.
pub fn cosine_similarity(
    t: &TransitionMatrices,
    i: u32,
    j: u32,
) -> Result<f64, SimilarityError> {
    nonzero_row(t, i)?;
    nonzero_row(t, j)?;
    let (a, b) = (t.q2d_row(i), t.q2d_row(j));
    let mut dot = 0.0;
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].0.cmp(&b[y].0) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                dot += a[x].1 * b[y].1;
                x += 1;
                y += 1;
            }
        }
    }
    let na: f64 = a.iter().map(|&(_, p)| p * p).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|&(_, p)| p * p).sum::<f64>().sqrt();
    Ok((dot / (na * nb)).clamp(0.0, 1.0))
}

/// Generalized Jaccard over two query rows: sum of elementwise minima
/// over sum of elementwise maxima.
pub fn jaccard_similarity(
    t: &TransitionMatrices,
    i: u32,
    j: u32,
) -> Result<f64, SimilarityError> {
    nonzero_row(t, i)?;
    nonzero_row(t, j)?;
    let (a, b) = (t.q2d_row(i), t.q2d_row(j));
    let mut min_sum = 0.0;
    let mut max_sum = 0.0;
    let (mut x, mut y) = (0, 0);
    while x < a.len() || y < b.len() {
        let next_a = a.get(x).map(|&(d, _)| d);
        let next_b = b.get(y).map(|&(d, _)| d);
        match (next_a, next_b) {
            (Some(da), Some(db)) if da == db => {
                min_sum += a[x].1.min(b[y].1);
                max_sum += a[x].1.max(b[y].1);
                x += 1;
                y += 1;
            }
            (Some(da), Some(db)) if da < db => {
                max_sum += a[x].1;
                x += 1;
            }
            (Some(_), Some(_)) => {
                max_sum += b[y].1;
                y += 1;
            }
            (Some(_), None) => {
                max_sum += a[x].1;
                x += 1;
            }
            (None, Some(_)) => {
                max_sum += b[y].1;
                y += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    Ok((min_sum / max_sum).clamp(0.0, 1.0))
}

/// Set Jaccard over the nonzero supports of the two rows, ignoring the
/// probability magnitudes.
pub fn jaccard_binary(t: &TransitionMatrices, i: u32, j: u32) -> Result<f64, SimilarityError> {
    nonzero_row(t, i)?;
    nonzero_row(t, j)?;
    let support = |q: u32| -> Vec<u32> {
        t.q2d_row(q).iter().filter(|&&(_, p)| p > 0.0).map(|&(d, _)| d).collect()
    };
    let (a, b) = (support(i), support(j));
    let mut inter = 0usize;
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                x += 1;
                y += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    Ok(inter as f64 / union as f64)
}

/// The two-hop query-to-query matrix, row by row: P_q2q = P_q2d * P_d2q.
/// Worth materializing only on small graphs; the random-walk code below
/// chains the two factor matrices instead.
pub fn q2q_step(t: &TransitionMatrices) -> Vec<Vec<(u32, f64)>> {
    let m = t.query_count();
    (0..m as u32)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![0f64; m];
            let mut touched = Vec::new();
            for &(d, p1) in t.q2d_row(i) {
                if p1 == 0.0 {
                    continue;
                }
                for &(q, p2) in t.d2q_row(d) {
                    if acc[q as usize] == 0.0 && p2 != 0.0 {
                        touched.push(q);
                    }
                    acc[q as usize] += p1 * p2;
                }
            }
            touched.sort_unstable();
            touched.into_iter().map(|q| (q, acc[q as usize])).collect()
        })
        .collect()
}

/// Parameters of the propagation walk: jumping constant, number of
/// two-hop steps, and the source query the indicator vector starts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PprParams {
    pub alpha: f64,
    pub steps: u32,
    pub source: u32,
}

/// Iterate R <- (1-alpha) R + alpha P_q2q^T R exactly `steps` times,
/// starting from the source indicator. Each step runs the two factor
/// products in sequence, so cost is linear in the edge count. Returns
/// the full score vector over queries.
pub fn personalized_pagerank(
    t: &TransitionMatrices,
    params: PprParams,
) -> Result<Vec<f64>, SimilarityError> {
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(SimilarityError::InvalidAlpha(params.alpha));
    }
    check_query(t, params.source)?;
    let m = t.query_count();
    let n = t.url_count();
    let mut r = vec![0f64; m];
    r[params.source as usize] = 1.0;
    let mut via_url = vec![0f64; n];
    let mut propagated = vec![0f64; m];
    for _ in 0..params.steps {
        via_url.iter_mut().for_each(|x| *x = 0.0);
        propagated.iter_mut().for_each(|x| *x = 0.0);
        for (q, row) in t.q2d.iter().enumerate() {
            let mass = r[q];
            if mass == 0.0 {
                continue;
            }
            for &(d, p) in row {
                via_url[d as usize] += p * mass;
            }
        }
        for (d, row) in t.d2q.iter().enumerate() {
            let mass = via_url[d];
            if mass == 0.0 {
                continue;
            }
            for &(q, p) in row {
                propagated[q as usize] += p * mass;
            }
        }
        for (rj, &pj) in r.iter_mut().zip(propagated.iter()) {
            *rj = (1.0 - params.alpha) * *rj + params.alpha * pj;
        }
    }
    Ok(r)
}

/// How to score candidate queries against the source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimMethod {
    Cosine,
    Jaccard,
    JaccardBinary,
    Ppr { alpha: f64, steps: u32 },
}

impl SimMethod {
    pub const DEFAULT_PPR_ALPHA: f64 = 0.5;
    pub const DEFAULT_PPR_STEPS: u32 = 1;
}

impl fmt::Display for SimMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SimMethod::Cosine => f.write_str("cosine"),
            SimMethod::Jaccard => f.write_str("jaccard"),
            SimMethod::JaccardBinary => f.write_str("jaccard-binary"),
            SimMethod::Ppr { alpha, steps } => {
                write!(f, "ppr(alpha={alpha}, steps={steps})")
            }
        }
    }
}

#[derive(Debug, Error)]
#[error("unknown method `{0}`; valid methods: cosine, jaccard, jaccard-binary, ppr")]
pub struct ParseMethodError(String);

impl FromStr for SimMethod {
    type Err = ParseMethodError;

    /// Bare `ppr` takes the default walk parameters; callers with
    /// explicit flags overwrite them afterwards.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "cosine" => Ok(SimMethod::Cosine),
            "jaccard" => Ok(SimMethod::Jaccard),
            "jaccard-binary" => Ok(SimMethod::JaccardBinary),
            "ppr" => Ok(SimMethod::Ppr {
                alpha: SimMethod::DEFAULT_PPR_ALPHA,
                steps: SimMethod::DEFAULT_PPR_STEPS,
            }),
            other => Err(ParseMethodError(other.to_string())),
        }
    }
}

/// Ranked neighbors of one source query: descending score, ties broken
/// by ascending query id, zero scores and the source itself dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityResult {
    pub source: u32,
    pub entries: Vec<(u32, f64)>,
}

/// Rank the queries most similar to `source`. For the row-comparison
/// methods, candidates are exactly the queries sharing at least one
/// positive-probability URL with the source; everything else would
/// score zero and is skipped without being scored.
pub fn top_k_similar(
    t: &TransitionMatrices,
    source: u32,
    method: SimMethod,
    k: usize,
) -> Result<SimilarityResult, SimilarityError> {
    check_query(t, source)?;
    let mut entries: Vec<(u32, f64)> = match method {
        SimMethod::Cosine | SimMethod::Jaccard | SimMethod::JaccardBinary => {
            if t.is_zero_query_row(source) {
                Vec::new()
            } else {
                let mut candidates: Vec<u32> = t
                    .q2d_row(source)
                    .iter()
                    .filter(|&&(_, p)| p > 0.0)
                    .flat_map(|&(d, _)| {
                        t.d2q_row(d).iter().filter(|&&(_, p)| p > 0.0).map(|&(q, _)| q)
                    })
                    .filter(|&q| q != source && !t.is_zero_query_row(q))
                    .collect();
                candidates.sort_unstable();
                candidates.dedup();
                candidates
                    .into_iter()
                    .map(|q| {
                        let score = match method {
                            SimMethod::Cosine => cosine_similarity(t, source, q),
                            SimMethod::Jaccard => jaccard_similarity(t, source, q),
                            _ => jaccard_binary(t, source, q),
                        };
                        score.map(|s| (q, s))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
        }
        SimMethod::Ppr { alpha, steps } => {
            let r = personalized_pagerank(t, PprParams { alpha, steps, source })?;
            r.iter()
                .enumerate()
                .filter(|&(q, _)| q as u32 != source)
                .map(|(q, &s)| (q as u32, s))
                .collect()
        }
    };
    entries.retain(|&(_, s)| s > 0.0);
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    entries.truncate(k);
    Ok(SimilarityResult { source, entries })
}
