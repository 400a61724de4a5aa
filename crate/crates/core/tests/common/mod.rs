//! Shared helpers for the integration suites: seeded random graphs and
//! dense reference math kept deliberately naive, so the optimized
//! sparse code is checked against something simple enough to eyeball.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use clickgraph::graph::{build_graph, BipartiteClickGraph};
use clickgraph::ingest::UfTriple;
use clickgraph::weighting::WeightedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sparse bipartite graph with up to `max_q` queries and `max_d`
/// URLs. Edge count is capped near 4(M+N) to keep things sparse.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    max_q: u32,
    max_d: u32,
) -> Arc<BipartiteClickGraph> {
    let m = rng.random_range(1..=max_q);
    let n = rng.random_range(1..=max_d);
    let cap = (m as usize * n as usize).min(4 * (m as usize + n as usize));
    let want = rng.random_range(1..=cap);
    let mut edges: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    while edges.len() < want {
        let q = rng.random_range(0..m);
        let d = rng.random_range(0..n);
        let uf = rng.random_range(1..=40);
        edges.entry((q, d)).or_insert(uf);
    }
    let triples: Vec<UfTriple> = edges
        .iter()
        .map(|(&(q, d), &uf)| UfTriple::new(format!("q{q:03}"), format!("d{d:03}"), uf))
        .collect();
    Arc::new(build_graph(&triples).unwrap())
}

/// Weighted edge values as a dense M x N matrix.
pub fn dense_values(w: &WeightedGraph) -> Vec<Vec<f64>> {
    let m = w.base().query_count();
    let n = w.base().url_count();
    let mut v = vec![vec![0.0; n]; m];
    for (q, d, value) in w.iter_values() {
        v[q as usize][d as usize] = value;
    }
    v
}

/// Rows scaled to sum 1; all-zero rows stay zero.
pub fn row_normalized(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    v.iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            row.iter().map(|&x| if s > 0.0 { x / s } else { 0.0 }).collect()
        })
        .collect()
}

/// Transposed matrix with columns of `v` scaled to sum 1: entry [d][q].
pub fn col_normalized(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = v.len();
    let n = if m == 0 { 0 } else { v[0].len() };
    let mut sums = vec![0.0; n];
    for row in v {
        for (d, &x) in row.iter().enumerate() {
            sums[d] += x;
        }
    }
    (0..n)
        .map(|d| {
            (0..m).map(|q| if sums[d] > 0.0 { v[q][d] / sums[d] } else { 0.0 }).collect()
        })
        .collect()
}

pub fn dense_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot / (na * nb)).clamp(0.0, 1.0)
}

pub fn dense_jaccard(a: &[f64], b: &[f64]) -> f64 {
    let min: f64 = a.iter().zip(b).map(|(x, y)| x.min(*y)).sum();
    let max: f64 = a.iter().zip(b).map(|(x, y)| x.max(*y)).sum();
    (min / max).clamp(0.0, 1.0)
}

/// Plain triple-loop product of the two factor matrices: M x M.
pub fn dense_q2q(q2d: &[Vec<f64>], d2q: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = q2d.len();
    let mut out = vec![vec![0.0; m]; m];
    for (i, row) in q2d.iter().enumerate() {
        for (d, &p1) in row.iter().enumerate() {
            if p1 == 0.0 {
                continue;
            }
            for (j, &p2) in d2q[d].iter().enumerate() {
                out[i][j] += p1 * p2;
            }
        }
    }
    out
}

/// R <- (1-alpha) R + alpha Q^T R on the dense two-hop matrix, starting
/// from the indicator of `source`.
pub fn dense_ppr(q2q: &[Vec<f64>], alpha: f64, steps: u32, source: usize) -> Vec<f64> {
    let m = q2q.len();
    let mut r = vec![0.0; m];
    r[source] = 1.0;
    for _ in 0..steps {
        let mut prop = vec![0.0; m];
        for (i, row) in q2q.iter().enumerate() {
            if r[i] == 0.0 {
                continue;
            }
            for (j, &p) in row.iter().enumerate() {
                prop[j] += p * r[i];
            }
        }
        for (rj, &pj) in r.iter_mut().zip(prop.iter()) {
            *rj = (1.0 - alpha) * *rj + alpha * pj;
        }
    }
    r
}
