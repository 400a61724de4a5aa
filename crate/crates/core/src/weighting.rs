//! Edge-value models for the click graph.
//!
//! Four ways to turn user frequencies into edge values:
//! raw user frequency (UF), user frequency scaled by the URL's inverse
//! query frequency (UF-IQF), and two globally consistent models that
//! divide a per-URL global weight by ln(e + S_i/uf_ij), where S_i is
//! the query's total user frequency (UFW-IQF, UFW-IUF).

use std::f64::consts::E;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::fmt_sig;
use crate::graph::{BipartiteClickGraph, UrlDegreeProfile};

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("{which} = {total} is smaller than the largest per-url count {max_count}; global weights would go negative")]
    TotalTooSmall { which: &'static str, total: u64, max_count: u32 },
}

/// Which edge-value formula to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightModel {
    Uf,
    UfIqf,
    UfwIqf,
    UfwIuf,
}

impl WeightModel {
    pub const ALL: [WeightModel; 4] =
        [WeightModel::Uf, WeightModel::UfIqf, WeightModel::UfwIqf, WeightModel::UfwIuf];

    pub fn name(self) -> &'static str {
        match self {
            WeightModel::Uf => "UF",
            WeightModel::UfIqf => "UF-IQF",
            WeightModel::UfwIqf => "UFW-IQF",
            WeightModel::UfwIuf => "UFW-IUF",
        }
    }
}

impl fmt::Display for WeightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
#[error("unknown model `{0}`; valid models: uf, uf-iqf, ufw-iqf, ufw-iuf")]
pub struct ParseModelError(String);

impl FromStr for WeightModel {
    type Err = ParseModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "uf" => Ok(WeightModel::Uf),
            "uf-iqf" => Ok(WeightModel::UfIqf),
            "ufw-iqf" => Ok(WeightModel::UfwIqf),
            "ufw-iuf" => Ok(WeightModel::UfwIuf),
            other => Err(ParseModelError(other.to_string())),
        }
    }
}

/// Optional replacements for the graph's own |Q| and |U| totals.
/// Small demonstration graphs use inflated totals so that no URL ends
/// up with a zero global weight.
#[derive(Debug, Clone, Copy, Default)]
pub struct TotalsOverride {
    pub q_total: Option<u64>,
    pub u_total: Option<u64>,
}

/// Inverse query frequency per URL: ln(Q_total / q(d_j)).
pub fn iqf(profile: &UrlDegreeProfile, q_total: u64) -> Vec<f64> {
    profile.q_of_d.iter().map(|&q| (q_total as f64 / f64::from(q)).ln()).collect()
}

/// Inverse URL frequency per URL: ln(U_total / u(d_j)).
pub fn iuf(profile: &UrlDegreeProfile, u_total: u64) -> Vec<f64> {
    profile.u_of_d.iter().map(|&u| (u_total as f64 / f64::from(u)).ln()).collect()
}

/// A graph plus per-edge values under one model. The sparsity pattern
/// is exactly the base graph's; edges may carry value 0 when the URL's
/// global weight is 0.
#[derive(Debug)]
pub struct WeightedGraph {
    base: Arc<BipartiteClickGraph>,
    model: WeightModel,
    /// Per query id, values aligned with `base.edges_of_query`.
    values: Vec<Vec<f64>>,
    /// Per-url g(d_j); `None` for the UF model.
    global_weights: Option<Vec<f64>>,
    q_total: u64,
    u_total: u64,
}

impl WeightedGraph {
    pub fn base(&self) -> &Arc<BipartiteClickGraph> {
        &self.base
    }

    pub fn model(&self) -> WeightModel {
        self.model
    }

    pub fn q_total(&self) -> u64 {
        self.q_total
    }

    pub fn u_total(&self) -> u64 {
        self.u_total
    }

    /// Edge values of one query, aligned with `edges_of_query`.
    pub fn values_of_query(&self, id: u32) -> &[f64] {
        &self.values[id as usize]
    }

    pub fn global_weights(&self) -> Option<&[f64]> {
        self.global_weights.as_deref()
    }

    /// Value of the (query, url) edge, if present.
    pub fn edge_value(&self, query: u32, url: u32) -> Option<f64> {
        let row = self.base.edges_of_query(query);
        let pos = row.binary_search_by_key(&url, |&(d, _)| d).ok()?;
        Some(self.values[query as usize][pos])
    }

    /// All edges as (query id, url id, value), ordered by (query, url).
    pub fn iter_values(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.base.iter_edges().zip(self.values.iter().flatten()).map(|((q, d, _), &v)| (q, d, v))
    }
}

/// Compute per-edge values under `model`. Totals default to the graph's
/// own query and URL counts unless overridden.
pub fn weigh_edges(
    base: Arc<BipartiteClickGraph>,
    model: WeightModel,
    totals: TotalsOverride,
) -> Result<WeightedGraph, WeightError> {
    let profile = base.degree_profile();
    let q_total = totals.q_total.unwrap_or(base.query_count() as u64);
    let u_total = totals.u_total.unwrap_or(base.url_count() as u64);

    let global_weights = match model {
        WeightModel::Uf => None,
        WeightModel::UfIqf | WeightModel::UfwIqf => {
            let max = profile.q_of_d.iter().copied().max().unwrap_or(0);
            if q_total < u64::from(max) {
                return Err(WeightError::TotalTooSmall {
                    which: "q_total",
                    total: q_total,
                    max_count: max,
                });
            }
            Some(iqf(profile, q_total))
        }
        WeightModel::UfwIuf => {
            let max = profile.u_of_d.iter().copied().max().unwrap_or(0);
            if u_total < u64::from(max) {
                return Err(WeightError::TotalTooSmall {
                    which: "u_total",
                    total: u_total,
                    max_count: max,
                });
            }
            Some(iuf(profile, u_total))
        }
    };

    let values: Vec<Vec<f64>> = (0..base.query_count() as u32)
        .into_par_iter()
        .map(|q| {
            let edges = base.edges_of_query(q);
            match model {
                WeightModel::Uf => edges.iter().map(|&(_, uf)| f64::from(uf)).collect(),
                WeightModel::UfIqf => {
                    let g = global_weights.as_ref().unwrap();
                    edges.iter().map(|&(d, uf)| f64::from(uf) * g[d as usize]).collect()
                }
                WeightModel::UfwIqf | WeightModel::UfwIuf => {
                    let g = global_weights.as_ref().unwrap();
                    let s: u64 = edges.iter().map(|&(_, uf)| u64::from(uf)).sum();
                    edges
                        .iter()
                        .map(|&(d, uf)| {
                            g[d as usize] / (E + s as f64 / f64::from(uf)).ln()
                        })
                        .collect()
                }
            }
        })
        .collect();

    Ok(WeightedGraph { base, model, values, global_weights, q_total, u_total })
}

/// Write `query \t url \t value` rows, values with 6 significant
/// digits, preceded by a comment naming the model and totals used.
pub fn write_weight_tsv<W: Write>(w: &WeightedGraph, mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "# clickgraph weights v1 model={} q_total={} u_total={}",
        w.model(),
        w.q_total(),
        w.u_total()
    )?;
    for (q, d, v) in w.iter_values() {
        writeln!(out, "{}\t{}\t{}", w.base.query_name(q), w.base.url_name(d), fmt_sig(v, 6))?;
    }
    out.flush()
}
