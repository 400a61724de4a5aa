//! Toolkit for query representation on user click graphs.
//!
//! The pipeline goes: raw search-engine logs are parsed and cleaned
//! ([`ingest`]), deduplicated click triples become a sparse bipartite
//! query-URL graph ([`graph`]), edges are weighted under one of four
//! models ([`weighting`]), and the row-normalized transition matrices
//! answer similar-query requests by cosine, generalized Jaccard, or
//! personalized PageRank ([`similarity`]). Result quality is scored
//! against a directory-path catalog ([`evaluation`]).

pub mod cli;
pub mod evaluation;
pub mod fixture;
pub mod graph;
pub mod ingest;
pub mod powerlaw;
pub mod similarity;
pub mod weighting;

pub use graph::{build_graph, BipartiteClickGraph, UrlDegreeProfile};
pub use ingest::{CleaningConfig, ClickRecord, IngestStats, UfTriple};
pub use powerlaw::PowerLawFit;
pub use similarity::{PprParams, SimMethod, SimilarityResult, TransitionMatrices};
pub use weighting::{WeightModel, WeightedGraph};

/// Format with `sig` significant digits, fixed-point. Large magnitudes
/// keep all their integer digits rather than switching to scientific
/// notation; artifact files stay plain TSV either way.
pub fn fmt_sig(x: f64, sig: u32) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod fmt_tests {
    use super::fmt_sig;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_sig(16.094379, 6), "16.0944");
        assert_eq!(fmt_sig(0.44444444, 6), "0.444444");
        assert_eq!(fmt_sig(0.000123456789, 6), "0.000123457");
        assert_eq!(fmt_sig(1.0, 6), "1.00000");
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(-2.5, 2), "-2.5");
        assert_eq!(fmt_sig(1234567.0, 6), "1234567");
    }
}
