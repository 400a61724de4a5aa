//! The `clickgraph` executable: each pipeline stage is a subcommand
//! passing on-disk artifacts (edge files, weight TSVs, reports) to the
//! next, so one expensive ingest feeds many weighting/retrieval runs.
//!
//! Exit codes: 0 success, 1 runtime failure (I/O, bad data), 2 usage.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::evaluation::{run_evaluation, CategoryCatalog, EvalConfig};
use crate::fixture::{
    demo_triples, generate_log, mini_corpus, power_law_points, power_law_points_noisy,
    SyntheticLogSpec,
};
use crate::fmt_sig;
use crate::graph::{build_graph, compute_stats, BipartiteClickGraph};
use crate::ingest::{
    dedupe_user_frequency, filter_rare_queries, load_stopwords, normalize_query, open_log_reader,
    parse_log, write_edge_file, read_edge_file, CleaningConfig, IngestStats,
};
use crate::powerlaw::fit_power_law;
use crate::similarity::{normalize, personalized_pagerank, top_k_similar, PprParams, SimMethod};
use crate::weighting::{weigh_edges, write_weight_tsv, TotalsOverride, WeightModel, WeightedGraph};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations; exit 2.
    Usage(String),
    /// Failure while doing the work; exit 1.
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

macro_rules! impl_runtime_from {
    ($($ty:ty),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Runtime(anyhow::Error::new(e))
            }
        })*
    };
}

impl_runtime_from!(
    io::Error,
    serde_json::Error,
    crate::ingest::IngestError,
    crate::graph::GraphError,
    crate::weighting::WeightError,
    crate::similarity::SimilarityError,
    crate::evaluation::EvalError,
    crate::powerlaw::FitError,
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "clickgraph",
    version,
    about = "Click-graph query weighting, similarity search, and evaluation"
)]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output format for result tables
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Tsv)]
    pub format: OutputFormat,

    /// Seed for every randomized stage (sampling, synthetic fixtures)
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and clean search logs into a deduplicated edge file
    Ingest {
        /// Log files; `.gz` inputs are decompressed transparently
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        /// Edge file to write: `query \t url \t uf`
        #[arg(long)]
        out: PathBuf,
        /// Where to write parse counters as JSON (default: stdout)
        #[arg(long)]
        stats_out: Option<PathBuf>,
        /// Stop-word file, one word per line (default: built-in list)
        #[arg(long, conflicts_with = "no_stopwords")]
        stopwords: Option<PathBuf>,
        /// Keep stop words in queries
        #[arg(long)]
        no_stopwords: bool,
        /// Drop queries with fewer total user clicks than this
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        min_user_clicks: u32,
    },

    /// Graph statistics and degree-distribution power-law fits, as JSON
    Stats {
        /// Edge file from `ingest`
        edges: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Weight every edge under one model
    Weight {
        edges: PathBuf,
        #[arg(long)]
        model: WeightModel,
        /// Override the total query count used by IQF
        #[arg(long)]
        q_total: Option<u64>,
        /// Override the total user count used by IUF
        #[arg(long)]
        u_total: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Top-k queries most similar to one query
    Similar {
        edges: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value = "uf")]
        model: WeightModel,
        /// cosine, jaccard, jaccard-binary, or ppr
        #[arg(long, default_value = "cosine")]
        method: SimMethod,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        /// Restart probability; only used with `--method ppr`
        #[arg(long)]
        alpha: Option<f64>,
        /// Propagation steps; only used with `--method ppr`
        #[arg(long)]
        steps: Option<u32>,
        #[arg(long)]
        q_total: Option<u64>,
        #[arg(long)]
        u_total: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Personalized PageRank vector for one source query
    Ppr {
        edges: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = SimMethod::DEFAULT_PPR_ALPHA)]
        alpha: f64,
        #[arg(long, default_value_t = SimMethod::DEFAULT_PPR_STEPS)]
        steps: u32,
        #[arg(long, default_value = "uf")]
        model: WeightModel,
        #[arg(long)]
        q_total: Option<u64>,
        #[arg(long)]
        u_total: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Score similar-query quality against a category catalog
    Eval {
        edges: PathBuf,
        /// Catalog TSV: `query \t path1 | path2 | ...`
        #[arg(long)]
        catalog: PathBuf,
        /// Comma-separated weighting models to evaluate
        #[arg(long, value_delimiter = ',', default_values_t = WeightModel::ALL)]
        models: Vec<WeightModel>,
        /// Comma-separated retrieval methods to evaluate
        #[arg(long, value_delimiter = ',',
              default_values_t = [SimMethod::Cosine, SimMethod::Jaccard])]
        methods: Vec<SimMethod>,
        /// Queries drawn from the catalog per run
        #[arg(long, default_value_t = 500)]
        sample_size: usize,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
        k: u32,
        /// Restart probability for any `ppr` entry in --methods
        #[arg(long, default_value_t = SimMethod::DEFAULT_PPR_ALPHA)]
        alpha: f64,
        /// Propagation steps for any `ppr` entry in --methods
        #[arg(long, default_value_t = SimMethod::DEFAULT_PPR_STEPS)]
        steps: u32,
        #[arg(long)]
        q_total: Option<u64>,
        #[arg(long)]
        u_total: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Fit y = A * x^(-B) to a two-column points file
    FitPowerlaw {
        /// TSV of `x \t y` pairs; `#` comment lines are skipped
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Write test corpora with known expected outcomes
    GenFixture {
        #[command(subcommand)]
        kind: FixtureCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixtureCmd {
    /// Seven-edge, four-query demo graph from the weighting walkthrough
    Demo {
        #[arg(long)]
        out: PathBuf,
    },
    /// AOL-style synthetic log plus its exact expected parse outcome
    Log {
        #[arg(long)]
        out: PathBuf,
        /// Expected stats and edge totals, as JSON
        #[arg(long)]
        truth_out: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        lines: usize,
        #[arg(long, default_value_t = 500)]
        users: u32,
        #[arg(long, default_value_t = 2_000)]
        query_vocab: u32,
        #[arg(long, default_value_t = 1_500)]
        url_vocab: u32,
    },
    /// Sampled points from y = A * x^(-B)
    Powerlaw {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 31395.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 1.45)]
        exponent: f64,
        #[arg(long, default_value_t = 100)]
        count: u32,
        /// Multiplicative noise fraction; 0 keeps points exact
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
    },
    /// Twenty-query corpus with a matching category catalog
    MiniCorpus {
        #[arg(long)]
        edges_out: PathBuf,
        #[arg(long)]
        catalog_out: PathBuf,
    },
}

/// Parse argv and run; returns the process exit code. Split from
/// `main` so tests can drive it without spawning.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help to stdout and errors to stderr itself
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        // Ignore the error: the global pool can only be built once per
        // process, and a second configuration attempt is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let format = cli.format;
    let seed = cli.seed;
    match cli.command {
        Command::Ingest { logs, out, stats_out, stopwords, no_stopwords, min_user_clicks } => {
            cmd_ingest(&logs, &out, stats_out.as_deref(), stopwords.as_deref(), no_stopwords, min_user_clicks)
        }
        Command::Stats { edges, out } => cmd_stats(&edges, out.as_deref()),
        Command::Weight { edges, model, q_total, u_total, out } => {
            cmd_weight(&edges, model, q_total, u_total, out.as_deref(), format)
        }
        Command::Similar { edges, query, model, method, k, alpha, steps, q_total, u_total, out } => {
            cmd_similar(
                &edges, &query, model, method, k as usize, alpha, steps, q_total, u_total,
                out.as_deref(), format,
            )
        }
        Command::Ppr { edges, query, alpha, steps, model, q_total, u_total, out } => {
            cmd_ppr(&edges, &query, alpha, steps, model, q_total, u_total, out.as_deref(), format)
        }
        Command::Eval {
            edges, catalog, models, methods, sample_size, k, alpha, steps, q_total, u_total, out,
        } => cmd_eval(
            &edges, &catalog, &models, &methods, sample_size, k as usize, alpha, steps, q_total,
            u_total, out.as_deref(), format, seed,
        ),
        Command::FitPowerlaw { points, out } => cmd_fit_powerlaw(&points, out.as_deref(), format),
        Command::GenFixture { kind } => cmd_gen_fixture(kind, seed),
    }
}

fn out_writer(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => {
            let file =
                File::create(p).with_context(|| format!("create {}", p.display()))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn load_graph(path: &Path) -> Result<Arc<BipartiteClickGraph>, CliError> {
    let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
    let triples = read_edge_file(BufReader::new(file))?;
    Ok(Arc::new(build_graph(&triples)?))
}

/// Totals come from user flags, so a too-small override is a usage
/// error, not a runtime one.
fn weighted(
    base: &Arc<BipartiteClickGraph>,
    model: WeightModel,
    q_total: Option<u64>,
    u_total: Option<u64>,
) -> Result<WeightedGraph, CliError> {
    weigh_edges(Arc::clone(base), model, TotalsOverride { q_total, u_total })
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Look the query up verbatim first, then after normalization, so both
/// raw spellings ("NY Lottery") and edge-file keys work.
fn resolve_query(g: &BipartiteClickGraph, raw: &str) -> Result<u32, CliError> {
    if let Some(id) = g.query_id(raw) {
        return Ok(id);
    }
    let normalized = normalize_query(raw, &CleaningConfig::with_default_stopwords());
    g.query_id(&normalized).ok_or_else(|| {
        CliError::Runtime(anyhow::anyhow!("query `{raw}` not found in graph"))
    })
}

fn check_alpha(alpha: f64) -> Result<(), CliError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--alpha must be in (0, 1), got {alpha}")))
    }
}

fn cleaning_config(
    stopwords: Option<&Path>,
    no_stopwords: bool,
    min_user_clicks: u32,
) -> Result<CleaningConfig, CliError> {
    let mut config = if no_stopwords {
        CleaningConfig::default()
    } else {
        CleaningConfig::with_default_stopwords()
    };
    if let Some(path) = stopwords {
        config.stopwords = load_stopwords(path)
            .with_context(|| format!("read stop words from {}", path.display()))?;
    }
    config.min_user_clicks_per_query = min_user_clicks;
    Ok(config)
}

fn cmd_ingest(
    logs: &[PathBuf],
    out: &Path,
    stats_out: Option<&Path>,
    stopwords: Option<&Path>,
    no_stopwords: bool,
    min_user_clicks: u32,
) -> Result<(), CliError> {
    let config = cleaning_config(stopwords, no_stopwords, min_user_clicks)?;
    let mut stats = IngestStats::default();
    let mut records = Vec::new();
    for path in logs {
        let reader = open_log_reader(path)?;
        let mut parser = parse_log(reader, &config);
        for rec in &mut parser {
            records.push(rec?);
        }
        let file_stats = parser.stats();
        eprintln!(
            "{}: {} lines, {} records",
            path.display(),
            file_stats.total_lines,
            file_stats.records
        );
        stats.merge(&file_stats);
    }
    let triples = filter_rare_queries(dedupe_user_frequency(records), &config);
    let mut edge_out = out_writer(Some(out))?;
    write_edge_file(&mut edge_out, &triples)?;
    edge_out.flush()?;
    let mut stats_writer = out_writer(stats_out)?;
    write_json(&stats, &mut stats_writer)?;
    stats_writer.flush()?;
    Ok(())
}

fn cmd_stats(edges: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let graph = load_graph(edges)?;
    let stats = compute_stats(&graph);
    let mut w = out_writer(out)?;
    write_json(&stats, &mut w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct WeightRow<'a> {
    query: &'a str,
    url: &'a str,
    value: f64,
}

fn cmd_weight(
    edges: &Path,
    model: WeightModel,
    q_total: Option<u64>,
    u_total: Option<u64>,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<(), CliError> {
    let graph = load_graph(edges)?;
    let wg = weighted(&graph, model, q_total, u_total)?;
    let mut w = out_writer(out)?;
    match format {
        OutputFormat::Tsv => write_weight_tsv(&wg, &mut w)?,
        OutputFormat::Json => {
            let rows: Vec<WeightRow<'_>> = wg
                .iter_values()
                .map(|(q, d, value)| WeightRow {
                    query: graph.query_name(q),
                    url: graph.url_name(d),
                    value,
                })
                .collect();
            write_json(&rows, &mut w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SimilarRow<'a> {
    rank: usize,
    query: &'a str,
    score: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_similar(
    edges: &Path,
    query: &str,
    model: WeightModel,
    method: SimMethod,
    k: usize,
    alpha: Option<f64>,
    steps: Option<u32>,
    q_total: Option<u64>,
    u_total: Option<u64>,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<(), CliError> {
    let method = match method {
        SimMethod::Ppr { alpha: a, steps: s } => SimMethod::Ppr {
            alpha: alpha.unwrap_or(a),
            steps: steps.unwrap_or(s),
        },
        other => other,
    };
    if let SimMethod::Ppr { alpha, .. } = method {
        check_alpha(alpha)?;
    }
    let graph = load_graph(edges)?;
    let source = resolve_query(&graph, query)?;
    let wg = weighted(&graph, model, q_total, u_total)?;
    let t = normalize(&wg);
    let result = top_k_similar(&t, source, method, k)?;
    let mut w = out_writer(out)?;
    match format {
        OutputFormat::Tsv => {
            for (rank, &(id, score)) in result.entries.iter().enumerate() {
                writeln!(w, "{}\t{}\t{}", rank + 1, graph.query_name(id), fmt_sig(score, 6))?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<SimilarRow<'_>> = result
                .entries
                .iter()
                .enumerate()
                .map(|(rank, &(id, score))| SimilarRow {
                    rank: rank + 1,
                    query: graph.query_name(id),
                    score,
                })
                .collect();
            write_json(&rows, &mut w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PprRow<'a> {
    query: &'a str,
    score: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_ppr(
    edges: &Path,
    query: &str,
    alpha: f64,
    steps: u32,
    model: WeightModel,
    q_total: Option<u64>,
    u_total: Option<u64>,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<(), CliError> {
    check_alpha(alpha)?;
    let graph = load_graph(edges)?;
    let source = resolve_query(&graph, query)?;
    let wg = weighted(&graph, model, q_total, u_total)?;
    let t = normalize(&wg);
    let vector = personalized_pagerank(&t, PprParams { alpha, steps, source })?;
    let mut w = out_writer(out)?;
    match format {
        OutputFormat::Tsv => {
            for (id, &score) in vector.iter().enumerate() {
                if score > 0.0 {
                    writeln!(w, "{}\t{}", graph.query_name(id as u32), fmt_sig(score, 6))?;
                }
            }
        }
        OutputFormat::Json => {
            let rows: Vec<PprRow<'_>> = vector
                .iter()
                .enumerate()
                .filter(|&(_, &score)| score > 0.0)
                .map(|(id, &score)| PprRow { query: graph.query_name(id as u32), score })
                .collect();
            write_json(&rows, &mut w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_eval(
    edges: &Path,
    catalog: &Path,
    models: &[WeightModel],
    methods: &[SimMethod],
    sample_size: usize,
    k: usize,
    alpha: f64,
    steps: u32,
    q_total: Option<u64>,
    u_total: Option<u64>,
    out: Option<&Path>,
    format: OutputFormat,
    seed: u64,
) -> Result<(), CliError> {
    check_alpha(alpha)?;
    let methods: Vec<SimMethod> = methods
        .iter()
        .map(|&m| match m {
            SimMethod::Ppr { .. } => SimMethod::Ppr { alpha, steps },
            other => other,
        })
        .collect();
    let graph = load_graph(edges)?;
    let catalog = CategoryCatalog::load(catalog, &CleaningConfig::with_default_stopwords())?;
    let graphs: Vec<WeightedGraph> = models
        .iter()
        .map(|&m| weighted(&graph, m, q_total, u_total))
        .collect::<Result<_, _>>()?;
    let config = EvalConfig { sample_size, k, seed };
    let report = run_evaluation(&graphs, &methods, &catalog, &config)?;
    let mut w = out_writer(out)?;
    match format {
        OutputFormat::Tsv => write!(w, "{}", report.to_table_string())?,
        OutputFormat::Json => write_json(&report, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn read_points(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let file = File::open(path).with_context(|| format!("open {}", path.display()))?;
    let mut points = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let parsed = match (fields.next(), fields.next(), fields.next()) {
            (Some(x), Some(y), None) => x.parse::<f64>().ok().zip(y.parse::<f64>().ok()),
            _ => None,
        };
        let Some((x, y)) = parsed else {
            return Err(CliError::Runtime(anyhow::anyhow!(
                "{}:{}: expected `x \\t y`",
                path.display(),
                idx + 1
            )));
        };
        points.push((x, y));
    }
    Ok(points)
}

fn cmd_fit_powerlaw(
    points: &Path,
    out: Option<&Path>,
    format: OutputFormat,
) -> Result<(), CliError> {
    let fit = fit_power_law(&read_points(points)?)?;
    let mut w = out_writer(out)?;
    match format {
        OutputFormat::Tsv => {
            writeln!(w, "amplitude\t{}", fit.amplitude)?;
            writeln!(w, "exponent\t{}", fit.exponent)?;
            writeln!(w, "r_squared\t{}", fit.r_squared)?;
        }
        OutputFormat::Json => write_json(&fit, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct LogTruth {
    stats: IngestStats,
    /// Distinct (query, url) pairs after user dedup, before filtering.
    distinct_edges: usize,
    total_uf: u64,
}

fn cmd_gen_fixture(kind: FixtureCmd, seed: u64) -> Result<(), CliError> {
    match kind {
        FixtureCmd::Demo { out } => {
            let mut w = out_writer(Some(&out))?;
            write_edge_file(&mut w, &demo_triples())?;
            w.flush()?;
        }
        FixtureCmd::Log { out, truth_out, lines, users, query_vocab, url_vocab } => {
            let spec = SyntheticLogSpec {
                lines,
                users,
                query_vocab,
                url_vocab,
                seed,
                ..SyntheticLogSpec::default()
            };
            let mut w = out_writer(Some(&out))?;
            let truth = generate_log(&spec, &mut w)?;
            w.flush()?;
            if let Some(path) = truth_out {
                let summary = LogTruth {
                    stats: truth.stats,
                    distinct_edges: truth.triples.len(),
                    total_uf: truth.triples.iter().map(|t| u64::from(t.uf)).sum(),
                };
                let mut tw = out_writer(Some(&path))?;
                write_json(&summary, &mut tw)?;
                tw.flush()?;
            }
        }
        FixtureCmd::Powerlaw { out, amplitude, exponent, count, noise } => {
            let points = if noise > 0.0 {
                power_law_points_noisy(amplitude, exponent, count, noise, seed)
            } else {
                power_law_points(amplitude, exponent, count)
            };
            let mut w = out_writer(Some(&out))?;
            for (x, y) in points {
                writeln!(w, "{x}\t{y}")?;
            }
            w.flush()?;
        }
        FixtureCmd::MiniCorpus { edges_out, catalog_out } => {
            let (triples, catalog) = mini_corpus();
            let mut ew = out_writer(Some(&edges_out))?;
            write_edge_file(&mut ew, &triples)?;
            ew.flush()?;
            let mut cw = out_writer(Some(&catalog_out))?;
            catalog.write_tsv(&mut cw)?;
            cw.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_valid() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_similar_with_ppr_flags() {
        let cli = Cli::try_parse_from([
            "clickgraph", "similar", "edges.tsv", "--query", "haiti", "--method", "ppr",
            "--alpha", "0.3", "--steps", "2", "--k", "5",
        ])
        .unwrap();
        let Command::Similar { method, alpha, steps, k, .. } = cli.command else {
            panic!("wrong subcommand");
        };
        assert!(matches!(method, SimMethod::Ppr { .. }));
        assert_eq!((alpha, steps, k), (Some(0.3), Some(2), 5));
    }

    #[test]
    fn rejects_unknown_model() {
        let err =
            Cli::try_parse_from(["clickgraph", "weight", "e.tsv", "--model", "bogus"])
                .unwrap_err();
        assert!(err.use_stderr());
        assert!(err.to_string().contains("valid models"));
    }

    #[test]
    fn rejects_zero_k() {
        let err = Cli::try_parse_from([
            "clickgraph", "similar", "e.tsv", "--query", "q", "--k", "0",
        ])
        .unwrap_err();
        assert!(err.use_stderr());
    }

    #[test]
    fn eval_defaults_cover_all_models() {
        let cli = Cli::try_parse_from([
            "clickgraph", "eval", "e.tsv", "--catalog", "c.tsv",
        ])
        .unwrap();
        let Command::Eval { models, methods, sample_size, .. } = cli.command else {
            panic!("wrong subcommand");
        };
        assert_eq!(models, WeightModel::ALL.to_vec());
        assert_eq!(methods, vec![SimMethod::Cosine, SimMethod::Jaccard]);
        assert_eq!(sample_size, 500);
    }

    #[test]
    fn bad_alpha_is_usage_error() {
        assert!(matches!(check_alpha(1.0), Err(CliError::Usage(_))));
        assert!(matches!(check_alpha(0.0), Err(CliError::Usage(_))));
        assert!(check_alpha(0.5).is_ok());
    }
}
