//! Parsing and cleaning of AOL-style search logs.
//!
//! A log line is `UserID \t Query \t QueryTime \t ItemRank \t ClickURL`.
//! Queries are lowercased, punctuation is replaced by spaces, stop words
//! are dropped and whitespace collapsed. Cleaned records are deduplicated
//! into (query, url, user-frequency) triples: the same query-URL pair by
//! the same user counts once.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Small built-in English stop-word list. Callers can replace it with a
/// file-backed list (one word per line) or clear it entirely.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "from", "has", "he", "in",
    "is", "it", "its", "of", "on", "or", "that", "the", "to", "was", "were", "will", "with",
];

/// One raw, tab-separated log line before any cleaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawLogLine {
    pub user_id: String,
    pub query: String,
    /// Preserved but unused downstream.
    pub timestamp: String,
    pub rank: Option<u32>,
    /// May be empty: the user clicked nothing for this impression.
    pub click_url: String,
}

/// One cleaned click: normalized query, lowercased URL, opaque user id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClickRecord {
    pub user_id: String,
    pub query: String,
    pub url: String,
}

/// A deduplicated edge: `uf` distinct users issued `query` and clicked `url`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UfTriple {
    pub query: String,
    pub url: String,
    pub uf: u32,
}

impl UfTriple {
    pub fn new(query: impl Into<String>, url: impl Into<String>, uf: u32) -> Self {
        Self { query: query.into(), url: url.into(), uf }
    }
}

/// Cleaning knobs: stop words, the punctuation class, and the rare-query
/// threshold (total user clicks a query needs to survive filtering).
#[derive(Debug, Clone)]
pub struct CleaningConfig {
    pub stopwords: HashSet<String>,
    pub min_user_clicks_per_query: u32,
    /// Characters replaced by a space during normalization.
    pub punctuation: HashSet<char>,
}

impl Default for CleaningConfig {
    /// Empty stop-word list, ASCII punctuation, threshold 4.
    fn default() -> Self {
        Self {
            stopwords: HashSet::new(),
            min_user_clicks_per_query: 4,
            punctuation: (0u8..128).map(char::from).filter(|c| c.is_ascii_punctuation()).collect(),
        }
    }
}

impl CleaningConfig {
    /// Default config with the built-in English stop-word list enabled.
    pub fn with_default_stopwords() -> Self {
        Self {
            stopwords: DEFAULT_STOPWORDS.iter().map(|w| w.to_string()).collect(),
            ..Self::default()
        }
    }
}

/// Load a stop-word file: one word per line, `#` comments and blanks skipped.
/// Words are lowercased so they match normalized query tokens.
pub fn load_stopwords(path: &Path) -> io::Result<HashSet<String>> {
    let reader = BufReader::new(File::open(path)?);
    let mut words = HashSet::new();
    for line in reader.lines() {
        let line = line?;
        let word = line.trim();
        if word.is_empty() || word.starts_with('#') {
            continue;
        }
        words.insert(word.to_lowercase());
    }
    Ok(words)
}

/// Counters accumulated while parsing; merges associatively across files.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub total_lines: u64,
    pub malformed_lines: u64,
    pub no_click_lines: u64,
    /// Lines whose query normalized to the empty string.
    pub empty_query_lines: u64,
    /// Click records yielded (raw click events, before user dedup).
    pub records: u64,
}

impl IngestStats {
    pub fn merge(&mut self, other: &IngestStats) {
        self.total_lines += other.total_lines;
        self.malformed_lines += other.malformed_lines;
        self.no_click_lines += other.no_click_lines;
        self.empty_query_lines += other.empty_query_lines;
        self.records += other.records;
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o failure at byte offset {offset}: {source}")]
    Io { offset: u64, source: io::Error },
    #[error("cannot open {path}: {source}")]
    OpenFile { path: PathBuf, source: io::Error },
    #[error("edge file line {line}: expected `query<TAB>url<TAB>uf`")]
    EdgeFormat { line: u64 },
    #[error("edge file line {line}: user frequency must be a positive integer")]
    EdgeValue { line: u64 },
}

/// Precompiled normalization state shared across lines.
struct Cleaner<'a> {
    ascii_punct: [bool; 128],
    config: &'a CleaningConfig,
}

impl<'a> Cleaner<'a> {
    fn new(config: &'a CleaningConfig) -> Self {
        let mut ascii_punct = [false; 128];
        for &c in &config.punctuation {
            if (c as u32) < 128 {
                ascii_punct[c as usize] = true;
            }
        }
        Self { ascii_punct, config }
    }

    fn is_punct(&self, c: char) -> bool {
        if (c as u32) < 128 {
            self.ascii_punct[c as usize]
        } else {
            self.config.punctuation.contains(&c)
        }
    }

    /// lowercase -> punctuation to spaces -> drop stop words -> single spaces.
    fn normalize(&self, raw: &str) -> String {
        let lowered = raw.to_lowercase();
        let mut spaced = String::with_capacity(lowered.len());
        for c in lowered.chars() {
            spaced.push(if self.is_punct(c) { ' ' } else { c });
        }
        let mut out = String::with_capacity(spaced.len());
        for token in spaced.split_whitespace() {
            if self.config.stopwords.contains(token) {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(token);
        }
        out
    }
}

/// Normalize a query string exactly as [`parse_log`] does. Idempotent.
pub fn normalize_query(raw: &str, config: &CleaningConfig) -> String {
    Cleaner::new(config).normalize(raw)
}

/// Streaming parser over one log source. Yields cleaned [`ClickRecord`]s;
/// malformed, no-click and empty-query lines are counted and skipped.
/// An i/o failure is yielded once (with its byte offset) and ends the stream.
pub struct LogParser<'a, R> {
    reader: R,
    cleaner: Cleaner<'a>,
    stats: IngestStats,
    byte_offset: u64,
    buf: Vec<u8>,
    at_first_line: bool,
    done: bool,
}

/// Parse one log source. A header line (first field `AnonID`/`UserID`,
/// case-insensitive) is skipped. Invalid UTF-8 falls back to Latin-1, so
/// arbitrary bytes never abort the stream.
pub fn parse_log<'a, R: BufRead>(reader: R, config: &'a CleaningConfig) -> LogParser<'a, R> {
    LogParser {
        reader,
        cleaner: Cleaner::new(config),
        stats: IngestStats::default(),
        byte_offset: 0,
        buf: Vec::new(),
        at_first_line: true,
        done: false,
    }
}

impl<R: BufRead> LogParser<'_, R> {
    /// Counters seen so far; complete once the iterator is exhausted.
    pub fn stats(&self) -> IngestStats {
        self.stats
    }
}

fn decode_line(bytes: &[u8]) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_string(),
        // Latin-1: every byte maps to the code point of the same value.
        Err(_) => bytes.iter().map(|&b| b as char).collect(),
    }
}

fn is_header(line: &str) -> bool {
    let first = line.split('\t').next().unwrap_or("");
    first.eq_ignore_ascii_case("anonid") || first.eq_ignore_ascii_case("userid")
}

impl<R: BufRead> Iterator for LogParser<'_, R> {
    type Item = Result<ClickRecord, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.done {
                return None;
            }
            self.buf.clear();
            let n = match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => {
                    self.done = true;
                    return None;
                }
                Ok(n) => n,
                Err(source) => {
                    self.done = true;
                    return Some(Err(IngestError::Io { offset: self.byte_offset, source }));
                }
            };
            self.byte_offset += n as u64;
            let mut end = self.buf.len();
            while end > 0 && (self.buf[end - 1] == b'\n' || self.buf[end - 1] == b'\r') {
                end -= 1;
            }
            let line = decode_line(&self.buf[..end]);
            self.stats.total_lines += 1;

            let first = std::mem::replace(&mut self.at_first_line, false);
            if first && is_header(&line) {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                self.stats.malformed_lines += 1;
                continue;
            }
            if fields[4].is_empty() {
                self.stats.no_click_lines += 1;
                continue;
            }
            let query = self.cleaner.normalize(fields[1]);
            if query.is_empty() {
                self.stats.empty_query_lines += 1;
                continue;
            }
            self.stats.records += 1;
            return Some(Ok(ClickRecord {
                user_id: fields[0].to_string(),
                query,
                url: fields[4].to_lowercase(),
            }));
        }
    }
}

/// Open a log file for reading, transparently decompressing `.gz`.
pub fn open_log_reader(path: &Path) -> Result<Box<dyn BufRead + Send>, IngestError> {
    let file = File::open(path)
        .map_err(|source| IngestError::OpenFile { path: path.to_path_buf(), source })?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz")) {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Count distinct users per (query, url) pair. Output is sorted by
/// (query, url); every triple has `uf >= 1`.
pub fn dedupe_user_frequency(
    records: impl IntoIterator<Item = ClickRecord>,
) -> Vec<UfTriple> {
    let mut users: HashMap<(String, String), HashSet<String>> = HashMap::new();
    for rec in records {
        users.entry((rec.query, rec.url)).or_default().insert(rec.user_id);
    }
    let mut triples: Vec<UfTriple> = users
        .into_iter()
        .map(|((query, url), ids)| UfTriple { query, url, uf: ids.len() as u32 })
        .collect();
    triples.sort();
    triples
}

/// Drop every triple of queries whose summed user frequency is below
/// `min_user_clicks_per_query`. Order is preserved.
pub fn filter_rare_queries(triples: Vec<UfTriple>, config: &CleaningConfig) -> Vec<UfTriple> {
    let threshold = u64::from(config.min_user_clicks_per_query.max(1));
    let mut totals: HashMap<&str, u64> = HashMap::new();
    for t in &triples {
        *totals.entry(t.query.as_str()).or_default() += u64::from(t.uf);
    }
    let keep: HashSet<String> = totals
        .into_iter()
        .filter(|&(_, sum)| sum >= threshold)
        .map(|(q, _)| q.to_string())
        .collect();
    triples.into_iter().filter(|t| keep.contains(&t.query)).collect()
}

/// Run the whole cleaning pipeline over several log files:
/// parse -> dedupe -> rare-query filter, with stats merged across files.
pub fn ingest_logs(
    paths: &[PathBuf],
    config: &CleaningConfig,
) -> Result<(Vec<UfTriple>, IngestStats), IngestError> {
    let mut stats = IngestStats::default();
    let mut records = Vec::new();
    for path in paths {
        let reader = open_log_reader(path)?;
        let mut parser = parse_log(reader, config);
        for rec in &mut parser {
            records.push(rec?);
        }
        stats.merge(&parser.stats());
    }
    let triples = filter_rare_queries(dedupe_user_frequency(records), config);
    Ok((triples, stats))
}

/// Write the edge file: `query \t url \t uf`, LF line endings, sorted by
/// (query, url) regardless of input order.
pub fn write_edge_file(mut w: impl Write, triples: &[UfTriple]) -> io::Result<()> {
    let mut sorted: Vec<&UfTriple> = triples.iter().collect();
    sorted.sort();
    for t in sorted {
        writeln!(w, "{}\t{}\t{}", t.query, t.url, t.uf)?;
    }
    Ok(())
}

/// Read an edge file produced by [`write_edge_file`] (or a snapshot edge
/// list; `#` comment lines are skipped).
pub fn read_edge_file(reader: impl BufRead) -> Result<Vec<UfTriple>, IngestError> {
    let mut triples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|source| IngestError::Io { offset: 0, source })?;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(query), Some(url), Some(uf), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(IngestError::EdgeFormat { line: line_no });
        };
        let uf: u32 = uf.parse().map_err(|_| IngestError::EdgeValue { line: line_no })?;
        if uf == 0 {
            return Err(IngestError::EdgeValue { line: line_no });
        }
        triples.push(UfTriple::new(query, url, uf));
    }
    Ok(triples)
}
