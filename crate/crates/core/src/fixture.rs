//! Built-in fixtures: the small demo graph, a synthetic log generator
//! that knows its own ground truth, power-law samples, and a miniature
//! corpus with a matching category catalog.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::evaluation::{CategoryCatalog, CategoryPath};
use crate::ingest::{IngestStats, UfTriple};

/// The 4-query, 3-URL demo graph used across tests and docs. URL d1 is
/// the popular hub, d2 is clicked from a single query, d3 sits between.
pub fn demo_triples() -> Vec<UfTriple> {
    vec![
        UfTriple::new("q1", "d1", 20),
        UfTriple::new("q2", "d1", 10),
        UfTriple::new("q2", "d2", 10),
        UfTriple::new("q3", "d1", 10),
        UfTriple::new("q3", "d3", 2),
        UfTriple::new("q4", "d1", 5),
        UfTriple::new("q4", "d3", 10),
    ]
}

/// Noise-free samples `(x, A * x^-B)` at x = 1..=count.
pub fn power_law_points(amplitude: f64, exponent: f64, count: u32) -> Vec<(f64, f64)> {
    (1..=count)
        .map(|x| (f64::from(x), amplitude * f64::from(x).powf(-exponent)))
        .collect()
}

/// Power-law samples with multiplicative noise uniform in
/// [1-noise, 1+noise].
pub fn power_law_points_noisy(
    amplitude: f64,
    exponent: f64,
    count: u32,
    noise: f64,
    seed: u64,
) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=count)
        .map(|x| {
            let x = f64::from(x);
            let factor = 1.0 + (rng.random::<f64>() * 2.0 - 1.0) * noise;
            (x, amplitude * x.powf(-exponent) * factor)
        })
        .collect()
}

/// Shape of a synthetic AOL-style log. Rates are per-mille so expected
/// counts stay exact integers in the ground truth.
#[derive(Debug, Clone)]
pub struct SyntheticLogSpec {
    pub lines: usize,
    pub users: u32,
    pub query_vocab: u32,
    pub url_vocab: u32,
    pub seed: u64,
    pub malformed_per_mille: u32,
    pub no_click_per_mille: u32,
    pub empty_query_per_mille: u32,
    pub header: bool,
}

impl Default for SyntheticLogSpec {
    fn default() -> Self {
        SyntheticLogSpec {
            lines: 10_000,
            users: 500,
            query_vocab: 2_000,
            url_vocab: 1_500,
            seed: 0,
            malformed_per_mille: 5,
            no_click_per_mille: 150,
            empty_query_per_mille: 10,
            header: true,
        }
    }
}

/// What the parser must reproduce from a generated log, computed while
/// writing it with plain per-line counting and a user set, independent
/// of the pipeline's grouping code. Valid when the log is parsed with
/// [`crate::ingest::CleaningConfig::with_default_stopwords`]: vocabulary
/// tokens avoid stop words, and the designated empty-query lines use
/// only stop words or punctuation.
#[derive(Debug, Clone)]
pub struct SyntheticTruth {
    pub stats: IngestStats,
    /// Expected deduplicated triples before rare-query filtering.
    pub triples: Vec<UfTriple>,
}

impl SyntheticTruth {
    /// Expected triples after dropping queries whose summed uf is below
    /// the threshold.
    pub fn filtered(&self, min_user_clicks: u32) -> Vec<UfTriple> {
        let threshold = u64::from(min_user_clicks.max(1));
        let mut sums: BTreeMap<&str, u64> = BTreeMap::new();
        for t in &self.triples {
            *sums.entry(&t.query).or_default() += u64::from(t.uf);
        }
        self.triples
            .iter()
            .filter(|t| sums[t.query.as_str()] >= threshold)
            .cloned()
            .collect()
    }
}

fn query_text(q: u32) -> String {
    match q % 3 {
        0 => format!("term{q:04}"),
        1 => format!("term{q:04} guide"),
        _ => format!("term{q:04} online store"),
    }
}

fn url_text(d: u32) -> String {
    format!("site{d:04}.example.com")
}

/// A raw spelling that normalizes back to `query_text(q)`.
fn raw_query(q: u32, style: u32) -> String {
    let canon = query_text(q);
    match style % 4 {
        0 => canon,
        1 => canon.to_uppercase(),
        2 => format!("{canon}!"),
        _ => {
            let mut chars = canon.chars();
            match chars.next() {
                Some(c) => c.to_uppercase().chain(chars).collect(),
                None => canon,
            }
        }
    }
}

/// Write a synthetic log and return its exact ground truth.
pub fn generate_log<W: Write>(spec: &SyntheticLogSpec, mut out: W) -> io::Result<SyntheticTruth> {
    assert!(spec.users >= 1 && spec.query_vocab >= 1 && spec.url_vocab >= 1);
    assert!(spec.malformed_per_mille + spec.no_click_per_mille + spec.empty_query_per_mille <= 1000);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut stats = IngestStats::default();
    let mut seen: BTreeSet<(u32, u32, u32)> = BTreeSet::new();

    if spec.header {
        writeln!(out, "AnonID\tQuery\tQueryTime\tItemRank\tClickURL")?;
        stats.total_lines += 1;
    }

    let pick_query = |rng: &mut ChaCha8Rng| -> u32 {
        // Quadratic skew: low ids come up often, the tail stays long.
        let u: f64 = rng.random();
        ((u * u * f64::from(spec.query_vocab)) as u32).min(spec.query_vocab - 1)
    };
    let pick_url = |rng: &mut ChaCha8Rng, q: u32| -> u32 {
        if spec.url_vocab > 10 && rng.random_range(0..100u32) < 12 {
            rng.random_range(0..10) // shared hub URLs
        } else {
            let slot = rng.random_range(0..4u32);
            q.wrapping_mul(31).wrapping_add(slot * 97) % spec.url_vocab
        }
    };

    for i in 0..spec.lines {
        stats.total_lines += 1;
        let roll = rng.random_range(0..1000u32);
        let user = rng.random_range(0..spec.users);
        let ts = format!(
            "2006-03-{:02} {:02}:{:02}:{:02}",
            rng.random_range(1..29u32),
            rng.random_range(0..24u32),
            rng.random_range(0..60u32),
            rng.random_range(0..60u32)
        );
        if roll < spec.malformed_per_mille {
            stats.malformed_lines += 1;
            if i % 2 == 0 {
                writeln!(out, "{user}\tbroken\t{ts}")?;
            } else {
                writeln!(out, "{user}\tbroken\t{ts}\t1\tsite.example\textra")?;
            }
            continue;
        }
        if roll < spec.malformed_per_mille + spec.no_click_per_mille {
            stats.no_click_lines += 1;
            let q = pick_query(&mut rng);
            let style = rng.random_range(0..4u32);
            writeln!(out, "{user}\t{}\t{ts}\t1\t", raw_query(q, style))?;
            continue;
        }
        if roll
            < spec.malformed_per_mille + spec.no_click_per_mille + spec.empty_query_per_mille
        {
            stats.empty_query_lines += 1;
            let junk = if i % 2 == 0 { "the of and" } else { "..." };
            writeln!(out, "{user}\t{junk}\t{ts}\t1\t{}", url_text(0))?;
            continue;
        }
        stats.records += 1;
        let q = pick_query(&mut rng);
        let d = pick_url(&mut rng, q);
        let style = rng.random_range(0..4u32);
        let rank = rng.random_range(1..=10u32);
        seen.insert((user, q, d));
        writeln!(out, "{user}\t{}\t{ts}\t{rank}\t{}", raw_query(q, style), url_text(d))?;
    }
    out.flush()?;

    let mut uf: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for &(_, q, d) in &seen {
        *uf.entry((q, d)).or_default() += 1;
    }
    let mut triples: Vec<UfTriple> = uf
        .into_iter()
        .map(|((q, d), n)| UfTriple::new(query_text(q), url_text(d), n))
        .collect();
    triples.sort();
    Ok(SyntheticTruth { stats, triples })
}

/// Twenty topical queries over shared URLs, plus a catalog entry for
/// each, small enough to trace by hand and rich enough that cluster
/// members actually retrieve one another.
pub fn mini_corpus() -> (Vec<UfTriple>, CategoryCatalog) {
    let triples = vec![
        UfTriple::new("weather", "www.yahoo.com", 10),
        UfTriple::new("weather", "weather.noaa.gov", 10),
        UfTriple::new("weather", "www.weather.com", 8),
        UfTriple::new("weather forecast", "weather.noaa.gov", 6),
        UfTriple::new("weather forecast", "www.weather.com", 7),
        UfTriple::new("local weather radar", "weather.noaa.gov", 4),
        UfTriple::new("local weather radar", "www.weather.com", 3),
        UfTriple::new("travel", "www.yahoo.com", 12),
        UfTriple::new("travel", "www.expedia.com", 9),
        UfTriple::new("travel", "www.mapquest.com", 3),
        UfTriple::new("cheap flights", "www.expedia.com", 8),
        UfTriple::new("cheap flights", "www.travelocity.com", 6),
        UfTriple::new("travel deals europe", "www.expedia.com", 4),
        UfTriple::new("travel deals europe", "www.travelocity.com", 3),
        UfTriple::new("map", "www.yahoo.com", 9),
        UfTriple::new("map", "www.mapquest.com", 11),
        UfTriple::new("driving directions", "www.mapquest.com", 7),
        UfTriple::new("haiti", "www.haiti.com", 9),
        UfTriple::new("haiti", "www.cia.gov", 6),
        UfTriple::new("haiti news", "www.haiti.com", 5),
        UfTriple::new("haiti news", "www.metropole.ht", 3),
        UfTriple::new("haiti history", "www.cia.gov", 4),
        UfTriple::new("haiti history", "en.wikipedia.org", 5),
        UfTriple::new("shiny cowbird", "en.wikipedia.org", 3),
        UfTriple::new("shiny cowbird", "birds.cornell.edu", 4),
        UfTriple::new("yellow finches map", "birds.cornell.edu", 3),
        UfTriple::new("yellow finches map", "www.audubon.org", 4),
        UfTriple::new("bird watching florida", "www.audubon.org", 5),
        UfTriple::new("bird watching florida", "www.myfwc.com", 4),
        UfTriple::new("lottery", "www.calottery.com", 8),
        UfTriple::new("lottery", "www.yahoo.com", 5),
        UfTriple::new("ca lottery results", "www.calottery.com", 6),
        UfTriple::new("wikipedia", "en.wikipedia.org", 15),
        UfTriple::new("wikipedia", "www.yahoo.com", 4),
        UfTriple::new("satire", "en.wikipedia.org", 5),
        UfTriple::new("fishing license", "www.myfwc.com", 6),
        UfTriple::new("konig wheels", "www.konigwheels.com", 5),
    ];

    let path = |s: &str| CategoryPath::parse(s).unwrap();
    let catalog = CategoryCatalog::from_entries([
        ("weather", vec![path("News > Weather")]),
        ("weather forecast", vec![path("News > Weather > Forecasts")]),
        ("local weather radar", vec![path("News > Weather > Radar")]),
        ("travel", vec![path("Recreation > Travel")]),
        ("cheap flights", vec![path("Recreation > Travel > Air")]),
        (
            "travel deals europe",
            vec![path("Recreation > Travel > Deals"), path("Regional > Europe")],
        ),
        ("map", vec![path("Reference > Maps")]),
        ("driving directions", vec![path("Reference > Maps > Directions")]),
        ("haiti", vec![path("Regional > Caribbean > Haiti > Guides-and-Directories")]),
        ("haiti news", vec![path("Regional > Caribbean > Haiti > News-and-Media")]),
        (
            "haiti history",
            vec![path("Society > History > By-Region > Caribbean > Haiti")],
        ),
        ("shiny cowbird", vec![path("Science > Biology > Birds > Cowbirds")]),
        ("yellow finches map", vec![path("Science > Biology > Birds > Finches")]),
        (
            "bird watching florida",
            vec![path("Recreation > Outdoors > Birding"), path("Regional > Florida")],
        ),
        ("lottery", vec![path("Games > Gambling > Lotteries")]),
        ("ca lottery results", vec![path("Games > Gambling > Lotteries > Results")]),
        ("wikipedia", vec![path("Reference > Encyclopedias")]),
        ("satire", vec![path("Arts > Literature > Satire")]),
        ("fishing license", vec![path("Recreation > Outdoors > Fishing")]),
        ("konig wheels", vec![path("Shopping > Vehicles > Parts")]),
    ]);
    (triples, catalog)
}
