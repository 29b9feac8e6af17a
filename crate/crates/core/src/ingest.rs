//! Corpus ingest, the cleaned per-year store, and summary statistics.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, NegationLexicon};
use crate::output::write_atomic;
use crate::textpipe::{clean_text, match_lexicon, MatchMode, TokenStream};

/// One dated document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicySnapshot {
    pub id: String,
    pub url: String,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// `.csv` means CSV, anything else JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl std::str::FromStr for CorpusFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "jsonl" | "json" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            _ => Err(format!("unknown corpus format {s:?} (expected jsonl|csv)")),
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    url: Option<String>,
    #[serde(default)]
    year: Option<i64>,
    #[serde(default)]
    category: Option<String>,
    #[serde(default)]
    text: Option<String>,
}

/// Counters from one `load_corpus` call.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub records_read: usize,
    pub records_skipped: usize,
    pub dropped_blank_text: usize,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub snapshots: Vec<PolicySnapshot>,
    pub report: LoadReport,
}

struct Loader<'a> {
    path: &'a Path,
    skip_bad: bool,
    seen: HashSet<String>,
    out: LoadedCorpus,
}

impl Loader<'_> {
    fn record_error(&mut self, line: usize, message: String) -> Result<()> {
        let err = Error::Record {
            path: self.path.to_path_buf(),
            line,
            message,
        };
        if !self.skip_bad {
            return Err(err);
        }
        warn!("skipping record: {err}");
        self.out.report.records_skipped += 1;
        self.out.report.errors.push(err.to_string());
        Ok(())
    }

    fn accept(&mut self, index: usize, line: usize, raw: RawRecord) -> Result<()> {
        self.out.report.records_read += 1;
        let Some(year) = raw.year else {
            return self.record_error(line, "missing field \"year\"".into());
        };
        let Some(text) = raw.text else {
            return self.record_error(line, "missing field \"text\"".into());
        };
        let year = match i32::try_from(year) {
            Ok(y) if y > 0 => y,
            _ => return self.record_error(line, format!("year {year} is not a positive integer")),
        };
        if text.trim().is_empty() {
            self.out.report.dropped_blank_text += 1;
            return Ok(());
        }
        let id = raw.id.unwrap_or_else(|| index.to_string());
        if !self.seen.insert(id.clone()) {
            return self.record_error(line, format!("duplicate snapshot id {id:?}"));
        }
        self.out.snapshots.push(PolicySnapshot {
            id,
            url: raw.url.unwrap_or_default(),
            year,
            category: raw.category.filter(|c| !c.is_empty()),
            text,
        });
        Ok(())
    }
}

/// Read a JSONL or CSV corpus. Record order is preserved; a record without
/// an `id` gets its zero-based row index. Bad records abort the load unless
/// `skip_bad` is set, in which case they are counted and reported.
pub fn load_corpus(path: &Path, format: CorpusFormat, skip_bad: bool) -> Result<LoadedCorpus> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut loader = Loader {
        path,
        skip_bad,
        seen: HashSet::new(),
        out: LoadedCorpus {
            snapshots: Vec::new(),
            report: LoadReport::default(),
        },
    };
    match format {
        CorpusFormat::Jsonl => {
            let mut index = 0;
            for (n, line) in BufReader::new(file).lines().enumerate() {
                let line_no = n + 1;
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<RawRecord>(&line) {
                    Ok(raw) => loader.accept(index, line_no, raw)?,
                    Err(e) => {
                        loader.out.report.records_read += 1;
                        loader.record_error(line_no, e.to_string())?
                    }
                }
                index += 1;
            }
        }
        CorpusFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(file);
            let headers = rdr.headers()?.clone();
            let has_text = headers.iter().any(|h| h == "text");
            for (index, rec) in rdr.records().enumerate() {
                let rec = match rec {
                    Ok(r) => r,
                    Err(e) => {
                        let line = e.position().map_or(0, |p| p.line() as usize);
                        if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                            return Err(e.into());
                        }
                        loader.out.report.records_read += 1;
                        loader.record_error(line, e.to_string())?;
                        continue;
                    }
                };
                let line = rec.position().map_or(0, |p| p.line() as usize);
                match rec.deserialize::<RawRecord>(Some(&headers)) {
                    Ok(mut raw) => {
                        // csv reads an empty cell as None; an empty text
                        // column is blank text, not a missing one.
                        if has_text && raw.text.is_none() {
                            raw.text = Some(String::new());
                        }
                        loader.accept(index, line, raw)?
                    }
                    Err(e) => {
                        loader.out.report.records_read += 1;
                        loader.record_error(line, e.to_string())?
                    }
                }
            }
        }
    }
    Ok(loader.out)
}

/// Write snapshots in the format `load_corpus` reads.
pub fn write_corpus(path: &Path, snapshots: &[PolicySnapshot], format: CorpusFormat) -> Result<()> {
    let bytes = match format {
        CorpusFormat::Jsonl => {
            let mut buf = Vec::new();
            for s in snapshots {
                serde_json::to_writer(&mut buf, s)?;
                buf.push(b'\n');
            }
            buf
        }
        CorpusFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .quote_style(csv::QuoteStyle::NonNumeric)
                .from_writer(Vec::new());
            w.write_record(["id", "url", "year", "category", "text"])?;
            for s in snapshots {
                w.write_record([
                    s.id.as_str(),
                    s.url.as_str(),
                    &s.year.to_string(),
                    s.category.as_deref().unwrap_or(""),
                    s.text.as_str(),
                ])?;
            }
            w.into_inner()
                .map_err(|e| Error::InvalidArgument(format!("csv flush: {e}")))?
        }
    };
    write_atomic(path, &bytes)
}

/// A snapshot after the cleaning pipeline; the raw text is not retained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StoredDoc {
    pub id: String,
    pub url: String,
    pub category: Option<String>,
    pub tokens: Vec<String>,
    pub sentences_in: usize,
    pub sentences_dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct YearCorpus {
    pub year: i32,
    pub docs: Vec<StoredDoc>,
    pub token_count: u64,
    pub unique_token_count: u64,
}

impl YearCorpus {
    fn new(year: i32, docs: Vec<StoredDoc>) -> Self {
        let token_count = docs.iter().map(|d| d.tokens.len() as u64).sum();
        let unique_token_count = docs
            .iter()
            .flat_map(|d| d.tokens.iter().map(String::as_str))
            .collect::<HashSet<&str>>()
            .len() as u64;
        YearCorpus {
            year,
            docs,
            token_count,
            unique_token_count,
        }
    }

    pub fn token_streams(&self) -> Vec<TokenStream> {
        self.docs
            .iter()
            .map(|d| TokenStream {
                snapshot_id: d.id.clone(),
                tokens: d.tokens.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CleaningCounts {
    pub snapshots: usize,
    pub sentences_in: usize,
    pub sentences_kept: usize,
    pub sentences_dropped: usize,
    pub tokens: u64,
}

/// Cleaned corpus split by year. Built once, then read-only.
#[derive(Debug, Clone, Default)]
pub struct CorpusStore {
    years: BTreeMap<i32, YearCorpus>,
}

impl CorpusStore {
    /// Clean every snapshot (in parallel; output order follows input order)
    /// and group by year.
    pub fn build(snapshots: &[PolicySnapshot], neg: &NegationLexicon, wildcards: bool) -> Self {
        let cleaned: Vec<(i32, StoredDoc)> = snapshots
            .par_iter()
            .map(|s| {
                let c = clean_text(&s.id, &s.text, neg, wildcards);
                (
                    s.year,
                    StoredDoc {
                        id: c.id,
                        url: s.url.clone(),
                        category: s.category.clone(),
                        tokens: c.tokens,
                        sentences_in: c.sentences_in,
                        sentences_dropped: c.sentences_dropped,
                    },
                )
            })
            .collect();
        let mut grouped: BTreeMap<i32, Vec<StoredDoc>> = BTreeMap::new();
        for (year, doc) in cleaned {
            grouped.entry(year).or_default().push(doc);
        }
        Self::from_docs(grouped)
    }

    pub fn from_docs(grouped: BTreeMap<i32, Vec<StoredDoc>>) -> Self {
        CorpusStore {
            years: grouped
                .into_iter()
                .map(|(y, docs)| (y, YearCorpus::new(y, docs)))
                .collect(),
        }
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.years.keys().copied()
    }

    pub fn year(&self, year: i32) -> Option<&YearCorpus> {
        self.years.get(&year)
    }

    pub fn iter(&self) -> impl Iterator<Item = &YearCorpus> {
        self.years.values()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    /// Keep only years in `first..=last`.
    pub fn restrict(mut self, first: i32, last: i32) -> Self {
        self.years.retain(|y, _| (first..=last).contains(y));
        self
    }

    pub fn cleaning_counts(&self, year: i32) -> Option<CleaningCounts> {
        let yc = self.years.get(&year)?;
        let sentences_in: usize = yc.docs.iter().map(|d| d.sentences_in).sum();
        let sentences_dropped: usize = yc.docs.iter().map(|d| d.sentences_dropped).sum();
        Some(CleaningCounts {
            snapshots: yc.docs.len(),
            sentences_in,
            sentences_kept: sentences_in - sentences_dropped,
            sentences_dropped,
            tokens: yc.token_count,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SummaryMode {
    Full,
    PiiFiltered,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummaryRow {
    pub year: i32,
    pub n_policies: u64,
    pub n_tokens: u64,
    pub n_unique_tokens: u64,
    pub mode: SummaryMode,
}

/// Token, unique-token and contributing-policy counts for one year of the
/// cleaned store, either over all tokens or over lexicon hits only.
pub fn summary_stats(
    store: &CorpusStore,
    year: i32,
    mode: SummaryMode,
    lexicon: Option<&Lexicon>,
    match_mode: MatchMode,
) -> Result<CorpusSummaryRow> {
    let yc = store.year(year).ok_or(Error::UnknownYear(year))?;
    let mut row = CorpusSummaryRow {
        year,
        n_policies: 0,
        n_tokens: 0,
        n_unique_tokens: 0,
        mode,
    };
    match mode {
        SummaryMode::Full => {
            row.n_tokens = yc.token_count;
            row.n_unique_tokens = yc.unique_token_count;
            row.n_policies = yc.docs.iter().filter(|d| !d.tokens.is_empty()).count() as u64;
        }
        SummaryMode::PiiFiltered => {
            let lexicon = lexicon.ok_or_else(|| {
                Error::InvalidArgument("pii-filtered summary needs a lexicon".into())
            })?;
            let mut unique = HashSet::new();
            for d in &yc.docs {
                let occ = match_lexicon(&d.id, &d.tokens, lexicon, match_mode);
                if occ.total > 0 {
                    row.n_policies += 1;
                }
                row.n_tokens += occ.total;
                unique.extend(occ.counts.into_keys());
            }
            row.n_unique_tokens = unique.len() as u64;
        }
    }
    Ok(row)
}

pub const TOKEN_STORE_HEADER: &str = "POLIS-TOKENS v1";

pub fn token_store_path(dir: &Path, year: i32) -> PathBuf {
    dir.join(format!("{year}.tokens"))
}

/// Write the cleaned token streams of `year` to `<dir>/<year>.tokens`.
///
/// Layout: the header line, then one line per document,
/// `<id>\t<token> <token> ...`. A year absent from the store yields a
/// header-only file.
pub fn persist_tokens(store: &CorpusStore, year: i32, dir: &Path) -> Result<PathBuf> {
    let path = token_store_path(dir, year);
    let mut out = String::from(TOKEN_STORE_HEADER);
    out.push('\n');
    if let Some(yc) = store.year(year) {
        for d in &yc.docs {
            if d.id.contains(['\t', '\n', '\r']) {
                return Err(Error::TokenStore {
                    path,
                    message: format!("snapshot id {:?} contains a tab or newline", d.id),
                });
            }
            out.push_str(&d.id);
            out.push('\t');
            out.push_str(&d.tokens.join(" "));
            out.push('\n');
        }
    }
    write_atomic(&path, out.as_bytes())?;
    Ok(path)
}

pub fn load_tokens(path: &Path) -> Result<Vec<TokenStream>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    if lines.next() != Some(TOKEN_STORE_HEADER) {
        return Err(Error::TokenStore {
            path: path.into(),
            message: format!("missing {TOKEN_STORE_HEADER:?} header"),
        });
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let (id, toks) = line.split_once('\t').ok_or_else(|| Error::TokenStore {
                path: path.into(),
                message: format!("line {}: no tab separator", i + 2),
            })?;
            Ok(TokenStream {
                snapshot_id: id.to_string(),
                tokens: toks.split(' ').filter(|t| !t.is_empty()).map(String::from).collect(),
            })
        })
        .collect()
}
