//! Stage runner used by the command-line tool. Every stage reads the cleaned
//! store built once by [`Pipeline::load`] and writes its outputs under the
//! configured output directory.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::coocnet::{
    build_cooccurrence, compute_metrics, disparity_backbone, prune_isolates, rank_distribution, to_graphml, to_tsv,
    BackboneParams, CooccurrenceGraph, GraphMetrics, MetricOptions, RankKind,
};
use crate::error::{Error, Result};
use crate::ingest::{
    load_corpus, persist_tokens, summary_stats, CleaningCounts, CorpusFormat, CorpusStore, CorpusSummaryRow,
    LoadReport, PolicySnapshot, StoredDoc, SummaryMode,
};
use crate::lexicon::{load_lexicon, load_negation, Lexicon, NegationLexicon};
use crate::output::{csv_bytes, write_atomic};
use crate::plot::{render_line_plot, PlotOptions, Series};
use crate::seed::sub_seed;
use crate::textpipe::{match_lexicon, TokenStream};
use crate::topicmdl::{
    build_bipartite, extract_topics, fit_sbm, sample_policies, topic_prevalence, topic_report_json, ComplexityRecord,
    FitOptions, Prevalence, Topic, Vocabulary,
};
use crate::turbulence::{
    build_frequency_series, classify_all, frequency_rows, label_rows, select_series, term_group, Label,
    TermFrequencySeries, TurbulenceLabel,
};

/// Output encoding requested with `--export`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Export {
    #[default]
    Csv,
    Json,
    Tsv,
    Graphml,
    Svg,
}

impl std::str::FromStr for Export {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(Export::Csv),
            "json" => Ok(Export::Json),
            "tsv" => Ok(Export::Tsv),
            "graphml" => Ok(Export::Graphml),
            "svg" => Ok(Export::Svg),
            _ => Err(format!("unknown export format {s:?} (expected csv|json|tsv|graphml|svg)")),
        }
    }
}

/// Which turbulence labels to report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelFilter {
    #[default]
    All,
    Only(Label),
}

impl std::str::FromStr for LabelFilter {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "all" => Ok(LabelFilter::All),
            "rise" | "rising" => Ok(LabelFilter::Only(Label::Rising)),
            "fall" | "falling" => Ok(LabelFilter::Only(Label::Falling)),
            "stable" => Ok(LabelFilter::Only(Label::Stable)),
            "emerge" | "emergent" => Ok(LabelFilter::Only(Label::Emergent)),
            _ => Err(format!("unknown turbulence mode {s:?} (expected all|rise|fall|stable|emerge)")),
        }
    }
}

/// What the `plot` stage draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotKind {
    #[default]
    Freq,
    Complexity,
    Prevalence,
    Degree,
}

impl std::str::FromStr for PlotKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "freq" => Ok(PlotKind::Freq),
            "complexity" => Ok(PlotKind::Complexity),
            "prevalence" => Ok(PlotKind::Prevalence),
            "degree" => Ok(PlotKind::Degree),
            _ => Err(format!("unknown plot {s:?} (expected freq|complexity|prevalence|degree)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct YearReport {
    pub year: i32,
    pub snapshots: usize,
    pub sentences_in: usize,
    pub sentences_kept: usize,
    pub sentences_dropped_by_negation: usize,
    pub tokens: u64,
    pub lexicon_matches: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: Option<RunConfig>,
    pub lexicon_terms: usize,
    pub lexicon_warnings: Vec<String>,
    pub load: LoadReport,
    pub years: Vec<YearReport>,
    pub outputs: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub timings_ms: BTreeMap<String, u128>,
}

pub struct Pipeline {
    pub cfg: RunConfig,
    pub lexicon: Lexicon,
    pub negation: NegationLexicon,
    pub store: CorpusStore,
    report: RunReport,
    series: Option<Vec<TermFrequencySeries>>,
    topics: Option<(Vec<Topic>, Prevalence)>,
    complexity: Option<Vec<ComplexityRecord>>,
}

fn rel(out: &Path, path: &Path) -> String {
    path.strip_prefix(out)
        .unwrap_or(path)
        .to_string_lossy()
        .replace('\\', "/")
}

impl Pipeline {
    /// Read lexicons and every input file, clean, and restrict to the year
    /// range.
    pub fn load(cfg: RunConfig) -> Result<Self> {
        if cfg.inputs.is_empty() {
            return Err(Error::InvalidArgument("no input corpus given (--input)".into()));
        }
        let mut snapshots = Vec::new();
        let mut load = LoadReport::default();
        for path in &cfg.inputs {
            let format = cfg.format.unwrap_or_else(|| CorpusFormat::from_path(path));
            let loaded = load_corpus(path, format, cfg.skip_bad)?;
            load.records_read += loaded.report.records_read;
            load.records_skipped += loaded.report.records_skipped;
            load.dropped_blank_text += loaded.report.dropped_blank_text;
            load.errors.extend(loaded.report.errors);
            snapshots.extend(loaded.snapshots);
        }
        Self::from_snapshots(cfg, &snapshots, load)
    }

    pub fn from_snapshots(cfg: RunConfig, snapshots: &[PolicySnapshot], load: LoadReport) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = snapshots.iter().find(|s| !seen.insert(s.id.as_str())) {
            return Err(Error::DuplicateId(dup.id.clone()));
        }
        let lexicon = match &cfg.lexicon {
            Some(p) => load_lexicon(p)?,
            None => Lexicon::builtin_pii(),
        };
        let negation = match &cfg.negation {
            Some(p) => load_negation(p)?,
            None => NegationLexicon::builtin(),
        };
        let mut store = CorpusStore::build(snapshots, &negation, cfg.wildcard_negation);
        if let Some((a, b)) = cfg.years {
            store = store.restrict(a, b);
        }
        if store.is_empty() {
            return Err(Error::NoYears);
        }
        let years = store
            .years()
            .map(|y| {
                let c: CleaningCounts = store.cleaning_counts(y).unwrap_or_default();
                let matches = store
                    .year(y)
                    .map(|yc| {
                        yc.docs
                            .iter()
                            .map(|d| match_lexicon(&d.id, &d.tokens, &lexicon, cfg.match_mode).total)
                            .sum()
                    })
                    .unwrap_or(0);
                YearReport {
                    year: y,
                    snapshots: c.snapshots,
                    sentences_in: c.sentences_in,
                    sentences_kept: c.sentences_kept,
                    sentences_dropped_by_negation: c.sentences_dropped,
                    tokens: c.tokens,
                    lexicon_matches: matches,
                }
            })
            .collect();
        let report = RunReport {
            config: Some(cfg.clone()),
            lexicon_terms: lexicon.len(),
            lexicon_warnings: lexicon.warnings.clone(),
            load,
            years,
            ..Default::default()
        };
        Ok(Pipeline {
            cfg,
            lexicon,
            negation,
            store,
            report,
            series: None,
            topics: None,
            complexity: None,
        })
    }

    pub fn report(&self) -> &RunReport {
        &self.report
    }

    fn out_path(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.out_path(name);
        write_atomic(&path, bytes)?;
        self.report.outputs.push(rel(&self.cfg.out, &path));
        Ok(path)
    }

    fn warn(&mut self, msg: String) {
        warn!("{msg}");
        self.report.warnings.push(msg);
    }

    fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self)?;
        if self.cfg.timings {
            self.report
                .timings_ms
                .insert(stage.to_string(), start.elapsed().as_millis());
        }
        info!("{stage} done in {:.2?}", start.elapsed());
        Ok(out)
    }

    /// Token store per year plus a per-year cleaning table.
    pub fn ingest(&mut self) -> Result<()> {
        self.timed("ingest", |p| {
            let dir = p.out_path("tokens");
            let years: Vec<i32> = p.store.years().collect();
            for y in years {
                let path = persist_tokens(&p.store, y, &dir)?;
                p.report.outputs.push(rel(&p.cfg.out, &path));
            }
            let rows = p.report.years.clone();
            p.write("cleaning.csv", &csv_bytes(&rows)?)?;
            Ok(())
        })
    }

    /// Full and lexicon-filtered summary rows for each year.
    pub fn stats(&mut self, export: Export) -> Result<Vec<CorpusSummaryRow>> {
        self.timed("stats", |p| {
            let mut rows = Vec::new();
            for y in p.store.years() {
                rows.push(summary_stats(&p.store, y, SummaryMode::Full, None, p.cfg.match_mode)?);
                rows.push(summary_stats(
                    &p.store,
                    y,
                    SummaryMode::PiiFiltered,
                    Some(&p.lexicon),
                    p.cfg.match_mode,
                )?);
            }
            match export {
                Export::Json => p.write("summary.json", serde_json::to_string_pretty(&rows)?.as_bytes())?,
                _ => p.write("summary.csv", &csv_bytes(&rows)?)?,
            };
            Ok(rows)
        })
    }

    /// Frequency series for every lexicon term seen (computed once).
    pub fn series(&mut self) -> Result<&[TermFrequencySeries]> {
        if self.series.is_none() {
            let s = build_frequency_series(&self.store, &self.lexicon, self.cfg.match_mode, self.cfg.denominator)?;
            self.series = Some(s);
        }
        Ok(self.series.as_deref().unwrap_or_default())
    }

    /// Requested terms (group names expand), or all series when empty.
    fn selected(&mut self, terms: &[String]) -> Result<Vec<TermFrequencySeries>> {
        let mut wanted: Vec<String> = Vec::new();
        for t in terms {
            match term_group(t) {
                Some(g) => wanted.extend(g.iter().map(|s| s.to_string())),
                None => wanted.push(crate::lexicon::normalize_term(t)),
            }
        }
        let all = self.series()?.to_vec();
        if wanted.is_empty() {
            return Ok(all);
        }
        let refs: Vec<&str> = wanted.iter().map(String::as_str).collect();
        let (found, missing) = select_series(&all, &refs);
        let found: Vec<TermFrequencySeries> = found.into_iter().cloned().collect();
        for m in missing {
            self.warn(format!("no frequency series for term {m:?}"));
        }
        Ok(found)
    }

    pub fn freq(&mut self, terms: &[String], export: Export) -> Result<Vec<TermFrequencySeries>> {
        self.timed("freq", |p| {
            let series = p.selected(terms)?;
            match export {
                Export::Json => {
                    p.write("frequencies.json", serde_json::to_string_pretty(&series)?.as_bytes())?;
                }
                Export::Svg => {
                    p.write("frequencies.csv", &csv_bytes(&frequency_rows(&series))?)?;
                    p.plot_series(&series, "frequencies.svg")?;
                }
                _ => {
                    p.write("frequencies.csv", &csv_bytes(&frequency_rows(&series))?)?;
                }
            }
            Ok(series)
        })
    }

    pub fn turbulence(&mut self, filter: LabelFilter, export: Export) -> Result<Vec<TurbulenceLabel>> {
        self.timed("turbulence", |p| {
            let params = p.cfg.turbulence;
            let labels: Vec<TurbulenceLabel> = p
                .series()?
                .iter()
                .flat_map(|s| classify_all(s, &params))
                .filter(|l| match filter {
                    LabelFilter::All => true,
                    LabelFilter::Only(k) => l.label == k,
                })
                .collect();
            match export {
                Export::Json => p.write("turbulence.json", serde_json::to_string_pretty(&labels)?.as_bytes())?,
                _ => p.write("turbulence.csv", &csv_bytes(&label_rows(&labels))?)?,
            };
            Ok(labels)
        })
    }

    fn year_graph(&self, year: i32) -> CooccurrenceGraph {
        let yc = self.store.year(year).expect("year from store");
        let occ: Vec<_> = yc
            .docs
            .iter()
            .map(|d| match_lexicon(&d.id, &d.tokens, &self.lexicon, self.cfg.match_mode))
            .collect();
        prune_isolates(&build_cooccurrence(Some(year), &occ))
    }

    /// Per-year co-occurrence graphs: metrics table, backbone at `alpha`,
    /// graph files and degree rank table.
    pub fn cooc(&mut self, export: Export) -> Result<Vec<GraphMetrics>> {
        self.timed("cooc", |p| {
            let params = BackboneParams::new(p.cfg.alpha)?;
            let opts = MetricOptions {
                seed: p.cfg.seed,
                runs: p.cfg.louvain_runs,
                weighted_q: p.cfg.weighted_q,
            };
            let years: Vec<i32> = p.store.years().collect();
            let graphs: Vec<CooccurrenceGraph> = years.par_iter().map(|&y| p.year_graph(y)).collect();
            let results: Vec<Result<Option<GraphMetrics>>> = graphs
                .par_iter()
                .zip(&years)
                .map(|(g, y)| {
                    if g.n_nodes() < 2 {
                        return Ok(None);
                    }
                    compute_metrics(g, &y.to_string(), &opts).map(Some)
                })
                .collect();
            let mut metrics = Vec::new();
            let mut ranks = Vec::new();
            for ((g, &y), r) in graphs.iter().zip(&years).zip(results) {
                match r? {
                    Some(m) => metrics.push(m),
                    None => p.warn(format!("{y}: co-occurrence graph has fewer than 2 nodes, no metrics")),
                }
                let backbone = disparity_backbone(g, params);
                let (ext, render): (&str, fn(&CooccurrenceGraph) -> String) = match export {
                    Export::Graphml => ("graphml", to_graphml),
                    _ => ("tsv", to_tsv),
                };
                p.write(&format!("cooc/{y}.{ext}"), render(g).as_bytes())?;
                p.write(&format!("cooc/{y}.backbone.{ext}"), render(&backbone).as_bytes())?;
                for kind in [RankKind::Degree, RankKind::Strength] {
                    for (rank, value) in rank_distribution(g, kind) {
                        ranks.push(RankRow {
                            year: y,
                            kind: match kind {
                                RankKind::Degree => "degree",
                                RankKind::Strength => "strength",
                            },
                            rank,
                            value,
                        });
                    }
                }
            }
            match export {
                Export::Json => p.write("cooc_metrics.json", serde_json::to_string_pretty(&metrics)?.as_bytes())?,
                _ => p.write("cooc_metrics.csv", &csv_bytes(&metrics)?)?,
            };
            p.write("cooc_ranks.csv", &csv_bytes(&ranks)?)?;
            Ok(metrics)
        })
    }

    /// Per-year sample of documents, in store order.
    fn sampled(&mut self, year: i32, label: &str) -> Result<Vec<TokenStream>> {
        let docs: Vec<StoredDoc> = self.store.year(year).map(|y| y.docs.clone()).unwrap_or_default();
        let (docs, warning) = sample_policies(&docs, self.cfg.sample, self.cfg.seed, &format!("{label}:{year}"))?;
        if let Some(w) = warning {
            self.warn(w);
        }
        Ok(docs
            .into_iter()
            .map(|d| TokenStream {
                snapshot_id: d.id,
                tokens: d.tokens,
            })
            .collect())
    }

    /// Topics over lexicon terms, fitted on the per-year samples pooled
    /// across all years, and their yearly prevalence.
    pub fn topics(&mut self) -> Result<(Vec<Topic>, Prevalence)> {
        if let Some(t) = &self.topics {
            return Ok(t.clone());
        }
        self.timed("topics", |p| {
            let years: Vec<i32> = p.store.years().collect();
            let mut docs = Vec::new();
            for &y in &years {
                docs.extend(p.sampled(y, "topics")?);
            }
            let graph = build_bipartite(&docs, Vocabulary::Lexicon(&p.lexicon, p.cfg.match_mode))?;
            let empty = graph.empty_docs().len();
            if empty > 0 {
                p.warn(format!("topics: {empty} document(s) contain no lexicon term"));
            }
            let fit = fit_sbm(&graph, sub_seed(p.cfg.seed, "sbm:topics"), &FitOptions::default())?;
            let topics = extract_topics(&fit.state, &graph);
            let mut year_counts: BTreeMap<i32, HashMap<String, u64>> = BTreeMap::new();
            for &y in &years {
                let counts = year_counts.entry(y).or_default();
                for d in &p.store.year(y).expect("year from store").docs {
                    for (t, c) in match_lexicon(&d.id, &d.tokens, &p.lexicon, p.cfg.match_mode).counts {
                        *counts.entry(t).or_insert(0) += c;
                    }
                }
            }
            let prevalence = topic_prevalence(&topics, &year_counts);
            for y in &prevalence.empty_years {
                p.warn(format!("{y}: no tokens from the topic vocabulary, shares set to 0"));
            }
            p.write("topics.json", topic_report_json(&topics)?.as_bytes())?;
            p.write("prevalence.csv", &csv_bytes(&prevalence.rows)?)?;
            p.topics = Some((topics.clone(), prevalence.clone()));
            Ok((topics, prevalence))
        })
    }

    /// Per-year MDL of the full-vocabulary block model on a sample of
    /// policies, against the text description length of the same sample.
    pub fn complexity(&mut self, export: Export) -> Result<Vec<ComplexityRecord>> {
        self.timed("complexity", |p| {
            let years: Vec<i32> = p.store.years().collect();
            let mut samples = Vec::new();
            for &y in &years {
                samples.push(p.sampled(y, "complexity")?);
            }
            let min_count = p.cfg.min_count;
            let seed = p.cfg.seed;
            let fits: Vec<Result<ComplexityRecord>> = years
                .par_iter()
                .zip(&samples)
                .map(|(&y, docs)| {
                    let g = build_bipartite(docs, Vocabulary::Full { min_count })?;
                    let fit = fit_sbm(&g, sub_seed(seed, &format!("sbm:{y}")), &FitOptions::default())?;
                    ComplexityRecord::new(y, g.total(), g.n_words() as u64, docs.len(), fit.state.dl_nats)
                })
                .collect();
            let mut records = Vec::new();
            for (y, r) in years.iter().zip(fits) {
                match r {
                    Ok(rec) => records.push(rec),
                    Err(e @ Error::Undefined(_)) => p.warn(format!("{y}: complexity skipped: {e}")),
                    Err(e) => return Err(e),
                }
            }
            match export {
                Export::Json => p.write("complexity.json", serde_json::to_string_pretty(&records)?.as_bytes())?,
                _ => p.write("complexity.csv", &csv_bytes(&records)?)?,
            };
            p.complexity = Some(records.clone());
            Ok(records)
        })
    }

    fn plot_series(&mut self, series: &[TermFrequencySeries], name: &str) -> Result<()> {
        let s: Vec<Series> = series
            .iter()
            .map(|s| Series {
                name: s.term.clone(),
                points: s.points.iter().map(|p| (p.year as f64, p.frequency)).collect(),
            })
            .collect();
        let opts = PlotOptions {
            title: "Relative term frequency".into(),
            y_label: "frequency".into(),
            ..Default::default()
        };
        self.render(&s, &opts, name)
    }

    fn render(&mut self, series: &[Series], opts: &PlotOptions, name: &str) -> Result<()> {
        let plot = render_line_plot(series, opts)?;
        for w in plot.warnings {
            self.warn(format!("{name}: {w}"));
        }
        self.write(name, plot.svg.as_bytes())?;
        Ok(())
    }

    /// Line charts. Frequency plots show the requested terms, or the eight
    /// most frequent terms when none are given.
    pub fn plot(&mut self, kind: PlotKind, terms: &[String], log_y: bool) -> Result<()> {
        self.timed("plot", |p| match kind {
            PlotKind::Freq => {
                let mut series = p.selected(terms)?;
                if terms.is_empty() {
                    series.sort_by(|a, b| {
                        let ta: u64 = a.points.iter().map(|x| x.count).sum();
                        let tb: u64 = b.points.iter().map(|x| x.count).sum();
                        tb.cmp(&ta).then_with(|| a.term.cmp(&b.term))
                    });
                    series.truncate(8);
                }
                let s: Vec<Series> = series
                    .iter()
                    .map(|s| Series {
                        name: s.term.clone(),
                        points: s.points.iter().map(|x| (x.year as f64, x.frequency)).collect(),
                    })
                    .collect();
                let opts = PlotOptions {
                    title: "Relative term frequency".into(),
                    y_label: "frequency".into(),
                    log_y,
                    ..Default::default()
                };
                p.render(&s, &opts, "plot_freq.svg")
            }
            PlotKind::Complexity => {
                let records = match p.complexity.clone() {
                    Some(r) => r,
                    None => p.complexity(Export::Csv)?,
                };
                let s = vec![Series {
                    name: "compression factor".into(),
                    points: records.iter().map(|r| (r.year as f64, r.compression_factor)).collect(),
                }];
                let opts = PlotOptions {
                    title: "Compression factor by year".into(),
                    y_label: "MDL / TDL".into(),
                    log_y,
                    ..Default::default()
                };
                p.render(&s, &opts, "plot_complexity.svg")
            }
            PlotKind::Prevalence => {
                let (topics, prevalence) = p.topics()?;
                let s: Vec<Series> = topics
                    .iter()
                    .map(|t| Series {
                        name: format!(
                            "topic {}: {}",
                            t.id,
                            t.words.iter().take(3).map(|w| w.word.as_str()).collect::<Vec<_>>().join(", ")
                        ),
                        points: prevalence
                            .rows
                            .iter()
                            .filter(|r| r.topic_id == t.id)
                            .map(|r| (r.year as f64, r.share))
                            .collect(),
                    })
                    .collect();
                let opts = PlotOptions {
                    title: "Topic prevalence".into(),
                    y_label: "share of vocabulary tokens".into(),
                    log_y,
                    ..Default::default()
                };
                p.render(&s, &opts, "plot_prevalence.svg")
            }
            PlotKind::Degree => {
                let years: Vec<i32> = p.store.years().collect();
                let mut s = Vec::new();
                for y in years {
                    let g = p.year_graph(y);
                    if g.n_nodes() < 2 {
                        continue;
                    }
                    s.push(Series {
                        name: y.to_string(),
                        points: rank_distribution(&g, RankKind::Degree)
                            .into_iter()
                            .map(|(r, d)| (r as f64, d as f64))
                            .collect(),
                    });
                }
                let opts = PlotOptions {
                    title: "Ranked degree distribution".into(),
                    x_label: "rank".into(),
                    y_label: "degree".into(),
                    log_y,
                    ..Default::default()
                };
                p.render(&s, &opts, "plot_degree.svg")
            }
        })
    }

    /// Write `<command>.report.json` and return the report.
    pub fn finish(mut self, command: &str) -> Result<RunReport> {
        self.report.command = command.to_string();
        let name = format!("{command}.report.json");
        self.report.outputs.push(name.clone());
        let json = serde_json::to_string_pretty(&self.report)?;
        write_atomic(&self.out_path(&name), json.as_bytes())?;
        Ok(self.report)
    }
}

#[derive(Debug, Serialize)]
struct RankRow {
    year: i32,
    kind: &'static str,
    rank: usize,
    value: u64,
}

/// Every stage in order, as the `all` command runs it.
pub fn run_all(cfg: RunConfig) -> Result<RunReport> {
    let mut p = Pipeline::load(cfg)?;
    p.ingest()?;
    p.stats(Export::Csv)?;
    p.freq(&[], Export::Csv)?;
    p.turbulence(LabelFilter::All, Export::Csv)?;
    p.cooc(Export::Tsv)?;
    p.topics()?;
    p.complexity(Export::Csv)?;
    for kind in [PlotKind::Freq, PlotKind::Complexity, PlotKind::Prevalence, PlotKind::Degree] {
        p.plot(kind, &[], false)?;
    }
    p.finish("all")
}
