//! Per-term frequency series and the rise / fall / stable / emergent rules.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::CorpusStore;
use crate::lexicon::Lexicon;
use crate::textpipe::{match_lexicon, MatchMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    /// All cleaned tokens of the year.
    #[default]
    Full,
    /// Lexicon hits of the year.
    Pii,
}

impl std::str::FromStr for Denominator {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "full" => Ok(Denominator::Full),
            "pii" => Ok(Denominator::Pii),
            _ => Err(format!("unknown denominator {s:?} (expected full|pii)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YearPoint {
    pub year: i32,
    pub count: u64,
    pub denominator: u64,
    pub frequency: f64,
}

impl YearPoint {
    pub fn new(year: i32, count: u64, denominator: u64) -> Self {
        let frequency = if count == 0 || denominator == 0 {
            0.0
        } else {
            count as f64 / denominator as f64
        };
        YearPoint {
            year,
            count,
            denominator,
            frequency,
        }
    }
}

/// Counts and relative frequencies of one term, years ascending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermFrequencySeries {
    pub term: String,
    pub denominator: Denominator,
    pub points: Vec<YearPoint>,
}

impl TermFrequencySeries {
    /// Build from `(year, count, denominator)` triples; sorts by year.
    pub fn from_counts(
        term: &str,
        denominator: Denominator,
        counts: impl IntoIterator<Item = (i32, u64, u64)>,
    ) -> Self {
        let mut points: Vec<YearPoint> = counts
            .into_iter()
            .map(|(y, c, d)| YearPoint::new(y, c, d))
            .collect();
        points.sort_by_key(|p| p.year);
        TermFrequencySeries {
            term: term.to_string(),
            denominator,
            points,
        }
    }

    pub fn get(&self, year: i32) -> Option<&YearPoint> {
        self.points
            .binary_search_by_key(&year, |p| p.year)
            .ok()
            .map(|i| &self.points[i])
    }

    /// Adjacent points whose years differ by exactly one.
    fn consecutive(&self) -> impl Iterator<Item = (&YearPoint, &YearPoint)> {
        self.points
            .windows(2)
            .filter(|w| w[1].year == w[0].year + 1)
            .map(|w| (&w[0], &w[1]))
    }

    fn window(&self, start: i32, end: i32) -> Vec<YearPoint> {
        self.points
            .iter()
            .filter(|p| (start..=end).contains(&p.year))
            .copied()
            .collect()
    }
}

/// One series per lexicon term that occurs at least once in any year.
/// Every store year is materialized, with zero counts where the term is
/// absent.
pub fn build_frequency_series(
    store: &CorpusStore,
    lexicon: &Lexicon,
    match_mode: MatchMode,
    denominator: Denominator,
) -> Result<Vec<TermFrequencySeries>> {
    if store.is_empty() {
        return Err(Error::NoYears);
    }
    let mut per_year: Vec<(i32, u64, HashMap<String, u64>)> = Vec::new();
    for yc in store.iter() {
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut hits = 0;
        for d in &yc.docs {
            let occ = match_lexicon(&d.id, &d.tokens, lexicon, match_mode);
            hits += occ.total;
            for (t, c) in occ.counts {
                *counts.entry(t).or_insert(0) += c;
            }
        }
        let denom = match denominator {
            Denominator::Full => yc.token_count,
            Denominator::Pii => hits,
        };
        per_year.push((yc.year, denom, counts));
    }
    let mut terms: Vec<&str> = per_year
        .iter()
        .flat_map(|(_, _, c)| c.keys().map(String::as_str))
        .collect();
    terms.sort_unstable();
    terms.dedup();
    Ok(terms
        .into_iter()
        .map(|term| {
            TermFrequencySeries::from_counts(
                term,
                denominator,
                per_year
                    .iter()
                    .map(|(y, d, c)| (*y, c.get(term).copied().unwrap_or(0), *d)),
            )
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Rising,
    Falling,
    Stable,
    Emergent,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Rising => "rising",
            Label::Falling => "falling",
            Label::Stable => "stable",
            Label::Emergent => "emergent",
        })
    }
}

/// How "change less than 2% over 20 years" is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityRule {
    /// |f(end) - f(start)| / f(start) between the window endpoints.
    #[default]
    Endpoint,
    /// (max - min) / min over every year of the window.
    Spread,
}

impl std::str::FromStr for StabilityRule {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "endpoint" => Ok(StabilityRule::Endpoint),
            "spread" => Ok(StabilityRule::Spread),
            _ => Err(format!("unknown stability rule {s:?} (expected endpoint|spread)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurbulenceParams {
    pub window_years: i32,
    pub factor: f64,
    pub drop: f64,
    pub span_years: i32,
    pub tolerance: f64,
    pub min_support: u64,
    pub min_count_emerge: u64,
    pub stability: StabilityRule,
}

impl Default for TurbulenceParams {
    fn default() -> Self {
        TurbulenceParams {
            window_years: 7,
            factor: 10.0,
            drop: 0.15,
            span_years: 20,
            tolerance: 0.02,
            min_support: 100,
            min_count_emerge: 20,
            stability: StabilityRule::Endpoint,
        }
    }
}

/// A label together with the points that justify it. `window` spans
/// `start.year..=end.year`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurbulenceLabel {
    pub term: String,
    pub label: Label,
    pub start: YearPoint,
    pub end: YearPoint,
    pub window: Vec<YearPoint>,
    pub params: String,
}

fn label(
    series: &TermFrequencySeries,
    kind: Label,
    start: YearPoint,
    end: YearPoint,
    params: String,
) -> TurbulenceLabel {
    TurbulenceLabel {
        term: series.term.clone(),
        label: kind,
        window: series.window(start.year, end.year),
        start,
        end,
        params,
    }
}

/// Rising: some `a < b` within `window_years` with `f(a) > 0`,
/// `f(b) > factor * f(a)` and `c(b) >= min_support`. The pair with the
/// largest ratio is reported (earliest on ties).
pub fn classify_rising(
    series: &TermFrequencySeries,
    window_years: i32,
    factor: f64,
    min_support: u64,
) -> Option<TurbulenceLabel> {
    let pts = &series.points;
    let mut best: Option<(f64, usize, usize)> = None;
    for (i, a) in pts.iter().enumerate() {
        if a.frequency <= 0.0 {
            continue;
        }
        for (j, b) in pts.iter().enumerate().skip(i + 1) {
            if b.year - a.year > window_years {
                break;
            }
            if b.count >= min_support && b.frequency > factor * a.frequency {
                let ratio = b.frequency / a.frequency;
                if best.is_none_or(|(r, _, _)| ratio > r) {
                    best = Some((ratio, i, j));
                }
            }
        }
    }
    best.map(|(_, i, j)| {
        label(
            series,
            Label::Rising,
            pts[i],
            pts[j],
            format!("window_years={window_years};factor={factor};min_support={min_support}"),
        )
    })
}

/// Falling: consecutive years `y, y+1` with `f(y) > 0`, `c(y) >= min_support`
/// and `f(y+1) < (1 - drop) * f(y)`. The steepest drop is reported.
pub fn classify_falling(
    series: &TermFrequencySeries,
    drop: f64,
    min_support: u64,
) -> Option<TurbulenceLabel> {
    let mut best: Option<(f64, &YearPoint, &YearPoint)> = None;
    for (a, b) in series.consecutive() {
        if a.frequency > 0.0 && a.count >= min_support && b.frequency < (1.0 - drop) * a.frequency
        {
            let rel = b.frequency / a.frequency;
            if best.is_none_or(|(r, _, _)| rel < r) {
                best = Some((rel, a, b));
            }
        }
    }
    best.map(|(_, a, b)| {
        label(
            series,
            Label::Falling,
            *a,
            *b,
            format!("drop={drop};min_support={min_support}"),
        )
    })
}

fn stability_change(window: &[YearPoint], rule: StabilityRule) -> Option<f64> {
    let first = window.first()?;
    let last = window.last()?;
    if first.frequency <= 0.0 || last.frequency <= 0.0 {
        return None;
    }
    match rule {
        StabilityRule::Endpoint => {
            Some((last.frequency - first.frequency).abs() / first.frequency)
        }
        StabilityRule::Spread => {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for p in window {
                lo = lo.min(p.frequency);
                hi = hi.max(p.frequency);
            }
            (lo > 0.0).then(|| (hi - lo) / lo)
        }
    }
}

/// Stable: a window of at least `span_years` with nonzero endpoints whose
/// relative change (per `rule`) is below `tolerance`. The window with the
/// smallest change is reported.
pub fn classify_stable(
    series: &TermFrequencySeries,
    span_years: i32,
    tolerance: f64,
    rule: StabilityRule,
) -> Option<TurbulenceLabel> {
    let pts = &series.points;
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[j].year - pts[i].year < span_years {
                continue;
            }
            if let Some(change) = stability_change(&pts[i..=j], rule) {
                if change < tolerance && best.is_none_or(|(c, _, _)| change < c) {
                    best = Some((change, i, j));
                }
            }
        }
    }
    let rule_name = match rule {
        StabilityRule::Endpoint => "endpoint",
        StabilityRule::Spread => "spread",
    };
    best.map(|(_, i, j)| {
        label(
            series,
            Label::Stable,
            pts[i],
            pts[j],
            format!("span_years={span_years};tolerance={tolerance};rule={rule_name}"),
        )
    })
}

/// Emergent: `c(y-1) = 0` and `c(y) >= min_count`; the first such year.
pub fn classify_emergent(series: &TermFrequencySeries, min_count: u64) -> Option<TurbulenceLabel> {
    series
        .consecutive()
        .find(|(a, b)| a.count == 0 && b.count >= min_count)
        .map(|(a, b)| {
            label(
                series,
                Label::Emergent,
                *a,
                *b,
                format!("min_count={min_count}"),
            )
        })
}

/// Every label the term earns under `params`; a term may carry several.
pub fn classify_all(series: &TermFrequencySeries, params: &TurbulenceParams) -> Vec<TurbulenceLabel> {
    [
        classify_rising(series, params.window_years, params.factor, params.min_support),
        classify_falling(series, params.drop, params.min_support),
        classify_stable(series, params.span_years, params.tolerance, params.stability),
        classify_emergent(series, params.min_count_emerge),
    ]
    .into_iter()
    .flatten()
    .collect()
}

/// Re-check a label's defining inequality from its stored evidence.
pub fn evidence_holds(l: &TurbulenceLabel, params: &TurbulenceParams) -> bool {
    let (a, b) = (&l.start, &l.end);
    let window_ok = l.window.first().map(|p| p.year) == Some(a.year)
        && l.window.last().map(|p| p.year) == Some(b.year);
    window_ok
        && match l.label {
            Label::Rising => {
                a.year < b.year
                    && b.year - a.year <= params.window_years
                    && a.frequency > 0.0
                    && b.frequency > params.factor * a.frequency
                    && b.frequency / a.frequency > params.factor
                    && b.count >= params.min_support
            }
            Label::Falling => {
                b.year == a.year + 1
                    && a.frequency > 0.0
                    && a.count >= params.min_support
                    && b.frequency < (1.0 - params.drop) * a.frequency
            }
            Label::Stable => {
                b.year - a.year >= params.span_years
                    && stability_change(&l.window, params.stability)
                        .is_some_and(|c| c < params.tolerance)
            }
            Label::Emergent => {
                b.year == a.year + 1 && a.count == 0 && b.count >= params.min_count_emerge
            }
        }
}

/// Series for `terms` in request order, plus the terms with no series.
pub fn select_series<'a>(
    all: &'a [TermFrequencySeries],
    terms: &[&str],
) -> (Vec<&'a TermFrequencySeries>, Vec<String>) {
    let index: BTreeMap<&str, &TermFrequencySeries> =
        all.iter().map(|s| (s.term.as_str(), s)).collect();
    let mut found = Vec::new();
    let mut missing = Vec::new();
    for t in terms {
        match index.get(t) {
            Some(s) => found.push(*s),
            None => missing.push(t.to_string()),
        }
    }
    (found, missing)
}

/// Built-in term groups for grouped queries.
pub fn term_group(name: &str) -> Option<&'static [&'static str]> {
    match name {
        "health" => Some(&[
            "health", "patient", "pharmacy", "medicine", "genetic", "diagnosis", "medical",
        ]),
        "insights" => Some(&["inferences", "predict", "profiling", "preferences", "interests"]),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyRow<'a> {
    pub term: &'a str,
    pub year: i32,
    pub count: u64,
    pub frequency: f64,
}

pub fn frequency_rows(series: &[TermFrequencySeries]) -> Vec<FrequencyRow<'_>> {
    series
        .iter()
        .flat_map(|s| {
            s.points.iter().map(move |p| FrequencyRow {
                term: &s.term,
                year: p.year,
                count: p.count,
                frequency: p.frequency,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelRow<'a> {
    pub term: &'a str,
    pub label: Label,
    pub evidence_start_year: i32,
    pub evidence_end_year: i32,
    pub f_start: f64,
    pub f_end: f64,
    pub params: &'a str,
}

pub fn label_rows(labels: &[TurbulenceLabel]) -> Vec<LabelRow<'_>> {
    labels
        .iter()
        .map(|l| LabelRow {
            term: &l.term,
            label: l.label,
            evidence_start_year: l.start.year,
            evidence_end_year: l.end.year,
            f_start: l.start.frequency,
            f_end: l.end.frequency,
            params: &l.params,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Series from (year, frequency) with a fixed denominator large enough
    /// that counts clear any support floor used here.
    fn freq_series(points: &[(i32, f64)]) -> TermFrequencySeries {
        let d = 1_000_000u64;
        TermFrequencySeries::from_counts(
            "t",
            Denominator::Full,
            points
                .iter()
                .map(|&(y, f)| (y, (f * d as f64).round() as u64, d)),
        )
    }

    #[test]
    fn ratio_and_zero() {
        let p = YearPoint::new(2000, 5, 100);
        assert_eq!(p.frequency, 0.05);
        assert_eq!(YearPoint::new(2000, 0, 0).frequency, 0.0);
    }

    #[test]
    fn rising_examples() {
        let s = freq_series(&[(2010, 0.001), (2016, 0.012)]);
        let l = classify_rising(&s, 7, 10.0, 100).unwrap();
        assert_eq!((l.start.year, l.end.year), (2010, 2016));

        let s = freq_series(&[(2010, 0.0), (2016, 0.012)]);
        assert!(classify_rising(&s, 7, 10.0, 100).is_none());

        let s = freq_series(&[(2008, 0.001), (2016, 0.011)]);
        assert!(classify_rising(&s, 7, 10.0, 100).is_none());
    }

    #[test]
    fn falling_examples() {
        let s = freq_series(&[(2000, 0.010), (2001, 0.008)]);
        assert!(classify_falling(&s, 0.15, 100).is_some());
        let s = freq_series(&[(2000, 0.010), (2001, 0.0086)]);
        assert!(classify_falling(&s, 0.15, 100).is_none());
        let s = TermFrequencySeries::from_counts(
            "t",
            Denominator::Full,
            [(2000, 3, 300), (2001, 1, 300)],
        );
        assert!(classify_falling(&s, 0.15, 100).is_none());
    }

    #[test]
    fn falling_needs_adjacent_years() {
        let s = freq_series(&[(2000, 0.010), (2002, 0.001)]);
        assert!(classify_falling(&s, 0.15, 100).is_none());
    }

    #[test]
    fn stable_examples() {
        let s = freq_series(&[(1999, 0.0100), (2019, 0.0101)]);
        assert!(classify_stable(&s, 20, 0.02, StabilityRule::Endpoint).is_some());
        let s = freq_series(&[(1999, 0.0100), (2019, 0.0103)]);
        assert!(classify_stable(&s, 20, 0.02, StabilityRule::Endpoint).is_none());
        let years: Vec<(i32, f64)> = (2005..=2019).map(|y| (y, 0.01)).collect();
        assert!(classify_stable(&freq_series(&years), 20, 0.02, StabilityRule::Endpoint).is_none());
    }

    #[test]
    fn spread_rule_is_stricter() {
        let s = freq_series(&[(1999, 0.0100), (2009, 0.0200), (2019, 0.0100)]);
        assert!(classify_stable(&s, 20, 0.02, StabilityRule::Endpoint).is_some());
        assert!(classify_stable(&s, 20, 0.02, StabilityRule::Spread).is_none());
    }

    #[test]
    fn emergent_examples() {
        let mk = |a: u64, b: u64| {
            TermFrequencySeries::from_counts("t", Denominator::Full, [(2015, a, 1000), (2016, b, 1000)])
        };
        assert_eq!(classify_emergent(&mk(0, 20), 20).unwrap().end.year, 2016);
        assert!(classify_emergent(&mk(0, 19), 20).is_none());
        assert!(classify_emergent(&mk(1, 500), 20).is_none());
    }

    #[test]
    fn select_reports_missing() {
        let all = vec![freq_series(&[(2000, 0.1)])];
        let (found, missing) = select_series(&all, &["t", "nonexistent"]);
        assert_eq!(found.len(), 1);
        assert_eq!(missing, ["nonexistent"]);
    }
}
