use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::bipartite::BipartiteCountGraph;
use super::fit::SbmState;

/// Weights below this are left out of the topic report.
pub const REPORT_MIN_WEIGHT: f64 = 0.001;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicWord {
    pub word: String,
    pub count: u64,
    pub weight: f64,
}

/// One word block. Words are ordered by weight, heaviest first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Topic {
    pub id: usize,
    pub total: u64,
    pub words: Vec<TopicWord>,
}

impl Topic {
    pub fn weight_sum(&self) -> f64 {
        self.words.iter().map(|w| w.weight).sum()
    }

    /// Words that make it into the report.
    pub fn reported(&self) -> impl Iterator<Item = &TopicWord> {
        self.words.iter().filter(|w| w.weight >= REPORT_MIN_WEIGHT)
    }
}

/// One topic per non-empty word block, ordered by total count (descending).
/// Blocks whose words never occur are skipped.
pub fn extract_topics(state: &SbmState, graph: &BipartiteCountGraph) -> Vec<Topic> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); state.n_word_blocks];
    for (w, &b) in state.word_blocks.iter().enumerate() {
        members[b].push(w);
    }
    let mut topics: Vec<Topic> = members
        .into_iter()
        .filter_map(|ws| {
            let total: u64 = ws.iter().map(|&w| graph.word_count(w)).sum();
            if total == 0 {
                return None;
            }
            let mut words: Vec<TopicWord> = ws
                .iter()
                .filter(|&&w| graph.word_count(w) > 0)
                .map(|&w| {
                    let count = graph.word_count(w);
                    TopicWord {
                        word: graph.words[w].clone(),
                        count,
                        weight: count as f64 / total as f64,
                    }
                })
                .collect();
            words.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.word.cmp(&b.word)));
            Some(Topic { id: 0, total, words })
        })
        .collect();
    topics.sort_by(|a, b| {
        b.total
            .cmp(&a.total)
            .then_with(|| a.words[0].word.cmp(&b.words[0].word))
    });
    for (i, t) in topics.iter_mut().enumerate() {
        t.id = i;
    }
    topics
}

#[derive(Debug, Serialize)]
struct ReportWord<'a> {
    word: &'a str,
    weight: f64,
}

#[derive(Debug, Serialize)]
struct ReportTopic<'a> {
    topic_id: usize,
    words: Vec<ReportWord<'a>>,
}

/// JSON topic report with small weights omitted.
pub fn topic_report_json(topics: &[Topic]) -> crate::Result<String> {
    let report: Vec<ReportTopic> = topics
        .iter()
        .map(|t| ReportTopic {
            topic_id: t.id,
            words: t
                .reported()
                .map(|w| ReportWord {
                    word: &w.word,
                    weight: w.weight,
                })
                .collect(),
        })
        .collect();
    Ok(serde_json::to_string_pretty(&report)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrevalenceRow {
    pub year: i32,
    pub topic_id: usize,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Prevalence {
    pub rows: Vec<PrevalenceRow>,
    /// Years with no tokens from the model vocabulary; their shares are 0.
    pub empty_years: Vec<i32>,
}

/// Share of each topic among a year's model-vocabulary tokens.
pub fn topic_prevalence(topics: &[Topic], year_counts: &BTreeMap<i32, HashMap<String, u64>>) -> Prevalence {
    let owner: HashMap<&str, usize> = topics
        .iter()
        .flat_map(|t| t.words.iter().map(move |w| (w.word.as_str(), t.id)))
        .collect();
    let mut out = Prevalence::default();
    for (&year, counts) in year_counts {
        let mut per_topic = vec![0u64; topics.len()];
        for (word, &c) in counts {
            if let Some(&t) = owner.get(word.as_str()) {
                per_topic[t] += c;
            }
        }
        let total: u64 = per_topic.iter().sum();
        if total == 0 {
            out.empty_years.push(year);
        }
        for (i, t) in topics.iter().enumerate() {
            let share = if total == 0 {
                0.0
            } else {
                per_topic[i] as f64 / total as f64
            };
            out.rows.push(PrevalenceRow {
                year,
                topic_id: t.id,
                share,
            });
        }
    }
    out
}
