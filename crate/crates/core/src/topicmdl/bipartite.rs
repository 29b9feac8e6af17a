use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::textpipe::{match_lexicon, MatchMode, TokenStream};

/// Which tokens become word nodes.
#[derive(Debug, Clone, Copy)]
pub enum Vocabulary<'a> {
    /// Every token whose corpus count reaches `min_count`.
    Full { min_count: u64 },
    /// Lexicon hits only.
    Lexicon(&'a Lexicon, MatchMode),
}

/// Word-document multigraph: `A(w, d)` is the count of word `w` in
/// document `d`. Zero entries are not stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteCountGraph {
    pub words: Vec<String>,
    pub docs: Vec<String>,
    word_edges: Vec<Vec<(usize, u64)>>,
    doc_edges: Vec<Vec<(usize, u64)>>,
    total: u64,
    log_fact_sum: f64,
}

/// ln(n!) by direct summation; counts here are small integers.
pub(crate) fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

impl BipartiteCountGraph {
    /// Build from `(word, doc, count)` triples; repeated pairs accumulate.
    pub fn from_entries(
        words: Vec<String>,
        docs: Vec<String>,
        entries: impl IntoIterator<Item = (usize, usize, u64)>,
    ) -> Self {
        let mut acc: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (w, d, c) in entries {
            assert!(w < words.len() && d < docs.len(), "entry out of range");
            if c > 0 {
                *acc.entry((w, d)).or_insert(0) += c;
            }
        }
        let mut word_edges = vec![Vec::new(); words.len()];
        let mut doc_edges = vec![Vec::new(); docs.len()];
        let mut total = 0;
        let mut cache: HashMap<u64, f64> = HashMap::new();
        let mut log_fact_sum = 0.0;
        for ((w, d), c) in acc {
            word_edges[w].push((d, c));
            doc_edges[d].push((w, c));
            total += c;
            log_fact_sum += *cache.entry(c).or_insert_with(|| ln_factorial(c));
        }
        BipartiteCountGraph {
            words,
            docs,
            word_edges,
            doc_edges,
            total,
            log_fact_sum,
        }
    }

    pub fn n_words(&self) -> usize {
        self.words.len()
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    /// E, the total multiplicity.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Sum over stored entries of ln A(w, d)!.
    pub fn log_factorial_sum(&self) -> f64 {
        self.log_fact_sum
    }

    pub fn word_edges(&self, w: usize) -> &[(usize, u64)] {
        &self.word_edges[w]
    }

    pub fn doc_edges(&self, d: usize) -> &[(usize, u64)] {
        &self.doc_edges[d]
    }

    pub fn word_count(&self, w: usize) -> u64 {
        self.word_edges[w].iter().map(|e| e.1).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.word_edges
            .iter()
            .enumerate()
            .flat_map(|(w, es)| es.iter().map(move |&(d, c)| (w, d, c)))
    }

    /// Documents with no vocabulary word.
    pub fn empty_docs(&self) -> Vec<usize> {
        (0..self.docs.len()).filter(|&d| self.doc_edges[d].is_empty()).collect()
    }
}

/// Word-document counts over the chosen vocabulary. Words are ordered
/// lexicographically; documents keep input order.
pub fn build_bipartite(docs: &[TokenStream], vocabulary: Vocabulary<'_>) -> Result<BipartiteCountGraph> {
    if docs.is_empty() {
        return Err(Error::Undefined("bipartite graph of an empty corpus".into()));
    }
    let per_doc: Vec<BTreeMap<String, u64>> = match vocabulary {
        Vocabulary::Full { min_count } => {
            let mut totals: HashMap<&str, u64> = HashMap::new();
            for d in docs {
                for t in &d.tokens {
                    *totals.entry(t.as_str()).or_insert(0) += 1;
                }
            }
            docs.iter()
                .map(|d| {
                    let mut m = BTreeMap::new();
                    for t in &d.tokens {
                        if totals[t.as_str()] >= min_count {
                            *m.entry(t.clone()).or_insert(0) += 1;
                        }
                    }
                    m
                })
                .collect()
        }
        Vocabulary::Lexicon(lex, mode) => docs
            .iter()
            .map(|d| match_lexicon(&d.snapshot_id, &d.tokens, lex, mode).counts)
            .collect(),
    };
    let mut words: Vec<String> = per_doc.iter().flat_map(|m| m.keys().cloned()).collect();
    words.sort_unstable();
    words.dedup();
    let index: HashMap<&str, usize> = words.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
    let entries: Vec<(usize, usize, u64)> = per_doc
        .iter()
        .enumerate()
        .flat_map(|(d, m)| m.iter().map(|(w, &c)| (index[w.as_str()], d, c)).collect::<Vec<_>>())
        .collect();
    let g = BipartiteCountGraph::from_entries(
        words.clone(),
        docs.iter().map(|d| d.snapshot_id.clone()).collect(),
        entries,
    );
    let empty = g.empty_docs();
    if !empty.is_empty() {
        log::warn!("{} document(s) contain no vocabulary word", empty.len());
    }
    Ok(g)
}
