//! PII term lexicon and negation lexicon.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::textpipe::tokenize;

pub const BUILTIN_PII: &str = include_str!("../data/pii_lexicon.txt");
pub const BUILTIN_NEGATION: &str = include_str!("../data/negation_lexicon.txt");

fn is_quote(c: char) -> bool {
    matches!(
        c,
        '\'' | '"' | '`' | '\u{2018}' | '\u{2019}' | '\u{201c}' | '\u{201d}'
    )
}

/// Lowercase, map typographic apostrophes to ASCII, strip surrounding
/// quotes, collapse inner whitespace. Idempotent.
pub fn normalize_term(raw: &str) -> String {
    let mut s = raw.trim();
    loop {
        let mut it = s.chars();
        match (it.next(), it.next_back()) {
            (Some(a), Some(b)) if is_quote(a) && is_quote(b) => s = it.as_str().trim(),
            _ => break,
        }
    }
    let mapped: String = s
        .chars()
        .map(|c| match c {
            '\u{2019}' | '\u{2018}' | '`' => '\'',
            _ => c,
        })
        .flat_map(char::to_lowercase)
        .collect();
    mapped.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Split one line of a lexicon file into raw entries. Accepts either a
/// single bare term or a comma-separated list of quoted terms.
fn split_entries(line: &str) -> Vec<String> {
    let trimmed = line.trim();
    if !trimmed.starts_with(is_quote) || !trimmed.contains(',') {
        return vec![trimmed.to_string()];
    }
    let chars: Vec<(usize, char)> = trimmed.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        if is_quote(chars[i].1) {
            // quote, spaces, comma, spaces, quote
            let mut j = i + 1;
            while j < chars.len() && chars[j].1.is_whitespace() {
                j += 1;
            }
            if j < chars.len() && chars[j].1 == ',' {
                j += 1;
                while j < chars.len() && chars[j].1.is_whitespace() {
                    j += 1;
                }
                if j < chars.len() && is_quote(chars[j].1) {
                    let end = chars[i].0 + chars[i].1.len_utf8();
                    out.push(trimmed[start..end].to_string());
                    start = chars[j].0;
                    i = j + 1;
                    continue;
                }
            }
        }
        i += 1;
    }
    let tail = trimmed[start..].trim_end_matches(',').trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
    out
}

fn read_entries(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .flat_map(split_entries)
        .collect()
}

/// Expand a parenthesized variant into both spellings:
/// "internet protocol (ip) address" gives "internet protocol address" and
/// "internet protocol ip address".
fn expand_parentheses(term: &str) -> Vec<String> {
    let (Some(open), Some(close)) = (term.find('('), term.find(')')) else {
        return vec![term.to_string()];
    };
    if close < open {
        return vec![term.to_string()];
    }
    let inner = &term[open + 1..close];
    let without = format!("{} {}", &term[..open], &term[close + 1..]);
    let inline = format!("{} {} {}", &term[..open], inner, &term[close + 1..]);
    [without, inline]
        .iter()
        .flat_map(|t| expand_parentheses(&normalize_term(t)))
        .collect()
}

/// Normalized term set with tokenizer-consistent phrase keys.
#[derive(Debug, Clone, Serialize)]
pub struct Lexicon {
    pub version: String,
    pub raw_entries: usize,
    terms: BTreeSet<String>,
    /// token -> term for entries that tokenize to one token.
    singles: HashMap<String, String>,
    /// token sequence -> term for every entry.
    sequences: HashMap<Vec<String>, String>,
    max_len: usize,
    pub warnings: Vec<String>,
}

impl Lexicon {
    pub fn from_entries<'a, I>(entries: I, source: &str) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut raw_entries = 0;
        let mut terms = BTreeSet::new();
        for raw in entries {
            raw_entries += 1;
            let norm = normalize_term(raw);
            if norm.is_empty() {
                continue;
            }
            terms.extend(expand_parentheses(&norm));
        }
        if terms.is_empty() {
            return Err(Error::EmptyLexicon(source.into()));
        }

        let mut warnings = Vec::new();
        let mut singles = HashMap::new();
        let mut sequences: HashMap<Vec<String>, String> = HashMap::new();
        let mut max_len = 0;
        // BTreeSet order makes collision resolution deterministic.
        for term in &terms {
            let toks = tokenize(term);
            if toks.is_empty() {
                warnings.push(format!("term {term:?} has no word characters"));
                continue;
            }
            if toks.len() == 1 {
                if toks[0] != *term {
                    warnings.push(format!(
                        "term {term:?} tokenizes to {:?}; matching on the token",
                        toks[0]
                    ));
                }
                singles.entry(toks[0].clone()).or_insert_with(|| term.clone());
            }
            max_len = max_len.max(toks.len());
            if let Some(prev) = sequences.get(&toks) {
                warnings.push(format!(
                    "term {term:?} has the same token sequence as {prev:?}"
                ));
            } else {
                sequences.insert(toks, term.clone());
            }
        }
        for w in &warnings {
            warn!("lexicon {source}: {w}");
        }

        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in terms.iter().flat_map(|t| t.bytes().chain([0])) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        Ok(Lexicon {
            version: format!("{source}#{h:016x}"),
            raw_entries,
            terms,
            singles,
            sequences,
            max_len,
            warnings,
        })
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let entries = read_entries(text);
        Self::from_entries(entries.iter().map(String::as_str), source)
    }

    pub fn builtin_pii() -> Self {
        Self::parse(BUILTIN_PII, "builtin:pii").expect("bundled lexicon is non-empty")
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    /// Entries with two or more tokens, keyed by token sequence.
    pub fn phrases(&self) -> BTreeMap<&str, &[String]> {
        self.sequences
            .iter()
            .filter(|(k, _)| k.len() >= 2)
            .map(|(k, v)| (v.as_str(), k.as_slice()))
            .collect()
    }

    pub fn single_token_term(&self, token: &str) -> Option<&str> {
        self.singles.get(token).map(String::as_str)
    }

    /// Longest entry that is a prefix of `tokens`, with its length.
    pub fn longest_match(&self, tokens: &[String]) -> Option<(&str, usize)> {
        let upper = self.max_len.min(tokens.len());
        (1..=upper)
            .rev()
            .find_map(|n| self.sequences.get(&tokens[..n]).map(|t| (t.as_str(), n)))
    }
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let entries = read_entries(&text);
    if entries.is_empty() {
        return Err(Error::EmptyLexicon(path.into()));
    }
    Lexicon::from_entries(entries.iter().map(String::as_str), &path.display().to_string())
}

/// Negation words: literal words and prefix wildcards (`in*`).
#[derive(Debug, Clone, Default, Serialize)]
pub struct NegationLexicon {
    pub literals: BTreeSet<String>,
    pub wildcard_prefixes: BTreeSet<String>,
}

impl NegationLexicon {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut lex = NegationLexicon::default();
        for raw in read_entries(text) {
            let norm = normalize_term(&raw);
            if let Some(prefix) = norm.strip_suffix('*') {
                if !prefix.is_empty() {
                    lex.wildcard_prefixes.insert(prefix.to_string());
                }
            } else if !norm.is_empty() {
                lex.literals.insert(norm);
            }
        }
        if lex.literals.is_empty() && lex.wildcard_prefixes.is_empty() {
            return Err(Error::EmptyLexicon(source.into()));
        }
        Ok(lex)
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_NEGATION, "builtin:negation").expect("bundled lexicon is non-empty")
    }
}

pub fn load_negation(path: &Path) -> Result<NegationLexicon> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    NegationLexicon::parse(&text, &path.display().to_string())
}
