//! Cleaning pipeline: sentence segmentation, negation filtering,
//! tokenization, and lexicon matching.
//!
//! Stage order is fixed: segment, drop negated sentences, tokenize and
//! lowercase the survivors.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::lexicon::{Lexicon, NegationLexicon};

/// Word characters: Unicode letters and digits plus underscore.
#[inline]
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_apostrophe(c: char) -> bool {
    matches!(c, '\'' | '\u{2019}' | '\u{2018}')
}

/// Maximal runs of word characters, lowercased, in order.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if is_word_char(c) {
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// A token sequence tied to the snapshot it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream {
    pub snapshot_id: String,
    pub tokens: Vec<String>,
}

/// One segmentation unit. `span` indexes into the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence<'a> {
    pub index: usize,
    pub span: Range<usize>,
    pub text: &'a str,
}

struct Segmenter<'a> {
    text: &'a str,
    out: Vec<Sentence<'a>>,
    open: Option<(usize, usize)>,
}

impl<'a> Segmenter<'a> {
    fn push(&mut self, start: usize, end: usize) {
        let index = self.out.len();
        self.out.push(Sentence {
            index,
            span: start..end,
            text: &self.text[start..end],
        });
    }

    fn close(&mut self) {
        if let Some((start, end)) = self.open.take() {
            self.push(start, end);
        }
    }

    fn extend(&mut self, start: usize, end: usize) {
        match &mut self.open {
            Some((_, e)) => *e = end,
            None => self.open = Some((start, end)),
        }
    }

    fn scan_line(&mut self, line: &str, offset: usize) {
        let mut chars = line.char_indices().peekable();
        while let Some((i, c)) = chars.next() {
            if c.is_whitespace() {
                continue;
            }
            let abs = offset + i;
            self.extend(abs, abs + c.len_utf8());
            if !matches!(c, '.' | '!' | '?') {
                continue;
            }
            // Absorb runs like "?!" and trailing closers like `."` or `.)`.
            while let Some(&(j, n)) = chars.peek() {
                if matches!(n, '.' | '!' | '?' | '"' | '\'' | ')' | ']' | '*' | '_')
                    || matches!(n, '\u{201d}' | '\u{2019}')
                {
                    self.extend(offset + j, offset + j + n.len_utf8());
                    chars.next();
                } else {
                    break;
                }
            }
            match chars.peek() {
                None => self.close(),
                Some(&(_, n)) if n.is_whitespace() => self.close(),
                _ => {}
            }
        }
    }
}

fn is_block_line(trimmed: &str) -> bool {
    trimmed.starts_with('#') || trimmed.starts_with('|')
}

fn is_list_item(trimmed: &str) -> bool {
    let mut it = trimmed.chars();
    match it.next() {
        Some('-' | '*' | '+') => it.next().is_some_and(char::is_whitespace),
        Some(d) if d.is_ascii_digit() => {
            let rest = trimmed.trim_start_matches(|c: char| c.is_ascii_digit());
            rest.starts_with(". ") || rest.starts_with(") ")
        }
        _ => false,
    }
}

/// Split text into sentences on `.`, `!`, `?` (when followed by whitespace or
/// end of text) and on blank lines. Markdown headings and table rows are kept
/// as units of their own; list items start a new unit. Only whitespace falls
/// between spans.
pub fn segment_sentences(text: &str) -> Vec<Sentence<'_>> {
    let mut seg = Segmenter {
        text,
        out: Vec::new(),
        open: None,
    };
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            seg.close();
        } else if is_block_line(trimmed) {
            seg.close();
            let lead = line.len() - line.trim_start().len();
            seg.push(offset + lead, offset + lead + trimmed.len());
        } else {
            if is_list_item(trimmed) {
                seg.close();
            }
            seg.scan_line(line, offset);
        }
        offset += line.len();
    }
    seg.close();
    seg.out
}

/// Words of the raw sentence with inner apostrophes kept, so contractions
/// like "don't" survive as one unit. Lowercased, typographic apostrophes
/// mapped to ASCII.
pub fn scan_words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if is_word_char(c) {
            cur.extend(c.to_lowercase());
        } else if is_apostrophe(c)
            && !cur.is_empty()
            && chars.peek().is_some_and(|&n| is_word_char(n))
        {
            cur.push('\'');
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

pub fn is_negated(text: &str, neg: &NegationLexicon, wildcards: bool) -> bool {
    scan_words(text).iter().any(|w| {
        neg.literals.contains(w.as_str())
            || (wildcards && neg.wildcard_prefixes.iter().any(|p| w.starts_with(p.as_str())))
    })
}

/// Drop every sentence that contains a negation word. Survivors keep their
/// original order and indices.
pub fn filter_negation<'a>(
    sentences: Vec<Sentence<'a>>,
    neg: &NegationLexicon,
    wildcards: bool,
) -> Vec<Sentence<'a>> {
    sentences
        .into_iter()
        .filter(|s| !is_negated(s.text, neg, wildcards))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    #[default]
    Single,
    Phrase,
}

impl std::str::FromStr for MatchMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" | "single-token" => Ok(MatchMode::Single),
            "phrase" => Ok(MatchMode::Phrase),
            _ => Err(format!("unknown match mode {s:?} (expected single|phrase)")),
        }
    }
}

/// Lexicon hits for one snapshot.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermOccurrences {
    pub snapshot_id: String,
    pub counts: BTreeMap<String, u64>,
    /// Number of matches (sum of `counts`).
    pub total: u64,
    /// Number of corpus tokens covered by matches.
    pub tokens_covered: u64,
}

/// Count lexicon terms in a lowercase token sequence.
///
/// Single-token mode counts exact token hits on one-token entries. Phrase
/// mode scans left to right taking the longest entry that starts at the
/// current position and consumes its tokens, so matches never overlap.
pub fn match_lexicon(
    snapshot_id: &str,
    tokens: &[String],
    lexicon: &Lexicon,
    mode: MatchMode,
) -> TermOccurrences {
    let mut occ = TermOccurrences {
        snapshot_id: snapshot_id.to_string(),
        ..Default::default()
    };
    let mut hit = |term: &str, len: usize| {
        *occ.counts.entry(term.to_string()).or_insert(0) += 1;
        occ.total += 1;
        occ.tokens_covered += len as u64;
    };
    match mode {
        MatchMode::Single => {
            for t in tokens {
                if let Some(term) = lexicon.single_token_term(t) {
                    hit(term, 1);
                }
            }
        }
        MatchMode::Phrase => {
            let mut i = 0;
            while i < tokens.len() {
                match lexicon.longest_match(&tokens[i..]) {
                    Some((term, len)) => {
                        hit(term, len);
                        i += len;
                    }
                    None => i += 1,
                }
            }
        }
    }
    occ
}

/// A snapshot after cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanedDoc {
    pub id: String,
    pub tokens: Vec<String>,
    pub sentences_in: usize,
    pub sentences_dropped: usize,
}

pub fn clean_text(id: &str, text: &str, neg: &NegationLexicon, wildcards: bool) -> CleanedDoc {
    let sentences = segment_sentences(text);
    let sentences_in = sentences.len();
    let kept = filter_negation(sentences, neg, wildcards);
    let sentences_dropped = sentences_in - kept.len();
    let tokens = kept.iter().flat_map(|s| tokenize(s.text)).collect();
    CleanedDoc {
        id: id.to_string(),
        tokens,
        sentences_in,
        sentences_dropped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neg() -> NegationLexicon {
        NegationLexicon::builtin()
    }

    fn texts<'a>(s: &[Sentence<'a>]) -> Vec<&'a str> {
        s.iter().map(|s| s.text).collect()
    }

    #[test]
    fn segments_on_terminators() {
        let s = segment_sentences("We do not sell data. We use cookies.");
        assert_eq!(texts(&s), ["We do not sell data.", "We use cookies."]);
        assert_eq!(s[1].index, 1);
    }

    #[test]
    fn heading_is_its_own_unit() {
        let s = segment_sentences("# Privacy\nWe use cookies.");
        assert_eq!(texts(&s), ["# Privacy", "We use cookies."]);
    }

    #[test]
    fn empty_text_has_no_sentences() {
        assert!(segment_sentences("").is_empty());
        assert!(segment_sentences(" \n\n\t").is_empty());
    }

    #[test]
    fn blank_lines_and_tables_split() {
        let text = "Intro without stop\n\nSecond para\n| a | b |\n|---|---|\nTail";
        let s = segment_sentences(text);
        assert_eq!(
            texts(&s),
            ["Intro without stop", "Second para", "| a | b |", "|---|---|", "Tail"]
        );
    }

    #[test]
    fn soft_wrapped_sentence_stays_together() {
        let s = segment_sentences("We collect your\nemail address. Then more!");
        assert_eq!(texts(&s), ["We collect your\nemail address.", "Then more!"]);
    }

    #[test]
    fn dots_inside_tokens_do_not_split() {
        let s = segment_sentences("Visit www.example.com today. Section §1798.100 applies.");
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn closing_quote_after_period() {
        let s = segment_sentences("They said \"stop.\" Then left.");
        assert_eq!(texts(&s), ["They said \"stop.\"", "Then left."]);
    }

    #[test]
    fn list_items_start_new_units() {
        let s = segment_sentences("We collect:\n- name\n- email address\n");
        assert_eq!(texts(&s), ["We collect:", "- name", "- email address"]);
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("We collect IP-addresses."), ["we", "collect", "ip", "addresses"]);
        assert_eq!(tokenize("driver's license"), ["driver", "s", "license"]);
        assert_eq!(tokenize("§1798.100"), ["1798", "100"]);
        assert_eq!(tokenize("snake_case ÉCOLE"), ["snake_case", "école"]);
        assert!(tokenize("!!! --- ...").is_empty());
    }

    #[test]
    fn scan_words_keeps_contractions() {
        assert_eq!(scan_words("We DON\u{2019}T share"), ["we", "don't", "share"]);
        assert_eq!(scan_words("users' data"), ["users", "data"]);
    }

    #[test]
    fn negation_literal_drops_sentence() {
        let sents = segment_sentences("we never sell data\n\nwe use cookies");
        let kept = filter_negation(sents, &neg(), false);
        assert_eq!(texts(&kept), ["we use cookies"]);
        assert_eq!(kept[0].index, 1);
    }

    #[test]
    fn contraction_is_matched_before_tokenization() {
        assert!(is_negated("we don't share information", &neg(), false));
        assert!(!is_negated("we share information", &neg(), false));
    }

    #[test]
    fn wildcards_only_when_enabled() {
        let s = "incomplete records are deleted";
        assert!(!is_negated(s, &neg(), false));
        assert!(is_negated(s, &neg(), true));
    }

    #[test]
    fn clean_text_counts_sentences() {
        let d = clean_text("x", "We do not sell. We use Cookies.", &neg(), false);
        assert_eq!(d.sentences_in, 2);
        assert_eq!(d.sentences_dropped, 1);
        assert_eq!(d.tokens, ["we", "use", "cookies"]);
    }

    fn lex(entries: &[&str]) -> Lexicon {
        Lexicon::from_entries(entries.iter().copied(), "test").unwrap()
    }

    fn toks(s: &[&str]) -> Vec<String> {
        s.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn single_token_counts() {
        let l = lex(&["cookies", "social security number"]);
        let occ = match_lexicon("d", &toks(&["cookies", "and", "cookies"]), &l, MatchMode::Single);
        assert_eq!(occ.counts.get("cookies"), Some(&2));
        assert_eq!(occ.counts.len(), 1);
        assert_eq!(occ.total, 2);
    }

    #[test]
    fn phrase_longest_match() {
        let l = lex(&["social security number", "social security", "number"]);
        let occ = match_lexicon(
            "d",
            &toks(&["social", "security", "number"]),
            &l,
            MatchMode::Phrase,
        );
        assert_eq!(occ.counts.get("social security number"), Some(&1));
        assert_eq!(occ.total, 1);
        assert_eq!(occ.tokens_covered, 3);
    }

    #[test]
    fn phrase_greedy_from_left() {
        let l = lex(&["precise geolocation", "geolocation data", "geolocation"]);
        let occ = match_lexicon(
            "d",
            &toks(&["precise", "geolocation", "data"]),
            &l,
            MatchMode::Phrase,
        );
        assert_eq!(occ.counts.len(), 1);
        assert_eq!(occ.counts.get("precise geolocation"), Some(&1));
    }

    #[test]
    fn phrase_mode_in_tokenizer_space() {
        let l = lex(&["driver\u{2019}s license"]);
        let occ = match_lexicon("d", &tokenize("Your Driver's License."), &l, MatchMode::Phrase);
        assert_eq!(occ.counts.get("driver's license"), Some(&1));
    }
}
