//! Tokenization, normalization, and stopword filtering.
//!
//! The tokenizer splits on whitespace and punctuation boundaries. A word
//! token is a maximal run of alphanumeric characters; hyphens and
//! apostrophes are kept when they sit between alphanumerics
//! (`co-expression`, `don't`), and `.`/`,` are kept between digits
//! (`0.05`, `1,000`). Every other non-whitespace character becomes a
//! single-character punctuation token, so inline citation markers like
//! `[6]` or `(Smith, 2009)` break apart cleanly.
//!
//! Normalization lowercases and drops pure-punctuation tokens while
//! keeping the original surface forms aligned, since the tagger wants
//! case information.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Default English stopword list bundled with the crate (~180 function words).
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords/english.txt");

/// A normalized token sequence with the case-preserved surface forms kept
/// alongside for tagging.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    source_id: String,
    tokens: Vec<String>,
    raw: Vec<String>,
}

impl TokenSeq {
    /// Builds a sequence from already-normalized tokens. Surface forms
    /// default to the tokens themselves.
    pub fn from_tokens(source_id: impl Into<String>, tokens: Vec<String>) -> Self {
        let raw = tokens.clone();
        TokenSeq {
            source_id: source_id.into(),
            tokens,
            raw,
        }
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    /// Normalized tokens: lowercase, no pure-punctuation entries.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Case-preserved surface forms, aligned 1:1 with `tokens()`.
    pub fn raw(&self) -> &[String] {
        &self.raw
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Keeps the positions for which `keep` returns true, preserving the
    /// normalized/surface alignment.
    pub fn filter_indexed<F: FnMut(usize, &str) -> bool>(&self, mut keep: F) -> TokenSeq {
        let mut tokens = Vec::with_capacity(self.tokens.len());
        let mut raw = Vec::with_capacity(self.raw.len());
        for (i, (t, r)) in self.tokens.iter().zip(&self.raw).enumerate() {
            if keep(i, t) {
                tokens.push(t.clone());
                raw.push(r.clone());
            }
        }
        TokenSeq {
            source_id: self.source_id.clone(),
            tokens,
            raw,
        }
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_internal_joiner(prev: char, c: char, next: Option<char>) -> bool {
    let next_word = next.map(is_word_char).unwrap_or(false);
    match c {
        '-' | '\'' | '\u{2019}' => is_word_char(prev) && next_word,
        '.' | ',' => prev.is_ascii_digit() && next.map(|n| n.is_ascii_digit()).unwrap_or(false),
        _ => false,
    }
}

/// Splits text into raw tokens on whitespace and punctuation boundaries.
/// Deterministic and total: any unicode string yields a (possibly empty)
/// token list, never an error.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::with_capacity(chars.len() / 5 + 1);
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if is_word_char(c) {
            cur.push(c);
            continue;
        }
        if !cur.is_empty() {
            if let Some(&prev) = chars.get(i.wrapping_sub(1)) {
                if is_internal_joiner(prev, c, chars.get(i + 1).copied()) {
                    cur.push(c);
                    continue;
                }
            }
            out.push(std::mem::take(&mut cur));
        }
        if !c.is_whitespace() {
            out.push(c.to_string());
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Lowercases raw tokens and drops pure-punctuation ones, preserving order.
/// The surviving surface forms are kept on the returned sequence.
pub fn normalize(source_id: impl Into<String>, raw_tokens: &[String]) -> TokenSeq {
    let mut tokens = Vec::with_capacity(raw_tokens.len());
    let mut raw = Vec::with_capacity(raw_tokens.len());
    for t in raw_tokens {
        if t.chars().any(char::is_alphanumeric) {
            tokens.push(t.to_lowercase());
            raw.push(t.clone());
        }
    }
    TokenSeq {
        source_id: source_id.into(),
        tokens,
        raw,
    }
}

/// `tokenize` + `normalize` in one step.
pub fn normalized_tokens(source_id: impl Into<String>, text: &str) -> TokenSeq {
    normalize(source_id, &tokenize(text))
}

/// Set of lowercase words removed from the counting path.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StopwordSet {
    words: BTreeSet<String>,
}

impl StopwordSet {
    pub fn empty() -> Self {
        StopwordSet::default()
    }

    /// The bundled English list.
    pub fn default_english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    /// Parses one word per line; `#` starts a comment line; entries are
    /// lowercased and deduplicated.
    pub fn parse(contents: &str) -> Self {
        let mut words = BTreeSet::new();
        for line in contents.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            words.insert(line.to_lowercase());
        }
        StopwordSet { words }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&contents))
    }

    pub fn contains(&self, word: &str) -> bool {
        if self.words.contains(word) {
            return true;
        }
        // tokens are normally lowercase already; fold just in case
        let lower = word.to_lowercase();
        lower != word && self.words.contains(&lower)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Order-preserving removal of stopword tokens (surface forms stay aligned).
pub fn remove_stopwords(seq: &TokenSeq, stops: &StopwordSet) -> TokenSeq {
    seq.filter_indexed(|_, t| !stops.contains(t))
}

/// True for tokens made entirely of digits and digit separators, which the
/// key-term path excludes by default.
pub fn is_numeral(token: &str) -> bool {
    !token.is_empty()
        && token.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',')
        && token.chars().any(|c| c.is_ascii_digit())
}
