//! Windowed collocate extraction and mergeable count tables.
//!
//! Collocates are ordered pairs or triples of tokens co-occurring within a
//! fixed window inside one statement; counting never crosses statement
//! boundaries. Count tables are exact integer counts and merge into a
//! commutative monoid, so a subcorpus may be counted in any partition and
//! merge order with bit-identical results.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Subcorpus;
use crate::error::{Error, Result};
use crate::tagger::{content_word_filter, TaggerModel};
use crate::text::{self, StopwordSet, TokenSeq};

/// An ordered tuple of 2 or 3 normalized, non-stopword tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Collocate {
    tokens: Vec<String>,
}

impl Collocate {
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        if tokens.len() != 2 && tokens.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "collocate must have 2 or 3 tokens, got {}",
                tokens.len()
            )));
        }
        Ok(Collocate { tokens })
    }

    pub fn order(&self) -> u8 {
        self.tokens.len() as u8
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Canonical table key: tokens joined by a single space.
    pub fn key(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Counting parameters; tables must agree on these to merge or compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountParams {
    /// 1 for unigram terms, 2 for bigrams, 3 for trigrams.
    pub order: u8,
    /// Maximum inclusive index span of a collocate (unused for order 1).
    pub window: usize,
    /// Items with fewer occurrences are pruned; 1 means no pruning.
    pub min_freq: u64,
}

impl CountParams {
    pub fn terms() -> Self {
        CountParams {
            order: 1,
            window: 1,
            min_freq: 1,
        }
    }
}

/// Item frequencies for one subcorpus. `total_items` is the population
/// size seen before min-frequency pruning, which the keyness expected
/// values need.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub label: String,
    pub params: CountParams,
    pub total_items: u64,
    pub counts: HashMap<String, u64>,
}

impl CountTable {
    pub fn empty(label: impl Into<String>, params: CountParams) -> Self {
        CountTable {
            label: label.into(),
            params,
            total_items: 0,
            counts: HashMap::new(),
        }
    }

    pub fn count_of(&self, item: &str) -> u64 {
        self.counts.get(item).copied().unwrap_or(0)
    }

    pub fn distinct_items(&self) -> usize {
        self.counts.len()
    }

    /// Checked sum in place of the sum over `counts`; holds only before
    /// min-frequency pruning.
    pub fn counted_sum(&self) -> u64 {
        self.counts.values().sum()
    }

    fn check_compatible(&self, other: &CountTable) -> Result<()> {
        if self.label != other.label {
            return Err(Error::ParamMismatch(format!(
                "labels differ: {} vs {}",
                self.label, other.label
            )));
        }
        if self.params != other.params {
            return Err(Error::ParamMismatch(format!(
                "params differ: {:?} vs {:?}",
                self.params, other.params
            )));
        }
        Ok(())
    }

    /// Removes items occurring fewer than `min_freq` times. `total_items`
    /// is left untouched: pruning narrows the candidate list, not the
    /// population.
    pub fn apply_min_freq(&mut self, min_freq: u64) {
        if min_freq > 1 {
            self.counts.retain(|_, c| *c >= min_freq);
        }
        self.params.min_freq = min_freq;
    }

    /// Rows sorted by item for deterministic serialization.
    pub fn sorted_rows(&self) -> Vec<(&str, u64)> {
        let mut rows: Vec<(&str, u64)> = self
            .counts
            .iter()
            .map(|(k, v)| (k.as_str(), *v))
            .collect();
        rows.sort_unstable_by(|a, b| a.0.cmp(b.0));
        rows
    }

    /// Writes the table as sorted CSV (`item,count`) with `#` metadata
    /// lines carrying label, params, and total_items so the table can be
    /// reconstructed exactly.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let io_err = |e: std::io::Error| Error::io("<count table writer>", e);
        writeln!(out, "# corpkey count table").map_err(io_err)?;
        writeln!(out, "# label: {}", self.label).map_err(io_err)?;
        writeln!(out, "# order: {}", self.params.order).map_err(io_err)?;
        writeln!(out, "# window: {}", self.params.window).map_err(io_err)?;
        writeln!(out, "# min_freq: {}", self.params.min_freq).map_err(io_err)?;
        writeln!(out, "# total_items: {}", self.total_items).map_err(io_err)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["item", "count"])
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        for (item, count) in self.sorted_rows() {
            w.write_record([item, &count.to_string()])
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::io("<count table writer>", e))?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    /// Reads a table previously written by [`CountTable::write_csv`].
    pub fn parse_csv(contents: &str, source: &str) -> Result<CountTable> {
        let mut label = None;
        let mut order = None;
        let mut window = None;
        let mut min_freq = None;
        let mut total_items = None;
        let mut body_start = 0;
        for (i, line) in contents.lines().enumerate() {
            if !line.starts_with('#') {
                body_start = i;
                break;
            }
            if let Some((key, value)) = line.trim_start_matches('#').split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "label" => label = Some(value.to_string()),
                    "order" => order = value.parse::<u8>().ok(),
                    "window" => window = value.parse::<usize>().ok(),
                    "min_freq" => min_freq = value.parse::<u64>().ok(),
                    "total_items" => total_items = value.parse::<u64>().ok(),
                    _ => {}
                }
            }
        }
        let meta_err = |what: &str| Error::malformed(source, 1, format!("missing or bad {what} metadata"));
        let mut table = CountTable {
            label: label.ok_or_else(|| meta_err("label"))?,
            params: CountParams {
                order: order.ok_or_else(|| meta_err("order"))?,
                window: window.ok_or_else(|| meta_err("window"))?,
                min_freq: min_freq.ok_or_else(|| meta_err("min_freq"))?,
            },
            total_items: total_items.ok_or_else(|| meta_err("total_items"))?,
            counts: HashMap::new(),
        };
        let body: String = contents
            .lines()
            .skip(body_start)
            .collect::<Vec<_>>()
            .join("\n");
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        for (i, record) in reader.records().enumerate() {
            let record =
                record.map_err(|e| Error::malformed(source, body_start + i + 2, e.to_string()))?;
            let item = record
                .get(0)
                .ok_or_else(|| Error::malformed(source, body_start + i + 2, "missing item"))?;
            let count: u64 = record
                .get(1)
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| Error::malformed(source, body_start + i + 2, "bad count"))?;
            table.counts.insert(item.to_string(), count);
        }
        Ok(table)
    }

    pub fn load_csv(path: &Path) -> Result<CountTable> {
        let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&contents, &path.display().to_string())
    }
}

/// Pointwise sum of two tables built with identical label and params.
pub fn merge_tables(t1: &CountTable, t2: &CountTable) -> Result<CountTable> {
    t1.check_compatible(t2)?;
    let (big, small) = if t1.counts.len() >= t2.counts.len() {
        (t1, t2)
    } else {
        (t2, t1)
    };
    let mut out = big.clone();
    out.total_items += small.total_items;
    for (item, count) in &small.counts {
        *out.counts.entry(item.clone()).or_insert(0) += count;
    }
    Ok(out)
}

/// Emits every ordered pair `(t_i, t_j)` with `i < j` and `j - i <= w - 1`
/// (order 2), or every ordered triple `(t_i, t_j, t_k)` with `i < j < k`
/// and `k - i <= w - 1` (order 3).
pub fn extract_ngrams(seq: &TokenSeq, order: u8, window: usize) -> Result<Vec<Collocate>> {
    if order != 2 && order != 3 {
        return Err(Error::InvalidArgument(format!(
            "collocate order must be 2 or 3, got {order}"
        )));
    }
    if window < order as usize {
        return Err(Error::InvalidArgument(format!(
            "window {window} smaller than order {order}"
        )));
    }
    let tokens = seq.tokens();
    let n = tokens.len();
    let mut out = Vec::new();
    for i in 0..n {
        let span_end = (i + window).min(n); // exclusive; j-i <= window-1
        for j in i + 1..span_end {
            if order == 2 {
                out.push(Collocate {
                    tokens: vec![tokens[i].clone(), tokens[j].clone()],
                });
            } else {
                for k in j + 1..span_end {
                    out.push(Collocate {
                        tokens: vec![tokens[i].clone(), tokens[j].clone(), tokens[k].clone()],
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Options for the key-term (unigram) counting path.
pub struct TermCountOpts<'a> {
    pub stopwords: &'a StopwordSet,
    pub tagger: &'a TaggerModel,
    /// POS tag prefixes that count as content words.
    pub content_prefixes: &'a [String],
    pub include_numerals: bool,
}

/// Counts content-word, stopword-filtered unigrams over all statements of a
/// subcorpus. Statements are tagged on the case-preserved token stream; the
/// content filter keeps tokens whose tag starts with one of the configured
/// prefixes. `total_items` is the number of counted tokens.
pub fn count_terms(sub: &Subcorpus, opts: &TermCountOpts) -> CountTable {
    let mut table = CountTable::empty(sub.label(), CountParams::terms());
    for stmt in sub.statements() {
        let seq = crate::tagger::tag_statement(&stmt.id, &stmt.text, opts.tagger);
        accumulate_terms(&seq.0, &seq.1, opts, &mut table);
    }
    table
}

pub(crate) fn accumulate_terms(
    seq: &TokenSeq,
    tags: &crate::tagger::TagSeq,
    opts: &TermCountOpts,
    table: &mut CountTable,
) {
    let content = content_word_filter(seq, tags, opts.content_prefixes)
        .expect("tag_statement produces aligned tags");
    let filtered = text::remove_stopwords(&content, opts.stopwords);
    for token in filtered.tokens() {
        if !opts.include_numerals && text::is_numeral(token) {
            continue;
        }
        *table.counts.entry(token.clone()).or_insert(0) += 1;
        table.total_items += 1;
    }
}

/// Aggregates windowed collocates over all statements of a subcorpus (on
/// stopword-filtered normalized tokens), then prunes items occurring fewer
/// than `min_freq` times. `total_items` is recorded before pruning.
pub fn count_collocates(
    sub: &Subcorpus,
    order: u8,
    window: usize,
    min_freq: u64,
    stopwords: &StopwordSet,
) -> Result<CountTable> {
    if min_freq < 1 {
        return Err(Error::InvalidArgument("min_freq must be >= 1".into()));
    }
    let mut table = CountTable::empty(
        sub.label(),
        CountParams {
            order,
            window,
            min_freq: 1,
        },
    );
    for stmt in sub.statements() {
        let seq = text::normalized_tokens(&stmt.id, &stmt.text);
        let filtered = text::remove_stopwords(&seq, stopwords);
        accumulate_collocates(&filtered, order, window, &mut table)?;
    }
    table.apply_min_freq(min_freq);
    Ok(table)
}

pub(crate) fn accumulate_collocates(
    filtered: &TokenSeq,
    order: u8,
    window: usize,
    table: &mut CountTable,
) -> Result<()> {
    for collocate in extract_ngrams(filtered, order, window)? {
        *table.counts.entry(collocate.key()).or_insert(0) += 1;
        table.total_items += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::CitationStatement;
    use proptest::prelude::*;

    fn seq(tokens: &[&str]) -> TokenSeq {
        TokenSeq::from_tokens("t", tokens.iter().map(|s| s.to_string()).collect())
    }

    /// Exhaustive index enumeration, the independent oracle for
    /// `extract_ngrams`.
    fn brute_force(tokens: &[&str], order: u8, window: usize) -> Vec<Vec<String>> {
        let n = tokens.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if order == 2 {
                    if j - i <= window - 1 {
                        out.push(vec![tokens[i].to_string(), tokens[j].to_string()]);
                    }
                } else {
                    for k in j + 1..n {
                        if k - i <= window - 1 {
                            out.push(vec![
                                tokens[i].to_string(),
                                tokens[j].to_string(),
                                tokens[k].to_string(),
                            ]);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn pairs_window_covers_short_sequence() {
        let got = extract_ngrams(&seq(&["a", "b", "c", "d"]), 2, 5).unwrap();
        let keys: Vec<String> = got.iter().map(|c| c.key()).collect();
        assert_eq!(keys, vec!["a b", "a c", "a d", "b c", "b d", "c d"]);
    }

    #[test]
    fn triple_too_short() {
        assert!(extract_ngrams(&seq(&["a", "b"]), 3, 5).unwrap().is_empty());
    }

    #[test]
    fn pairs_window_three() {
        let got = extract_ngrams(&seq(&["a", "b", "c", "d", "e", "f"]), 2, 3).unwrap();
        let keys: Vec<String> = got.iter().map(|c| c.key()).collect();
        assert_eq!(
            keys,
            vec!["a b", "a c", "b c", "b d", "c d", "c e", "d e", "d f", "e f"]
        );
    }

    #[test]
    fn window_smaller_than_order_rejected() {
        assert!(extract_ngrams(&seq(&["a", "b", "c"]), 3, 2).is_err());
        assert!(extract_ngrams(&seq(&["a", "b"]), 2, 1).is_err());
    }

    #[test]
    fn matches_brute_force_on_examples() {
        let tokens = ["a", "b", "c", "d", "e", "f", "g"];
        for order in [2u8, 3] {
            for window in order as usize..=6 {
                let got: Vec<Vec<String>> = extract_ngrams(&seq(&tokens), order, window)
                    .unwrap()
                    .into_iter()
                    .map(|c| c.tokens().to_vec())
                    .collect();
                assert_eq!(got, brute_force(&tokens, order, window), "order {order} window {window}");
            }
        }
    }

    #[test]
    fn pair_count_formula() {
        // (w-1)*n - (w-1)*w/2 pairs for n >= w
        for (n, w) in [(6usize, 3usize), (10, 5), (20, 8), (5, 5)] {
            let tokens: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
            let ts = TokenSeq::from_tokens("t", tokens);
            let got = extract_ngrams(&ts, 2, w).unwrap().len();
            assert_eq!(got, (w - 1) * n - (w - 1) * w / 2);
        }
    }

    fn stmt(id: &str, text: &str, label: &str) -> CitationStatement {
        CitationStatement::new(id, text, label).unwrap()
    }

    #[test]
    fn collocate_counting_min_freq_boundary() {
        // "alpha beta" occurs 2x, "gamma delta" occurs 3x
        let mut statements = Vec::new();
        for i in 0..2 {
            statements.push(stmt(&format!("a{i}"), "alpha beta", "x"));
        }
        for i in 0..3 {
            statements.push(stmt(&format!("g{i}"), "gamma delta", "x"));
        }
        let sub = Subcorpus::new("x", statements).unwrap();
        let table = count_collocates(&sub, 2, 5, 3, &StopwordSet::empty()).unwrap();
        assert_eq!(table.count_of("alpha beta"), 0);
        assert_eq!(table.count_of("gamma delta"), 3);
        // population recorded before pruning
        assert_eq!(table.total_items, 5);
    }

    #[test]
    fn min_freq_one_is_identity() {
        let sub = Subcorpus::new(
            "x",
            vec![stmt("a", "one two three", "x"), stmt("b", "one two", "x")],
        )
        .unwrap();
        let raw = count_collocates(&sub, 2, 5, 1, &StopwordSet::empty()).unwrap();
        assert_eq!(raw.counted_sum(), raw.total_items);
        assert_eq!(raw.count_of("one two"), 2);
        assert_eq!(raw.count_of("one three"), 1);
    }

    #[test]
    fn counting_does_not_cross_statements() {
        let joined = Subcorpus::new("x", vec![stmt("a", "alpha beta gamma delta", "x")]).unwrap();
        let split = Subcorpus::new(
            "x",
            vec![stmt("a", "alpha beta", "x"), stmt("b", "gamma delta", "x")],
        )
        .unwrap();
        let tj = count_collocates(&joined, 2, 5, 1, &StopwordSet::empty()).unwrap();
        let ts = count_collocates(&split, 2, 5, 1, &StopwordSet::empty()).unwrap();
        assert!(tj.count_of("beta gamma") > 0);
        assert_eq!(ts.count_of("beta gamma"), 0);
        // every split collocate is an intra-statement collocate of the join
        for (item, count) in &ts.counts {
            assert!(tj.count_of(item) >= *count);
        }
    }

    #[test]
    fn merge_identity_and_commutativity() {
        let sub = Subcorpus::new(
            "x",
            vec![stmt("a", "one two three", "x"), stmt("b", "two three four", "x")],
        )
        .unwrap();
        let t = count_collocates(&sub, 2, 5, 1, &StopwordSet::empty()).unwrap();
        let empty = CountTable::empty("x", t.params);
        assert_eq!(merge_tables(&t, &empty).unwrap(), t);

        let sub2 = Subcorpus::new("x", vec![stmt("c", "three four five", "x")]).unwrap();
        let t2 = count_collocates(&sub2, 2, 5, 1, &StopwordSet::empty()).unwrap();
        assert_eq!(
            merge_tables(&t, &t2).unwrap(),
            merge_tables(&t2, &t).unwrap()
        );
    }

    #[test]
    fn merge_rejects_mismatched_params() {
        let a = CountTable::empty("x", CountParams { order: 2, window: 5, min_freq: 1 });
        let b = CountTable::empty("x", CountParams { order: 2, window: 4, min_freq: 1 });
        assert!(matches!(merge_tables(&a, &b), Err(Error::ParamMismatch(_))));
        let c = CountTable::empty("y", a.params);
        assert!(matches!(merge_tables(&a, &c), Err(Error::ParamMismatch(_))));
    }

    #[test]
    fn chunked_counting_equals_sequential() {
        let statements: Vec<CitationStatement> = (0..100)
            .map(|i| {
                stmt(
                    &format!("s{i}"),
                    &format!("token{} token{} token{} shared common", i % 7, i % 5, i % 3),
                    "x",
                )
            })
            .collect();
        let sub = Subcorpus::new("x", statements.clone()).unwrap();
        let sequential = count_collocates(&sub, 2, 5, 1, &StopwordSet::empty()).unwrap();

        let mut merged = CountTable::empty("x", sequential.params);
        for chunk in statements.chunks(25) {
            let part = Subcorpus::new("x", chunk.to_vec()).unwrap();
            let t = count_collocates(&part, 2, 5, 1, &StopwordSet::empty()).unwrap();
            merged = merge_tables(&merged, &t).unwrap();
        }
        assert_eq!(merged, sequential);
    }

    #[test]
    fn csv_round_trip() {
        let sub = Subcorpus::new(
            "supporting",
            vec![stmt("a", "consistent previous studies shown", "supporting")],
        )
        .unwrap();
        let table = count_collocates(&sub, 2, 5, 1, &StopwordSet::empty()).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let parsed = CountTable::parse_csv(std::str::from_utf8(&buf).unwrap(), "<mem>").unwrap();
        assert_eq!(parsed, table);
    }

    proptest! {
        #[test]
        fn window_monotonicity(
            tokens in proptest::collection::vec("[a-e]{1,2}", 0..18),
            order in 2u8..=3,
            window in 3usize..=8,
        ) {
            let ts = TokenSeq::from_tokens("t", tokens);
            let small = extract_ngrams(&ts, order, window).unwrap();
            let large = extract_ngrams(&ts, order, window + 1).unwrap();
            // occurrence multiset at window w is a sub-multiset at w+1
            let mut counts = HashMap::new();
            for c in &large {
                *counts.entry(c.key()).or_insert(0i64) += 1;
            }
            for c in &small {
                let slot = counts.entry(c.key()).or_insert(0);
                *slot -= 1;
                prop_assert!(*slot >= 0, "{} overrepresented at smaller window", c.key());
            }
        }

        #[test]
        fn extraction_matches_brute_force(
            tokens in proptest::collection::vec("[a-d]", 0..20),
            order in 2u8..=3,
            window in 0usize..=8,
        ) {
            prop_assume!(window >= order as usize);
            let refs: Vec<&str> = tokens.iter().map(|s| s.as_str()).collect();
            let ts = TokenSeq::from_tokens("t", tokens.clone());
            let got: Vec<Vec<String>> = extract_ngrams(&ts, order, window)
                .unwrap()
                .into_iter()
                .map(|c| c.tokens().to_vec())
                .collect();
            prop_assert_eq!(got, brute_force(&refs, order, window));
        }

        #[test]
        fn merge_is_associative(
            xs in proptest::collection::vec(("[a-c] [a-c]", 1u64..20), 0..12),
            ys in proptest::collection::vec(("[a-c] [a-c]", 1u64..20), 0..12),
            zs in proptest::collection::vec(("[a-c] [a-c]", 1u64..20), 0..12),
        ) {
            let params = CountParams { order: 2, window: 5, min_freq: 1 };
            let build = |items: Vec<(String, u64)>| {
                let mut t = CountTable::empty("x", params);
                for (item, count) in items {
                    *t.counts.entry(item).or_insert(0) += count;
                    t.total_items += count;
                }
                t
            };
            let (a, b, c) = (build(xs), build(ys), build(zs));
            let left = merge_tables(&merge_tables(&a, &b).unwrap(), &c).unwrap();
            let right = merge_tables(&a, &merge_tables(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
