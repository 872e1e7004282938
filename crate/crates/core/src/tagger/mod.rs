//! Greedy averaged-perceptron POS tagger over the Penn Treebank tagset.
//!
//! The bundled model is trained offline by `examples/train_tagger.rs`; the
//! runtime only loads weights and tags. Tagging is total: deterministic
//! pre-rules cover punctuation and numerals, a tag dictionary covers
//! frequent unambiguous words, and the perceptron's suffix/shape features
//! handle everything else, so every token always receives a tag.

pub mod train;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{self, TokenSeq};

/// The Penn Treebank tag inventory accepted by models and gold files.
pub const PTB_TAGSET: &[&str] = &[
    "#", "$", "''", "(", ")", ",", ".", ":", "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR",
    "JJS", "LS", "MD", "NN", "NNP", "NNPS", "NNS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR",
    "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$",
    "WRB", "``",
];

/// Identifier checked when loading model files.
pub const MODEL_FORMAT: &str = "corpkey-tagger/1";

/// Default POS-tag prefixes defining content words (nouns, verbs,
/// adjectives, adverbs).
pub const DEFAULT_CONTENT_PREFIXES: &[&str] = &["NN", "VB", "JJ", "RB"];

const START: [&str; 2] = ["-START-", "-START2-"];
const END: [&str; 2] = ["-END-", "-END2-"];

/// Tags aligned 1:1 with a [`TokenSeq`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSeq {
    tags: Vec<String>,
}

impl TagSeq {
    pub fn new(tags: Vec<String>) -> Self {
        TagSeq { tags }
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// On-disk model layout: self-describing JSON with sorted maps so the file
/// is byte-reproducible for a given training run.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: String,
    provenance: String,
    tagset: Vec<String>,
    tagdict: BTreeMap<String, String>,
    weights: BTreeMap<String, BTreeMap<String, f64>>,
}

/// An immutable trained tagging model.
#[derive(Clone)]
pub struct TaggerModel {
    version: String,
    provenance: String,
    tagset: BTreeSet<String>,
    tagdict: HashMap<String, String>,
    /// feature -> (class -> weight); inner maps stay sorted so score
    /// accumulation order is fixed.
    weights: HashMap<String, BTreeMap<String, f64>>,
    /// Candidate classes, sorted: union of all classes seen in weights.
    classes: Vec<String>,
}

impl TaggerModel {
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn parse_json(contents: &str, source: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(contents)
            .map_err(|e| Error::Model(format!("{source}: {e}")))?;
        if file.format != MODEL_FORMAT {
            return Err(Error::Model(format!(
                "{source}: format {:?} not supported (expected {MODEL_FORMAT:?})",
                file.format
            )));
        }
        if file.version.trim().is_empty() {
            return Err(Error::Model(format!("{source}: empty version string")));
        }
        let tagset: BTreeSet<String> = file.tagset.into_iter().collect();
        if tagset.is_empty() {
            return Err(Error::Model(format!("{source}: empty tagset")));
        }
        for tag in file.tagdict.values() {
            if !tagset.contains(tag) {
                return Err(Error::Model(format!(
                    "{source}: tagdict tag {tag:?} not in declared tagset"
                )));
            }
        }
        let mut classes = BTreeSet::new();
        for per_class in file.weights.values() {
            for tag in per_class.keys() {
                if !tagset.contains(tag) {
                    return Err(Error::Model(format!(
                        "{source}: weight class {tag:?} not in declared tagset"
                    )));
                }
                classes.insert(tag.clone());
            }
        }
        if classes.is_empty() {
            return Err(Error::Model(format!("{source}: model has no weights")));
        }
        Ok(TaggerModel {
            version: file.version,
            provenance: file.provenance,
            tagset,
            tagdict: file.tagdict.into_iter().collect(),
            weights: file.weights.into_iter().collect(),
            classes: classes.into_iter().collect(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_json(&contents, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: self.version.clone(),
            provenance: self.provenance.clone(),
            tagset: self.tagset.iter().cloned().collect(),
            tagdict: self.tagdict.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            weights: self.weights.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// The model shipped inside the binary.
    pub fn default_bundled() -> &'static TaggerModel {
        static MODEL: OnceLock<TaggerModel> = OnceLock::new();
        MODEL.get_or_init(|| {
            Self::parse_json(
                include_str!("../../data/tagger/model.json"),
                "<bundled model>",
            )
            .expect("bundled tagger model is valid")
        })
    }

    /// Tags a case-preserved token stream (punctuation included). Total:
    /// every token gets a tag from the model's tagset.
    pub fn tag_words(&self, words: &[String]) -> Vec<String> {
        let mut context: Vec<String> = Vec::with_capacity(words.len() + 4);
        context.extend(START.iter().map(|s| s.to_string()));
        context.extend(words.iter().map(|w| norm_word(w)));
        context.extend(END.iter().map(|s| s.to_string()));

        let mut p1 = START[0].to_string();
        let mut p2 = START[1].to_string();
        let mut out = Vec::with_capacity(words.len());
        for (i, word) in words.iter().enumerate() {
            let tag = if let Some(t) = hard_tag(word) {
                t.to_string()
            } else if let Some(t) = self.tagdict.get(&context[i + 2]) {
                t.clone()
            } else {
                let feats = features(i, word, &context, &p1, &p2);
                self.predict(&feats).to_string()
            };
            out.push(tag.clone());
            p2 = std::mem::replace(&mut p1, tag);
        }
        out
    }

    fn predict(&self, feats: &[String]) -> &str {
        let mut scores: HashMap<&str, f64> = HashMap::with_capacity(self.classes.len());
        for feat in feats {
            if let Some(per_class) = self.weights.get(feat) {
                // BTreeMap iteration keeps per-class accumulation order fixed
                for (class, w) in per_class {
                    *scores.entry(class.as_str()).or_insert(0.0) += w;
                }
            }
        }
        self.classes
            .iter()
            .map(|c| (scores.get(c.as_str()).copied().unwrap_or(0.0), c.as_str()))
            .max_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .expect("finite weights")
                    .then(a.1.cmp(b.1))
            })
            .map(|(_, c)| c)
            .expect("model has at least one class")
    }
}

impl std::fmt::Debug for TaggerModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TaggerModel")
            .field("version", &self.version)
            .field("tagdict_entries", &self.tagdict.len())
            .field("features", &self.weights.len())
            .field("classes", &self.classes.len())
            .finish()
    }
}

/// Word form used for dictionary lookups and word features: digit tokens
/// collapse to marker classes, everything else lowercases.
pub(crate) fn norm_word(word: &str) -> String {
    if text::is_numeral(word) {
        let digits: Vec<char> = word.chars().collect();
        if digits.len() == 4 && digits.iter().all(|c| c.is_ascii_digit()) {
            "!YEAR".to_string()
        } else {
            "!DIGIT".to_string()
        }
    } else {
        word.to_lowercase()
    }
}

/// Case/shape class of the original surface form, a strong POS cue that
/// survives normalization.
pub(crate) fn shape(raw: &str) -> &'static str {
    let mut any_alpha = false;
    let mut any_digit = false;
    let mut any_upper = false;
    let mut any_lower = false;
    for c in raw.chars() {
        if c.is_ascii_digit() {
            any_digit = true;
        }
        if c.is_alphabetic() {
            any_alpha = true;
            if c.is_uppercase() {
                any_upper = true;
            } else if c.is_lowercase() {
                any_lower = true;
            }
        }
    }
    if !any_alpha && !any_digit {
        return "punct";
    }
    if any_digit {
        return "num";
    }
    let first_upper = raw.chars().next().map(|c| c.is_uppercase()).unwrap_or(false);
    match (first_upper, any_upper, any_lower) {
        (true, _, false) => "allcaps",
        (true, _, true) => "title",
        (false, true, _) => "mixed",
        _ => "lower",
    }
}

fn suffix3(word: &str) -> String {
    let chars: Vec<char> = word.chars().collect();
    let start = chars.len().saturating_sub(3);
    chars[start..].iter().collect()
}

fn prefix1(word: &str) -> String {
    word.chars().next().map(String::from).unwrap_or_default()
}

/// Deterministic tags requiring no model: pure punctuation and numerals.
pub(crate) fn hard_tag(raw: &str) -> Option<&'static str> {
    if text::is_numeral(raw) {
        return Some("CD");
    }
    if raw.chars().any(char::is_alphanumeric) {
        return None;
    }
    Some(match raw {
        "." | "!" | "?" => ".",
        "," => ",",
        ";" | ":" | "-" | "--" | "\u{2013}" | "\u{2014}" | "\u{2026}" => ":",
        "(" | "[" | "{" => "(",
        ")" | "]" | "}" => ")",
        "``" => "``",
        "''" | "\"" | "'" | "\u{2018}" | "\u{2019}" | "\u{201c}" | "\u{201d}" => "''",
        "$" => "$",
        "#" => "#",
        _ => "SYM",
    })
}

/// The perceptron feature vector for position `i`. `context` is the
/// normalized words padded with two start and two end markers; `raw` is the
/// original surface form; `p1`/`p2` are the two previous predicted tags.
pub(crate) fn features(
    i: usize,
    raw: &str,
    context: &[String],
    p1: &str,
    p2: &str,
) -> Vec<String> {
    let w = &context[i + 2];
    vec![
        "bias".to_string(),
        format!("i suffix {}", suffix3(w)),
        format!("i pref1 {}", prefix1(w)),
        format!("i-1 tag {p1}"),
        format!("i-2 tag {p2}"),
        format!("i tag+i-2 tag {p1} {p2}"),
        format!("i word {w}"),
        format!("i-1 tag+i word {p1} {w}"),
        format!("i-1 word {}", context[i + 1]),
        format!("i-1 suffix {}", suffix3(&context[i + 1])),
        format!("i-2 word {}", context[i]),
        format!("i+1 word {}", context[i + 3]),
        format!("i+1 suffix {}", suffix3(&context[i + 3])),
        format!("i+2 word {}", context[i + 4]),
        format!("i shape {}", shape(raw)),
    ]
}

/// Tags the sequence's case-preserved surface forms and returns tags
/// aligned 1:1 with the sequence. Never fails; length always matches.
pub fn tag(seq: &TokenSeq, model: &TaggerModel) -> TagSeq {
    TagSeq {
        tags: model.tag_words(seq.raw()),
    }
}

/// Tokenizes and tags one statement: the tagger sees the full
/// case-preserved stream (punctuation included, for context), and the tags
/// are carried onto the normalized sequence by alignment.
pub fn tag_statement(source_id: &str, text_body: &str, model: &TaggerModel) -> (TokenSeq, TagSeq) {
    let raw_tokens = text::tokenize(text_body);
    let full_tags = model.tag_words(&raw_tokens);
    let mut kept_tokens = Vec::with_capacity(raw_tokens.len());
    let mut kept_tags = Vec::with_capacity(raw_tokens.len());
    for (tok, tag) in raw_tokens.into_iter().zip(full_tags) {
        // same keep rule as text::normalize
        if tok.chars().any(char::is_alphanumeric) {
            kept_tokens.push(tok);
            kept_tags.push(tag);
        }
    }
    let seq = text::normalize(source_id, &kept_tokens);
    debug_assert_eq!(seq.len(), kept_tags.len());
    (seq, TagSeq { tags: kept_tags })
}

/// Retains tokens whose tag starts with one of the given prefixes
/// (default: NN/VB/JJ/RB — nouns, verbs, adjectives, adverbs).
pub fn content_word_filter(seq: &TokenSeq, tags: &TagSeq, prefixes: &[String]) -> Result<TokenSeq> {
    if seq.len() != tags.len() {
        return Err(Error::InvalidArgument(format!(
            "misaligned tag sequence: {} tokens vs {} tags",
            seq.len(),
            tags.len()
        )));
    }
    Ok(seq.filter_indexed(|i, _| {
        let tag = &tags.tags[i];
        prefixes.iter().any(|p| tag.starts_with(p.as_str()))
    }))
}

pub fn default_content_prefixes() -> Vec<String> {
    DEFAULT_CONTENT_PREFIXES.iter().map(|s| s.to_string()).collect()
}

/// One gold sentence: (surface token, PTB tag) pairs.
pub type TaggedSentence = Vec<(String, String)>;

/// The hand-annotated evaluation set shipped with the crate.
pub const BUNDLED_GOLD: &str = include_str!("../../data/tagger/gold.tsv");

/// Parses `token<TAB>tag` lines with blank lines separating sentences.
/// Tags outside the PTB tagset are rejected (they are annotation typos).
pub fn parse_gold(contents: &str, source: &str) -> Result<Vec<TaggedSentence>> {
    let valid: BTreeSet<&str> = PTB_TAGSET.iter().copied().collect();
    let mut sentences = Vec::new();
    let mut current: TaggedSentence = Vec::new();
    for (idx, line) in contents.lines().enumerate() {
        let line_no = idx + 1;
        if line.starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        let (token, tag) = line
            .split_once('\t')
            .ok_or_else(|| Error::malformed(source, line_no, "expected token<TAB>tag"))?;
        if token.is_empty() {
            return Err(Error::malformed(source, line_no, "empty token"));
        }
        if !valid.contains(tag) {
            return Err(Error::malformed(
                source,
                line_no,
                format!("unknown PTB tag {tag:?}"),
            ));
        }
        current.push((token.to_string(), tag.to_string()));
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(sentences)
}

pub fn load_gold(path: &Path) -> Result<Vec<TaggedSentence>> {
    let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gold(&contents, &path.display().to_string())
}

/// Token-level accuracy of a model on gold sentences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub correct: usize,
    pub total: usize,
}

impl EvalReport {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct as f64 / self.total as f64
        }
    }
}

pub fn evaluate(model: &TaggerModel, gold: &[TaggedSentence]) -> EvalReport {
    let mut report = EvalReport { correct: 0, total: 0 };
    for sentence in gold {
        let words: Vec<String> = sentence.iter().map(|(w, _)| w.clone()).collect();
        let predicted = model.tag_words(&words);
        for (p, (_, gold_tag)) in predicted.iter().zip(sentence) {
            report.total += 1;
            if p == gold_tag {
                report.correct += 1;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn hard_rules_cover_punctuation_and_numbers() {
        assert_eq!(hard_tag("."), Some("."));
        assert_eq!(hard_tag(","), Some(","));
        assert_eq!(hard_tag("["), Some("("));
        assert_eq!(hard_tag("]"), Some(")"));
        assert_eq!(hard_tag(";"), Some(":"));
        assert_eq!(hard_tag("6"), Some("CD"));
        assert_eq!(hard_tag("0.05"), Some("CD"));
        assert_eq!(hard_tag("1,000"), Some("CD"));
        assert_eq!(hard_tag("%"), Some("SYM"));
        assert_eq!(hard_tag("results"), None);
        assert_eq!(hard_tag("p-value"), None);
    }

    #[test]
    fn shapes() {
        assert_eq!(shape("The"), "title");
        assert_eq!(shape("the"), "lower");
        assert_eq!(shape("DNA"), "allcaps");
        assert_eq!(shape("mRNA"), "mixed");
        assert_eq!(shape("3T3"), "num");
        assert_eq!(shape("."), "punct");
    }

    #[test]
    fn norm_collapses_digits() {
        assert_eq!(norm_word("2009"), "!YEAR");
        assert_eq!(norm_word("0.05"), "!DIGIT");
        assert_eq!(norm_word("Results"), "results");
    }

    #[test]
    fn bundled_model_loads_with_version() {
        let model = TaggerModel::default_bundled();
        assert!(!model.version().is_empty());
    }

    #[test]
    fn empty_sequence_gives_empty_tags() {
        let model = TaggerModel::default_bundled();
        let seq = TokenSeq::from_tokens("t", vec![]);
        assert!(tag(&seq, model).is_empty());
    }

    #[test]
    fn comparative_adjective_tagged_jjr() {
        let model = TaggerModel::default_bundled();
        let tags = model.tag_words(&toks(&["higher"]));
        assert_eq!(tags, vec!["JJR"]);
    }

    #[test]
    fn simple_clause_tags() {
        let model = TaggerModel::default_bundled();
        let tags = model.tag_words(&toks(&["the", "results", "differ"]));
        assert_eq!(tags, vec!["DT", "NNS", "VBP"]);
    }

    #[test]
    fn alignment_invariant() {
        let model = TaggerModel::default_bundled();
        for text_body in [
            "Results differ [6].",
            "Some studies reported higher scores.",
            "",
            "co-expression of p53 and BRCA1 (Smith, 2009)",
        ] {
            let (seq, tags) = tag_statement("t", text_body, model);
            assert_eq!(seq.len(), tags.len());
        }
    }

    #[test]
    fn tagging_is_deterministic() {
        let model = TaggerModel::default_bundled();
        let words = toks(&["The", "treatment", "groups", "differed", "significantly", "."]);
        let first = model.tag_words(&words);
        for _ in 0..5 {
            assert_eq!(model.tag_words(&words), first);
        }
    }

    #[test]
    fn reload_preserves_behavior() {
        let model = TaggerModel::default_bundled();
        let json = model.to_json();
        let reloaded = TaggerModel::parse_json(&json, "<round trip>").unwrap();
        let words = toks(&["These", "findings", "support", "previous", "work", "."]);
        assert_eq!(model.tag_words(&words), reloaded.tag_words(&words));
    }

    #[test]
    fn corrupt_model_rejected() {
        assert!(TaggerModel::parse_json("{\"truncated\":", "<t>").is_err());
        assert!(TaggerModel::parse_json("{}", "<t>").is_err());
        // wrong format marker
        let bad = r#"{"format":"other","version":"1","provenance":"","tagset":["NN"],"tagdict":{},"weights":{"bias":{"NN":1.0}}}"#;
        assert!(TaggerModel::parse_json(bad, "<t>").is_err());
        // tagdict tag outside tagset
        let bad = r#"{"format":"corpkey-tagger/1","version":"1","provenance":"","tagset":["NN"],"tagdict":{"x":"ZZ"},"weights":{"bias":{"NN":1.0}}}"#;
        assert!(TaggerModel::parse_json(bad, "<t>").is_err());
    }

    #[test]
    fn content_filter_keeps_nouns_verbs() {
        let seq = TokenSeq::from_tokens("t", toks(&["the", "results", "differ"]));
        let tags = TagSeq::new(toks(&["DT", "NNS", "VBP"]));
        let filtered = content_word_filter(&seq, &tags, &default_content_prefixes()).unwrap();
        assert_eq!(filtered.tokens(), &toks(&["results", "differ"])[..]);
    }

    #[test]
    fn content_filter_empty_cases() {
        let empty = TokenSeq::from_tokens("t", vec![]);
        let filtered =
            content_word_filter(&empty, &TagSeq::new(vec![]), &default_content_prefixes()).unwrap();
        assert!(filtered.is_empty());

        let seq = TokenSeq::from_tokens("t", toks(&["the", "a"]));
        let tags = TagSeq::new(toks(&["DT", "DT"]));
        let filtered = content_word_filter(&seq, &tags, &default_content_prefixes()).unwrap();
        assert!(filtered.is_empty());
    }

    #[test]
    fn content_filter_rejects_misalignment() {
        let seq = TokenSeq::from_tokens("t", toks(&["one", "two"]));
        let tags = TagSeq::new(toks(&["NN"]));
        assert!(content_word_filter(&seq, &tags, &default_content_prefixes()).is_err());
    }

    #[test]
    fn gold_parser_round_trip() {
        let gold = parse_gold("The\tDT\nend\tNN\n.\t.\n\nNext\tJJ\none\tNN\n", "<t>").unwrap();
        assert_eq!(gold.len(), 2);
        assert_eq!(gold[0].len(), 3);
        assert_eq!(gold[1][0], ("Next".to_string(), "JJ".to_string()));
    }

    #[test]
    fn gold_parser_rejects_bad_tags() {
        assert!(parse_gold("word\tNOTATAG\n", "<t>").is_err());
        assert!(parse_gold("no-tab-here\n", "<t>").is_err());
    }

    #[test]
    fn bundled_gold_parses() {
        let gold = parse_gold(BUNDLED_GOLD, "<bundled gold>").unwrap();
        assert!(gold.len() >= 50, "gold set has {} sentences", gold.len());
        let tokens: usize = gold.iter().map(|s| s.len()).sum();
        assert!(tokens >= 900, "gold set has {tokens} tokens");
    }

    #[test]
    fn bundled_model_meets_accuracy_floor() {
        let model = TaggerModel::default_bundled();
        let gold = parse_gold(BUNDLED_GOLD, "<bundled gold>").unwrap();
        let report = evaluate(model, &gold);
        assert!(
            report.accuracy() >= 0.85,
            "accuracy {:.4} ({}/{})",
            report.accuracy(),
            report.correct,
            report.total
        );
    }
}
