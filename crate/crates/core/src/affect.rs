//! Lexicon-based sentiment polarity and subjectivity scoring.
//!
//! The scorer matches tokens against a lexicon and applies two local
//! context rules before averaging: an intensifier immediately before a
//! matched word scales its polarity by the intensifier's multiplier, and a
//! negator within the two preceding tokens then flips the sign and halves
//! the magnitude. Sequences with no matches score exactly (0, 0).

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyness::{KeynessRow, KeynessTable};
use crate::Score;

/// The lexicon shipped with the crate; see `data/affect/default.tsv` for
/// the format and provenance notes.
pub const DEFAULT_LEXICON: &str = include_str!("../data/affect/default.tsv");

#[derive(Debug, Clone)]
pub struct AffectLexicon {
    version: String,
    entries: BTreeMap<String, (Score, Score)>,
    intensifiers: BTreeMap<String, Score>,
    negators: BTreeSet<String>,
}

/// Sentiment polarity in [-1, 1] and subjectivity in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffectScore {
    pub polarity: Score,
    pub subjectivity: Score,
}

impl AffectScore {
    pub const NEUTRAL: AffectScore = AffectScore {
        polarity: 0.0,
        subjectivity: 0.0,
    };
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Meta,
    Words,
    Intensifiers,
    Negators,
}

impl AffectLexicon {
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, word: &str) -> Option<(Score, Score)> {
        self.entries.get(word).copied()
    }

    /// Parses the sectioned tab-separated lexicon format:
    ///
    /// ```text
    /// [meta]
    /// version<TAB>1.0.0
    /// [words]
    /// word<TAB>polarity<TAB>subjectivity
    /// [intensifiers]
    /// word<TAB>multiplier
    /// [negators]
    /// word
    /// ```
    pub fn parse(contents: &str, source: &str) -> Result<Self> {
        let mut section = Section::Preamble;
        let mut version = None;
        let mut entries = BTreeMap::new();
        let mut intensifiers = BTreeMap::new();
        let mut negators = BTreeSet::new();
        let bad = |line_no: usize, reason: String| Error::Lexicon(format!("{source}:{line_no}: {reason}"));

        for (idx, raw_line) in contents.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim_end();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[meta]" => {
                    section = Section::Meta;
                    continue;
                }
                "[words]" => {
                    section = Section::Words;
                    continue;
                }
                "[intensifiers]" => {
                    section = Section::Intensifiers;
                    continue;
                }
                "[negators]" => {
                    section = Section::Negators;
                    continue;
                }
                _ if line.starts_with('[') => {
                    return Err(bad(line_no, format!("unknown section {line}")));
                }
                _ => {}
            }
            let mut fields = line.split('\t');
            match section {
                Section::Preamble => {
                    return Err(bad(line_no, "content before first section header".into()));
                }
                Section::Meta => {
                    let key = fields.next().unwrap_or_default();
                    let value = fields.next().unwrap_or_default();
                    if key == "version" {
                        if value.trim().is_empty() {
                            return Err(bad(line_no, "empty version".into()));
                        }
                        version = Some(value.trim().to_string());
                    }
                }
                Section::Words => {
                    let word = fields
                        .next()
                        .filter(|w| !w.is_empty())
                        .ok_or_else(|| bad(line_no, "missing word".into()))?;
                    let polarity: Score = fields
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| bad(line_no, "bad polarity".into()))?;
                    let subjectivity: Score = fields
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| bad(line_no, "bad subjectivity".into()))?;
                    if !(-1.0..=1.0).contains(&polarity) {
                        return Err(bad(line_no, format!("polarity {polarity} outside [-1, 1]")));
                    }
                    if !(0.0..=1.0).contains(&subjectivity) {
                        return Err(bad(
                            line_no,
                            format!("subjectivity {subjectivity} outside [0, 1]"),
                        ));
                    }
                    let word = word.to_lowercase();
                    if entries.insert(word.clone(), (polarity, subjectivity)).is_some() {
                        return Err(bad(line_no, format!("duplicate entry {word:?}")));
                    }
                }
                Section::Intensifiers => {
                    let word = fields
                        .next()
                        .filter(|w| !w.is_empty())
                        .ok_or_else(|| bad(line_no, "missing word".into()))?;
                    let multiplier: Score = fields
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| bad(line_no, "bad multiplier".into()))?;
                    if multiplier <= 0.0 || !multiplier.is_finite() {
                        return Err(bad(line_no, format!("multiplier {multiplier} must be positive")));
                    }
                    intensifiers.insert(word.to_lowercase(), multiplier);
                }
                Section::Negators => {
                    negators.insert(line.trim().to_lowercase());
                }
            }
        }
        let version = version
            .ok_or_else(|| Error::Lexicon(format!("{source}: missing [meta] version")))?;
        Ok(AffectLexicon {
            version,
            entries,
            intensifiers,
            negators,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&contents, &path.display().to_string())
    }

    pub fn default_bundled() -> Result<Self> {
        Self::parse(DEFAULT_LEXICON, "<bundled lexicon>")
    }
}

/// Polarity contribution of each matched token, with intensifier and
/// negation rules applied and the result clamped to [-1, 1].
fn contributions(tokens: &[String], lex: &AffectLexicon) -> Vec<(Score, Score)> {
    let mut out = Vec::new();
    for (i, token) in tokens.iter().enumerate() {
        let Some((base_polarity, subjectivity)) = lex.entries.get(token).copied() else {
            continue;
        };
        let mut polarity = base_polarity;
        // intensifier first, then negation: "not very good" reads as the
        // negation of the intensified phrase
        if i >= 1 {
            if let Some(m) = lex.intensifiers.get(&tokens[i - 1]) {
                polarity *= m;
            }
        }
        let negated = (i.saturating_sub(2)..i).any(|j| lex.negators.contains(&tokens[j]));
        if negated {
            polarity = -polarity / 2.0;
        }
        out.push((polarity.clamp(-1.0, 1.0), subjectivity));
    }
    out
}

/// Mean polarity of matched tokens after the local rules; 0 with no matches.
pub fn polarity(tokens: &[String], lex: &AffectLexicon) -> Score {
    score(tokens, lex).polarity
}

/// Mean subjectivity of matched tokens; 0 with no matches.
pub fn subjectivity(tokens: &[String], lex: &AffectLexicon) -> Score {
    score(tokens, lex).subjectivity
}

/// Both affect dimensions in one pass over the tokens.
pub fn score(tokens: &[String], lex: &AffectLexicon) -> AffectScore {
    let matched = contributions(tokens, lex);
    if matched.is_empty() {
        return AffectScore::NEUTRAL;
    }
    let n = matched.len() as Score;
    let polarity: Score = matched.iter().map(|(p, _)| p).sum::<Score>() / n;
    let subjectivity: Score = matched.iter().map(|(_, s)| s).sum::<Score>() / n;
    AffectScore {
        polarity: polarity.clamp(-1.0, 1.0),
        subjectivity: subjectivity.clamp(0.0, 1.0),
    }
}

/// Scores each row's item as a bare token sequence, preserving row order.
pub fn score_collocates(
    table: &KeynessTable,
    lex: &AffectLexicon,
) -> Vec<(KeynessRow, AffectScore)> {
    table
        .rows
        .iter()
        .map(|row| {
            let tokens: Vec<String> = row.item.split(' ').map(|t| t.to_string()).collect();
            (row.clone(), score(&tokens, lex))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collocate::CountParams;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn tiny_lexicon() -> AffectLexicon {
        AffectLexicon::parse(
            "[meta]\nversion\t0.0.1\n[words]\ngood\t0.7\t0.6\nbad\t-0.7\t0.7\nrobust\t0.4\t0.5\n\
             [intensifiers]\nvery\t1.3\nslightly\t0.5\n[negators]\nnot\nnever\n",
            "<tiny>",
        )
        .unwrap()
    }

    #[test]
    fn no_matches_scores_zero() {
        let lex = tiny_lexicon();
        let s = score(&toks(&["the", "samples", "were", "frozen"]), &lex);
        assert_eq!(s, AffectScore::NEUTRAL);
    }

    #[test]
    fn negation_flips_and_halves_exactly() {
        let lex = tiny_lexicon();
        assert_eq!(polarity(&toks(&["not", "good"]), &lex), -0.35);
        assert_eq!(polarity(&toks(&["not", "bad"]), &lex), 0.35);
        // negator two tokens before still applies
        assert_eq!(polarity(&toks(&["not", "so", "good"]), &lex), -0.35);
        // three tokens before is out of range
        assert_relative_eq!(
            polarity(&toks(&["not", "a", "b", "good"]), &lex),
            0.7,
            max_relative = 1e-12
        );
    }

    #[test]
    fn intensifier_scales_then_negation_applies() {
        let lex = tiny_lexicon();
        assert_relative_eq!(
            polarity(&toks(&["very", "good"]), &lex),
            0.7 * 1.3,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            polarity(&toks(&["slightly", "bad"]), &lex),
            -0.35,
            max_relative = 1e-12
        );
        // "not very good" = -(0.7 * 1.3) / 2
        assert_relative_eq!(
            polarity(&toks(&["not", "very", "good"]), &lex),
            -0.455,
            max_relative = 1e-12
        );
    }

    #[test]
    fn intensified_polarity_clamped() {
        let lex = AffectLexicon::parse(
            "[meta]\nversion\t0\n[words]\nsuperb\t0.9\t0.9\n[intensifiers]\nextremely\t1.6\n[negators]\nnot\n",
            "<t>",
        )
        .unwrap();
        // 0.9 * 1.6 = 1.44 clamps to 1.0
        assert_eq!(polarity(&toks(&["extremely", "superb"]), &lex), 1.0);
    }

    #[test]
    fn subjectivity_is_plain_mean() {
        let lex = tiny_lexicon();
        assert_relative_eq!(
            subjectivity(&toks(&["good", "bad"]), &lex),
            0.65,
            max_relative = 1e-12
        );
        // rules do not touch subjectivity
        assert_relative_eq!(
            subjectivity(&toks(&["not", "very", "good"]), &lex),
            0.6,
            max_relative = 1e-12
        );
        assert_eq!(subjectivity(&toks(&["nothing", "here"]), &lex), 0.0);
    }

    #[test]
    fn singleton_subjectivity_is_its_own_value() {
        let lex = AffectLexicon::parse(
            "[meta]\nversion\t0\n[words]\nremarkable\t0.5\t0.9\n[negators]\nnot\n",
            "<t>",
        )
        .unwrap();
        assert_relative_eq!(
            subjectivity(&toks(&["a", "remarkable", "result"]), &lex),
            0.9,
            max_relative = 1e-12
        );
    }

    #[test]
    fn out_of_range_values_rejected() {
        let bad_polarity = "[meta]\nversion\t0\n[words]\nw\t1.5\t0.5\n";
        assert!(matches!(
            AffectLexicon::parse(bad_polarity, "<t>"),
            Err(Error::Lexicon(_))
        ));
        let bad_subjectivity = "[meta]\nversion\t0\n[words]\nw\t0.5\t1.2\n";
        assert!(AffectLexicon::parse(bad_subjectivity, "<t>").is_err());
        let bad_multiplier = "[meta]\nversion\t0\n[words]\nw\t0.5\t0.2\n[intensifiers]\nvery\t-1\n";
        assert!(AffectLexicon::parse(bad_multiplier, "<t>").is_err());
        let no_version = "[words]\nw\t0.5\t0.2\n";
        assert!(AffectLexicon::parse(no_version, "<t>").is_err());
        let dup = "[meta]\nversion\t0\n[words]\nw\t0.5\t0.2\nw\t0.1\t0.1\n";
        assert!(AffectLexicon::parse(dup, "<t>").is_err());
    }

    #[test]
    fn bundled_lexicon_loads_with_enough_entries() {
        let lex = AffectLexicon::default_bundled().unwrap();
        assert!(!lex.version().is_empty());
        assert!(
            lex.entry_count() >= 2000,
            "bundled lexicon has {} entries",
            lex.entry_count()
        );
    }

    #[test]
    fn reload_gives_identical_scores() {
        let lex1 = AffectLexicon::default_bundled().unwrap();
        let lex2 = AffectLexicon::default_bundled().unwrap();
        let seq = toks(&["these", "results", "strongly", "support", "the", "hypothesis"]);
        assert_eq!(score(&seq, &lex1), score(&seq, &lex2));
    }

    #[test]
    fn scores_rows_in_order() {
        let lex = tiny_lexicon();
        let table = KeynessTable {
            label: "x".into(),
            reference: "rest".into(),
            params: CountParams { order: 2, window: 5, min_freq: 3 },
            target_size: 100,
            reference_size: 100,
            threshold: 15.13,
            include_underused: false,
            rows: vec![
                KeynessRow {
                    item: "robust evidence".into(),
                    freq_target: 10,
                    freq_reference: 0,
                    ll: 20.0,
                    log_ratio: 3.0,
                    overused: true,
                },
                KeynessRow {
                    item: "frozen samples".into(),
                    freq_target: 8,
                    freq_reference: 0,
                    ll: 17.0,
                    log_ratio: 2.5,
                    overused: true,
                },
            ],
        };
        let scored = score_collocates(&table, &lex);
        assert_eq!(scored.len(), 2);
        assert_eq!(scored[0].0.item, "robust evidence");
        assert_relative_eq!(scored[0].1.polarity, 0.4, max_relative = 1e-12);
        assert_eq!(scored[1].1, AffectScore::NEUTRAL);

        let empty = KeynessTable { rows: vec![], ..table };
        assert!(score_collocates(&empty, &lex).is_empty());
    }

    proptest! {
        #[test]
        fn scores_always_in_bounds(
            tokens in proptest::collection::vec(
                prop_oneof![
                    Just("good".to_string()), Just("bad".to_string()),
                    Just("robust".to_string()), Just("very".to_string()),
                    Just("slightly".to_string()), Just("not".to_string()),
                    Just("never".to_string()), Just("filler".to_string()),
                    "[a-z]{1,6}",
                ],
                0..30,
            ),
        ) {
            let lex = tiny_lexicon();
            let s = score(&tokens, &lex);
            prop_assert!((-1.0..=1.0).contains(&s.polarity), "polarity {}", s.polarity);
            prop_assert!((0.0..=1.0).contains(&s.subjectivity), "subjectivity {}", s.subjectivity);
        }

        #[test]
        fn determinism(tokens in proptest::collection::vec("[a-z]{1,8}", 0..20)) {
            let lex = tiny_lexicon();
            prop_assert_eq!(score(&tokens, &lex), score(&tokens, &lex));
        }
    }
}
