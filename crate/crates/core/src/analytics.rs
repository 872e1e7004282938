//! Correlation and part-of-speech summaries over scored collocate tables.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::affect::AffectScore;
use crate::error::{Error, Result};
use crate::keyness::{KeynessRow, KeynessTable};
use crate::num::Real;
use crate::tagger::TaggerModel;
use crate::Score;

/// Pearson product-moment correlation of two equal-length samples.
///
/// Degenerate inputs are reported as errors rather than silently mapped to
/// a coefficient: fewer than two points or a zero-variance side has no
/// defined correlation.
pub fn pearson<F: Real>(xs: &[F], ys: &[F]) -> Result<F> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidArgument(format!(
            "correlation needs paired samples, got {} and {} values",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate(format!(
            "correlation undefined for {} point(s)",
            xs.len()
        )));
    }
    let n = F::from_count(xs.len() as u64);
    let mean_x = xs.iter().copied().sum::<F>() / n;
    let mean_y = ys.iter().copied().sum::<F>() / n;
    let mut cov = F::zero();
    let mut var_x = F::zero();
    let mut var_y = F::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov = cov + dx * dy;
        var_x = var_x + dx * dx;
        var_y = var_y + dy * dy;
    }
    if var_x.is_zero() || var_y.is_zero() {
        return Err(Error::Degenerate(
            "correlation undefined: a sample has zero variance".into(),
        ));
    }
    let r = cov / (var_x.sqrt() * var_y.sqrt());
    // rounding can push |r| a hair past 1 on collinear data
    Ok(r.min(F::one()).max(-F::one()))
}

/// Which affect dimension a correlation cell pairs against keyness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AffectDimension {
    Polarity,
    Subjectivity,
}

impl AffectDimension {
    pub const BOTH: [AffectDimension; 2] = [AffectDimension::Polarity, AffectDimension::Subjectivity];

    pub fn name(self) -> &'static str {
        match self {
            AffectDimension::Polarity => "polarity",
            AffectDimension::Subjectivity => "subjectivity",
        }
    }

    fn pick(self, score: &AffectScore) -> Score {
        match self {
            AffectDimension::Polarity => score.polarity,
            AffectDimension::Subjectivity => score.subjectivity,
        }
    }
}

/// Correlation between one affect dimension and log-likelihood over a set
/// of scored collocates. `r` is `None` when the coefficient is undefined,
/// with the reason spelled out rather than a stand-in value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationCell {
    pub dimension: AffectDimension,
    pub n: usize,
    pub r: Option<Score>,
    pub undefined: Option<String>,
}

impl CorrelationCell {
    pub fn is_defined(&self) -> bool {
        self.r.is_some()
    }
}

/// Correlates one affect dimension against row log-likelihoods.
pub fn affect_correlation(
    scored: &[(KeynessRow, AffectScore)],
    dimension: AffectDimension,
) -> CorrelationCell {
    let xs: Vec<Score> = scored.iter().map(|(_, s)| dimension.pick(s)).collect();
    let ys: Vec<Score> = scored.iter().map(|(row, _)| row.ll).collect();
    match pearson(&xs, &ys) {
        Ok(r) => CorrelationCell {
            dimension,
            n: scored.len(),
            r: Some(r),
            undefined: None,
        },
        Err(err) => CorrelationCell {
            dimension,
            n: scored.len(),
            r: None,
            undefined: Some(err.to_string()),
        },
    }
}

/// Both affect dimensions correlated against log-likelihood.
pub fn affect_correlations(scored: &[(KeynessRow, AffectScore)]) -> Vec<CorrelationCell> {
    AffectDimension::BOTH
        .iter()
        .map(|&dim| affect_correlation(scored, dim))
        .collect()
}

/// How part-of-speech percentages are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosDistMode {
    /// Share of all tokens across retained collocates carrying each tag;
    /// shares sum to 100 whenever the table is non-empty.
    Tokens,
    /// Share of collocates containing at least one token with each tag;
    /// shares can sum past 100 because one collocate may hold several tags.
    Presence,
}

impl PosDistMode {
    pub fn name(self) -> &'static str {
        match self {
            PosDistMode::Tokens => "tokens",
            PosDistMode::Presence => "presence",
        }
    }
}

/// Tag shares over the retained rows of a keyness table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosDistribution {
    pub mode: PosDistMode,
    /// Tokens mode: tokens tagged. Presence mode: collocates examined.
    pub total: u64,
    pub counts: BTreeMap<String, u64>,
    /// Percentages in [0, 100], keyed by tag.
    pub shares: BTreeMap<String, Score>,
}

/// Tags every retained collocate and tallies tag shares.
pub fn pos_distribution(
    table: &KeynessTable,
    model: &TaggerModel,
    mode: PosDistMode,
) -> PosDistribution {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut total: u64 = 0;
    for row in &table.rows {
        let words: Vec<String> = row.item.split(' ').map(|t| t.to_string()).collect();
        let tags = model.tag_words(&words);
        match mode {
            PosDistMode::Tokens => {
                for tag in &tags {
                    *counts.entry(tag.clone()).or_insert(0) += 1;
                }
                total += tags.len() as u64;
            }
            PosDistMode::Presence => {
                let mut seen: Vec<&String> = tags.iter().collect();
                seen.sort();
                seen.dedup();
                for tag in seen {
                    *counts.entry(tag.clone()).or_insert(0) += 1;
                }
                total += 1;
            }
        }
    }
    let shares = counts
        .iter()
        .map(|(tag, &count)| {
            let share = if total == 0 {
                0.0
            } else {
                100.0 * count as Score / total as Score
            };
            (tag.clone(), share)
        })
        .collect();
    PosDistribution {
        mode,
        total,
        counts,
        shares,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collocate::CountParams;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn pearson_reference_value() {
        let r = pearson(&[1.0, 2.0, 3.0], &[1.0, 1.0, 2.0]).unwrap();
        // cos(30 degrees): covariance 1 against spreads sqrt(2) and sqrt(6)/3
        assert_relative_eq!(r, 3.0_f64.sqrt() / 2.0, max_relative = 1e-12);
        assert_relative_eq!(r, 0.8660254037844386, epsilon = 1e-4);
    }

    #[test]
    fn perfect_correlation_hits_the_bounds() {
        let xs = [1.0, 2.0, 5.0, 9.0];
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_relative_eq!(pearson(&xs, &xs).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(pearson(&xs, &neg).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_precision_supported() {
        let r = pearson(&[1.0_f32, 2.0, 3.0], &[1.0, 1.0, 2.0]).unwrap();
        assert_relative_eq!(r, 0.8660254, epsilon = 1e-5);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn too_few_points_undefined() {
        assert!(matches!(pearson::<f64>(&[], &[]), Err(Error::Degenerate(_))));
        assert!(matches!(
            pearson(&[1.0], &[2.0]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn zero_variance_undefined_not_zero() {
        let flat = [3.0, 3.0, 3.0];
        let varied = [1.0, 2.0, 3.0];
        assert!(matches!(
            pearson(&flat, &varied),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            pearson(&varied, &flat),
            Err(Error::Degenerate(_))
        ));
    }

    fn scored(values: &[(f64, f64, f64)]) -> Vec<(KeynessRow, AffectScore)> {
        values
            .iter()
            .enumerate()
            .map(|(i, &(polarity, subjectivity, ll))| {
                (
                    KeynessRow {
                        item: format!("item{i}"),
                        freq_target: 10,
                        freq_reference: 1,
                        ll,
                        log_ratio: 1.0,
                        overused: true,
                    },
                    AffectScore {
                        polarity,
                        subjectivity,
                    },
                )
            })
            .collect()
    }

    #[test]
    fn correlation_cell_matches_direct_pearson() {
        let rows = scored(&[(0.1, 0.2, 20.0), (0.5, 0.4, 30.0), (-0.2, 0.3, 18.0)]);
        let cell = affect_correlation(&rows, AffectDimension::Polarity);
        let expected = pearson(&[0.1, 0.5, -0.2], &[20.0, 30.0, 18.0]).unwrap();
        assert_eq!(cell.n, 3);
        assert_relative_eq!(cell.r.unwrap(), expected, max_relative = 1e-12);
        assert!(cell.undefined.is_none());
    }

    #[test]
    fn degenerate_cells_spell_out_why() {
        let one = scored(&[(0.1, 0.2, 20.0)]);
        let cell = affect_correlation(&one, AffectDimension::Polarity);
        assert_eq!(cell.n, 1);
        assert!(cell.r.is_none());
        assert!(cell.undefined.as_deref().unwrap().contains("undefined"));

        // all-neutral affect: zero variance on the x side
        let flat = scored(&[(0.0, 0.3, 20.0), (0.0, 0.4, 30.0), (0.0, 0.2, 25.0)]);
        let cell = affect_correlation(&flat, AffectDimension::Polarity);
        assert!(cell.r.is_none());
        assert!(cell.undefined.as_deref().unwrap().contains("variance"));
        // but subjectivity still varies, so that cell is defined
        let cell = affect_correlation(&flat, AffectDimension::Subjectivity);
        assert!(cell.is_defined());
    }

    #[test]
    fn both_dimensions_reported() {
        let rows = scored(&[(0.1, 0.2, 20.0), (0.5, 0.4, 30.0)]);
        let cells = affect_correlations(&rows);
        assert_eq!(cells.len(), 2);
        assert_eq!(cells[0].dimension, AffectDimension::Polarity);
        assert_eq!(cells[1].dimension, AffectDimension::Subjectivity);
    }

    /// A model whose tag dictionary decides every word this test uses, so
    /// expected tags are readable off the fixture.
    fn dict_model(pairs: &[(&str, &str)]) -> TaggerModel {
        let tagdict: Vec<String> = pairs
            .iter()
            .map(|(w, t)| format!("\"{w}\": \"{t}\""))
            .collect();
        let json = format!(
            r#"{{
                "format": "corpkey-tagger/1",
                "version": "test",
                "provenance": "unit test fixture",
                "tagset": ["JJ", "NN", "NNS", "RB", "VBN"],
                "tagdict": {{ {} }},
                "weights": {{ "bias": {{ "NN": 0.001 }} }}
            }}"#,
            tagdict.join(", ")
        );
        TaggerModel::parse_json(&json, "<test model>").unwrap()
    }

    fn table(items: &[&str]) -> KeynessTable {
        KeynessTable {
            label: "t".into(),
            reference: "rest".into(),
            params: CountParams { order: 2, window: 5, min_freq: 3 },
            target_size: 1000,
            reference_size: 1000,
            threshold: 15.13,
            include_underused: false,
            rows: items
                .iter()
                .map(|item| KeynessRow {
                    item: item.to_string(),
                    freq_target: 20,
                    freq_reference: 1,
                    ll: 20.0,
                    log_ratio: 3.0,
                    overused: true,
                })
                .collect(),
        }
    }

    #[test]
    fn uniform_tag_is_the_whole_distribution() {
        let model = dict_model(&[("robust", "JJ"), ("novel", "JJ")]);
        let dist = pos_distribution(&table(&["robust", "novel"]), &model, PosDistMode::Tokens);
        assert_eq!(dist.total, 2);
        assert_eq!(dist.counts["JJ"], 2);
        assert_relative_eq!(dist.shares["JJ"], 100.0, max_relative = 1e-12);
    }

    #[test]
    fn token_shares_follow_hand_tally() {
        let model = dict_model(&[
            ("robust", "JJ"),
            ("novel", "JJ"),
            ("results", "NNS"),
            ("tested", "VBN"),
        ]);
        // tokens: JJ JJ NNS VBN -> JJ 50%, NNS 25%, VBN 25%
        let dist = pos_distribution(
            &table(&["robust results", "novel tested"]),
            &model,
            PosDistMode::Tokens,
        );
        assert_eq!(dist.total, 4);
        assert_relative_eq!(dist.shares["JJ"], 50.0, max_relative = 1e-12);
        assert_relative_eq!(dist.shares["NNS"], 25.0, max_relative = 1e-12);
        assert_relative_eq!(dist.shares["VBN"], 25.0, max_relative = 1e-12);
        let sum: Score = dist.shares.values().sum();
        assert_relative_eq!(sum, 100.0, max_relative = 1e-9);
    }

    #[test]
    fn presence_counts_each_collocate_once_per_tag() {
        let model = dict_model(&[
            ("robust", "JJ"),
            ("novel", "JJ"),
            ("results", "NNS"),
        ]);
        let dist = pos_distribution(
            &table(&["robust novel", "robust results"]),
            &model,
            PosDistMode::Presence,
        );
        // "robust novel" holds JJ once despite two JJ tokens
        assert_eq!(dist.total, 2);
        assert_eq!(dist.counts["JJ"], 2);
        assert_eq!(dist.counts["NNS"], 1);
        assert_relative_eq!(dist.shares["JJ"], 100.0, max_relative = 1e-12);
        assert_relative_eq!(dist.shares["NNS"], 50.0, max_relative = 1e-12);
    }

    #[test]
    fn empty_table_yields_empty_distribution() {
        let model = dict_model(&[]);
        let dist = pos_distribution(&table(&[]), &model, PosDistMode::Tokens);
        assert_eq!(dist.total, 0);
        assert!(dist.counts.is_empty());
        assert!(dist.shares.is_empty());
    }

    proptest! {
        #[test]
        fn pearson_symmetric_and_affine_invariant(
            pairs in proptest::collection::vec((-100.0_f64..100.0, -100.0_f64..100.0), 3..50),
            a in prop_oneof![0.1_f64..10.0, -10.0_f64..-0.1],
            b in -50.0_f64..50.0,
        ) {
            let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            if let (Ok(rxy), Ok(ryx)) = (pearson(&xs, &ys), pearson(&ys, &xs)) {
                prop_assert!((rxy - ryx).abs() < 1e-9, "asymmetry {rxy} vs {ryx}");
                let scaled: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
                let r_scaled = pearson(&scaled, &ys).unwrap();
                prop_assert!(
                    (r_scaled - a.signum() * rxy).abs() < 1e-9,
                    "affine drift: {r_scaled} vs {}",
                    a.signum() * rxy
                );
                prop_assert!((-1.0..=1.0).contains(&rxy));
            }
        }

        #[test]
        fn token_shares_sum_to_one_hundred(
            items in proptest::collection::vec(
                prop_oneof![
                    Just("robust"), Just("novel"), Just("results"), Just("tested"),
                    Just("robust results"), Just("novel tested"), Just("robust novel tested"),
                ],
                1..20,
            ),
        ) {
            let model = dict_model(&[
                ("robust", "JJ"), ("novel", "JJ"), ("results", "NNS"), ("tested", "VBN"),
            ]);
            let items: Vec<&str> = items.to_vec();
            let dist = pos_distribution(&table(&items), &model, PosDistMode::Tokens);
            let sum: Score = dist.shares.values().sum();
            prop_assert!((sum - 100.0).abs() < 1e-9, "shares sum to {sum}");
        }
    }
}
