//! Log-likelihood keyness and log-ratio effect size.
//!
//! Given an item occurring `a` times in a target corpus of size `c` and `b`
//! times in a reference corpus of size `d`, the two-term log-likelihood
//! statistic is
//!
//! ```text
//! E1 = c * (a + b) / (c + d)
//! E2 = d * (a + b) / (c + d)
//! LL = 2 * (a * ln(a / E1) + b * ln(b / E2))
//! ```
//!
//! with the convention that `x * ln(x / E) = 0` when `x = 0`. An item is
//! *overused* in the target when its relative frequency there exceeds the
//! reference (`a/c > b/d`, decided exactly on integers). The effect size is
//! `log2(((a + 0.5) / c) / ((b + 0.5) / d))`, smoothed so items absent from
//! one side stay finite.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::collocate::{CountParams, CountTable};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::Score;

/// Critical value of chi-squared with one degree of freedom at p < 0.0001;
/// the default significance cut for keyness tables.
pub const DEFAULT_LL_THRESHOLD: Score = 15.13;

fn check_counts(a: u64, b: u64, c: u64, d: u64) -> Result<()> {
    if c == 0 || d == 0 {
        return Err(Error::InvalidArgument(
            "corpus sizes c and d must be positive".into(),
        ));
    }
    if a > c || b > d {
        return Err(Error::InvalidArgument(format!(
            "item frequency exceeds corpus size (a={a}, c={c}, b={b}, d={d})"
        )));
    }
    if a + b == 0 {
        return Err(Error::InvalidArgument(
            "item must occur at least once across the two corpora".into(),
        ));
    }
    Ok(())
}

/// Two-term log-likelihood ratio statistic. Always >= 0; 0 exactly when the
/// item's relative frequencies are identical in both corpora.
pub fn log_likelihood<F: Real>(a: u64, b: u64, c: u64, d: u64) -> Result<F> {
    check_counts(a, b, c, d)?;
    let (af, bf, cf, df) = (
        F::from_count(a),
        F::from_count(b),
        F::from_count(c),
        F::from_count(d),
    );
    let combined = (af + bf) / (cf + df);
    let e1 = cf * combined;
    let e2 = df * combined;
    let mut ll = F::zero();
    if a > 0 {
        ll = ll + af * (af / e1).ln();
    }
    if b > 0 {
        ll = ll + bf * (bf / e2).ln();
    }
    let two = F::from_count(2);
    // Guard tiny negative values from rounding when frequencies match.
    Ok((two * ll).max(F::zero()))
}

/// Base-2 log of the smoothed relative-frequency ratio between target and
/// reference. Positive means overused in the target.
pub fn log_ratio<F: Real>(a: u64, b: u64, c: u64, d: u64) -> Result<F> {
    check_counts(a, b, c, d)?;
    let half = F::from_f64(0.5).expect("0.5 representable");
    let target_rate = (F::from_count(a) + half) / F::from_count(c);
    let reference_rate = (F::from_count(b) + half) / F::from_count(d);
    Ok((target_rate / reference_rate).log2())
}

/// Exact integer test for `a/c > b/d`.
pub fn is_overused(a: u64, b: u64, c: u64, d: u64) -> bool {
    (a as u128) * (d as u128) > (b as u128) * (c as u128)
}

/// One scored item of a keyness table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeynessRow {
    pub item: String,
    /// Occurrences in the target subcorpus (`a`).
    pub freq_target: u64,
    /// Occurrences in the reference (`b`).
    pub freq_reference: u64,
    pub ll: Score,
    pub log_ratio: Score,
    /// True when the item is relatively more frequent in the target.
    pub overused: bool,
}

/// Items significantly overused in one target subcorpus relative to a
/// reference, sorted by descending log-likelihood.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeynessTable {
    /// Label of the target subcorpus.
    pub label: String,
    /// Description of the reference ("rest" for one-vs-rest, or a label).
    pub reference: String,
    pub params: CountParams,
    /// Target population size (`c`).
    pub target_size: u64,
    /// Reference population size (`d`).
    pub reference_size: u64,
    pub threshold: Score,
    /// True when underused rows passing the threshold are retained too.
    pub include_underused: bool,
    pub rows: Vec<KeynessRow>,
}

impl KeynessTable {
    pub fn top(&self, n: usize) -> &[KeynessRow] {
        &self.rows[..n.min(self.rows.len())]
    }

    pub fn row(&self, item: &str) -> Option<&KeynessRow> {
        self.rows.iter().find(|r| r.item == item)
    }
}

/// Scores every item of the target table against the reference table and
/// retains rows meeting the significance threshold — overused rows only
/// unless `include_underused` is set. Rows are ordered by descending `ll`,
/// then descending `freq_target`, then item.
pub fn keyness_table(
    target: &CountTable,
    reference: &CountTable,
    threshold: Score,
    include_underused: bool,
) -> Result<KeynessTable> {
    if target.params != reference.params {
        return Err(Error::ParamMismatch(format!(
            "target and reference counted with different params: {:?} vs {:?}",
            target.params, reference.params
        )));
    }
    if threshold < 0.0 || !threshold.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "threshold must be finite and non-negative, got {threshold}"
        )));
    }
    let c = target.total_items;
    let d = reference.total_items;
    if c == 0 || d == 0 {
        return Err(Error::Degenerate(format!(
            "keyness needs non-empty populations (target {c}, reference {d})"
        )));
    }
    // Score the union of both tables' items: reference-only items can still
    // surface as underused rows when that mode is on.
    let mut items: Vec<&String> = target.counts.keys().collect();
    if include_underused {
        items.extend(reference.counts.keys().filter(|k| !target.counts.contains_key(*k)));
    }
    let mut rows = Vec::new();
    for item in items {
        let a = target.count_of(item);
        let b = reference.count_of(item);
        if a + b == 0 {
            continue;
        }
        let overused = is_overused(a, b, c, d);
        if !overused && !include_underused {
            continue;
        }
        let ll: Score = log_likelihood(a, b, c, d)?;
        if ll < threshold {
            continue;
        }
        rows.push(KeynessRow {
            item: item.clone(),
            freq_target: a,
            freq_reference: b,
            ll,
            log_ratio: log_ratio(a, b, c, d)?,
            overused,
        });
    }
    rows.sort_unstable_by(|x, y| {
        y.ll
            .partial_cmp(&x.ll)
            .expect("ll is finite")
            .then(y.freq_target.cmp(&x.freq_target))
            .then(x.item.cmp(&y.item))
    });
    Ok(KeynessTable {
        label: target.label.clone(),
        reference: reference.label.clone(),
        params: target.params,
        target_size: c,
        reference_size: d,
        threshold,
        include_underused,
        rows,
    })
}

/// Sums counts across tables regardless of label (params must still agree),
/// producing the rest-of-corpus reference for one-vs-rest comparisons.
fn merge_as_reference(
    tables: &[&CountTable],
    params: CountParams,
    reference_label: &str,
) -> Result<CountTable> {
    let mut out = CountTable::empty(reference_label, params);
    for t in tables {
        if t.params != params {
            return Err(Error::ParamMismatch(format!(
                "reference member {:?} counted with {:?}, expected {:?}",
                t.label, t.params, params
            )));
        }
        out.total_items += t.total_items;
        for (item, count) in &t.counts {
            *out.counts.entry(item.clone()).or_insert(0) += count;
        }
    }
    Ok(out)
}

/// For each label, scores its table against the merged tables of all other
/// labels. Requires at least two labels.
pub fn one_vs_rest(
    tables: &BTreeMap<String, CountTable>,
    threshold: Score,
    include_underused: bool,
) -> Result<BTreeMap<String, KeynessTable>> {
    if tables.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "one-vs-rest needs at least two labels, got {}",
            tables.len()
        )));
    }
    let mut out = BTreeMap::new();
    for (label, target) in tables {
        let rest: Vec<&CountTable> = tables
            .iter()
            .filter(|(l, _)| *l != label)
            .map(|(_, t)| t)
            .collect();
        let reference = merge_as_reference(&rest, target.params, "rest")?;
        out.insert(
            label.clone(),
            keyness_table(target, &reference, threshold, include_underused)?,
        );
    }
    Ok(out)
}

/// Scores every ordered pair of distinct labels directly against each other.
pub fn pairwise(
    tables: &BTreeMap<String, CountTable>,
    threshold: Score,
    include_underused: bool,
) -> Result<BTreeMap<(String, String), KeynessTable>> {
    if tables.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "pairwise keyness needs at least two labels, got {}",
            tables.len()
        )));
    }
    let mut out = BTreeMap::new();
    for (target_label, target) in tables {
        for (reference_label, reference) in tables {
            if target_label == reference_label {
                continue;
            }
            out.insert(
                (target_label.clone(), reference_label.clone()),
                keyness_table(target, reference, threshold, include_underused)?,
            );
        }
    }
    Ok(out)
}
