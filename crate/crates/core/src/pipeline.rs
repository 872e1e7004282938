//! End-to-end orchestration: load → partition → sample → tag/count →
//! keyness → affect scoring → analytics, assembled into a single bundle.
//!
//! Counting fans statements out over fixed-size chunks that are merged in
//! chunk order, so results are identical whatever the worker-thread count;
//! `threads: Some(1)` bypasses the thread pool entirely.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affect::{score_collocates, AffectLexicon, AffectScore};
use crate::analytics::{affect_correlations, pos_distribution, CorrelationCell, PosDistMode, PosDistribution};
use crate::collocate::{self, CountParams, CountTable, TermCountOpts};
use crate::corpus::{self, CitationStatement, CorpusSummary, FieldMap, LabeledCorpus, LoadOptions, Subcorpus};
use crate::error::{Error, Result};
use crate::keyness::{one_vs_rest, KeynessTable, DEFAULT_LL_THRESHOLD};
use crate::tagger::{self, TaggerModel};
use crate::text::{self, StopwordSet};
use crate::Score;

pub const DEFAULT_WINDOW: usize = 5;
pub const DEFAULT_MIN_FREQ: u64 = 3;
pub const DEFAULT_ORDERS: [u8; 3] = [1, 2, 3];

/// Statements per counting chunk. Fixed (not derived from thread count) so
/// partial-table merge order never depends on parallelism.
const COUNT_CHUNK: usize = 1024;

/// Output serializations a run can emit alongside the bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmitFormat {
    Csv,
    Json,
    Markdown,
}

impl EmitFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            EmitFormat::Csv => "csv",
            EmitFormat::Json => "json",
            EmitFormat::Markdown => "markdown",
        }
    }

    /// Parses a comma-separated list like `csv,json`.
    pub fn parse_list(s: &str) -> Result<Vec<EmitFormat>> {
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let fmt = part.parse()?;
            if !out.contains(&fmt) {
                out.push(fmt);
            }
        }
        Ok(out)
    }
}

impl FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            "markdown" | "md" => Ok(EmitFormat::Markdown),
            other => Err(Error::Config(format!(
                "unknown output format `{other}` (expected csv, json, or markdown)"
            ))),
        }
    }
}

/// Everything a full analysis run needs to know.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    /// `jsonl` or `csv`.
    pub format: String,
    pub field_map: FieldMap,
    /// Restrict the analysis to these labels; `None` analyzes every label
    /// present in the input.
    pub labels: Option<Vec<String>>,
    /// Per-class sample size; `None` analyzes every statement.
    pub sample_n: Option<usize>,
    pub seed: u64,
    /// Collocate orders to analyze, each in {1, 2, 3}.
    pub orders: Vec<u8>,
    pub window: usize,
    /// Minimum collocate frequency; applies to orders ≥ 2.
    pub min_freq: u64,
    pub ll_threshold: Score,
    /// `None` uses the bundled English stopword list.
    pub stopwords: Option<PathBuf>,
    /// `None` uses the bundled affect lexicon.
    pub lexicon: Option<PathBuf>,
    /// `None` uses the bundled tagger model.
    pub tagger_model: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub emit: Vec<EmitFormat>,
    /// Worker threads for counting; `Some(1)` forces a sequential run and
    /// `None` uses all available cores. An execution detail, not an
    /// analysis parameter: output is identical for every setting, so it is
    /// excluded from serialized config echoes.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl AnalysisConfig {
    /// A default configuration for the given input and output paths.
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        AnalysisConfig {
            input: input.into(),
            format: "jsonl".into(),
            field_map: FieldMap::default(),
            labels: None,
            sample_n: None,
            seed: 0,
            orders: DEFAULT_ORDERS.to_vec(),
            window: DEFAULT_WINDOW,
            min_freq: DEFAULT_MIN_FREQ,
            ll_threshold: DEFAULT_LL_THRESHOLD,
            stopwords: None,
            lexicon: None,
            tagger_model: None,
            out_dir: out_dir.into(),
            emit: vec![EmitFormat::Csv],
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.format != "jsonl" && self.format != "csv" {
            return bad(format!("unknown input format `{}`", self.format));
        }
        if self.orders.is_empty() {
            return bad("no collocate orders selected".into());
        }
        for &order in &self.orders {
            if !(1..=3).contains(&order) {
                return bad(format!("order {order} outside the supported range 1..=3"));
            }
        }
        let max_order = *self.orders.iter().max().expect("orders is non-empty") as usize;
        if self.window < max_order {
            return bad(format!(
                "window {} is smaller than the largest selected order {max_order}",
                self.window
            ));
        }
        if self.min_freq < 1 {
            return bad("min_freq must be at least 1".into());
        }
        if !self.ll_threshold.is_finite() || self.ll_threshold < 0.0 {
            return bad(format!(
                "ll_threshold must be finite and non-negative, got {}",
                self.ll_threshold
            ));
        }
        if let Some(labels) = &self.labels {
            if labels.is_empty() {
                return bad("label restriction lists no labels".into());
            }
        }
        if self.sample_n == Some(0) {
            return bad("sample size must be at least 1".into());
        }
        if self.threads == Some(0) {
            return bad("thread count must be at least 1".into());
        }
        Ok(())
    }

    /// Selected orders, ascending and deduplicated.
    pub fn normalized_orders(&self) -> Vec<u8> {
        let mut orders = self.orders.clone();
        orders.sort_unstable();
        orders.dedup();
        orders
    }
}

/// Loaded stopwords, lexicon, and tagger model for one run.
pub struct Assets {
    pub stopwords: StopwordSet,
    pub lexicon: AffectLexicon,
    pub tagger: TaggerModel,
}

impl Assets {
    pub fn load(config: &AnalysisConfig) -> Result<Assets> {
        let stopwords = match &config.stopwords {
            Some(path) => StopwordSet::load(path)?,
            None => StopwordSet::default_english(),
        };
        let lexicon = match &config.lexicon {
            Some(path) => AffectLexicon::load(path)?,
            None => AffectLexicon::default_bundled()?,
        };
        let tagger = match &config.tagger_model {
            Some(path) => TaggerModel::load(path)?,
            None => tagger::TaggerModel::default_bundled().clone(),
        };
        Ok(Assets {
            stopwords,
            lexicon,
            tagger,
        })
    }
}

/// Keyness, affect, tag distribution, and correlations for one
/// (class, order) cell. `affect` is parallel to `keyness.rows`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderReport {
    pub order: u8,
    pub keyness: KeynessTable,
    pub affect: Vec<AffectScore>,
    pub pos_dist: PosDistribution,
    pub correlations: Vec<CorrelationCell>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassReport {
    pub label: String,
    pub orders: BTreeMap<u8, OrderReport>,
}

/// The machine-readable result of a full run: every table plus the exact
/// configuration and asset versions that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisBundle {
    pub tool_version: String,
    pub lexicon_version: String,
    pub tagger_version: String,
    pub config: AnalysisConfig,
    /// Label counts of the corpus as loaded (before sampling).
    pub summary: CorpusSummary,
    /// Statements analyzed per label (after sampling).
    pub analyzed: BTreeMap<String, u64>,
    pub classes: BTreeMap<String, ClassReport>,
}

impl AnalysisBundle {
    /// Deterministic pretty JSON: sorted maps throughout, shortest
    /// round-trip float formatting, trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }
}

/// Counts one subcorpus at one order over fixed-size statement chunks.
/// Order 1 counts tagged content-word terms (no frequency pruning); orders
/// 2 and 3 count windowed collocates pruned at `min_freq`.
pub fn count_statements(
    label: &str,
    statements: &[CitationStatement],
    order: u8,
    window: usize,
    min_freq: u64,
    stopwords: &StopwordSet,
    tagger: &TaggerModel,
    sequential: bool,
) -> Result<CountTable> {
    let params = if order == 1 {
        CountParams::terms()
    } else {
        CountParams {
            order,
            window,
            min_freq: 1,
        }
    };
    let content_prefixes = tagger::default_content_prefixes();
    let term_opts = TermCountOpts {
        stopwords,
        tagger,
        content_prefixes: &content_prefixes,
        include_numerals: false,
    };

    let count_chunk = |chunk: &[CitationStatement]| -> Result<CountTable> {
        let mut table = CountTable::empty(label, params.clone());
        for stmt in chunk {
            if order == 1 {
                let (seq, tags) = tagger::tag_statement(&stmt.id, &stmt.text, tagger);
                collocate::accumulate_terms(&seq, &tags, &term_opts, &mut table);
            } else {
                let seq = text::normalized_tokens(&stmt.id, &stmt.text);
                let filtered = text::remove_stopwords(&seq, stopwords);
                collocate::accumulate_collocates(&filtered, order, window, &mut table)
                    .map_err(|e| e.in_stage("count", Some(stmt.id.clone())))?;
            }
        }
        Ok(table)
    };

    let partials: Vec<CountTable> = if sequential {
        statements
            .chunks(COUNT_CHUNK)
            .map(count_chunk)
            .collect::<Result<_>>()?
    } else {
        statements
            .par_chunks(COUNT_CHUNK)
            .map(count_chunk)
            .collect::<Result<_>>()?
    };

    let mut merged = CountTable::empty(label, params);
    for partial in &partials {
        merged = collocate::merge_tables(&merged, partial)?;
    }
    if order > 1 {
        merged.apply_min_freq(min_freq);
    }
    Ok(merged)
}

fn data_error(config: &AnalysisConfig, reason: String) -> Error {
    Error::malformed(config.input.display().to_string(), 0, reason)
}

/// Partitions a loaded corpus into the per-label subcorpora an analysis
/// will compare: applies the config's label restriction, requires at least
/// two labels, and draws the per-class sample.
pub fn partitioned_samples(
    config: &AnalysisConfig,
    corpus: &LabeledCorpus,
) -> Result<BTreeMap<String, Subcorpus>> {
    let mut parts = corpus.partition();
    if let Some(labels) = &config.labels {
        for label in labels {
            if !parts.contains_key(label) {
                return Err(data_error(
                    config,
                    format!("declared label `{label}` has no statements"),
                )
                .in_stage("partition", None));
            }
        }
        parts.retain(|label, _| labels.contains(label));
    }
    if parts.len() < 2 {
        return Err(data_error(
            config,
            format!(
                "keyness comparison needs at least two labels, corpus has {}",
                parts.len()
            ),
        )
        .in_stage("partition", None));
    }

    Ok(match config.sample_n {
        Some(n) => parts
            .into_iter()
            .map(|(label, sub)| {
                let sampled = sub.sample(n, config.seed);
                (label, sampled)
            })
            .collect(),
        None => parts,
    })
}

/// Runs `f` under the requested worker-thread setting: `Some(1)` stays on
/// the calling thread, `None` uses the process-wide default pool, and
/// `Some(n)` builds a dedicated n-thread pool. The result is the same in
/// every case; only wall-clock time differs.
pub fn with_thread_pool<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    match threads {
        Some(1) | None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("cannot build {n}-thread pool: {e}")))?;
            pool.install(f)
        }
    }
}

/// Runs the full pipeline on an already-loaded corpus.
pub fn analyze_corpus(
    config: &AnalysisConfig,
    corpus: &LabeledCorpus,
    assets: &Assets,
) -> Result<AnalysisBundle> {
    config.validate()?;
    let summary = corpus.summary();
    let parts = partitioned_samples(config, corpus)?;
    let analyzed: BTreeMap<String, u64> = parts
        .iter()
        .map(|(label, sub)| (label.clone(), sub.len() as u64))
        .collect();

    let sequential = config.threads == Some(1);
    let orders = config.normalized_orders();

    let run = || -> Result<BTreeMap<u8, BTreeMap<String, KeynessTable>>> {
        let mut by_order = BTreeMap::new();
        for &order in &orders {
            let mut tables: BTreeMap<String, CountTable> = BTreeMap::new();
            for (label, sub) in &parts {
                let table = count_statements(
                    label,
                    sub.statements(),
                    order,
                    config.window,
                    config.min_freq,
                    &assets.stopwords,
                    &assets.tagger,
                    sequential,
                )
                .map_err(|e| match e {
                    already @ Error::Stage { .. } => already,
                    other => other.in_stage("count", None),
                })?;
                tables.insert(label.clone(), table);
            }
            let keyness = one_vs_rest(&tables, config.ll_threshold, false)
                .map_err(|e| e.in_stage("keyness", None))?;
            by_order.insert(order, keyness);
        }
        Ok(by_order)
    };

    let by_order = with_thread_pool(config.threads, run)?;

    // affect scoring and analytics per (class, order) cell
    let mut classes: BTreeMap<String, ClassReport> = BTreeMap::new();
    for (order, tables) in by_order {
        for (label, keyness) in tables {
            let scored = score_collocates(&keyness, &assets.lexicon);
            let affect: Vec<AffectScore> = scored.iter().map(|(_, s)| *s).collect();
            let correlations = affect_correlations(&scored);
            let pos_dist = pos_distribution(&keyness, &assets.tagger, PosDistMode::Tokens);
            let report = OrderReport {
                order,
                keyness,
                affect,
                pos_dist,
                correlations,
            };
            classes
                .entry(label.clone())
                .or_insert_with(|| ClassReport {
                    label: label.clone(),
                    orders: BTreeMap::new(),
                })
                .orders
                .insert(order, report);
        }
    }

    Ok(AnalysisBundle {
        tool_version: crate::TOOL_VERSION.to_string(),
        lexicon_version: assets.lexicon.version().to_string(),
        tagger_version: assets.tagger.version().to_string(),
        config: config.clone(),
        summary,
        analyzed,
        classes,
    })
}

/// Loads the corpus named by the config, rejecting inputs that leave
/// nothing to analyze.
pub fn load_corpus(config: &AnalysisConfig) -> Result<LabeledCorpus> {
    let opts = LoadOptions {
        field_map: config.field_map.clone(),
        declared_labels: config
            .labels
            .as_ref()
            .map(|ls| ls.iter().cloned().collect()),
        ..LoadOptions::default()
    };
    let report = corpus::load(&config.input, &config.format, &opts)
        .map_err(|e| e.in_stage("load", None))?;
    if report.corpus.is_empty() {
        return Err(
            data_error(config, "input contains no usable statements".into())
                .in_stage("load", None),
        );
    }
    Ok(report.corpus)
}

/// Loads the corpus named by the config and runs the full pipeline.
pub fn run_full_analysis(config: &AnalysisConfig) -> Result<AnalysisBundle> {
    config.validate()?;
    let assets = Assets::load(config).map_err(|e| e.in_stage("load", None))?;
    let corpus = load_corpus(config)?;
    analyze_corpus(config, &corpus, &assets)
}
