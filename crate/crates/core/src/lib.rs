//! Keyness analysis for labeled citation corpora.
//!
//! Given a corpus of short "citation statements" labeled by rhetorical
//! class (supporting / disputing / mentioning), this crate extracts content
//! terms and windowed collocates per class, scores how characteristic each
//! item is of its class with the log-likelihood keyness statistic, tags
//! items with a small averaged-perceptron POS tagger, scores them with a
//! lexicon-based polarity/subjectivity scorer, and correlates keyness with
//! affect — producing the comparison tables as CSV, JSON, and markdown.
//!
//! The pieces compose as a pipeline but are usable on their own:
//!
//! - [`corpus`] — JSONL/CSV ingestion of labeled statements.
//! - [`text`] — tokenization, normalization, stopword filtering.
//! - [`tagger`] — averaged-perceptron POS tagging (bundled model).
//! - [`collocate`] — term and windowed n-gram counting, mergeable tables.
//! - [`keyness`] — log-likelihood and log-ratio scoring of count tables.
//! - [`affect`] — lexicon-based polarity/subjectivity scoring.
//! - [`analytics`] — Pearson correlation and tag-distribution summaries.
//! - [`pipeline`] — the end-to-end run, deterministic across thread counts.
//! - [`report`] — serialization with embedded config echo.
//! - [`synth`] — deterministic synthetic fixtures for tests and benchmarks.
//!
//! Numeric kernels ([`keyness::log_likelihood`], [`analytics::pearson`], …)
//! are generic over the float width via the [`Real`] trait; the table types
//! fix [`Score`] = `f64`.

pub mod affect;
pub mod analytics;
pub mod collocate;
pub mod corpus;
pub mod error;
pub mod keyness;
pub mod num;
pub mod pipeline;
pub mod report;
pub mod synth;
pub mod tagger;
pub mod text;

pub use error::{Error, Result};
pub use num::Real;

/// Version string embedded in every emitted file's config echo.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Scalar type used by every concrete table and report.
pub type Score = f64;

pub use affect::{AffectLexicon, AffectScore};
pub use analytics::{pearson, CorrelationCell, PosDistMode, PosDistribution};
pub use collocate::{count_collocates, count_terms, extract_ngrams, CountParams, CountTable};
pub use corpus::{CitationStatement, LabeledCorpus, Subcorpus};
pub use keyness::{
    keyness_table, log_likelihood, log_ratio, one_vs_rest, KeynessRow, KeynessTable,
    DEFAULT_LL_THRESHOLD,
};
pub use pipeline::{run_full_analysis, AnalysisBundle, AnalysisConfig, EmitFormat};
pub use tagger::TaggerModel;
pub use text::{normalized_tokens, tokenize, StopwordSet, TokenSeq};
