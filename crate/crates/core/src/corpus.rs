//! Loading, validation, partitioning, and sampling of labeled corpora.
//!
//! A corpus is an ordered collection of short labeled text records
//! ("citation statements"). Input formats are JSONL (one object per line)
//! and CSV with a header row; the canonical output format is JSONL with
//! fields `id`, `text`, `label`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One labeled text record: 1-3 sentences surrounding a citation, plus the
/// rhetorical class assigned to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationStatement {
    pub id: String,
    pub text: String,
    pub label: String,
}

impl CitationStatement {
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let s = CitationStatement {
            id: id.into(),
            text: text.into(),
            label: label.into(),
        };
        if s.text.trim().is_empty() {
            return Err(Error::InvalidArgument(format!(
                "statement {}: empty text",
                s.id
            )));
        }
        if s.label.trim().is_empty() {
            return Err(Error::InvalidArgument(format!(
                "statement {}: empty label",
                s.id
            )));
        }
        Ok(s)
    }
}

/// An ordered corpus with its set of distinct labels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabeledCorpus {
    statements: Vec<CitationStatement>,
    label_set: BTreeSet<String>,
}

impl LabeledCorpus {
    /// Builds a corpus, checking id uniqueness and non-empty text/labels.
    pub fn new(statements: Vec<CitationStatement>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(statements.len());
        let mut label_set = BTreeSet::new();
        for s in &statements {
            if s.text.trim().is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "statement {}: empty text",
                    s.id
                )));
            }
            if s.label.trim().is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "statement {}: empty label",
                    s.id
                )));
            }
            if !ids.insert(s.id.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate id {}", s.id)));
            }
            label_set.insert(s.label.clone());
        }
        Ok(LabeledCorpus {
            statements,
            label_set,
        })
    }

    pub fn statements(&self) -> &[CitationStatement] {
        &self.statements
    }

    pub fn label_set(&self) -> &BTreeSet<String> {
        &self.label_set
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// Splits the corpus into one subcorpus per label, preserving the
    /// per-label statement order. Every statement lands in exactly one
    /// subcorpus.
    pub fn partition(&self) -> BTreeMap<String, Subcorpus> {
        let mut parts: BTreeMap<String, Subcorpus> = BTreeMap::new();
        for s in &self.statements {
            parts
                .entry(s.label.clone())
                .or_insert_with(|| Subcorpus {
                    label: s.label.clone(),
                    statements: Vec::new(),
                })
                .statements
                .push(s.clone());
        }
        parts
    }

    /// Per-label statement counts plus the total.
    pub fn summary(&self) -> CorpusSummary {
        let mut per_label = BTreeMap::new();
        for s in &self.statements {
            *per_label.entry(s.label.clone()).or_insert(0u64) += 1;
        }
        CorpusSummary {
            total: self.statements.len() as u64,
            per_label,
        }
    }

    /// Writes the canonical JSONL form (fields `id`, `text`, `label`).
    pub fn emit_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for s in &self.statements {
            let line = serde_json::to_string(s)
                .map_err(|e| Error::InvalidArgument(format!("serialize {}: {e}", s.id)))?;
            out.write_all(line.as_bytes())
                .and_then(|_| out.write_all(b"\n"))
                .map_err(|e| Error::io("<writer>", e))?;
        }
        Ok(())
    }

    pub fn emit_jsonl_file(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        self.emit_jsonl(std::io::BufWriter::new(f))
    }
}

/// All statements sharing one class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subcorpus {
    label: String,
    statements: Vec<CitationStatement>,
}

impl Subcorpus {
    pub fn new(label: impl Into<String>, statements: Vec<CitationStatement>) -> Result<Self> {
        let label = label.into();
        if let Some(s) = statements.iter().find(|s| s.label != label) {
            return Err(Error::InvalidArgument(format!(
                "statement {} has label {} but subcorpus is {}",
                s.id, s.label, label
            )));
        }
        Ok(Subcorpus { label, statements })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn statements(&self) -> &[CitationStatement] {
        &self.statements
    }

    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }

    /// Uniform random sample of `n` statements without replacement,
    /// deterministic for a fixed seed (ChaCha12 keyed by `seed`). Returns
    /// the subcorpus unchanged when `n >= len`. Selected statements keep
    /// their original relative order.
    pub fn sample(&self, n: usize, seed: u64) -> Subcorpus {
        if n >= self.statements.len() {
            return self.clone();
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        // partial Fisher-Yates over indices, pinned here so the selection
        // is reproducible across rand versions
        let mut idx: Vec<usize> = (0..self.statements.len()).collect();
        for i in 0..n {
            let j = i + rng.gen_range(0..idx.len() - i);
            idx.swap(i, j);
        }
        let mut chosen: Vec<usize> = idx[..n].to_vec();
        chosen.sort_unstable();
        Subcorpus {
            label: self.label.clone(),
            statements: chosen
                .into_iter()
                .map(|i| self.statements[i].clone())
                .collect(),
        }
    }
}

/// Per-label statement counts and the total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub total: u64,
    pub per_label: BTreeMap<String, u64>,
}

/// Maps the record fields of an input file onto id/text/label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMap {
    pub id: String,
    pub text: String,
    pub label: String,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            id: "id".into(),
            text: "text".into(),
            label: "label".into(),
        }
    }
}

/// What to do with a record that fails to parse or validate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MalformedPolicy {
    /// Skip the record, keep a warning. Multi-million-line corpora contain junk.
    #[default]
    Skip,
    /// Abort the load at the first bad record.
    Abort,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub field_map: FieldMap,
    pub on_malformed: MalformedPolicy,
    /// When set, records whose label is outside this set are malformed.
    pub declared_labels: Option<BTreeSet<String>>,
}

/// Outcome of a load: the corpus plus per-line warnings for skipped records.
#[derive(Debug)]
pub struct LoadReport {
    pub corpus: LabeledCorpus,
    /// (line number, reason) for each skipped record.
    pub skipped: Vec<(usize, String)>,
}

impl LoadReport {
    pub fn skipped_count(&self) -> usize {
        self.skipped.len()
    }
}

fn check_record(
    id: String,
    text: String,
    label: String,
    opts: &LoadOptions,
) -> std::result::Result<CitationStatement, String> {
    if text.trim().is_empty() {
        return Err("empty text".into());
    }
    if label.trim().is_empty() {
        return Err("empty label".into());
    }
    if let Some(declared) = &opts.declared_labels {
        if !declared.contains(&label) {
            return Err(format!("label `{label}` not in declared label set"));
        }
    }
    Ok(CitationStatement { id, text, label })
}

fn finish_load(
    path: &str,
    statements: Vec<CitationStatement>,
    skipped: Vec<(usize, String)>,
) -> Result<LoadReport> {
    let corpus = LabeledCorpus::new(statements).map_err(|e| match e {
        Error::InvalidArgument(msg) => Error::malformed(path, 0, msg),
        other => other,
    })?;
    Ok(LoadReport { corpus, skipped })
}

/// Loads a JSONL corpus: one JSON object per line, fields per `field_map`.
/// Blank lines are ignored. Line numbers in errors are 1-based.
pub fn load_jsonl(path: &Path, opts: &LoadOptions) -> Result<LoadReport> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(f);
    let path_str = path.display().to_string();

    let mut statements = Vec::new();
    let mut skipped = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_jsonl_record(&line, &opts.field_map).and_then(|(id, text, label)| {
            check_record(id, text, label, opts)
        }) {
            Ok(s) => statements.push(s),
            Err(reason) => match opts.on_malformed {
                MalformedPolicy::Skip => skipped.push((lineno, reason)),
                MalformedPolicy::Abort => {
                    return Err(Error::malformed(&path_str, lineno, reason))
                }
            },
        }
    }
    finish_load(&path_str, statements, skipped)
}

fn parse_jsonl_record(
    line: &str,
    map: &FieldMap,
) -> std::result::Result<(String, String, String), String> {
    let value: serde_json::Value =
        serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let field = |name: &str| -> std::result::Result<String, String> {
        match value.get(name) {
            Some(serde_json::Value::String(s)) => Ok(s.clone()),
            Some(serde_json::Value::Number(n)) => Ok(n.to_string()),
            Some(_) => Err(format!("field `{name}` is not a string")),
            None => Err(format!("missing field `{name}`")),
        }
    };
    Ok((field(&map.id)?, field(&map.text)?, field(&map.label)?))
}

/// Loads a CSV corpus with a header row; quoting per RFC 4180.
pub fn load_csv(path: &Path, opts: &LoadOptions) -> Result<LoadReport> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(f);

    let headers = reader
        .headers()
        .map_err(|e| Error::malformed(&path_str, 1, format!("bad header: {e}")))?
        .clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingField {
                path: path_str.clone(),
                field: name.to_string(),
            })
    };
    let (ci, ct, cl) = (
        col(&opts.field_map.id)?,
        col(&opts.field_map.text)?,
        col(&opts.field_map.label)?,
    );

    let mut statements = Vec::new();
    let mut skipped = Vec::new();
    for record in reader.records() {
        match record {
            Ok(rec) => {
                let lineno = rec
                    .position()
                    .map(|p| p.line() as usize)
                    .unwrap_or(0);
                let get = |i: usize| -> std::result::Result<String, String> {
                    rec.get(i)
                        .map(str::to_string)
                        .ok_or_else(|| format!("row has no column {i}"))
                };
                match get(ci)
                    .and_then(|id| Ok((id, get(ct)?, get(cl)?)))
                    .and_then(|(id, text, label)| check_record(id, text, label, opts))
                {
                    Ok(s) => statements.push(s),
                    Err(reason) => match opts.on_malformed {
                        MalformedPolicy::Skip => skipped.push((lineno, reason)),
                        MalformedPolicy::Abort => {
                            return Err(Error::malformed(&path_str, lineno, reason))
                        }
                    },
                }
            }
            Err(e) => {
                let lineno = e
                    .position()
                    .map(|p| p.line() as usize)
                    .unwrap_or(0);
                match opts.on_malformed {
                    MalformedPolicy::Skip => skipped.push((lineno, e.to_string())),
                    MalformedPolicy::Abort => {
                        return Err(Error::malformed(&path_str, lineno, e.to_string()))
                    }
                }
            }
        }
    }
    finish_load(&path_str, statements, skipped)
}

/// Loads a corpus from JSONL or CSV based on `format` ("jsonl" | "csv").
pub fn load(path: &Path, format: &str, opts: &LoadOptions) -> Result<LoadReport> {
    match format {
        "jsonl" => load_jsonl(path, opts),
        "csv" => load_csv(path, opts),
        other => Err(Error::Config(format!(
            "unknown corpus format `{other}` (expected jsonl or csv)"
        ))),
    }
}
