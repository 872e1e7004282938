//! Table rendering and file output.
//!
//! Every serialized table embeds the configuration that produced it (window,
//! min_freq, threshold, seed, asset versions), and every emitter is
//! byte-deterministic: numbers use Rust's shortest round-trip formatting and
//! all map iteration is over sorted keys. CSV keyness files parse back into
//! the exact table that was written.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytics::{CorrelationCell, PosDistribution};
use crate::collocate::CountParams;
use crate::error::{Error, Result};
use crate::keyness::{is_overused, KeynessRow, KeynessTable};
use crate::pipeline::{AnalysisBundle, EmitFormat};
use crate::Score;

pub const KEYNESS_CSV_HEADER: &str = "item,freq_target,freq_reference,ll,log_ratio";

/// The run parameters echoed into every emitted file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub tool_version: String,
    pub lexicon_version: String,
    pub tagger_version: String,
    pub window: usize,
    pub min_freq: u64,
    pub ll_threshold: Score,
    pub seed: u64,
}

impl ConfigEcho {
    pub fn from_bundle(bundle: &AnalysisBundle) -> ConfigEcho {
        ConfigEcho {
            tool_version: bundle.tool_version.clone(),
            lexicon_version: bundle.lexicon_version.clone(),
            tagger_version: bundle.tagger_version.clone(),
            window: bundle.config.window,
            min_freq: bundle.config.min_freq,
            ll_threshold: bundle.config.ll_threshold,
            seed: bundle.config.seed,
        }
    }
}

/// Human-readable name of an n-gram order.
pub fn order_name(order: u8) -> &'static str {
    match order {
        1 => "terms",
        2 => "bigrams",
        3 => "trigrams",
        _ => "ngrams",
    }
}

fn echo_lines(echo: &ConfigEcho, out: &mut String) {
    let _ = writeln!(out, "# tool_version: {}", echo.tool_version);
    let _ = writeln!(out, "# lexicon_version: {}", echo.lexicon_version);
    let _ = writeln!(out, "# tagger_version: {}", echo.tagger_version);
    let _ = writeln!(out, "# run_window: {}", echo.window);
    let _ = writeln!(out, "# run_min_freq: {}", echo.min_freq);
    let _ = writeln!(out, "# run_ll_threshold: {}", echo.ll_threshold);
    let _ = writeln!(out, "# run_seed: {}", echo.seed);
}

/// Renders a keyness table as CSV: `#` metadata lines (table parameters and
/// config echo), then the header `item,freq_target,freq_reference,ll,log_ratio`
/// and one row per retained item. An empty table yields a header-only body.
pub fn keyness_csv(table: &KeynessTable, echo: &ConfigEcho) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# corpkey keyness table");
    echo_lines(echo, &mut out);
    let _ = writeln!(out, "# label: {}", table.label);
    let _ = writeln!(out, "# reference: {}", table.reference);
    let _ = writeln!(out, "# order: {}", table.params.order);
    let _ = writeln!(out, "# window: {}", table.params.window);
    let _ = writeln!(out, "# min_freq: {}", table.params.min_freq);
    let _ = writeln!(out, "# target_size: {}", table.target_size);
    let _ = writeln!(out, "# reference_size: {}", table.reference_size);
    let _ = writeln!(out, "# threshold: {}", table.threshold);
    let _ = writeln!(out, "# include_underused: {}", table.include_underused);
    let _ = writeln!(out, "{KEYNESS_CSV_HEADER}");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.item, row.freq_target, row.freq_reference, row.ll, row.log_ratio
        );
    }
    out
}

fn meta_value<'a>(
    meta: &'a BTreeMap<String, String>,
    key: &str,
    source: &str,
) -> Result<&'a str> {
    meta.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::malformed(source, 0, format!("missing `# {key}:` metadata line")))
}

fn parse_meta<T: FromStr>(meta: &BTreeMap<String, String>, key: &str, source: &str) -> Result<T> {
    let raw = meta_value(meta, key, source)?;
    raw.parse().map_err(|_| {
        Error::malformed(source, 0, format!("metadata `{key}` has unparseable value `{raw}`"))
    })
}

/// Parses a keyness table previously written by [`keyness_csv`]. The
/// round-trip is lossless: counts are integers, floats use shortest
/// round-trip formatting, and the overuse flag is recomputed exactly from
/// the integer counts.
pub fn parse_keyness_csv(contents: &str, source: &str) -> Result<KeynessTable> {
    let mut meta: BTreeMap<String, String> = BTreeMap::new();
    let mut header_seen = false;
    let mut rows = Vec::new();
    let mut data_lines = Vec::new();
    for (i, line) in contents.lines().enumerate() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((key, value)) = rest.split_once(':') {
                meta.insert(key.trim().to_string(), value.trim().to_string());
            }
        } else if line.trim().is_empty() {
            continue;
        } else if !header_seen {
            if line != KEYNESS_CSV_HEADER {
                return Err(Error::malformed(
                    source,
                    i + 1,
                    format!("expected header `{KEYNESS_CSV_HEADER}`, found `{line}`"),
                ));
            }
            header_seen = true;
        } else {
            data_lines.push((i + 1, line));
        }
    }
    if !header_seen {
        return Err(Error::malformed(source, 0, "no keyness header line".to_string()));
    }

    let target_size: u64 = parse_meta(&meta, "target_size", source)?;
    let reference_size: u64 = parse_meta(&meta, "reference_size", source)?;
    for (line_no, line) in data_lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::malformed(
                source,
                line_no,
                format!("expected 5 fields, found {}", fields.len()),
            ));
        }
        let bad = |what: &str| {
            Error::malformed(source, line_no, format!("unparseable {what} in `{line}`"))
        };
        let freq_target: u64 = fields[1].parse().map_err(|_| bad("freq_target"))?;
        let freq_reference: u64 = fields[2].parse().map_err(|_| bad("freq_reference"))?;
        rows.push(KeynessRow {
            item: fields[0].to_string(),
            freq_target,
            freq_reference,
            ll: fields[3].parse().map_err(|_| bad("ll"))?,
            log_ratio: fields[4].parse().map_err(|_| bad("log_ratio"))?,
            overused: is_overused(freq_target, freq_reference, target_size, reference_size),
        });
    }

    Ok(KeynessTable {
        label: meta_value(&meta, "label", source)?.to_string(),
        reference: meta_value(&meta, "reference", source)?.to_string(),
        params: CountParams {
            order: parse_meta(&meta, "order", source)?,
            window: parse_meta(&meta, "window", source)?,
            min_freq: parse_meta(&meta, "min_freq", source)?,
        },
        target_size,
        reference_size,
        threshold: parse_meta(&meta, "threshold", source)?,
        include_underused: parse_meta(&meta, "include_underused", source)?,
        rows,
    })
}

pub fn load_keyness_csv(path: &Path) -> Result<KeynessTable> {
    let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_keyness_csv(&contents, &path.display().to_string())
}

#[derive(Serialize, Deserialize)]
struct KeynessDocument {
    config: ConfigEcho,
    table: KeynessTable,
}

/// JSON form of one keyness table with the config echo embedded.
pub fn keyness_json(table: &KeynessTable, echo: &ConfigEcho) -> String {
    let doc = KeynessDocument {
        config: echo.clone(),
        table: table.clone(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("keyness document serializes");
    s.push('\n');
    s
}

pub fn parse_keyness_json(contents: &str, source: &str) -> Result<KeynessTable> {
    let doc: KeynessDocument = serde_json::from_str(contents)
        .map_err(|e| Error::malformed(source, e.line(), e.to_string()))?;
    Ok(doc.table)
}

pub fn load_keyness_json(path: &Path) -> Result<KeynessTable> {
    let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_keyness_json(&contents, &path.display().to_string())
}

/// Loads a keyness table from either serialization, picked by extension.
pub fn load_keyness_table(path: &Path) -> Result<KeynessTable> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => load_keyness_json(path),
        _ => load_keyness_csv(path),
    }
}

/// Markdown rendering of one keyness table.
pub fn keyness_markdown(table: &KeynessTable, echo: &ConfigEcho) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "## {} vs {} ({})\n",
        table.label,
        table.reference,
        order_name(table.params.order)
    );
    let _ = writeln!(
        out,
        "Window {}, min_freq {}, LL threshold {}; target {} items, reference {} items. \
         corpkey {} (lexicon {}, tagger {}).\n",
        table.params.window,
        table.params.min_freq,
        table.threshold,
        table.target_size,
        table.reference_size,
        echo.tool_version,
        echo.lexicon_version,
        echo.tagger_version
    );
    let _ = writeln!(out, "| item | target | reference | LL | log ratio |");
    let _ = writeln!(out, "|---|---|---|---|---|");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {:.2} | {:.2} |",
            row.item, row.freq_target, row.freq_reference, row.ll, row.log_ratio
        );
    }
    out
}

/// Writes one keyness table to `path` in the requested format.
pub fn emit_table(
    table: &KeynessTable,
    format: EmitFormat,
    path: &Path,
    echo: &ConfigEcho,
) -> Result<()> {
    let contents = match format {
        EmitFormat::Csv => keyness_csv(table, echo),
        EmitFormat::Json => keyness_json(table, echo),
        EmitFormat::Markdown => keyness_markdown(table, echo),
    };
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn push_correlation_row(out: &mut String, label: &str, order: u8, cell: &CorrelationCell) {
    let r = cell.r.map(|v| v.to_string()).unwrap_or_default();
    let undefined = cell.undefined.as_deref().unwrap_or("");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        label,
        order,
        cell.dimension.name(),
        cell.n,
        r,
        undefined.replace(',', ";")
    );
}

/// CSV of correlation cells for any set of (label, order) pairs. Undefined
/// cells keep an empty `r` column and spell out the reason instead.
pub fn correlations_csv<'a, I>(cells: I, echo: &ConfigEcho) -> String
where
    I: IntoIterator<Item = (&'a str, u8, &'a [CorrelationCell])>,
{
    let mut out = String::new();
    let _ = writeln!(out, "# corpkey correlation report");
    echo_lines(echo, &mut out);
    let _ = writeln!(out, "label,order,dimension,n,r,undefined");
    for (label, order, group) in cells {
        for cell in group {
            push_correlation_row(&mut out, label, order, cell);
        }
    }
    out
}

/// CSV of tag distributions for any set of (label, order) pairs.
pub fn pos_dist_csv<'a, I>(cells: I, echo: &ConfigEcho) -> String
where
    I: IntoIterator<Item = (&'a str, u8, &'a PosDistribution)>,
{
    let mut out = String::new();
    let _ = writeln!(out, "# corpkey tag distribution report");
    echo_lines(echo, &mut out);
    let _ = writeln!(out, "label,order,mode,tag,count,share");
    for (label, order, dist) in cells {
        for (tag, count) in &dist.counts {
            let share = dist.shares.get(tag).copied().unwrap_or(0.0);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                label,
                order,
                dist.mode.name(),
                tag,
                count,
                share
            );
        }
    }
    out
}

fn bundle_correlation_cells(bundle: &AnalysisBundle) -> Vec<(&str, u8, &[CorrelationCell])> {
    let mut cells = Vec::new();
    for (label, class) in &bundle.classes {
        for (&order, report) in &class.orders {
            cells.push((label.as_str(), order, report.correlations.as_slice()));
        }
    }
    cells
}

fn bundle_pos_cells(bundle: &AnalysisBundle) -> Vec<(&str, u8, &PosDistribution)> {
    let mut cells = Vec::new();
    for (label, class) in &bundle.classes {
        for (&order, report) in &class.orders {
            cells.push((label.as_str(), order, &report.pos_dist));
        }
    }
    cells
}

/// How many items the markdown report shows per (class, order) cell.
const MARKDOWN_TOP_N: usize = 5;

/// Renders the whole bundle as one markdown report: top collocates with
/// classes as columns and terms/bigrams/trigrams as rows, the tag
/// distribution table, and the two correlation tables.
pub fn render_markdown(bundle: &AnalysisBundle) -> String {
    let labels: Vec<&String> = bundle.classes.keys().collect();
    let orders: Vec<u8> = bundle
        .classes
        .values()
        .flat_map(|c| c.orders.keys().copied())
        .collect::<BTreeSet<u8>>()
        .into_iter()
        .collect();

    let mut out = String::new();
    let _ = writeln!(out, "# Citation-class keyness report\n");
    let _ = writeln!(
        out,
        "corpkey {} — affect lexicon {}, tagger model {}.\n",
        bundle.tool_version, bundle.lexicon_version, bundle.tagger_version
    );

    let _ = writeln!(out, "## Configuration\n");
    let _ = writeln!(out, "| setting | value |");
    let _ = writeln!(out, "|---|---|");
    let cfg = &bundle.config;
    let _ = writeln!(out, "| input | {} |", cfg.input.display());
    let _ = writeln!(out, "| format | {} |", cfg.format);
    let _ = writeln!(
        out,
        "| orders | {} |",
        cfg.orders.iter().map(u8::to_string).collect::<Vec<_>>().join(", ")
    );
    let _ = writeln!(out, "| window | {} |", cfg.window);
    let _ = writeln!(out, "| min_freq | {} |", cfg.min_freq);
    let _ = writeln!(out, "| ll_threshold | {} |", cfg.ll_threshold);
    let _ = writeln!(out, "| seed | {} |", cfg.seed);
    let sample = cfg
        .sample_n
        .map(|n| n.to_string())
        .unwrap_or_else(|| "all".to_string());
    let _ = writeln!(out, "| sample per class | {sample} |");
    let _ = writeln!(out);

    let _ = writeln!(out, "## Corpus\n");
    let _ = writeln!(out, "| class | loaded | analyzed |");
    let _ = writeln!(out, "|---|---|---|");
    for label in &labels {
        let loaded = bundle.summary.per_label.get(*label).copied().unwrap_or(0);
        let analyzed = bundle.analyzed.get(*label).copied().unwrap_or(0);
        let _ = writeln!(out, "| {label} | {loaded} | {analyzed} |");
    }
    let _ = writeln!(out);

    let _ = writeln!(out, "## Top collocates (LL ≥ {})\n",
        bundle.config.ll_threshold);
    let _ = writeln!(out, "| | {} |", join_cells(&labels));
    let _ = writeln!(out, "|---|{}|", "---|".repeat(labels.len()));
    for &order in &orders {
        let mut cells = Vec::new();
        for label in &labels {
            let cell = bundle.classes[*label]
                .orders
                .get(&order)
                .map(|r| top_items(&r.keyness))
                .unwrap_or_else(|| "—".to_string());
            cells.push(cell);
        }
        let name = order_name(order);
        let title = format!("{}{}", name[..1].to_uppercase(), &name[1..]);
        let _ = writeln!(out, "| {title} | {} |", cells.join(" | "));
    }
    let _ = writeln!(out);

    let _ = writeln!(out, "## Tag distribution\n");
    let _ = writeln!(
        out,
        "Percentages are over all tokens of all retained collocates in a cell (tokens mode).\n"
    );
    let mut tags: BTreeSet<&String> = BTreeSet::new();
    for class in bundle.classes.values() {
        for report in class.orders.values() {
            tags.extend(report.pos_dist.shares.keys());
        }
    }
    let _ = writeln!(out, "| tag | {} |", join_cells(&labels));
    let _ = writeln!(out, "|---|{}|", "---|".repeat(labels.len()));
    for tag in tags {
        let mut cells = Vec::new();
        for label in &labels {
            let mut parts = Vec::new();
            for &order in &orders {
                if let Some(report) = bundle.classes[*label].orders.get(&order) {
                    if let Some(share) = report.pos_dist.shares.get(tag) {
                        parts.push(format!("{share:.1}% ({})", order_name(order)));
                    }
                }
            }
            cells.push(if parts.is_empty() {
                "—".to_string()
            } else {
                parts.join(", ")
            });
        }
        let _ = writeln!(out, "| {tag} | {} |", cells.join(" | "));
    }
    let _ = writeln!(out);

    for (title, index) in [("Sentiment (polarity)", 0usize), ("Subjectivity", 1usize)] {
        let _ = writeln!(out, "## Keyness–affect correlation: {title}\n");
        let _ = writeln!(
            out,
            "| class | {} |",
            orders
                .iter()
                .map(|&o| order_name(o).to_string())
                .collect::<Vec<_>>()
                .join(" | ")
        );
        let _ = writeln!(out, "|---|{}|", "---|".repeat(orders.len()));
        for label in &labels {
            let mut cells = Vec::new();
            for &order in &orders {
                let cell = bundle.classes[*label]
                    .orders
                    .get(&order)
                    .and_then(|r| r.correlations.get(index))
                    .map(render_correlation)
                    .unwrap_or_else(|| "—".to_string());
                cells.push(cell);
            }
            let _ = writeln!(out, "| {label} | {} |", cells.join(" | "));
        }
        let _ = writeln!(out);
    }

    out
}

fn join_cells(labels: &[&String]) -> String {
    labels
        .iter()
        .map(|l| l.as_str())
        .collect::<Vec<_>>()
        .join(" | ")
}

fn top_items(table: &KeynessTable) -> String {
    if table.rows.is_empty() {
        return "—".to_string();
    }
    table
        .top(MARKDOWN_TOP_N)
        .iter()
        .map(|r| format!("{} ({:.1})", r.item, r.ll))
        .collect::<Vec<_>>()
        .join(", ")
}

fn render_correlation(cell: &CorrelationCell) -> String {
    match cell.r {
        Some(r) => format!("{r:.3} (n={})", cell.n),
        None => format!(
            "undefined: {} (n={})",
            cell.undefined.as_deref().unwrap_or("unknown"),
            cell.n
        ),
    }
}

/// Filesystem-safe form of a class label, used in emitted file names.
pub fn label_slug(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

fn write_file(path: &Path, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    written.push(path.to_path_buf());
    Ok(())
}

/// Writes every output of a run into `bundle.config.out_dir`: always
/// `bundle.json`, plus per-format files for each requested [`EmitFormat`].
/// Returns the written paths, sorted.
pub fn write_bundle(bundle: &AnalysisBundle) -> Result<Vec<PathBuf>> {
    let dir = &bundle.config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let echo = ConfigEcho::from_bundle(bundle);
    let mut written = Vec::new();

    write_file(&dir.join("bundle.json"), &bundle.to_json(), &mut written)?;

    for &format in &bundle.config.emit {
        let ext = match format {
            EmitFormat::Csv => "csv",
            EmitFormat::Json => "json",
            EmitFormat::Markdown => "md",
        };
        for (label, class) in &bundle.classes {
            for (&order, report) in &class.orders {
                let name = format!("keyness_{}_{}.{ext}", label_slug(label), order_name(order));
                emit_table(&report.keyness, format, &dir.join(&name), &echo)?;
                written.push(dir.join(name));
            }
        }
        match format {
            EmitFormat::Csv => {
                write_file(
                    &dir.join("correlations.csv"),
                    &correlations_csv(bundle_correlation_cells(bundle), &echo),
                    &mut written,
                )?;
                write_file(
                    &dir.join("pos_dist.csv"),
                    &pos_dist_csv(bundle_pos_cells(bundle), &echo),
                    &mut written,
                )?;
            }
            EmitFormat::Json => {}
            EmitFormat::Markdown => {
                write_file(&dir.join("report.md"), &render_markdown(bundle), &mut written)?;
            }
        }
    }

    written.sort();
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affect::AffectLexicon;
    use crate::collocate::CountTable;
    use crate::keyness::keyness_table;
    use crate::pipeline::{analyze_corpus, AnalysisConfig, Assets};
    use crate::synth::citation_fixture;
    use crate::tagger::TaggerModel;
    use crate::text::StopwordSet;

    fn echo() -> ConfigEcho {
        ConfigEcho {
            tool_version: "0.0.0-test".into(),
            lexicon_version: "9.9.9".into(),
            tagger_version: "9.9.8".into(),
            window: 5,
            min_freq: 3,
            ll_threshold: 15.13,
            seed: 7,
        }
    }

    fn count_table(label: &str, total: u64, items: &[(&str, u64)]) -> CountTable {
        let params = CountParams {
            order: 2,
            window: 5,
            min_freq: 3,
        };
        let mut t = CountTable::empty(label, params);
        t.total_items = total;
        for (item, count) in items {
            t.counts.insert(item.to_string(), *count);
        }
        t
    }

    fn sample_table() -> KeynessTable {
        let target = count_table(
            "supporting",
            765,
            &[
                ("consistent previous", 40),
                ("previous studies", 25),
                ("filler pair", 700),
            ],
        );
        let reference = count_table(
            "rest",
            703,
            &[("filler pair", 700), ("consistent previous", 3)],
        );
        keyness_table(&target, &reference, 15.13, false).unwrap()
    }

    fn bundled_assets() -> Assets {
        Assets {
            stopwords: StopwordSet::default_english(),
            lexicon: AffectLexicon::default_bundled().unwrap(),
            tagger: TaggerModel::default_bundled().clone(),
        }
    }

    fn sample_bundle(dir: &Path) -> AnalysisBundle {
        let corpus = citation_fixture(60, 17);
        let mut config = AnalysisConfig::new(dir.join("corpus.jsonl"), dir);
        config.ll_threshold = 5.0;
        config.emit = vec![EmitFormat::Csv, EmitFormat::Json, EmitFormat::Markdown];
        analyze_corpus(&config, &corpus, &bundled_assets()).unwrap()
    }

    #[test]
    fn csv_has_exact_header_and_round_trips() {
        let table = sample_table();
        let csv = keyness_csv(&table, &echo());

        let header = csv
            .lines()
            .find(|l| !l.starts_with('#'))
            .expect("header line");
        assert_eq!(header, "item,freq_target,freq_reference,ll,log_ratio");
        assert!(csv.contains("# run_window: 5"));
        assert!(csv.contains("# lexicon_version: 9.9.9"));

        let parsed = parse_keyness_csv(&csv, "<mem>").unwrap();
        assert_eq!(parsed, table, "round trip must be lossless");
        assert_eq!(keyness_csv(&parsed, &echo()), csv);
    }

    #[test]
    fn empty_table_serializes_header_only() {
        let mut table = sample_table();
        table.rows.clear();
        let csv = keyness_csv(&table, &echo());
        let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["item,freq_target,freq_reference,ll,log_ratio"]);
        let parsed = parse_keyness_csv(&csv, "<mem>").unwrap();
        assert!(parsed.rows.is_empty());
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(parse_keyness_csv("item,count\na,1\n", "<mem>").is_err());
        let table = sample_table();
        let csv = keyness_csv(&table, &echo());
        let truncated = csv.replace("# target_size", "# something_else");
        assert!(parse_keyness_csv(&truncated, "<mem>").is_err());
    }

    #[test]
    fn json_embeds_config_and_round_trips() {
        let table = sample_table();
        let json = keyness_json(&table, &echo());
        assert!(json.contains("\"ll_threshold\": 15.13"));
        assert!(json.contains("\"tagger_version\": \"9.9.8\""));
        let parsed = parse_keyness_json(&json, "<mem>").unwrap();
        assert_eq!(parsed, table);
    }

    #[test]
    fn emit_is_byte_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let table = sample_table();
        for format in [EmitFormat::Csv, EmitFormat::Json, EmitFormat::Markdown] {
            let a = dir.path().join(format!("a.{}", format.as_str()));
            let b = dir.path().join(format!("b.{}", format.as_str()));
            emit_table(&table, format, &a, &echo()).unwrap();
            emit_table(&table, format, &b, &echo()).unwrap();
            assert_eq!(
                std::fs::read(&a).unwrap(),
                std::fs::read(&b).unwrap(),
                "{format:?} emit drifted"
            );
        }
    }

    #[test]
    fn markdown_report_uses_class_columns_and_order_rows() {
        let dir = tempfile::tempdir().unwrap();
        let bundle = sample_bundle(dir.path());
        let md = render_markdown(&bundle);

        assert!(md.contains("| | disputing | mentioning | supporting |"));
        assert!(md.contains("| Terms |"));
        assert!(md.contains("| Bigrams |"));
        assert!(md.contains("| Trigrams |"));
        assert!(md.contains("## Keyness–affect correlation: Sentiment (polarity)"));
        assert!(md.contains("## Keyness–affect correlation: Subjectivity"));
        assert!(md.contains("## Tag distribution"));
    }

    #[test]
    fn write_bundle_emits_expected_files_reproducibly() {
        let dir = tempfile::tempdir().unwrap();
        let mut bundle = sample_bundle(dir.path());

        let out_a = dir.path().join("a");
        let out_b = dir.path().join("b");
        bundle.config.out_dir = out_a.clone();
        let written_a = write_bundle(&bundle).unwrap();
        bundle.config.out_dir = out_b.clone();
        let written_b = write_bundle(&bundle).unwrap();

        let names: Vec<String> = written_a
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        for expected in [
            "bundle.json",
            "correlations.csv",
            "pos_dist.csv",
            "report.md",
            "keyness_supporting_terms.csv",
            "keyness_supporting_bigrams.json",
            "keyness_disputing_trigrams.csv",
            "keyness_mentioning_terms.json",
            "keyness_supporting_terms.md",
            "keyness_disputing_bigrams.md",
        ] {
            assert!(names.contains(&expected.to_string()), "missing {expected}");
        }

        assert_eq!(written_a.len(), written_b.len());
        for (a, b) in written_a.iter().zip(&written_b) {
            assert_eq!(a.file_name(), b.file_name());
            let bytes_a = std::fs::read(a).unwrap();
            let bytes_b = std::fs::read(b).unwrap();
            // the bundle itself echoes out_dir, which legitimately differs
            if a.file_name().unwrap() == "bundle.json" {
                continue;
            }
            assert_eq!(bytes_a, bytes_b, "{:?} not reproducible", a.file_name());
        }
    }

    #[test]
    fn correlation_csv_spells_out_undefined_cells() {
        let cells = vec![
            CorrelationCell {
                dimension: crate::analytics::AffectDimension::Polarity,
                n: 12,
                r: Some(0.25),
                undefined: None,
            },
            CorrelationCell {
                dimension: crate::analytics::AffectDimension::Subjectivity,
                n: 1,
                r: None,
                undefined: Some("fewer than two scored rows".into()),
            },
        ];
        let csv = correlations_csv(
            vec![("supporting", 2u8, cells.as_slice())],
            &echo(),
        );
        assert!(csv.contains("label,order,dimension,n,r,undefined"));
        assert!(csv.contains("supporting,2,polarity,12,0.25,"));
        assert!(csv.contains("supporting,2,subjectivity,1,,fewer than two scored rows"));
    }
}
