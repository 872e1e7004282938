//! `corpkey` — keyness, collocation, and affect analysis over labeled
//! citation corpora.
//!
//! Subcommands mirror the pipeline stages: `ingest` validates and
//! summarizes an input corpus, `collocates` writes per-class count tables,
//! `keyness` scores each class against the rest (or pairwise), `posdist`
//! and `correlate` derive tag distributions and keyness–affect
//! correlations, `analyze` runs everything and writes the bundle, and
//! `report` re-renders an existing bundle. The stage commands compose:
//! feeding each stage's files into the next yields byte-identical output
//! to a single `analyze` run with the same configuration.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error
//! (unreadable or malformed input, mismatched tables), 3 internal error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

/// `println!` that ignores a closed stdout, so piping into `head` does not
/// kill the run mid-write.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

use corpkey::affect::score_collocates;
use corpkey::analytics::{affect_correlations, pos_distribution, CorrelationCell, PosDistMode, PosDistribution};
use corpkey::collocate::CountTable;
use corpkey::corpus::{self, LoadOptions};
use corpkey::keyness::{one_vs_rest, pairwise, KeynessTable};
use corpkey::pipeline::{
    count_statements, load_corpus, partitioned_samples, run_full_analysis, with_thread_pool,
    AnalysisBundle, AnalysisConfig, Assets, EmitFormat,
};
use corpkey::report::{self, label_slug, order_name, ConfigEcho};
use corpkey::{Error, Result, Score};

#[derive(Parser)]
#[command(
    name = "corpkey",
    version = corpkey::TOOL_VERSION,
    about = "Keyness, collocation, and affect analysis over labeled citation corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an input corpus and print a per-label summary.
    Ingest(RunArgs),
    /// Count collocates per class and write one count table per (class, order).
    Collocates(RunArgs),
    /// Score keyness per class and write comparison tables.
    Keyness(KeynessArgs),
    /// Tag distribution over each class's key items.
    Posdist(StageArgs),
    /// Correlations between keyness and affect scores per class.
    Correlate(StageArgs),
    /// Run the full pipeline and write the analysis bundle.
    Analyze(RunArgs),
    /// Re-render reports from an existing bundle.json.
    Report(ReportArgs),
}

/// Flags shared by every pipeline command. All optional so a config file
/// can supply any of them; explicit flags always win.
#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    /// Input corpus file.
    #[arg(long)]
    input: Option<PathBuf>,

    /// Input format: jsonl or csv [default: jsonl].
    #[arg(long)]
    format: Option<String>,

    /// Comma-separated labels to analyze [default: every label present].
    #[arg(long)]
    labels: Option<String>,

    /// Per-class sample size [default: analyze every statement].
    #[arg(long)]
    sample_n: Option<usize>,

    /// Seed for per-class sampling [default: 0].
    #[arg(long)]
    seed: Option<u64>,

    /// Comma-separated n-gram orders, each in 1..=3 [default: 1,2,3].
    #[arg(long)]
    orders: Option<String>,

    /// Co-occurrence window in tokens [default: 5].
    #[arg(long)]
    window: Option<usize>,

    /// Minimum collocate frequency for orders >= 2 [default: 3].
    #[arg(long)]
    min_freq: Option<u64>,

    /// Log-likelihood significance threshold [default: 15.13].
    #[arg(long)]
    ll_threshold: Option<Score>,

    /// Stopword list, one word per line [default: bundled English list].
    #[arg(long)]
    stopwords: Option<PathBuf>,

    /// Affect lexicon file [default: bundled lexicon].
    #[arg(long)]
    lexicon: Option<PathBuf>,

    /// Tagger model file [default: bundled model].
    #[arg(long)]
    tagger_model: Option<PathBuf>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Comma-separated output formats: csv, json, markdown [default: csv].
    #[arg(long)]
    emit: Option<String>,

    /// Worker threads; results are identical for any count [default: all cores].
    #[arg(long)]
    threads: Option<usize>,

    /// key = value file supplying defaults for any flag above.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct KeynessArgs {
    #[command(flatten)]
    run: RunArgs,

    /// Directory of counts_*.csv tables from `corpkey collocates`
    /// [default: recount from --input].
    #[arg(long)]
    counts: Option<PathBuf>,

    /// Score every ordered pair of classes instead of each class
    /// against the rest.
    #[arg(long)]
    pairwise: bool,
}

#[derive(Args)]
struct StageArgs {
    #[command(flatten)]
    run: RunArgs,

    /// Directory of keyness_* tables from `corpkey keyness`
    /// [default: recompute from --input].
    #[arg(long)]
    keyness: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// bundle.json written by `corpkey analyze`.
    #[arg(long)]
    bundle: PathBuf,

    /// Output directory [default: the directory recorded in the bundle].
    #[arg(long)]
    out: Option<PathBuf>,

    /// Comma-separated output formats: csv, json, markdown [default: markdown].
    #[arg(long)]
    emit: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("corpkey: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Collocates(args) => cmd_collocates(args),
        Command::Keyness(args) => cmd_keyness(args),
        Command::Posdist(args) => cmd_posdist(args),
        Command::Correlate(args) => cmd_correlate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Report(args) => cmd_report(args),
    }
}

/// 1 for configuration mistakes the user can fix on the command line,
/// 2 for bad input data, 3 for anything else.
fn exit_code(err: &Error) -> u8 {
    fn is_usage(err: &Error) -> bool {
        match err {
            Error::Config(_) => true,
            Error::Stage { source, .. } => is_usage(source),
            _ => false,
        }
    }
    if is_usage(err) {
        1
    } else if err.is_data_error() {
        2
    } else {
        3
    }
}

impl RunArgs {
    /// Folds the config file (if any) into the flags. Flags stay
    /// authoritative; file values only fill gaps.
    fn merged(mut self) -> Result<RunArgs> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = format!("{}:{}", path.display(), idx + 1);
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("{at}: expected `key = value`, got `{line}`")));
            };
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            if value.is_empty() {
                return Err(Error::Config(format!("{at}: key `{key}` has no value")));
            }
            self.apply_file_entry(&key, value, &at)?;
        }
        Ok(self)
    }

    /// Applies one config-file entry unless the matching flag was given.
    fn apply_file_entry(&mut self, key: &str, value: &str, at: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(value: &str, key: &str, at: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("{at}: invalid value `{value}` for `{key}`")))
        }
        // Every entry is validated even when a flag overrides it, so a
        // typo in the file never passes silently.
        fn fill<T>(slot: &mut Option<T>, value: Result<T>) -> Result<()> {
            let value = value?;
            if slot.is_none() {
                *slot = Some(value);
            }
            Ok(())
        }
        match key {
            "input" => fill(&mut self.input, Ok(PathBuf::from(value))),
            "format" => fill(&mut self.format, Ok(value.to_string())),
            "labels" => fill(&mut self.labels, Ok(value.to_string())),
            "sample-n" => fill(&mut self.sample_n, parse(value, key, at)),
            "seed" => fill(&mut self.seed, parse(value, key, at)),
            "orders" => fill(&mut self.orders, Ok(value.to_string())),
            "window" => fill(&mut self.window, parse(value, key, at)),
            "min-freq" => fill(&mut self.min_freq, parse(value, key, at)),
            "ll-threshold" => fill(&mut self.ll_threshold, parse(value, key, at)),
            "stopwords" => fill(&mut self.stopwords, Ok(PathBuf::from(value))),
            "lexicon" => fill(&mut self.lexicon, Ok(PathBuf::from(value))),
            "tagger-model" => fill(&mut self.tagger_model, Ok(PathBuf::from(value))),
            "out" => fill(&mut self.out, Ok(PathBuf::from(value))),
            "emit" => fill(&mut self.emit, Ok(value.to_string())),
            "threads" => fill(&mut self.threads, parse(value, key, at)),
            other => Err(Error::Config(format!("{at}: unknown config key `{other}`"))),
        }
    }

    fn require_input(&self) -> Result<()> {
        match self.input {
            Some(_) => Ok(()),
            None => Err(Error::Config("--input is required (flag or config file)".into())),
        }
    }

    fn require_out(&self) -> Result<()> {
        match self.out {
            Some(_) => Ok(()),
            None => Err(Error::Config("--out is required (flag or config file)".into())),
        }
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

fn parse_orders(s: &str) -> Result<Vec<u8>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|part| {
            part.parse()
                .map_err(|_| Error::Config(format!("invalid order `{part}` (expected 1, 2, or 3)")))
        })
        .collect()
}

/// Builds the validated pipeline configuration from merged flags.
fn build_config(args: &RunArgs) -> Result<AnalysisConfig> {
    let mut config = AnalysisConfig::new(
        args.input.clone().unwrap_or_default(),
        args.out.clone().unwrap_or_default(),
    );
    if let Some(format) = &args.format {
        config.format = format.clone();
    }
    if let Some(labels) = &args.labels {
        config.labels = Some(split_list(labels));
    }
    config.sample_n = args.sample_n;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(orders) = &args.orders {
        config.orders = parse_orders(orders)?;
    }
    if let Some(window) = args.window {
        config.window = window;
    }
    if let Some(min_freq) = args.min_freq {
        config.min_freq = min_freq;
    }
    if let Some(threshold) = args.ll_threshold {
        config.ll_threshold = threshold;
    }
    config.stopwords = args.stopwords.clone();
    config.lexicon = args.lexicon.clone();
    config.tagger_model = args.tagger_model.clone();
    if let Some(emit) = &args.emit {
        config.emit = EmitFormat::parse_list(emit)?;
    }
    config.threads = args.threads;
    config.validate()?;
    Ok(config)
}

fn load_assets(config: &AnalysisConfig) -> Result<Assets> {
    Assets::load(config).map_err(|e| e.in_stage("load", None))
}

fn echo_from_config(config: &AnalysisConfig, assets: &Assets) -> ConfigEcho {
    ConfigEcho {
        tool_version: corpkey::TOOL_VERSION.to_string(),
        lexicon_version: assets.lexicon.version().to_string(),
        tagger_version: assets.tagger.version().to_string(),
        window: config.window,
        min_freq: config.min_freq,
        ll_threshold: config.ll_threshold,
        seed: config.seed,
    }
}

fn create_out_dir(config: &AnalysisConfig) -> Result<()> {
    fs::create_dir_all(&config.out_dir).map_err(|e| Error::io(&config.out_dir, e))
}

fn write_text(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    say!("wrote {}", path.display());
    Ok(())
}

fn cmd_ingest(args: RunArgs) -> Result<()> {
    let args = args.merged()?;
    args.require_input()?;
    let config = build_config(&args)?;
    let opts = LoadOptions {
        field_map: config.field_map.clone(),
        declared_labels: config.labels.as_ref().map(|ls| ls.iter().cloned().collect()),
        ..LoadOptions::default()
    };
    let report = corpus::load(&config.input, &config.format, &opts)
        .map_err(|e| e.in_stage("load", None))?;
    let summary = report.corpus.summary();

    say!("input: {}", config.input.display());
    say!("format: {}", config.format);
    say!("statements: {}", summary.total);
    for (label, n) in &summary.per_label {
        say!("  {label}: {n}");
    }
    say!("skipped: {}", report.skipped_count());
    for (line, reason) in report.skipped.iter().take(5) {
        say!("  line {line}: {reason}");
    }

    let input_name = config.input.display().to_string();
    if report.corpus.is_empty() {
        return Err(Error::malformed(input_name, 0, "no usable statements").in_stage("load", None));
    }
    if let Some(labels) = &config.labels {
        for label in labels {
            if !summary.per_label.contains_key(label) {
                return Err(Error::malformed(
                    input_name,
                    0,
                    format!("declared label `{label}` has no statements"),
                )
                .in_stage("load", None));
            }
        }
    }
    Ok(())
}

/// Count tables per (order, label), computed exactly as `analyze` does so
/// stage-by-stage runs reproduce its output byte for byte.
fn compute_counts(
    config: &AnalysisConfig,
    assets: &Assets,
) -> Result<BTreeMap<u8, BTreeMap<String, CountTable>>> {
    let corpus = load_corpus(config)?;
    let parts = partitioned_samples(config, &corpus)?;
    let sequential = config.threads == Some(1);
    let orders = config.normalized_orders();
    with_thread_pool(config.threads, || {
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
                    wrapped @ Error::Stage { .. } => wrapped,
                    other => other.in_stage("count", None),
                })?;
                tables.insert(label.clone(), table);
            }
            by_order.insert(order, tables);
        }
        Ok(by_order)
    })
}

fn cmd_collocates(args: RunArgs) -> Result<()> {
    let args = args.merged()?;
    args.require_input()?;
    args.require_out()?;
    let config = build_config(&args)?;
    let assets = load_assets(&config)?;
    let by_order = compute_counts(&config, &assets)?;
    create_out_dir(&config)?;
    for (order, tables) in &by_order {
        for (label, table) in tables {
            let name = format!("counts_{}_{}.csv", label_slug(label), order_name(*order));
            let path = config.out_dir.join(name);
            table.write_csv_file(&path)?;
            say!("wrote {}", path.display());
        }
    }
    Ok(())
}

/// Loads every counts_*.csv table in `dir`, grouped by order.
fn load_count_tables(dir: &Path) -> Result<BTreeMap<u8, BTreeMap<String, CountTable>>> {
    let dir_name = dir.display().to_string();
    let mut grouped: BTreeMap<u8, BTreeMap<String, CountTable>> = BTreeMap::new();
    for path in dir_files(dir, "counts_", &["csv"])? {
        let table = CountTable::load_csv(&path)?;
        let slot = grouped.entry(table.params.order).or_default();
        if let Some(previous) = slot.insert(table.label.clone(), table) {
            return Err(Error::malformed(
                path.display().to_string(),
                0,
                format!(
                    "duplicate count table for class `{}` at order {}",
                    previous.label, previous.params.order
                ),
            ));
        }
    }
    if grouped.is_empty() {
        return Err(Error::malformed(dir_name, 0, "no counts_*.csv tables found"));
    }
    Ok(grouped)
}

/// Files in `dir` whose name starts with `prefix` and ends with one of
/// `extensions`, sorted for deterministic processing order.
fn dir_files(dir: &Path, prefix: &str, extensions: &[&str]) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(ext) = path.extension().and_then(|e| e.to_str()) else {
            continue;
        };
        if name.starts_with(prefix) && extensions.contains(&ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn cmd_keyness(args: KeynessArgs) -> Result<()> {
    let run = args.run.merged()?;
    run.require_out()?;
    let config = build_config(&run)?;
    let assets = load_assets(&config)?;

    let counts = match &args.counts {
        Some(dir) => load_count_tables(dir)?,
        None => {
            run.require_input()?;
            compute_counts(&config, &assets)?
        }
    };

    let echo = echo_from_config(&config, &assets);
    create_out_dir(&config)?;
    for (order, tables) in &counts {
        if args.pairwise {
            let scored = pairwise(tables, config.ll_threshold, false)
                .map_err(|e| e.in_stage("keyness", None))?;
            for ((target, reference), table) in &scored {
                emit_keyness_table(
                    &config,
                    &echo,
                    table,
                    &format!("{}_vs_{}", label_slug(target), label_slug(reference)),
                    *order,
                )?;
            }
        } else {
            let scored = one_vs_rest(tables, config.ll_threshold, false)
                .map_err(|e| e.in_stage("keyness", None))?;
            for (label, table) in &scored {
                emit_keyness_table(&config, &echo, table, &label_slug(label), *order)?;
            }
        }
    }
    Ok(())
}

fn emit_keyness_table(
    config: &AnalysisConfig,
    echo: &ConfigEcho,
    table: &KeynessTable,
    slug: &str,
    order: u8,
) -> Result<()> {
    for &format in &config.emit {
        let ext = match format {
            EmitFormat::Csv => "csv",
            EmitFormat::Json => "json",
            EmitFormat::Markdown => "md",
        };
        let path = config
            .out_dir
            .join(format!("keyness_{slug}_{}.{ext}", order_name(order)));
        report::emit_table(table, format, &path, echo)?;
        say!("wrote {}", path.display());
    }
    Ok(())
}

/// Keyness tables per (label, order) for the analytics stages: loaded from
/// a `keyness` output directory when given, otherwise recomputed from the
/// input corpus the same way `analyze` does.
fn stage_keyness_tables(
    keyness_dir: Option<&Path>,
    run: &RunArgs,
    config: &AnalysisConfig,
    assets: &Assets,
) -> Result<BTreeMap<(String, u8), KeynessTable>> {
    let mut out = BTreeMap::new();
    match keyness_dir {
        Some(dir) => {
            for path in dir_files(dir, "keyness_", &["csv", "json"])? {
                let table = report::load_keyness_table(&path)?;
                let key = (table.label.clone(), table.params.order);
                if let Some(existing) = out.get(&key) {
                    if *existing != table {
                        return Err(Error::malformed(
                            path.display().to_string(),
                            0,
                            format!(
                                "conflicting keyness tables for class `{}` at order {}",
                                key.0, key.1
                            ),
                        ));
                    }
                } else {
                    out.insert(key, table);
                }
            }
            if out.is_empty() {
                return Err(Error::malformed(
                    dir.display().to_string(),
                    0,
                    "no keyness_* tables found (expected .csv or .json)",
                ));
            }
        }
        None => {
            run.require_input()?;
            for (order, tables) in compute_counts(config, assets)? {
                let scored = one_vs_rest(&tables, config.ll_threshold, false)
                    .map_err(|e| e.in_stage("keyness", None))?;
                for (label, table) in scored {
                    out.insert((label, order), table);
                }
            }
        }
    }
    Ok(out)
}

fn cmd_posdist(args: StageArgs) -> Result<()> {
    let run = args.run.merged()?;
    run.require_out()?;
    let config = build_config(&run)?;
    let assets = load_assets(&config)?;
    let tables = stage_keyness_tables(args.keyness.as_deref(), &run, &config, &assets)?;
    let echo = echo_from_config(&config, &assets);

    let dists: Vec<(String, u8, PosDistribution)> = tables
        .iter()
        .map(|((label, order), table)| {
            let dist = pos_distribution(table, &assets.tagger, PosDistMode::Tokens);
            (label.clone(), *order, dist)
        })
        .collect();
    let cells = dists.iter().map(|(label, order, dist)| (label.as_str(), *order, dist));

    create_out_dir(&config)?;
    write_text(
        &config.out_dir.join("pos_dist.csv"),
        &report::pos_dist_csv(cells, &echo),
    )
}

fn cmd_correlate(args: StageArgs) -> Result<()> {
    let run = args.run.merged()?;
    run.require_out()?;
    let config = build_config(&run)?;
    let assets = load_assets(&config)?;
    let tables = stage_keyness_tables(args.keyness.as_deref(), &run, &config, &assets)?;
    let echo = echo_from_config(&config, &assets);

    let correlations: Vec<(String, u8, Vec<CorrelationCell>)> = tables
        .iter()
        .map(|((label, order), table)| {
            let scored = score_collocates(table, &assets.lexicon);
            (label.clone(), *order, affect_correlations(&scored))
        })
        .collect();
    let cells = correlations
        .iter()
        .map(|(label, order, cells)| (label.as_str(), *order, cells.as_slice()));

    create_out_dir(&config)?;
    write_text(
        &config.out_dir.join("correlations.csv"),
        &report::correlations_csv(cells, &echo),
    )
}

fn cmd_analyze(args: RunArgs) -> Result<()> {
    let args = args.merged()?;
    args.require_input()?;
    args.require_out()?;
    let config = build_config(&args)?;
    let bundle = run_full_analysis(&config)?;
    for path in report::write_bundle(&bundle)? {
        say!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let text = fs::read_to_string(&args.bundle).map_err(|e| Error::io(&args.bundle, e))?;
    let mut bundle: AnalysisBundle = serde_json::from_str(&text).map_err(|e| {
        Error::malformed(
            args.bundle.display().to_string(),
            0,
            format!("not an analysis bundle: {e}"),
        )
    })?;
    if let Some(out) = args.out {
        bundle.config.out_dir = out;
    }
    bundle.config.emit = match &args.emit {
        Some(list) => EmitFormat::parse_list(list)?,
        None => vec![EmitFormat::Markdown],
    };
    for path in report::write_bundle(&bundle)? {
        say!("wrote {}", path.display());
    }
    Ok(())
}
