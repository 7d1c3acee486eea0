//! The `dirad` command line.
//!
//! Exit codes: 0 on success, 1 when any cell, comparison or row failed,
//! 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::alp::{AlpConfig, NeighbourCount};
use crate::dataset::{parse_csv, to_csv, AttributeSpec, Dataset, Direction, LabelSpec, Schema};
use crate::distance::DistanceVariant;
use crate::error::Error;
use crate::eval::results::{read_results, results_csv, sweep_csv, SummaryTable};
use crate::eval::{
    directionality_diagnostic, evaluate_holdout, holm_bonferroni, make_folds, run_cv, run_sweep, wilcoxon_one_sided,
    CvOptions, ExperimentResult, SweepCell, WilcoxonMethod,
};
use crate::io::write_atomic;
use crate::model_io;
use crate::nnd::NndConfig;
use crate::pipeline::{DetectorConfig, FittedPipeline};
use crate::synthgen::{generate, grid, synthetic_schema, Family, SynthSpec};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "DIRAD_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "dirad",
    version,
    about = "Directional semi-supervised anomaly detection",
    after_help = "--config FILE reads `key = value` lines as long flags; flags given on the command line win.\n\
                  Set DIRAD_THREADS to fix the number of worker threads."
)]
struct Cli {
    /// Plain-text `key = value` file of default flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic train/test pair and its schema.
    Synth(SynthArgs),
    /// Cross-validate detectors on labelled datasets, or run synthetic experiments.
    Bench(BenchArgs),
    /// Fit a detector on normal records and save it.
    Fit(FitArgs),
    /// Score query records with a saved or freshly fitted detector.
    Score(ScoreArgs),
    /// One-sided Wilcoxon signed-rank tests between result columns.
    Stats(StatsArgs),
    /// Compare class means per attribute to check declared directions.
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug)]
struct ShiftArgs {
    /// Mean of the anomalous Gaussian attributes, in [0, 1].
    #[arg(long)]
    a: Option<f64>,
    /// Bernoulli shift: normals use p = 0.5 - b/2, anomalies p = 0.5 + b/2, b in [0, 0.5].
    #[arg(long)]
    b: Option<f64>,
}

impl ShiftArgs {
    fn shift(&self, family: Family) -> Result<f64, Failure> {
        match (family, self.a, self.b) {
            (Family::Gaussian, Some(a), None) => Ok(a),
            (Family::Bernoulli, None, Some(b)) => Ok(b),
            (Family::Gaussian, _, _) => Err(Failure::usage("gaussian data takes --a (and not --b)")),
            (Family::Bernoulli, _, _) => Err(Failure::usage("bernoulli data takes --b (and not --a)")),
        }
    }
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    family: Family,
    #[command(flatten)]
    shift: ShiftArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    n_train: usize,
    /// Normal records in the test set.
    #[arg(long, default_value_t = 100)]
    n_normal: usize,
    /// Anomalous records in the test set.
    #[arg(long, default_value_t = 100)]
    n_anomalous: usize,
    /// Number of attributes.
    #[arg(long, default_value_t = 10)]
    m: usize,
    /// Output directory for train.csv, test.csv and schema.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum DetectorKind {
    Nnd,
    Alp,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Labelled dataset; the schema defaults to the CSV path with extension `.schema`.
    #[arg(long = "dataset", value_name = "CSV[:SCHEMA]")]
    datasets: Vec<String>,
    /// Synthetic family instead of datasets.
    #[arg(long, conflicts_with = "datasets")]
    family: Option<Family>,
    #[command(flatten)]
    shift: ShiftArgs,
    /// Sweep the family over a grid of shifts with several replicates each.
    #[arg(long, requires = "family")]
    sweep: bool,
    /// Shifts for --sweep (default: 11 evenly spaced values).
    #[arg(long, value_delimiter = ',', requires = "sweep")]
    shifts: Vec<f64>,
    #[arg(long, default_value_t = 10, requires = "sweep")]
    replicates: usize,
    #[arg(long, value_delimiter = ',', default_value = "nnd,alp")]
    detectors: Vec<DetectorKind>,
    /// Distance variants (default: every variant each detector supports).
    #[arg(long, value_delimiter = ',')]
    variants: Vec<DistanceVariant>,
    /// NND neighbourhood sizes.
    #[arg(long, value_delimiter = ',', default_value = "8")]
    k: Vec<usize>,
    #[arg(long, default_value = "auto")]
    alp_k: NeighbourCount,
    #[arg(long, default_value = "auto")]
    alp_l: NeighbourCount,
    /// Minkowski exponent for absolute and ramp distance.
    #[arg(long, default_value_t = 1.0)]
    exponent: f64,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip midhinge / semi-IQR scaling.
    #[arg(long)]
    no_scale: bool,
    /// Results CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DetectorArgs {
    #[arg(long, default_value = "nnd")]
    detector: DetectorKind,
    #[arg(long, default_value = "absolute")]
    variant: DistanceVariant,
    /// NND neighbourhood size.
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value = "auto")]
    alp_k: NeighbourCount,
    #[arg(long, default_value = "auto")]
    alp_l: NeighbourCount,
    #[arg(long, default_value_t = 1.0)]
    exponent: f64,
    #[arg(long)]
    no_scale: bool,
}

impl DetectorArgs {
    fn config(&self) -> Result<DetectorConfig, Failure> {
        let cfg = detector_config(self.detector, self.variant, self.k, self.alp_k, self.alp_l, self.exponent);
        cfg.validate().map_err(Failure::usage)?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Training CSV; labelled files are reduced to their normal records.
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ScoreArgs {
    /// Saved model from `fit`.
    #[arg(long, conflicts_with = "train", required_unless_present = "train")]
    model: Option<PathBuf>,
    /// Fit on this CSV instead of loading a model.
    #[arg(long, requires = "schema")]
    train: Option<PathBuf>,
    /// Schema; with --model only its label column is used, to skip labels in the query.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[command(flatten)]
    detector: DetectorArgs,
    #[arg(long)]
    query: PathBuf,
    /// Scores CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Results CSVs written by `bench`.
    #[arg(required = true)]
    results: Vec<PathBuf>,
    /// Alternative `A>B` between `detector:variant` columns, e.g. `nnd:ramp>nnd:absolute`.
    #[arg(long, required = true)]
    compare: Vec<String>,
    /// Holm–Bonferroni adjustment over all comparisons.
    #[arg(long)]
    holm: bool,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    data: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    /// Anomalous mean must exceed the normal mean by more than this.
    #[arg(long, default_value_t = 0.0)]
    tolerance: f64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Run(Error),
    /// Some units failed and were already reported.
    Partial(usize),
}

impl Failure {
    fn usage(e: impl std::fmt::Display) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn print(&mut self, s: &str) -> Result<(), Failure> {
        self.out
            .write_all(s.as_bytes())
            .map_err(|e| Failure::Run(Error::io("<stdout>", e)))
    }

    fn warn(&mut self, s: &str) {
        let _ = writeln!(self.err, "dirad: {s}");
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let mut io = Io { out, err };
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => return report(&mut io, Failure::Usage(e)),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = io.err.write_all(text.as_bytes());
            } else {
                let _ = io.out.write_all(text.as_bytes());
            }
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads() {
        return report(&mut io, e);
    }
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a, &mut io),
        Command::Bench(a) => cmd_bench(a, &mut io),
        Command::Fit(a) => cmd_fit(a, &mut io),
        Command::Score(a) => cmd_score(a, &mut io),
        Command::Stats(a) => cmd_stats(a, &mut io),
        Command::Diagnose(a) => cmd_diagnose(a, &mut io),
    };
    match result {
        Ok(()) => 0,
        Err(f) => report(&mut io, f),
    }
}

fn report(io: &mut Io, f: Failure) -> i32 {
    match f {
        Failure::Usage(m) => {
            io.warn(&format!("usage error: {m}"));
            2
        }
        Failure::Run(e) => {
            io.warn(&format!("error: {e}"));
            1
        }
        Failure::Partial(n) => {
            io.warn(&format!("{n} failed"));
            1
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("{THREADS_ENV} must be a thread count, got \"{v}\"")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Splices `--config` entries in right after the subcommand name, skipping
/// any key the command line already sets.
fn expand_config(mut args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut path = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy().into_owned();
        if a == "--config" {
            if i + 1 >= args.len() {
                return Err("--config needs a file".into());
            }
            path = Some(PathBuf::from(args.remove(i + 1)));
            args.remove(i);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
            args.remove(i);
        } else {
            i += 1;
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let given: Vec<String> = args
        .iter()
        .filter_map(|a| a.to_str())
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();

    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected `key = value`", path.display(), n + 1))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if given.contains(&key) {
            continue;
        }
        match value {
            "true" => extra.push(OsString::from(format!("--{key}"))),
            "false" => {}
            _ => {
                extra.push(OsString::from(format!("--{key}")));
                extra.push(OsString::from(value));
            }
        }
    }
    let sub = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .unwrap_or(args.len());
    args.splice(sub..sub, extra);
    Ok(args)
}

fn detector_config(
    kind: DetectorKind,
    variant: DistanceVariant,
    k: usize,
    alp_k: NeighbourCount,
    alp_l: NeighbourCount,
    exponent: f64,
) -> DetectorConfig {
    match kind {
        DetectorKind::Nnd => DetectorConfig::Nnd(NndConfig { k, variant, exponent }),
        DetectorKind::Alp => DetectorConfig::Alp(AlpConfig {
            k: alp_k,
            l: alp_l,
            variant,
            exponent,
        }),
    }
}

fn default_label() -> LabelSpec {
    LabelSpec::new("label", "1").with_normal("0")
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(write_atomic(path, text.as_bytes())?)
}

fn cmd_synth(a: &SynthArgs, io: &mut Io) -> Result<(), Failure> {
    let spec = SynthSpec {
        family: a.family,
        shift: a.shift.shift(a.family)?,
        n_train: a.n_train,
        n_test_normal: a.n_normal,
        n_test_anomalous: a.n_anomalous,
        m: a.m,
        seed: a.seed,
    };
    spec.validate().map_err(Failure::usage)?;
    let (train, test) = generate(&spec)?;
    let label = default_label();
    let schema = Schema::new(synthetic_schema(spec.m), Some(label.clone()))?;
    write_file(&a.out.join("train.csv"), &to_csv(&train, None))?;
    write_file(&a.out.join("test.csv"), &to_csv(&test, Some(&label)))?;
    write_file(&a.out.join("schema.txt"), &schema.to_text())?;
    io.print(&format!("wrote train.csv, test.csv and schema.txt to {}\n", a.out.display()))
}

fn bench_cells(a: &BenchArgs) -> Result<Vec<(String, DetectorConfig)>, Failure> {
    let explicit = !a.variants.is_empty();
    let variants = if explicit { a.variants.clone() } else { DistanceVariant::ALL.to_vec() };
    let mut cells = Vec::new();
    for &det in &a.detectors {
        for &v in &variants {
            if det == DetectorKind::Alp && v == DistanceVariant::Signed {
                if explicit {
                    return Err(Failure::usage(
                        "signed distance is not defined for ALP; drop `signed` from --variants or `alp` from --detectors",
                    ));
                }
                continue;
            }
            let ks: Vec<usize> = if det == DetectorKind::Nnd { a.k.clone() } else { vec![0] };
            for &k in &ks {
                let cfg = detector_config(det, v, k, a.alp_k, a.alp_l, a.exponent);
                cfg.validate().map_err(Failure::usage)?;
                let name = if det == DetectorKind::Nnd && a.k.len() > 1 {
                    format!("nnd-k{k}")
                } else {
                    cfg.name().to_string()
                };
                cells.push((name, cfg));
            }
        }
    }
    if cells.is_empty() {
        return Err(Failure::usage("no detector cells to run"));
    }
    Ok(cells)
}

fn dataset_source(arg: &str) -> (PathBuf, PathBuf) {
    match arg.rsplit_once(':') {
        Some((csv, schema)) if !csv.is_empty() && !schema.is_empty() => (csv.into(), schema.into()),
        _ => {
            let csv = PathBuf::from(arg);
            let schema = csv.with_extension("schema");
            (csv, schema)
        }
    }
}

fn dataset_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_bench(a: &BenchArgs, io: &mut Io) -> Result<(), Failure> {
    let cells = bench_cells(a)?;
    let opts = CvOptions { scale: !a.no_scale };
    match (a.family, a.sweep) {
        (Some(family), true) => bench_sweep(a, family, &cells, opts, io),
        (Some(family), false) => {
            let shift = a.shift.shift(family)?;
            let spec = SynthSpec::new(family, shift, a.seed);
            spec.validate().map_err(Failure::usage)?;
            let (train, test) = generate(&spec)?;
            let id = format!("{family}-{shift}");
            let mut results = Vec::new();
            let mut failed = 0;
            for (name, cfg) in &cells {
                match evaluate_holdout(&train, &test, cfg, opts) {
                    Ok(auroc) => results.push(ExperimentResult::new(&id, (name.clone(), cfg.variant().to_string()), vec![auroc])),
                    Err(e) => {
                        failed += 1;
                        io.warn(&format!("{id} {name}-{}: {e}", cfg.variant()));
                    }
                }
            }
            finish_bench(a, &results, failed, io)
        }
        (None, _) => {
            if a.datasets.is_empty() {
                return Err(Failure::usage("give --dataset or --family"));
            }
            let mut results = Vec::new();
            let mut failed = 0;
            for arg in &a.datasets {
                let (csv, schema) = dataset_source(arg);
                let id = dataset_id(&csv);
                let loaded = Schema::read(&schema).and_then(|s| {
                    let ds = Dataset::read_csv(&csv, &s)?;
                    let plan = make_folds(ds.normal_indices().len(), a.folds, a.seed)?;
                    Ok((ds, plan))
                });
                let (ds, plan) = match loaded {
                    Ok(x) => x,
                    Err(e) => {
                        failed += cells.len();
                        io.warn(&format!("{id}: {e}"));
                        continue;
                    }
                };
                for (name, cfg) in &cells {
                    match run_cv(&id, &ds, cfg, &plan, opts) {
                        Ok(mut r) => {
                            r.detector = name.clone();
                            results.push(r);
                        }
                        Err(e) => {
                            failed += 1;
                            io.warn(&format!("{id} {name}-{}: {e}", cfg.variant()));
                        }
                    }
                }
            }
            finish_bench(a, &results, failed, io)
        }
    }
}

fn finish_bench(a: &BenchArgs, results: &[ExperimentResult], failed: usize, io: &mut Io) -> Result<(), Failure> {
    if let Some(out) = &a.out {
        write_file(out, &results_csv(results))?;
    }
    io.print(&SummaryTable::from_results(results).render())?;
    if failed > 0 {
        return Err(Failure::Partial(failed));
    }
    Ok(())
}

fn bench_sweep(
    a: &BenchArgs,
    family: Family,
    cells: &[(String, DetectorConfig)],
    opts: CvOptions,
    io: &mut Io,
) -> Result<(), Failure> {
    if a.shift.a.is_some() || a.shift.b.is_some() {
        return Err(Failure::usage("--sweep takes --shifts, not --a/--b"));
    }
    let shifts = if a.shifts.is_empty() { family.standard_shifts() } else { a.shifts.clone() };
    let specs = grid(family, &shifts, a.replicates, a.seed).map_err(Failure::usage)?;
    let configs: Vec<DetectorConfig> = cells.iter().map(|(_, c)| *c).collect();
    let sweep = run_sweep(&specs, &configs, opts)?;
    if let Some(out) = &a.out {
        write_file(out, &sweep_csv(&sweep))?;
    }
    io.print(&render_sweep(&sweep))
}

fn render_sweep(cells: &[SweepCell]) -> String {
    let mut columns: Vec<String> = Vec::new();
    let mut shifts: Vec<f64> = Vec::new();
    for c in cells {
        let col = format!("{}:k={}:{}", c.detector, c.k, c.variant);
        if !columns.contains(&col) {
            columns.push(col);
        }
        if !shifts.iter().any(|s| s.to_bits() == c.shift.to_bits()) {
            shifts.push(c.shift);
        }
    }
    let w = columns.iter().map(String::len).max().unwrap_or(0).max(6);
    let mut out = format!("{:>6}", "shift");
    for c in &columns {
        let _ = write!(out, "  {c:>w$}");
    }
    out.push('\n');
    for s in shifts {
        let _ = write!(out, "{s:>6}");
        for col in &columns {
            let v = cells
                .iter()
                .find(|c| c.shift.to_bits() == s.to_bits() && format!("{}:k={}:{}", c.detector, c.k, c.variant) == *col)
                .map(SweepCell::mean_auroc);
            match v {
                Some(v) => {
                    let _ = write!(out, "  {v:>w$.3}");
                }
                None => {
                    let _ = write!(out, "  {:>w$}", "-");
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Parses CSV whose label column (if the schema has one) may be absent.
fn parse_optional_label(text: &str, attributes: &[AttributeSpec], label: Option<&LabelSpec>) -> Result<Dataset, Failure> {
    let header = text.lines().next().unwrap_or("");
    let label = label.filter(|l| header.split(',').any(|c| c.trim() == l.column));
    Ok(parse_csv(text.as_bytes(), attributes, label)?)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    Ok(std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

fn load_training(train: &Path, schema: &Path) -> Result<Dataset, Failure> {
    let schema = Schema::read(schema)?;
    let ds = parse_optional_label(&read_text(train)?, &schema.attributes, schema.label.as_ref())?;
    Ok(match ds.labels() {
        Some(_) => ds.subset(&ds.normal_indices()).without_labels(),
        None => ds,
    })
}

fn cmd_fit(a: &FitArgs, io: &mut Io) -> Result<(), Failure> {
    let cfg = a.detector.config()?;
    let train = load_training(&a.train, &a.schema)?;
    let fitted = FittedPipeline::fit(&train, &cfg, !a.detector.no_scale)?;
    model_io::save(&fitted, &a.out)?;
    io.print(&format!(
        "fitted {cfg} on {} records, saved to {}\n",
        train.n_records(),
        a.out.display()
    ))
}

fn cmd_score(a: &ScoreArgs, io: &mut Io) -> Result<(), Failure> {
    let schema = a.schema.as_ref().map(Schema::read).transpose()?;
    let fitted = match (&a.model, &a.train) {
        (Some(m), _) => model_io::load(m)?,
        (None, Some(train)) => {
            let cfg = a.detector.config()?;
            let schema_path = a.schema.as_ref().expect("clap requires --schema with --train");
            FittedPipeline::fit(&load_training(train, schema_path)?, &cfg, !a.detector.no_scale)?
        }
        (None, None) => return Err(Failure::usage("give --model or --train")),
    };
    let text = read_text(&a.query)?;
    let output = if text.trim().is_empty() {
        String::new()
    } else {
        let label = schema.as_ref().and_then(|s| s.label.as_ref());
        let query = parse_optional_label(&text, fitted.schema(), label)?;
        let scores = fitted.score(query.records())?;
        let mut out = String::from("score\n");
        for s in scores {
            let _ = writeln!(out, "{s}");
        }
        out
    };
    match &a.out {
        Some(path) => write_file(path, &output),
        None => io.print(&output),
    }
}

fn cmd_stats(a: &StatsArgs, io: &mut Io) -> Result<(), Failure> {
    let mut rows = Vec::new();
    for path in &a.results {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        rows.extend(read_results(file)?);
    }
    let table = SummaryTable::from_rows(&rows);
    let mut tests = Vec::new();
    let mut failed = 0;
    for cmp in &a.compare {
        let (x, y) = cmp
            .split_once('>')
            .map(|(x, y)| (x.trim(), y.trim()))
            .ok_or_else(|| Failure::usage(format!("comparison \"{cmp}\" is not of the form A>B")))?;
        match table.paired(x, y).and_then(|(xs, ys)| wilcoxon_one_sided(&xs, &ys)) {
            Ok(r) => tests.push((format!("{x} > {y}"), r)),
            Err(e) => {
                failed += 1;
                io.warn(&format!("{cmp}: {e}"));
            }
        }
    }
    let adjusted = if a.holm && !tests.is_empty() {
        let p: Vec<f64> = tests.iter().map(|(_, r)| r.p_value).collect();
        Some(holm_bonferroni(&p)?)
    } else {
        None
    };
    let w = tests.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(10);
    let mut out = format!("{:<w$}  {:>3}  {:>5}  {:>7}  {:>6}  {:>10}", "comparison", "n", "zeros", "W+", "method", "p");
    if adjusted.is_some() {
        out.push_str(&format!("  {:>10}", "p_holm"));
    }
    out.push('\n');
    for (i, (name, r)) in tests.iter().enumerate() {
        let method = match r.method {
            WilcoxonMethod::Exact => "exact",
            WilcoxonMethod::Normal => "normal",
        };
        let _ = write!(
            out,
            "{name:<w$}  {:>3}  {:>5}  {:>7}  {method:>6}  {:>10.6}",
            r.n, r.zeros, r.statistic, r.p_value
        );
        if let Some(adj) = &adjusted {
            let _ = write!(out, "  {:>10.6}", adj[i]);
        }
        out.push('\n');
    }
    io.print(&out)?;
    if failed > 0 {
        return Err(Failure::Partial(failed));
    }
    Ok(())
}

fn cmd_diagnose(a: &DiagnoseArgs, io: &mut Io) -> Result<(), Failure> {
    let schema = Schema::read(&a.schema)?;
    let ds = Dataset::read_csv(&a.data, &schema)?;
    let diag = directionality_diagnostic(&ds, a.tolerance)?;
    let w = diag.iter().map(|d| d.name.len()).max().unwrap_or(0).max(9);
    let mut out = format!(
        "{:<w$}  {:>9}  {:>12}  {:>12}  {:>12}  flag\n",
        "attribute", "direction", "normal_mean", "anomal_mean", "difference"
    );
    for (d, spec) in diag.iter().zip(&schema.attributes) {
        let _ = writeln!(
            out,
            "{:<w$}  {:>9}  {:>12.4}  {:>12.4}  {:>12.4}  {}",
            d.name,
            spec.direction,
            d.normal_mean,
            d.anomalous_mean,
            d.difference,
            if d.flagged { "*" } else { "" }
        );
    }
    let flagged: Vec<_> = diag
        .iter()
        .zip(&schema.attributes)
        .filter(|(d, _)| d.flagged)
        .map(|(_, s)| s)
        .collect();
    out.push('\n');
    if flagged.is_empty() {
        out.push_str("no schema changes suggested\n");
    } else {
        let name = a.schema.display();
        let _ = writeln!(out, "--- {name}\n+++ {name} (suggested)");
        for s in flagged {
            let _ = writeln!(out, "-{},{}\n+{},{}", s.name, s.direction, s.name, Direction::None);
        }
    }
    io.print(&out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_is_spliced_after_subcommand_and_flags_win() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "# defaults\nfolds = 3\nseed=9\nno_scale = true\nsweep = false\n").unwrap();
        let args = os(&["dirad", "--config", cfg.to_str().unwrap(), "bench", "--seed", "1"]);
        let out = expand_config(args).unwrap();
        assert_eq!(out, os(&["dirad", "bench", "--folds", "3", "--no-scale", "--seed", "1"]));
    }

    #[test]
    fn dataset_sources() {
        assert_eq!(dataset_source("d/x.csv"), ("d/x.csv".into(), "d/x.schema".into()));
        assert_eq!(dataset_source("d/x.csv:s.txt"), ("d/x.csv".into(), "s.txt".into()));
    }
}
