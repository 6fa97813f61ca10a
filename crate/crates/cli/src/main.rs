//! `dualkit` command-line interface.
//!
//! Exit codes: 0 success or equivalent, 1 not equivalent, 2 parse error,
//! 3 dualization methods disagree, 4 GED budget or search limit exceeded,
//! 5 any other failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use dualkit::canon::canonicalize_with;
use dualkit::dual::{dualize_checked_with, dualize_with, DualizationMethod, DualizeError};
use dualkit::ged::GedError;
use dualkit::gen::dataset::{gen_dataset_with, write_dataset, DatasetConfig, DatasetError};
use dualkit::graph::{build_graph, export_dot, GraphMode};
use dualkit::inject::{inject_with, ErrorType, InjectError};
use dualkit::io::{read_lp, write_atomic, write_lp, Format, ReadError, WriteError};
use dualkit::lp::LinearProgram;
use dualkit::metrics::{
    canonical_graph, cged_with, nged_view, nged_with, obj_match, MetricOptions, SenseCompat,
};
use dualkit::simplex::{solve, SolveStatus};
use dualkit::tol::Tolerance;

const REPORT_SCHEMA: &str = "dualkit-report/1";

#[derive(Parser)]
#[command(
    name = "dualkit",
    version,
    about = "LP dualization and equivalence checking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Mps,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Mps => Format::Mps,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MethodArg {
    Sf,
    Sob,
    Checked,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum MetricArg {
    Cged,
    Nged,
    Obj,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompatArg {
    ToGeq,
    ToLeq,
    Keep,
}

impl From<CompatArg> for SenseCompat {
    fn from(c: CompatArg) -> SenseCompat {
        match c {
            CompatArg::ToGeq => SenseCompat::ToGeq,
            CompatArg::ToLeq => SenseCompat::ToLeq,
            CompatArg::Keep => SenseCompat::Keep,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the dual of an LP.
    Dualize {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "checked")]
        method: MethodArg,
        /// Output file; format from its extension, else the input format. Stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Input format, overriding the extension.
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Compare a candidate LP with a reference LP.
    Check {
        candidate: PathBuf,
        truth: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        metric: MetricArg,
        #[arg(long)]
        json: bool,
        /// Constraint sense normalization used by NGED.
        #[arg(long, value_enum, default_value = "to-geq")]
        compat: CompatArg,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Score every LP in a directory against same-named references.
    Report {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        truths: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Inject one labeled error into an LP.
    Inject {
        input: PathBuf,
        #[arg(long)]
        error: ErrorType,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Generate a benchmark dataset directory.
    Gen {
        /// JSON dataset config; defaults apply to missing fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an LP and print status, value and point.
    Solve {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Print the bipartite graph of an LP as DOT.
    Graph {
        input: PathBuf,
        /// Graph of the canonical form instead of the sense-normalized LP.
        #[arg(long)]
        canonical: bool,
        #[arg(long)]
        dot: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Read(#[from] ReadError),
    #[error(transparent)]
    Write(#[from] WriteError),
    #[error(transparent)]
    Dualize(#[from] DualizeError),
    #[error(transparent)]
    Ged(#[from] GedError),
    #[error(transparent)]
    Inject(#[from] InjectError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Read(ReadError::Io { .. }) => 5,
            CliError::Read(_) => 2,
            CliError::Dualize(DualizeError::MethodDisagreement { .. }) => 3,
            CliError::Dualize(DualizeError::Ged(_))
            | CliError::Ged(_)
            | CliError::Inject(InjectError::Ged(_)) => 4,
            CliError::Dataset(DatasetError::Dualize {
                source: DualizeError::MethodDisagreement { .. },
                ..
            }) => 3,
            CliError::Dataset(DatasetError::Dualize {
                source: DualizeError::Ged(_),
                ..
            }) => 4,
            CliError::Dataset(DatasetError::Inject {
                source: InjectError::Ged(_),
                ..
            }) => 4,
            _ => 5,
        }
    }
}

fn options(compat: SenseCompat) -> MetricOptions {
    MetricOptions {
        compat,
        ..MetricOptions::with_tolerance(Tolerance::from_env())
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()).map_err(|source| {
            CliError::Write(WriteError::Io {
                path: path.to_path_buf(),
                source,
            })
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_dualize(
    input: &Path,
    method: MethodArg,
    out: Option<&Path>,
    format: Option<Format>,
) -> Result<u8, CliError> {
    let lp = read_lp(input, format)?;
    let opts = options(SenseCompat::default());
    let report = match method {
        MethodArg::Sf => dualize_with(&lp, DualizationMethod::StandardForm, &opts.tol),
        MethodArg::Sob => dualize_with(&lp, DualizationMethod::Sob, &opts.tol),
        MethodArg::Checked => dualize_checked_with(&lp, &opts)?,
    };
    let in_format = format
        .or_else(|| Format::from_path(input))
        .unwrap_or(Format::Mps);
    match out {
        Some(path) => write_lp(
            path,
            &report.dual,
            Some(Format::from_path(path).unwrap_or(in_format)),
        )?,
        None => {
            let text = dualkit::io::render_lp(&report.dual, in_format, "DUAL")
                .map_err(WriteError::from)?;
            emit(None, &text)?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct CheckRow {
    candidate: String,
    truth: String,
    cged: Option<f64>,
    nged: Option<f64>,
    obj_match: Option<bool>,
    statuses: (Option<SolveStatus>, Option<SolveStatus>),
    values: (Option<f64>, Option<f64>),
    equivalent: bool,
    edit_path: Vec<String>,
    errors: Vec<String>,
}

enum Outcome {
    Row(CheckRow),
    /// A metric hit the GED budget; the row is still reported.
    Budget(CheckRow),
    Parse(CheckRow),
}

fn check_pair(
    candidate: &Path,
    truth: &Path,
    metric: MetricArg,
    opts: &MetricOptions,
    format: Option<Format>,
) -> Outcome {
    let mut row = CheckRow {
        candidate: candidate.display().to_string(),
        truth: truth.display().to_string(),
        cged: None,
        nged: None,
        obj_match: None,
        statuses: (None, None),
        values: (None, None),
        equivalent: false,
        edit_path: Vec::new(),
        errors: Vec::new(),
    };
    let (a, b) = match (read_lp(candidate, format), read_lp(truth, format)) {
        (Ok(a), Ok(b)) => (a, b),
        (ra, rb) => {
            row.errors.extend(
                ra.err()
                    .into_iter()
                    .chain(rb.err())
                    .map(|e| format!("parse: {e}")),
            );
            return Outcome::Parse(row);
        }
    };
    let mut budget = false;
    if matches!(metric, MetricArg::Cged | MetricArg::All) {
        match cged_with(&a, &b, opts) {
            Ok((d, path)) => {
                row.cged = Some(d);
                let (ga, gb) = (
                    canonical_graph(&a, &opts.tol),
                    canonical_graph(&b, &opts.tol),
                );
                row.edit_path = path
                    .operations
                    .iter()
                    .map(|op| op.describe(&ga, &gb))
                    .collect();
            }
            Err(e) => {
                budget = true;
                row.errors.push(format!("cged: {e}"));
            }
        }
    }
    if matches!(metric, MetricArg::Nged | MetricArg::All) {
        match nged_with(&a, &b, opts) {
            Ok(d) => row.nged = Some(d),
            Err(e) => {
                budget = true;
                row.errors.push(format!("nged: {e}"));
            }
        }
    }
    if matches!(metric, MetricArg::Obj | MetricArg::All) {
        let m = obj_match(&a, &b, opts.obj_tol);
        if m.matched.is_none() {
            row.errors.push("obj: undecided".to_string());
        }
        row.obj_match = m.matched;
        row.statuses = m.statuses;
        row.values = m.values;
    }
    let zero = |d: Option<f64>| d.is_some_and(|d| d <= opts.tol.atol);
    row.equivalent = match metric {
        MetricArg::Cged | MetricArg::All => zero(row.cged),
        MetricArg::Nged => zero(row.nged),
        MetricArg::Obj => row.obj_match == Some(true),
    };
    if budget {
        Outcome::Budget(row)
    } else {
        Outcome::Row(row)
    }
}

fn fmt_opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn print_row(row: &CheckRow) {
    println!("cged: {}", fmt_opt(row.cged));
    println!("nged: {}", fmt_opt(row.nged));
    println!("obj_match: {}", fmt_opt(row.obj_match));
    for op in &row.edit_path {
        println!("  {op}");
    }
    for e in &row.errors {
        eprintln!("{e}");
    }
    println!(
        "{}",
        if row.equivalent {
            "EQUIVALENT"
        } else {
            "NOT EQUIVALENT"
        }
    );
}

fn cmd_check(
    candidate: &Path,
    truth: &Path,
    metric: MetricArg,
    json: bool,
    compat: SenseCompat,
    format: Option<Format>,
) -> Result<u8, CliError> {
    let opts = options(compat);
    let (row, code) = match check_pair(candidate, truth, metric, &opts, format) {
        Outcome::Parse(row) => (row, 2),
        Outcome::Budget(row) => (row, 4),
        Outcome::Row(row) => {
            let code = if row.equivalent { 0 } else { 1 };
            (row, code)
        }
    };
    if json {
        let mut v = serde_json::to_value(&row).expect("rows serialize");
        v["schema"] = json!(REPORT_SCHEMA);
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("values serialize")
        );
    } else {
        print_row(&row);
    }
    Ok(code)
}

fn lp_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries =
        fs::read_dir(dir).map_err(|e| CliError::Other(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && Format::from_path(p).is_some())
        .collect();
    files.sort();
    Ok(files)
}

fn cmd_report(candidates: &Path, truths: &Path, json: bool) -> Result<u8, CliError> {
    let opts = options(SenseCompat::default());
    let mut rows = Vec::new();
    let (mut parse_failures, mut budget_failures) = (0usize, 0usize);
    for truth in lp_files(truths)? {
        let candidate = candidates.join(truth.file_name().expect("listed files have names"));
        rows.push(
            match check_pair(&candidate, &truth, MetricArg::All, &opts, None) {
                Outcome::Row(r) => r,
                Outcome::Budget(r) => {
                    budget_failures += 1;
                    r
                }
                Outcome::Parse(r) => {
                    parse_failures += 1;
                    r
                }
            },
        );
    }
    let n = rows.len().max(1) as f64;
    let zero = |d: Option<f64>| d.is_some_and(|d| d <= opts.tol.atol);
    let cged_acc = rows.iter().filter(|r| zero(r.cged)).count() as f64 / n;
    let nged_acc = rows.iter().filter(|r| zero(r.nged)).count() as f64 / n;
    let obj_acc = rows.iter().filter(|r| r.obj_match == Some(true)).count() as f64 / n;
    let solve_failures = rows
        .iter()
        .filter(|r| r.obj_match.is_none() && !r.errors.iter().any(|e| e.starts_with("parse")))
        .count();
    if json {
        let v = json!({
            "schema": REPORT_SCHEMA,
            "rows": rows,
            "aggregate": {
                "samples": rows.len(),
                "cged_accuracy": cged_acc,
                "nged_accuracy": nged_acc,
                "obj_accuracy": obj_acc,
                "parse_failures": parse_failures,
                "solve_failures": solve_failures,
                "budget_failures": budget_failures,
            },
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("values serialize")
        );
    } else {
        for r in &rows {
            println!(
                "{}\tcged={}\tnged={}\tobj={}",
                r.truth,
                fmt_opt(r.cged),
                fmt_opt(r.nged),
                fmt_opt(r.obj_match)
            );
        }
        println!("samples {}  cged {cged_acc:.4}  nged {nged_acc:.4}  obj {obj_acc:.4}  parse failures {parse_failures}  solve failures {solve_failures}", rows.len());
    }
    Ok(0)
}

fn cmd_inject(
    input: &Path,
    error: ErrorType,
    seed: u64,
    out: &Path,
    format: Option<Format>,
) -> Result<u8, CliError> {
    let lp = read_lp(input, format)?;
    let record = inject_with(&lp, error, seed, &options(SenseCompat::default()))?;
    let out_format = Format::from_path(out)
        .or(format)
        .or_else(|| Format::from_path(input));
    write_lp(out, &record.mutated, out_format)?;
    println!(
        "{} at {} (seed {}, attempts {})",
        record.error, record.location, record.seed, record.attempts
    );
    Ok(0)
}

fn cmd_gen(config: Option<&Path>, out: &Path) -> Result<u8, CliError> {
    let mut cfg = match config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Config {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
            serde_json::from_str::<DatasetConfig>(&text).map_err(|e| CliError::Config {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?
        }
        None => DatasetConfig::default(),
    };
    if let Some(base) = config.and_then(Path::parent) {
        cfg.imports = cfg
            .imports
            .iter()
            .map(|p| {
                if p.is_relative() {
                    base.join(p)
                } else {
                    p.clone()
                }
            })
            .collect();
    }
    let dataset = gen_dataset_with(&cfg, &options(SenseCompat::default()))?;
    write_dataset(&dataset, out)?;
    for s in &dataset.skipped {
        eprintln!("skipped {}: {}", s.path.display(), s.reason);
    }
    println!(
        "{} samples written to {}",
        dataset.samples.len(),
        out.display()
    );
    Ok(0)
}

fn cmd_solve(input: &Path, json: bool, format: Option<Format>) -> Result<u8, CliError> {
    let lp = read_lp(input, format)?;
    let r = solve(&lp).map_err(|e| CliError::Other(e.to_string()))?;
    if json {
        let v = json!({"schema": REPORT_SCHEMA, "status": r.status, "value": r.value, "point": r.point});
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("values serialize")
        );
    } else {
        match r.value {
            Some(v) => println!("{} {v}", r.status),
            None => println!("{}", r.status),
        }
        for (name, x) in r.point.iter().flatten() {
            println!("{name} = {x}");
        }
    }
    Ok(0)
}

fn graph_of(
    lp: &LinearProgram,
    canonical: bool,
    tol: &Tolerance,
) -> dualkit::graph::BipartiteLpGraph {
    if canonical {
        build_graph(&canonicalize_with(lp, tol).lp, GraphMode::Canonical)
            .expect("canonical form is valid")
    } else {
        build_graph(
            &nged_view(lp, SenseCompat::default()),
            GraphMode::NgedCompat,
        )
        .expect("parsed LPs are valid")
    }
}

fn cmd_graph(
    input: &Path,
    canonical: bool,
    dot: Option<&Path>,
    format: Option<Format>,
) -> Result<u8, CliError> {
    let lp = read_lp(input, format)?;
    let g = graph_of(&lp, canonical, &Tolerance::from_env());
    emit(dot, &export_dot(&g))?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Dualize {
            input,
            method,
            out,
            format,
        } => cmd_dualize(&input, method, out.as_deref(), format.map(Into::into)),
        Command::Check {
            candidate,
            truth,
            metric,
            json,
            compat,
            format,
        } => cmd_check(
            &candidate,
            &truth,
            metric,
            json,
            compat.into(),
            format.map(Into::into),
        ),
        Command::Report {
            candidates,
            truths,
            json,
        } => cmd_report(&candidates, &truths, json),
        Command::Inject {
            input,
            error,
            seed,
            out,
            format,
        } => cmd_inject(&input, error, seed, &out, format.map(Into::into)),
        Command::Gen { config, out } => cmd_gen(config.as_deref(), &out),
        Command::Solve {
            input,
            json,
            format,
        } => cmd_solve(&input, json, format.map(Into::into)),
        Command::Graph {
            input,
            canonical,
            dot,
            format,
        } => cmd_graph(&input, canonical, dot.as_deref(), format.map(Into::into)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dualkit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
