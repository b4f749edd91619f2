//! `axpue` command-line frontend.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | internal or output error |
//! | 2 | invalid input (usage, schema, unknown device or scenario) |
//! | 3 | telemetry coverage error (missing samples, gap over `--max-gap`) |

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use axpue_core::io::{
    format_appue, format_metric, load_scenario_file, parse_inventory_json, parse_power_csv,
    parse_report_json, parse_runs_jsonl, table_rows, write_report, write_table, ReportFormat,
};
use axpue_core::pipeline::{compute_report, ComputeOptions, Dataset, DEFAULT_MAX_GAP};
use axpue_core::sim::{builtin_scenario, builtin_scenario_names, simulate, SimScenario};
use axpue_core::{aggregate_appue, compute_weights, Efficiency, MetricsReport};
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_COVERAGE: i32 = 3;

/// File names written by `simulate`.
pub const POWER_FILE: &str = "power.csv";
pub const RUNS_FILE: &str = "runs.jsonl";
pub const INVENTORY_FILE: &str = "inventory.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SCENARIO_FILE: &str = "scenario.json";

pub const AGGREGATE_ROW: &str = "aggregate";

#[derive(Debug, Parser)]
#[command(
    name = "axpue",
    version,
    about = "PUE, ApPUE and AoPUE from facility power telemetry",
    after_help = "Exit codes: 0 ok, 1 internal error, 2 invalid input, 3 telemetry coverage error"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a metrics report from telemetry, runs and inventory
    Compute(ComputeArgs),
    /// Generate synthetic telemetry for a built-in or manifest scenario
    Simulate(SimulateArgs),
    /// Merge report files into one table plus a long-format series file
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Power CSV (`device_id,timestamp,watts`); may be repeated
    #[arg(long, required_unless_present = "scenario")]
    pub power: Vec<PathBuf>,
    /// Run log, one JSON object per line
    #[arg(long, required_unless_present = "scenario")]
    pub runs: Option<PathBuf>,
    /// Device inventory, a JSON array of device records
    #[arg(long, required_unless_present = "scenario")]
    pub inventory: Option<PathBuf>,
    /// Scenario file bundling inventory, power files and runs
    #[arg(long, conflicts_with_all = ["power", "runs", "inventory"])]
    pub scenario: Option<PathBuf>,
    /// Report window as `start,end` in epoch seconds
    #[arg(long, value_parser = parse_window)]
    pub window: Option<(f64, f64)>,
    /// Longest tolerated interval without samples, seconds
    #[arg(long, default_value_t = DEFAULT_MAX_GAP)]
    pub max_gap: f64,
    #[arg(long, default_value_t = ReportFormat::Json)]
    pub format: ReportFormat,
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `paper:<workload>`, `paper:sort1`, `paper:sort2`, or a manifest path
    pub scenario: String,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Override the scenario seed
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON report files produced by `compute`
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Merged table path; the series file is written next to it
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `start,end`, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    let (a, b) = (parse(a)?, parse(b)?);
    if !(b > a) {
        return Err(format!("window end {b} must exceed start {a}"));
    }
    Ok((a, b))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Coverage(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Coverage(_) => EXIT_COVERAGE,
            CliError::Output(_) => EXIT_INTERNAL,
        }
    }

    fn input(context: impl std::fmt::Display, e: axpue_core::Error) -> Self {
        let msg = format!("{context}: {e}");
        if e.is_coverage() {
            CliError::Coverage(msg)
        } else {
            CliError::Validation(msg)
        }
    }
}

impl From<axpue_core::Error> for CliError {
    fn from(e: axpue_core::Error) -> Self {
        if e.is_coverage() {
            CliError::Coverage(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are ordinary output
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_VALIDATION;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Compute(a) => cmd_compute(a, stdout, stderr),
        Command::Simulate(a) => cmd_simulate(a, stderr),
        Command::Report(a) => cmd_report(a, stderr),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn open(path: &Path) -> Result<BufReader<fs::File>, CliError> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Loads the dataset named by compute arguments.
pub fn load_dataset(args: &ComputeArgs) -> Result<(Dataset, Option<(f64, f64)>), CliError> {
    if let Some(path) = &args.scenario {
        return load_scenario_file(path, args.max_gap).map_err(|e| CliError::input(path.display(), e));
    }
    let (runs_path, inv_path) = match (&args.runs, &args.inventory) {
        (Some(r), Some(i)) => (r, i),
        _ => return Err(CliError::Validation("--runs and --inventory are required".into())),
    };
    let inventory = parse_inventory_json(open(inv_path)?).map_err(|e| CliError::input(inv_path.display(), e))?;
    let runs = parse_runs_jsonl(open(runs_path)?).map_err(|e| CliError::input(runs_path.display(), e))?;
    let mut traces = Vec::new();
    for p in &args.power {
        traces.extend(parse_power_csv(open(p)?).map_err(|e| CliError::input(p.display(), e))?);
    }
    Ok((
        Dataset {
            inventory,
            traces,
            runs,
        },
        None,
    ))
}

pub fn cmd_compute(args: &ComputeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    if !(args.max_gap >= 0.0) {
        return Err(CliError::Validation(format!("--max-gap {} must be non-negative", args.max_gap)));
    }
    let (dataset, file_window) = load_dataset(args)?;
    let opts = ComputeOptions {
        window: args.window.or(file_window),
        max_gap: args.max_gap,
    };
    let report = compute_report(&dataset, &opts)?;
    for note in &report.provenance.notes {
        let _ = writeln!(stderr, "warning: {note}");
    }
    let bytes = write_report(&report, args.format);
    match &args.out {
        Some(path) => write_output(path, &bytes),
        None => stdout
            .write_all(&bytes)
            .map_err(|e| CliError::Output(format!("stdout: {e}"))),
    }
}

/// Resolves a built-in scenario name or a manifest path.
pub fn resolve_scenario(name: &str) -> Result<SimScenario, CliError> {
    if let Some(s) = builtin_scenario(name) {
        return Ok(s);
    }
    let path = Path::new(name);
    if name.starts_with("paper:") || !path.is_file() {
        return Err(CliError::Validation(format!(
            "unknown scenario `{name}` (built-ins: {})",
            builtin_scenario_names().join(", ")
        )));
    }
    serde_json::from_reader(open(path)?)
        .map_err(|e| CliError::Validation(format!("{}: invalid manifest: {e}", path.display())))
}

pub fn cmd_simulate(args: &SimulateArgs, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mut scenario = resolve_scenario(&args.scenario)?;
    if let Some(seed) = args.seed {
        scenario.seed = seed;
    }
    let out = simulate(&scenario)?;
    fs::create_dir_all(&args.out).map_err(|e| CliError::Output(format!("{}: {e}", args.out.display())))?;

    let bundle = axpue_core::io::ScenarioFile {
        inventory: out.dataset.inventory.devices().to_vec(),
        power: vec![POWER_FILE.to_string()],
        runs: out.dataset.runs.clone(),
        window: None,
    };
    let mut bundle_json = serde_json::to_vec_pretty(&bundle).expect("scenario file serializes");
    bundle_json.push(b'\n');

    for (name, bytes) in [
        (POWER_FILE, &out.power_csv),
        (RUNS_FILE, &out.runs_jsonl),
        (INVENTORY_FILE, &out.inventory_json),
        (MANIFEST_FILE, &out.manifest),
        (SCENARIO_FILE, &bundle_json),
    ] {
        write_output(&args.out.join(name), bytes)?;
    }
    let _ = writeln!(
        stderr,
        "simulated `{}`: {} devices, {:.1} s, written to {}",
        scenario.name,
        out.dataset.inventory.len(),
        scenario.duration,
        args.out.display()
    );
    Ok(())
}

/// Series file path for a table path: `dir/table.csv` -> `dir/table.series.csv`.
pub fn series_path(table: &Path) -> PathBuf {
    let stem = table.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    table.with_file_name(format!("{stem}.series.csv"))
}

/// Merged-table summary across reports: IT-power weighted ApPUE and its
/// AoPUE over the pooled facility/IT ratio. `None` cells when units differ.
pub fn aggregate_row(reports: &[MetricsReport]) -> Result<([String; 7], Option<String>), CliError> {
    let rows: Vec<_> = reports.iter().flat_map(|r| &r.runs).collect();
    let it: f64 = rows.iter().map(|r| r.it_power_kw).sum();
    let total: f64 = rows.iter().map(|r| r.facility_power_kw).sum();
    let mut cells = [
        AGGREGATE_ROW.to_string(),
        format_metric(it),
        format_metric(total),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
    ];
    if rows.is_empty() || it <= 0.0 {
        return Ok((cells, None));
    }
    let pue = total / it;
    cells[4] = format_metric(pue);
    let weights = compute_weights(&rows.iter().map(|r| r.it_power_kw).collect::<Vec<_>>())?;
    let appues: Vec<Efficiency> = rows
        .iter()
        .map(|r| Efficiency {
            value: r.appue,
            unit: r.performance.unit,
        })
        .collect();
    match aggregate_appue(&appues, &weights) {
        Ok(agg) => {
            cells[5] = format_appue(agg.value);
            cells[6] = format_metric(agg.value / pue);
            Ok((cells, None))
        }
        Err(e @ axpue_core::Error::UnitMismatch(..)) => Ok((cells, Some(format!("aggregation columns left blank: {e}")))),
        Err(e) => Err(e.into()),
    }
}

pub fn cmd_report(args: &ReportArgs, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mut reports = Vec::with_capacity(args.files.len());
    for path in &args.files {
        let bytes = fs::read(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let report = parse_report_json(&bytes)
            .map_err(|e| CliError::Validation(format!("{}: schema mismatch: {e}", path.display())))?;
        reports.push(report);
    }

    let mut rows: Vec<[String; 7]> = reports.iter().flat_map(table_rows).collect();
    let (summary, warning) = aggregate_row(&reports)?;
    if let Some(w) = warning {
        let _ = writeln!(stderr, "warning: {w}");
    }
    rows.push(summary);
    write_output(&args.out, &write_table(rows.iter()))?;

    let mut series = csv::Writer::from_writer(Vec::new());
    series.write_record(["workload", "metric", "value"]).expect("in-memory write");
    for run in reports.iter().flat_map(|r| &r.runs) {
        for (metric, value) in [
            ("it_power_kw", run.it_power_kw),
            ("total_facility_power_kw", run.facility_power_kw),
            ("performance", run.performance.reported_value()),
            ("pue", run.pue),
            ("appue", run.appue),
            ("aopue", run.aopue),
        ] {
            series
                .write_record([run.run_id.as_str(), metric, &value.to_string()])
                .expect("in-memory write");
        }
    }
    let series = series.into_inner().expect("in-memory flush");
    write_output(&series_path(&args.out), &series)
}
