//! File formats: power CSV, run JSON-lines, inventory JSON, scenario
//! manifests, and report serialization.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, Read};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::energy::{integrate_power, index_traces, PowerTrace};
use crate::error::{Error, Result};
use crate::model::{
    validate_inventory, ApplicationCategory, ApplicationRun, DeviceRecord, Inventory, MetricsReport,
    PowerSample, WorkMeasure,
};
use crate::pipeline::{validate_runs, Dataset};

pub const POWER_CSV_HEADER: [&str; 3] = ["device_id", "timestamp", "watts"];

pub const REPORT_CSV_HEADER: [&str; 7] = [
    "workload",
    "it_power_kw",
    "total_facility_power_kw",
    "performance",
    "pue",
    "appue",
    "aopue",
];

/// Label of the summary row in report tables.
pub const SUMMARY_ROW: &str = "window";

/// Parses `device_id,timestamp,watts` rows into one trace per device.
///
/// Timestamps are epoch seconds or RFC 3339 strings. Rows may come in any
/// order; traces are returned sorted by device id with samples sorted by time.
pub fn parse_power_csv<R: Read>(reader: R) -> Result<Vec<PowerTrace>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(e, 1))?;
    if header.iter().ne(POWER_CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{}`", POWER_CSV_HEADER.join(",")),
        });
    }

    let mut by_device: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut seen: HashMap<(String, u64), usize> = HashMap::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line() as usize;
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(csv_error(e, line)),
        }
        let line = record.position().map_or(line, |p| p.line() as usize);
        let device = record[0].to_string();
        if device.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty device id".into(),
            });
        }
        let timestamp = parse_timestamp(&record[1]).ok_or_else(|| Error::Parse {
            line,
            message: format!("bad timestamp `{}`", &record[1]),
        })?;
        let watts: f64 = record[2].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad power value `{}`", &record[2]),
        })?;
        if !watts.is_finite() || watts < 0.0 {
            return Err(Error::InvalidPower { line });
        }
        // +0.0 folds -0.0 into 0.0 so both hash alike
        let key = (device.clone(), (timestamp + 0.0).to_bits());
        if seen.insert(key, line).is_some() {
            return Err(Error::DuplicateSample { line });
        }
        by_device.entry(device).or_default().push((timestamp, watts));
    }

    by_device
        .into_iter()
        .map(|(device, mut points)| {
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            PowerTrace::from_points(device, points)
        })
        .collect()
}

fn csv_error(e: csv::Error, fallback_line: usize) -> Error {
    let line = e
        .position()
        .map_or(fallback_line, |p| p.line() as usize);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn parse_timestamp(s: &str) -> Option<f64> {
    if let Ok(t) = s.parse::<f64>() {
        return t.is_finite().then_some(t);
    }
    let dt = chrono::DateTime::parse_from_rfc3339(s).ok()?;
    Some(dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9)
}

/// Writes traces as power CSV, rows ordered by time and then by the order
/// of `traces`.
pub fn write_power_csv(traces: &[PowerTrace]) -> Vec<u8> {
    let mut rows: Vec<(f64, usize, &PowerSample)> = traces
        .iter()
        .enumerate()
        .flat_map(|(i, t)| t.samples().iter().map(move |s| (s.timestamp, i, s)))
        .collect();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut out = String::with_capacity(rows.len() * 32);
    out.push_str(&POWER_CSV_HEADER.join(","));
    out.push('\n');
    for (_, _, s) in rows {
        out.push_str(&format!("{},{},{}\n", s.device_id, s.timestamp, s.watts));
    }
    out.into_bytes()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RunLine {
    run_id: String,
    category: ApplicationCategory,
    start: f64,
    end: f64,
    work: WorkMeasure,
    devices: Vec<String>,
}

/// Parses one JSON object per line into validated runs. Blank lines are
/// skipped.
pub fn parse_runs_jsonl<R: BufRead>(reader: R) -> Result<Vec<ApplicationRun>> {
    let mut runs: Vec<ApplicationRun> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RunLine = serde_json::from_str(&line).map_err(|e| match e.classify() {
            serde_json::error::Category::Data => Error::Schema {
                line: line_no,
                message: e.to_string(),
            },
            _ => Error::Parse {
                line: line_no,
                message: e.to_string(),
            },
        })?;
        let run = ApplicationRun::new(raw.run_id, raw.category, raw.start, raw.end, raw.work, raw.devices)
            .map_err(|e| match e {
                Error::InvalidWindow { start, end, .. } => Error::InvalidWindow {
                    start,
                    end,
                    line: Some(line_no),
                },
                other => Error::Schema {
                    line: line_no,
                    message: other.to_string(),
                },
            })?;
        if runs.iter().any(|r| r.run_id == run.run_id) {
            return Err(Error::Schema {
                line: line_no,
                message: format!("duplicate run id `{}`", run.run_id),
            });
        }
        runs.push(run);
    }
    Ok(runs)
}

pub fn write_runs_jsonl(runs: &[ApplicationRun]) -> Vec<u8> {
    let mut out = Vec::new();
    for run in runs {
        serde_json::to_writer(&mut out, run).expect("runs serialize");
        out.push(b'\n');
    }
    out
}

/// Reads an inventory: a JSON array of device records.
pub fn parse_inventory_json<R: Read>(reader: R) -> Result<Inventory> {
    let devices: Vec<DeviceRecord> = serde_json::from_reader(reader).map_err(|e| Error::Schema {
        line: e.line(),
        message: e.to_string(),
    })?;
    validate_inventory(devices)
}

pub fn write_inventory_json(inventory: &Inventory) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(inventory.devices()).expect("inventory serializes");
    out.push(b'\n');
    out
}

/// A hand-editable description of one dataset. Power file paths are
/// relative to the scenario file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub inventory: Vec<DeviceRecord>,
    pub power: Vec<String>,
    pub runs: Vec<ApplicationRun>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

/// Loads a scenario file and its power CSVs, checking that every run's
/// devices are covered by telemetry under `max_gap`.
pub fn load_scenario_file(path: &Path, max_gap: f64) -> Result<(Dataset, Option<(f64, f64)>)> {
    let text = std::fs::read_to_string(path)?;
    let file: ScenarioFile = serde_json::from_str(&text).map_err(|e| Error::Schema {
        line: e.line(),
        message: e.to_string(),
    })?;
    let inventory = validate_inventory(file.inventory)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut traces = Vec::new();
    for p in &file.power {
        let f = std::fs::File::open(base.join(p))?;
        traces.extend(parse_power_csv(std::io::BufReader::new(f))?);
    }
    let ds = Dataset {
        inventory,
        traces,
        runs: file.runs,
    };
    validate_runs(&ds.inventory, &ds.runs)?;
    let by_id = index_traces(&ds.traces)?;
    for run in &ds.runs {
        for device in &run.attributed_devices {
            let trace = by_id
                .get(device.as_str())
                .ok_or_else(|| Error::NoSamples(device.clone()))?;
            integrate_power(trace, run.start, run.end, max_gap)?;
        }
    }
    Ok((ds, file.window.map(|[a, b]| (a, b))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected json or csv)")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

/// Three decimals.
pub fn format_metric(value: f64) -> String {
    format!("{value:.3}")
}

/// ApPUE display: four decimals at or above 1, three below.
pub fn format_appue(value: f64) -> String {
    if value.abs() >= 1.0 {
        format!("{value:.4}")
    } else {
        format!("{value:.3}")
    }
}

/// Table row cells for one report row, in [`REPORT_CSV_HEADER`] order.
pub fn table_rows(report: &MetricsReport) -> Vec<[String; 7]> {
    report
        .runs
        .iter()
        .map(|r| {
            [
                r.run_id.clone(),
                format_metric(r.it_power_kw),
                format_metric(r.facility_power_kw),
                r.performance.to_string(),
                format_metric(r.pue),
                format_appue(r.appue),
                format_metric(r.aopue),
            ]
        })
        .collect()
}

/// Serializes a report. Output is deterministic: identical reports give
/// identical bytes.
pub fn write_report(report: &MetricsReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
            out.push(b'\n');
            out
        }
        ReportFormat::Csv => {
            let summary = [
                SUMMARY_ROW.to_string(),
                format_metric(report.it_power_kw),
                format_metric(report.total_facility_power_kw),
                String::new(),
                format_metric(report.pue),
                report.weighted_appue.map(format_appue).unwrap_or_default(),
                report.aggregated_aopue.map(format_metric).unwrap_or_default(),
            ];
            write_table(table_rows(report).iter().chain(std::iter::once(&summary)))
        }
    }
}

/// CSV table with [`REPORT_CSV_HEADER`].
pub fn write_table<'a>(rows: impl IntoIterator<Item = &'a [String; 7]>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_CSV_HEADER).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Parses a JSON report and re-checks its invariants.
pub fn parse_report_json(bytes: &[u8]) -> Result<MetricsReport> {
    let report: MetricsReport =
        serde_json::from_slice(bytes).map_err(|e| Error::InvalidReport(e.to_string()))?;
    report.check_invariants()?;
    Ok(report)
}
