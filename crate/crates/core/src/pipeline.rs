//! End-to-end assembly: telemetry + inventory + run log -> report.

use std::collections::BTreeSet;

use crate::energy::{category_energy, index_traces, integrate_power, PowerTrace};
use crate::error::{Error, Result};
use crate::metrics::{build_report, MetricInputs, RunInput};
use crate::model::{ApplicationRun, DeviceCategory, Inventory, MetricsReport, Provenance};
use crate::performance::compute_performance;

pub const DEFAULT_MAX_GAP: f64 = 60.0;

/// Everything needed to compute a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inventory: Inventory,
    pub traces: Vec<PowerTrace>,
    pub runs: Vec<ApplicationRun>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComputeOptions {
    /// Report window; defaults to the span of the runs.
    pub window: Option<(f64, f64)>,
    pub max_gap: f64,
}

impl Default for ComputeOptions {
    fn default() -> Self {
        Self {
            window: None,
            max_gap: DEFAULT_MAX_GAP,
        }
    }
}

impl Dataset {
    /// Copy with every power sample multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Ok(Self {
            inventory: self.inventory.clone(),
            traces: self.traces.iter().map(|t| t.scaled(k)).collect::<Result<_>>()?,
            runs: self.runs.clone(),
        })
    }

    /// The window used when none is given: the span of all runs, or the
    /// interval covered by every trace when there are no runs.
    pub fn default_window(&self) -> Result<(f64, f64)> {
        if !self.runs.is_empty() {
            let start = self.runs.iter().map(|r| r.start).fold(f64::INFINITY, f64::min);
            let end = self.runs.iter().map(|r| r.end).fold(f64::NEG_INFINITY, f64::max);
            return Ok((start, end));
        }
        let mut span: Option<(f64, f64)> = None;
        for t in &self.traces {
            let (a, b) = t.span().ok_or_else(|| Error::NoSamples(t.device_id().to_string()))?;
            span = Some(match span {
                None => (a, b),
                Some((lo, hi)) => (lo.max(a), hi.min(b)),
            });
        }
        let (start, end) = span.ok_or_else(|| {
            Error::InvalidInputs("no runs or telemetry to infer a window from".into())
        })?;
        if end <= start {
            return Err(Error::window(start, end));
        }
        Ok((start, end))
    }
}

/// Checks run ids are unique, attributed devices are inventory IT devices,
/// and no two overlapping runs share a device.
pub fn validate_runs(inventory: &Inventory, runs: &[ApplicationRun]) -> Result<()> {
    let mut ids = BTreeSet::new();
    for run in runs {
        if !ids.insert(run.run_id.as_str()) {
            return Err(Error::InvalidRun {
                run: run.run_id.clone(),
                reason: "duplicate run id".into(),
            });
        }
        for device in &run.attributed_devices {
            match inventory.category_of(device) {
                None => return Err(Error::UnknownDevice(device.clone())),
                Some(DeviceCategory::ITEquipment) => {}
                Some(_) => {
                    return Err(Error::NotItDevice {
                        run: run.run_id.clone(),
                        device: device.clone(),
                    })
                }
            }
        }
    }
    for (i, a) in runs.iter().enumerate() {
        for b in &runs[i + 1..] {
            if !a.overlaps(b) {
                continue;
            }
            if let Some(device) = a.attributed_devices.intersection(&b.attributed_devices).next() {
                return Err(Error::SharedDeviceConflict {
                    device: device.clone(),
                    first: a.run_id.clone(),
                    second: b.run_id.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Integrates the window and every run, producing validated metric inputs.
///
/// Runs that do not lie entirely inside the window are left out; their ids
/// are returned so callers can record them.
pub fn assemble_inputs(ds: &Dataset, opts: &ComputeOptions) -> Result<(MetricInputs, Vec<String>)> {
    validate_runs(&ds.inventory, &ds.runs)?;
    let (start, end) = match opts.window {
        Some(w) => w,
        None => ds.default_window()?,
    };
    let window = category_energy(&ds.traces, &ds.inventory, start, end, opts.max_gap)?;
    let by_id = index_traces(&ds.traces)?;

    let mut excluded = Vec::new();
    let mut inputs = Vec::new();
    for run in &ds.runs {
        if run.start < start || run.end > end {
            excluded.push(run.run_id.clone());
            continue;
        }
        let mut it_energy = 0.0;
        for device in &run.attributed_devices {
            let trace = by_id
                .get(device.as_str())
                .ok_or_else(|| Error::NoSamples(device.clone()))?;
            it_energy += integrate_power(trace, run.start, run.end, opts.max_gap)?;
        }
        let run_window = category_energy(&ds.traces, &ds.inventory, run.start, run.end, opts.max_gap)?;
        inputs.push(RunInput {
            run: run.clone(),
            it_energy,
            run_window,
            performance: compute_performance(run)?,
        });
    }
    Ok((MetricInputs::new(window, inputs)?, excluded))
}

pub fn compute_report(ds: &Dataset, opts: &ComputeOptions) -> Result<MetricsReport> {
    let (inputs, excluded) = assemble_inputs(ds, opts)?;
    let mut provenance = Provenance {
        max_gap_s: Some(opts.max_gap),
        ..Provenance::default()
    };
    for id in excluded {
        provenance.notes.push(format!("run `{id}` lies outside the report window and was skipped"));
    }
    build_report(&inputs, provenance)
}
