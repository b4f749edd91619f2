//! Application performance as a work rate, with the unit fixed by the
//! application category.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ApplicationRun, WorkMeasure};

/// Decimal kilobytes.
pub const BYTES_PER_KB: u64 = 1000;

const FLOPS_PER_GFLOPS: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PerformanceUnit {
    KBPerSecond,
    RequestsPerSecond,
    TransactionsPerSecond,
    FlopsPerSecond,
}

impl PerformanceUnit {
    /// Label of [`PerformanceRate::reported_value`] in this unit.
    pub fn label(self) -> &'static str {
        match self {
            PerformanceUnit::KBPerSecond => "KB/s",
            PerformanceUnit::RequestsPerSecond => "req/s",
            PerformanceUnit::TransactionsPerSecond => "tx/s",
            PerformanceUnit::FlopsPerSecond => "GFLOPS",
        }
    }

    /// Label of an ApPUE/AoPUE value computed from this unit.
    pub fn efficiency_label(self) -> String {
        format!("{} per kW", self.label())
    }

    fn reporting_scale(self) -> f64 {
        match self {
            PerformanceUnit::FlopsPerSecond => FLOPS_PER_GFLOPS,
            _ => 1.0,
        }
    }
}

impl fmt::Display for PerformanceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Work done per second. `value` is in the base unit (KB, requests,
/// transactions or floating-point operations per second).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRate {
    pub value: f64,
    pub unit: PerformanceUnit,
}

impl PerformanceRate {
    pub fn new(value: f64, unit: PerformanceUnit) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidInputs(format!("performance rate {value} must be non-negative")));
        }
        Ok(Self { value, unit })
    }

    pub fn kb_per_second(value: f64) -> Result<Self> {
        Self::new(value, PerformanceUnit::KBPerSecond)
    }

    pub fn gflops(value: f64) -> Result<Self> {
        Self::new(value * FLOPS_PER_GFLOPS, PerformanceUnit::FlopsPerSecond)
    }

    /// Value in the unit shown in reports; FLOP rates are given in GFLOPS.
    /// This is the numerator of ApPUE and AoPUE.
    pub fn reported_value(&self) -> f64 {
        self.value / self.unit.reporting_scale()
    }
}

impl fmt::Display for PerformanceRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3} {}", self.reported_value(), self.unit.label())
    }
}

/// Work counter of `run` divided by its duration.
pub fn compute_performance(run: &ApplicationRun) -> Result<PerformanceRate> {
    let unit = run.category.performance_unit();
    let work = match (unit, run.work) {
        (PerformanceUnit::KBPerSecond, WorkMeasure::BytesProcessed(b)) => b as f64 / BYTES_PER_KB as f64,
        (PerformanceUnit::RequestsPerSecond, WorkMeasure::RequestsAnswered(n))
        | (PerformanceUnit::TransactionsPerSecond, WorkMeasure::TransactionsCompleted(n))
        | (PerformanceUnit::FlopsPerSecond, WorkMeasure::FloatingPointOps(n)) => n as f64,
        _ => {
            return Err(Error::CategoryMismatch {
                run: run.run_id.clone(),
                category: run.category.to_string(),
                work: run.work.kind().to_string(),
            })
        }
    };
    let duration = run.end - run.start;
    if !(duration > 0.0) || !duration.is_finite() {
        return Err(Error::window(run.start, run.end));
    }
    PerformanceRate::new(work / duration, unit)
}
