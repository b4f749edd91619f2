//! Application-level power usage effectiveness.
//!
//! Computes PUE, ApPUE (application performance per kW of IT power),
//! AoPUE (application performance per kW of total facility power) and the
//! IT-power-weighted ApPUE across applications, starting from raw power
//! telemetry, a device inventory and an application run log.
//!
//! The modules follow the data flow:
//!
//! * [`model`]: devices, samples, runs, energy windows and reports
//! * [`energy`]: trapezoidal integration of power traces
//! * [`performance`]: work rates per application category
//! * [`metrics`]: the metric formulas and report assembly
//! * [`pipeline`]: attribution of device energy to runs
//! * [`io`]: CSV / JSON-lines / JSON formats
//! * [`sim`]: deterministic synthetic telemetry

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy;
pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod performance;
pub mod pipeline;
pub mod sim;

pub use energy::{average_power, category_energy, integrate_power, PowerTrace};
pub use error::{Error, Result};
pub use metrics::{
    aggregate_appue, build_report, compute_aopue, compute_appue, compute_pue, compute_weights,
    verify_identity, Efficiency, MetricInputs, RunInput,
};
pub use model::{
    validate_inventory, ApplicationCategory, ApplicationRun, DeviceCategory, DeviceRecord,
    EnergyWindow, Inventory, MetricsReport, PowerSample, Provenance, RunMetrics, WorkMeasure,
};
pub use performance::{compute_performance, PerformanceRate, PerformanceUnit};
pub use pipeline::{compute_report, ComputeOptions, Dataset};
