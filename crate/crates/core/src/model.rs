//! Domain types shared across the crate.
//!
//! Everything here is an immutable value once constructed; constructors
//! enforce the invariants so downstream code can rely on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::performance::{PerformanceRate, PerformanceUnit};

/// Facility component class. Every device belongs to exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DeviceCategory {
    PowerTransmission,
    Cooling,
    ITEquipment,
    Other,
}

impl DeviceCategory {
    pub const ALL: [DeviceCategory; 4] = [
        DeviceCategory::PowerTransmission,
        DeviceCategory::Cooling,
        DeviceCategory::ITEquipment,
        DeviceCategory::Other,
    ];
}

impl fmt::Display for DeviceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DeviceCategory::PowerTransmission => "PowerTransmission",
            DeviceCategory::Cooling => "Cooling",
            DeviceCategory::ITEquipment => "ITEquipment",
            DeviceCategory::Other => "Other",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceRecord {
    pub device_id: String,
    pub category: DeviceCategory,
    #[serde(default)]
    pub label: String,
}

impl DeviceRecord {
    pub fn new(device_id: impl Into<String>, category: DeviceCategory, label: impl Into<String>) -> Self {
        Self {
            device_id: device_id.into(),
            category,
            label: label.into(),
        }
    }
}

/// A validated set of devices, indexed by id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<DeviceRecord>", into = "Vec<DeviceRecord>")]
pub struct Inventory {
    devices: Vec<DeviceRecord>,
    index: BTreeMap<String, usize>,
}

/// Checks ids are non-empty and unique and builds the lookup index.
pub fn validate_inventory(devices: Vec<DeviceRecord>) -> Result<Inventory> {
    let mut index = BTreeMap::new();
    for (i, d) in devices.iter().enumerate() {
        if d.device_id.trim().is_empty() {
            return Err(Error::InvalidDevice(format!("empty device id at position {i}")));
        }
        if index.insert(d.device_id.clone(), i).is_some() {
            return Err(Error::DuplicateDevice(d.device_id.clone()));
        }
    }
    Ok(Inventory { devices, index })
}

impl TryFrom<Vec<DeviceRecord>> for Inventory {
    type Error = Error;

    fn try_from(devices: Vec<DeviceRecord>) -> Result<Self> {
        validate_inventory(devices)
    }
}

impl From<Inventory> for Vec<DeviceRecord> {
    fn from(inv: Inventory) -> Self {
        inv.devices
    }
}

impl Inventory {
    pub fn get(&self, device_id: &str) -> Option<&DeviceRecord> {
        self.index.get(device_id).map(|&i| &self.devices[i])
    }

    pub fn category_of(&self, device_id: &str) -> Option<DeviceCategory> {
        self.get(device_id).map(|d| d.category)
    }

    pub fn devices(&self) -> &[DeviceRecord] {
        &self.devices
    }

    pub fn in_category(&self, category: DeviceCategory) -> impl Iterator<Item = &DeviceRecord> {
        self.devices.iter().filter(move |d| d.category == category)
    }

    pub fn len(&self) -> usize {
        self.devices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.devices.is_empty()
    }
}

/// One wattage reading. Timestamps are real-valued epoch seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    pub device_id: String,
    pub timestamp: f64,
    pub watts: f64,
}

impl PowerSample {
    pub fn new(device_id: impl Into<String>, timestamp: f64, watts: f64) -> Result<Self> {
        let device_id = device_id.into();
        if !timestamp.is_finite() {
            return Err(Error::InvalidSample {
                device: device_id,
                reason: format!("non-finite timestamp {timestamp}"),
            });
        }
        if !watts.is_finite() || watts < 0.0 {
            return Err(Error::InvalidSample {
                device: device_id,
                reason: format!("power must be finite and non-negative, got {watts}"),
            });
        }
        Ok(Self {
            device_id,
            timestamp,
            watts,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ApplicationCategory {
    Service,
    DataAnalysis,
    InteractiveRealTime,
    HighPerformanceComputing,
}

impl ApplicationCategory {
    /// The performance unit this category reports in.
    pub fn performance_unit(self) -> PerformanceUnit {
        match self {
            ApplicationCategory::Service => PerformanceUnit::RequestsPerSecond,
            ApplicationCategory::DataAnalysis => PerformanceUnit::KBPerSecond,
            ApplicationCategory::InteractiveRealTime => PerformanceUnit::TransactionsPerSecond,
            ApplicationCategory::HighPerformanceComputing => PerformanceUnit::FlopsPerSecond,
        }
    }

    fn accepts(self, work: &WorkMeasure) -> bool {
        matches!(
            (self, work),
            (ApplicationCategory::Service, WorkMeasure::RequestsAnswered(_))
                | (ApplicationCategory::DataAnalysis, WorkMeasure::BytesProcessed(_))
                | (ApplicationCategory::InteractiveRealTime, WorkMeasure::TransactionsCompleted(_))
                | (ApplicationCategory::HighPerformanceComputing, WorkMeasure::FloatingPointOps(_))
        )
    }
}

impl fmt::Display for ApplicationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Accumulated work counter of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value")]
pub enum WorkMeasure {
    BytesProcessed(u64),
    RequestsAnswered(u64),
    TransactionsCompleted(u64),
    FloatingPointOps(u64),
}

impl WorkMeasure {
    pub fn count(&self) -> u64 {
        match *self {
            WorkMeasure::BytesProcessed(n)
            | WorkMeasure::RequestsAnswered(n)
            | WorkMeasure::TransactionsCompleted(n)
            | WorkMeasure::FloatingPointOps(n) => n,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            WorkMeasure::BytesProcessed(_) => "BytesProcessed",
            WorkMeasure::RequestsAnswered(_) => "RequestsAnswered",
            WorkMeasure::TransactionsCompleted(_) => "TransactionsCompleted",
            WorkMeasure::FloatingPointOps(_) => "FloatingPointOps",
        }
    }
}

/// One application execution over a closed time window, with the IT
/// devices whose power is charged to it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRun")]
pub struct ApplicationRun {
    pub run_id: String,
    pub category: ApplicationCategory,
    pub start: f64,
    pub end: f64,
    pub work: WorkMeasure,
    #[serde(rename = "devices")]
    pub attributed_devices: BTreeSet<String>,
}

#[derive(Deserialize)]
struct RawRun {
    run_id: String,
    category: ApplicationCategory,
    start: f64,
    end: f64,
    work: WorkMeasure,
    devices: BTreeSet<String>,
}

impl TryFrom<RawRun> for ApplicationRun {
    type Error = Error;

    fn try_from(r: RawRun) -> Result<Self> {
        ApplicationRun::new(r.run_id, r.category, r.start, r.end, r.work, r.devices)
    }
}

impl ApplicationRun {
    pub fn new<I, S>(
        run_id: impl Into<String>,
        category: ApplicationCategory,
        start: f64,
        end: f64,
        work: WorkMeasure,
        devices: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let run_id = run_id.into();
        if run_id.trim().is_empty() {
            return Err(Error::InvalidRun {
                run: run_id,
                reason: "empty run id".into(),
            });
        }
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::window(start, end));
        }
        if !category.accepts(&work) {
            return Err(Error::CategoryMismatch {
                run: run_id,
                category: category.to_string(),
                work: work.kind().to_string(),
            });
        }
        let attributed_devices: BTreeSet<String> = devices.into_iter().map(Into::into).collect();
        if attributed_devices.is_empty() {
            return Err(Error::InvalidRun {
                run: run_id,
                reason: "no attributed devices".into(),
            });
        }
        Ok(Self {
            run_id,
            category,
            start,
            end,
            work,
            attributed_devices,
        })
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    /// True when the two runs share some instant of positive length.
    pub fn overlaps(&self, other: &ApplicationRun) -> bool {
        self.start < other.end && other.start < self.end
    }
}

/// Integrated energy per facility category over `[start, end]`.
///
/// IT and total facility energy are derived from the per-category map and
/// never stored independently, so `total = sum of categories` holds exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WindowRepr", into = "WindowRepr")]
pub struct EnergyWindow {
    start: f64,
    end: f64,
    energy_by_category: BTreeMap<DeviceCategory, f64>,
}

#[derive(Serialize, Deserialize)]
struct WindowRepr {
    start: f64,
    end: f64,
    energy_by_category: BTreeMap<DeviceCategory, f64>,
    it_energy: f64,
    total_facility_energy: f64,
}

impl From<EnergyWindow> for WindowRepr {
    fn from(w: EnergyWindow) -> Self {
        WindowRepr {
            it_energy: w.it_energy(),
            total_facility_energy: w.total_facility_energy(),
            start: w.start,
            end: w.end,
            energy_by_category: w.energy_by_category,
        }
    }
}

impl TryFrom<WindowRepr> for EnergyWindow {
    type Error = Error;

    fn try_from(r: WindowRepr) -> Result<Self> {
        let w = EnergyWindow::new(r.start, r.end, r.energy_by_category)?;
        if w.it_energy() != r.it_energy || w.total_facility_energy() != r.total_facility_energy {
            return Err(Error::InvalidReport(
                "energy window totals disagree with per-category energies".into(),
            ));
        }
        Ok(w)
    }
}

impl EnergyWindow {
    /// Categories missing from `energies` are taken as zero.
    pub fn new(start: f64, end: f64, energies: BTreeMap<DeviceCategory, f64>) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::window(start, end));
        }
        let mut energy_by_category = BTreeMap::new();
        for cat in DeviceCategory::ALL {
            let e = energies.get(&cat).copied().unwrap_or(0.0);
            if !e.is_finite() || e < 0.0 {
                return Err(Error::InvalidInputs(format!("{cat} energy {e} is negative or non-finite")));
            }
            energy_by_category.insert(cat, e);
        }
        Ok(Self {
            start,
            end,
            energy_by_category,
        })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }

    pub fn energy(&self, category: DeviceCategory) -> f64 {
        self.energy_by_category[&category]
    }

    pub fn energy_by_category(&self) -> &BTreeMap<DeviceCategory, f64> {
        &self.energy_by_category
    }

    pub fn it_energy(&self) -> f64 {
        self.energy(DeviceCategory::ITEquipment)
    }

    pub fn total_facility_energy(&self) -> f64 {
        DeviceCategory::ALL.iter().map(|c| self.energy(*c)).sum()
    }

    /// Mean IT power over the window, in kilowatts.
    pub fn it_power_kw(&self) -> f64 {
        self.it_energy() / self.duration() / 1000.0
    }

    /// Mean total facility power over the window, in kilowatts.
    pub fn total_facility_power_kw(&self) -> f64 {
        self.total_facility_energy() / self.duration() / 1000.0
    }

    /// Copy with every category energy multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        let energies = self.energy_by_category.iter().map(|(c, e)| (*c, e * k)).collect();
        EnergyWindow::new(self.start, self.end, energies)
    }
}

/// Per-application row of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub run_id: String,
    pub category: ApplicationCategory,
    pub start: f64,
    pub end: f64,
    /// Energy of the attributed IT devices over the run window, joules.
    pub it_energy_j: f64,
    pub it_power_kw: f64,
    /// IT power grossed up by the facility overhead observed during the run.
    pub facility_power_kw: f64,
    /// Facility-to-IT energy ratio over the run window.
    pub pue: f64,
    pub performance: PerformanceRate,
    pub appue: f64,
    pub aopue: f64,
    pub weight: f64,
}

/// Assumptions recorded alongside every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub integration: String,
    pub bytes_per_kb: u64,
    pub appue_unit: String,
    pub max_gap_s: Option<f64>,
    pub notes: Vec<String>,
}

impl Default for Provenance {
    fn default() -> Self {
        Self {
            integration: "trapezoidal".into(),
            bytes_per_kb: crate::performance::BYTES_PER_KB,
            appue_unit: "performance per kW".into(),
            max_gap_s: None,
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub window: EnergyWindow,
    pub pue: f64,
    pub it_power_kw: f64,
    pub total_facility_power_kw: f64,
    pub runs: Vec<RunMetrics>,
    /// `None` when there are no runs or the runs report in different units.
    pub weighted_appue: Option<f64>,
    pub aggregated_aopue: Option<f64>,
    pub aggregate_unit: Option<PerformanceUnit>,
    pub provenance: Provenance,
}
