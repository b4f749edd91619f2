//! Deterministic synthetic telemetry.
//!
//! Device power is a linear function of a piecewise-linear utilization
//! profile. Facility overhead is realized as three synthetic devices (cooling,
//! power transmission, other) so that the generated data exercises every
//! facility category. Samples are emitted on the sampling grid and at every
//! profile breakpoint, which makes trapezoidal integration of the output
//! exact for jitter-free profiles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::PowerTrace;
use crate::error::{Error, Result};
use crate::io::{write_inventory_json, write_power_csv, write_runs_jsonl};
use crate::model::{
    validate_inventory, ApplicationCategory, ApplicationRun, DeviceCategory, DeviceRecord, Inventory,
    WorkMeasure,
};
use crate::pipeline::Dataset;

pub const COOLING_DEVICE: &str = "facility-cooling";
pub const TRANSMISSION_DEVICE: &str = "facility-transmission";
pub const OTHER_DEVICE: &str = "facility-other";

const MAX_SAMPLES: f64 = 5e6;

/// Utilization-to-power model of one device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DevicePowerModel {
    Server { idle_watts: f64, peak_watts: f64 },
    Storage { idle_watts: f64, peak_watts: f64 },
    Fixed { constant_watts: f64 },
}

impl DevicePowerModel {
    /// Server drawing about 290 W idle and 300 W at full load.
    pub fn reference_server() -> Self {
        DevicePowerModel::Server {
            idle_watts: 290.0,
            peak_watts: 300.0,
        }
    }

    /// Storage array drawing about 310 W idle and 390 W at full load.
    pub fn reference_storage() -> Self {
        DevicePowerModel::Storage {
            idle_watts: 310.0,
            peak_watts: 390.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DevicePowerModel::Server {
                idle_watts,
                peak_watts,
            }
            | DevicePowerModel::Storage {
                idle_watts,
                peak_watts,
            } => {
                if !(idle_watts.is_finite() && peak_watts.is_finite())
                    || idle_watts < 0.0
                    || peak_watts < idle_watts
                {
                    return Err(Error::Model(format!(
                        "need peak >= idle >= 0, got idle {idle_watts} W, peak {peak_watts} W"
                    )));
                }
            }
            DevicePowerModel::Fixed { constant_watts } => {
                if !constant_watts.is_finite() || constant_watts < 0.0 {
                    return Err(Error::Model(format!("fixed power {constant_watts} W")));
                }
            }
        }
        Ok(())
    }

    /// Power in watts at utilization `u`, clamped to `[0, 1]`.
    pub fn power(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match *self {
            DevicePowerModel::Server {
                idle_watts,
                peak_watts,
            }
            | DevicePowerModel::Storage {
                idle_watts,
                peak_watts,
            } => idle_watts + u * (peak_watts - idle_watts),
            DevicePowerModel::Fixed { constant_watts } => constant_watts,
        }
    }
}

/// Non-IT facility load as a function of instantaneous IT power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FacilityOverheadModel {
    /// Lighting and other constant loads.
    pub fixed_watts: f64,
    /// Cooling power per watt of IT power.
    pub cooling_coefficient: f64,
    /// Share of total facility input lost in power delivery, in `[0, 1)`.
    pub transmission_loss_fraction: f64,
}

/// Instantaneous power of each facility category.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacilityPower {
    pub it: f64,
    pub cooling: f64,
    pub transmission: f64,
    pub other: f64,
}

impl FacilityPower {
    pub fn total(&self) -> f64 {
        self.it + self.cooling + self.transmission + self.other
    }
}

impl FacilityOverheadModel {
    pub fn none() -> Self {
        Self {
            fixed_watts: 0.0,
            cooling_coefficient: 0.0,
            transmission_loss_fraction: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.fixed_watts.is_finite()
            && self.fixed_watts >= 0.0
            && self.cooling_coefficient.is_finite()
            && self.cooling_coefficient >= 0.0
            && (0.0..1.0).contains(&self.transmission_loss_fraction);
        if ok {
            Ok(())
        } else {
            Err(Error::Model(format!("invalid overhead model {self:?}")))
        }
    }

    /// Splits facility power given instantaneous IT power and the power of
    /// non-IT inventory devices that are not part of the overhead model.
    pub fn breakdown(&self, it_watts: f64, other_watts: f64) -> FacilityPower {
        let cooling = self.cooling_coefficient * it_watts;
        let other = self.fixed_watts + other_watts;
        let f = self.transmission_loss_fraction;
        let transmission = (it_watts + cooling + other) * f / (1.0 - f);
        FacilityPower {
            it: it_watts,
            cooling,
            transmission,
            other,
        }
    }

    /// Overhead model whose facility power at `it_watts` equals `total_watts`,
    /// given a fixed load and loss fraction; the cooling coefficient is solved.
    pub fn calibrated(it_watts: f64, total_watts: f64, fixed_watts: f64, loss_fraction: f64) -> Result<Self> {
        let cooling_coefficient = (total_watts * (1.0 - loss_fraction) - fixed_watts) / it_watts - 1.0;
        let m = Self {
            fixed_watts,
            cooling_coefficient,
            transmission_loss_fraction: loss_fraction,
        };
        m.validate()?;
        Ok(m)
    }
}

/// Piecewise-linear utilization over time, held constant outside its
/// breakpoints. `jitter` adds seeded uniform noise of that amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilizationProfile {
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub jitter: f64,
}

impl Default for UtilizationProfile {
    fn default() -> Self {
        Self::constant(0.0)
    }
}

impl UtilizationProfile {
    pub fn constant(u: f64) -> Self {
        Self {
            points: vec![[0.0, u]],
            jitter: 0.0,
        }
    }

    pub fn from_points(points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self {
            points: points.into_iter().map(|(t, u)| [t, u]).collect(),
            jitter: 0.0,
        }
    }

    /// Consecutive phases of `(length, utilization)` starting at t = 0, with
    /// linear transitions of `ramp` seconds at the start of each new phase.
    pub fn phases(phases: &[(f64, f64)], ramp: f64) -> Self {
        let mut points = Vec::new();
        let mut t = 0.0;
        for (i, &(len, u)) in phases.iter().enumerate() {
            if i == 0 {
                points.push([0.0, u]);
            } else {
                points.push([t + ramp, u]);
            }
            t += len;
            points.push([t, u]);
        }
        Self { points, jitter: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Model("utilization profile has no points".into()));
        }
        for [t, u] in &self.points {
            if !t.is_finite() || !(0.0..=1.0).contains(u) {
                return Err(Error::Model(format!("bad profile point ({t}, {u})")));
            }
        }
        if self.points.windows(2).any(|w| w[1][0] <= w[0][0]) {
            return Err(Error::Model("profile times must be strictly increasing".into()));
        }
        if !(0.0..=1.0).contains(&self.jitter) {
            return Err(Error::Model(format!("jitter {} outside [0, 1]", self.jitter)));
        }
        Ok(())
    }

    pub fn at(&self, t: f64) -> f64 {
        let p = &self.points;
        let i = p.partition_point(|q| q[0] <= t);
        if i == 0 {
            return p[0][1];
        }
        if i == p.len() {
            return p[i - 1][1];
        }
        let ([t0, u0], [t1, u1]) = (p[i - 1], p[i]);
        u0 + (u1 - u0) * (t - t0) / (t1 - t0)
    }

    fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p[0])
    }

    fn time_scaled(&self, factor: f64) -> Self {
        Self {
            points: self.points.iter().map(|[t, u]| [t * factor, *u]).collect(),
            jitter: self.jitter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimDevice {
    pub record: DeviceRecord,
    pub model: DevicePowerModel,
    #[serde(default)]
    pub profile: UtilizationProfile,
}

/// A complete synthetic experiment. Times are seconds from t = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub name: String,
    pub seed: u64,
    pub duration: f64,
    pub sample_period: f64,
    pub devices: Vec<SimDevice>,
    pub runs: Vec<ApplicationRun>,
    pub overhead: FacilityOverheadModel,
}

/// Generated telemetry in memory and in its file encodings.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub dataset: Dataset,
    pub power_csv: Vec<u8>,
    pub runs_jsonl: Vec<u8>,
    pub inventory_json: Vec<u8>,
    pub manifest: Vec<u8>,
}

impl SimScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::Model(format!("duration {} must be positive", self.duration)));
        }
        if !(self.sample_period.is_finite() && self.sample_period > 0.0) {
            return Err(Error::Model(format!(
                "sample period {} must be positive",
                self.sample_period
            )));
        }
        if self.duration / self.sample_period > MAX_SAMPLES {
            return Err(Error::Model("too many samples per device".into()));
        }
        self.overhead.validate()?;
        for d in &self.devices {
            let id = d.record.device_id.as_str();
            if [COOLING_DEVICE, TRANSMISSION_DEVICE, OTHER_DEVICE].contains(&id) {
                return Err(Error::Model(format!("device id `{id}` is reserved")));
            }
            d.model
                .validate()
                .and_then(|_| d.profile.validate())
                .map_err(|e| Error::Model(format!("device `{id}`: {e}")))?;
        }
        let inventory = self.inventory().map_err(|e| Error::Model(e.to_string()))?;
        for run in &self.runs {
            if run.start < 0.0 || run.end > self.duration {
                return Err(Error::Model(format!(
                    "run `{}` lies outside [0, {}]",
                    run.run_id, self.duration
                )));
            }
            for dev in &run.attributed_devices {
                if inventory.category_of(dev) != Some(DeviceCategory::ITEquipment) {
                    return Err(Error::Model(format!(
                        "run `{}` is attributed to `{dev}`, which is not a simulated IT device",
                        run.run_id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Scenario devices plus the three synthetic overhead devices.
    pub fn inventory(&self) -> Result<Inventory> {
        let mut records: Vec<DeviceRecord> = self.devices.iter().map(|d| d.record.clone()).collect();
        records.push(DeviceRecord::new(COOLING_DEVICE, DeviceCategory::Cooling, "simulated cooling plant"));
        records.push(DeviceRecord::new(
            TRANSMISSION_DEVICE,
            DeviceCategory::PowerTransmission,
            "simulated UPS/PDU losses",
        ));
        records.push(DeviceRecord::new(OTHER_DEVICE, DeviceCategory::Other, "simulated lighting and misc"));
        validate_inventory(records)
    }

    /// Copy with all times (profiles, runs, duration) stretched by `factor`.
    pub fn time_scaled(&self, factor: f64) -> Result<Self> {
        let runs = self
            .runs
            .iter()
            .map(|r| {
                ApplicationRun::new(
                    r.run_id.clone(),
                    r.category,
                    r.start * factor,
                    r.end * factor,
                    r.work,
                    r.attributed_devices.iter().cloned(),
                )
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            duration: self.duration * factor,
            devices: self
                .devices
                .iter()
                .map(|d| SimDevice {
                    profile: d.profile.time_scaled(factor),
                    ..d.clone()
                })
                .collect(),
            runs,
            ..self.clone()
        })
    }

    /// Sample instants: the sampling grid over `[0, duration]`, the end
    /// point, and every profile breakpoint inside the interval.
    pub fn sample_times(&self) -> Vec<f64> {
        let mut times = Vec::new();
        let mut k = 0u64;
        loop {
            let t = k as f64 * self.sample_period;
            if t > self.duration {
                break;
            }
            times.push(t);
            k += 1;
        }
        times.push(self.duration);
        for d in &self.devices {
            times.extend(d.profile.breakpoints().filter(|t| *t > 0.0 && *t < self.duration));
        }
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }
}

/// Runs the scenario and encodes its outputs.
pub fn simulate(scenario: &SimScenario) -> Result<SimOutput> {
    scenario.validate()?;
    let inventory = scenario.inventory()?;
    let times = scenario.sample_times();

    let mut device_series: Vec<Vec<f64>> = Vec::with_capacity(scenario.devices.len());
    for (i, d) in scenario.devices.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
        rng.set_stream(i as u64);
        let series = times
            .iter()
            .map(|&t| {
                let mut u = d.profile.at(t);
                if d.profile.jitter > 0.0 {
                    u += d.profile.jitter * rng.random_range(-1.0..=1.0);
                }
                d.model.power(u)
            })
            .collect();
        device_series.push(series);
    }

    let mut cooling = Vec::with_capacity(times.len());
    let mut transmission = Vec::with_capacity(times.len());
    let mut other = Vec::with_capacity(times.len());
    for j in 0..times.len() {
        let (mut it, mut rest) = (0.0, 0.0);
        for (d, series) in scenario.devices.iter().zip(&device_series) {
            match d.record.category {
                DeviceCategory::ITEquipment => it += series[j],
                _ => rest += series[j],
            }
        }
        let p = scenario.overhead.breakdown(it, rest);
        cooling.push(p.cooling);
        transmission.push(p.transmission);
        // non-IT scenario devices are metered themselves
        other.push(p.other - rest);
    }

    let mut traces = Vec::with_capacity(scenario.devices.len() + 3);
    for (d, series) in scenario.devices.iter().zip(device_series) {
        traces.push(PowerTrace::from_points(
            d.record.device_id.clone(),
            times.iter().copied().zip(series),
        )?);
    }
    for (id, series) in [
        (COOLING_DEVICE, cooling),
        (TRANSMISSION_DEVICE, transmission),
        (OTHER_DEVICE, other),
    ] {
        traces.push(PowerTrace::from_points(id, times.iter().copied().zip(series))?);
    }

    let power_csv = write_power_csv(&traces);
    let runs_jsonl = write_runs_jsonl(&scenario.runs);
    let inventory_json = write_inventory_json(&inventory);
    let mut manifest = serde_json::to_vec_pretty(scenario).expect("scenario serializes");
    manifest.push(b'\n');
    Ok(SimOutput {
        dataset: Dataset {
            inventory,
            traces,
            runs: scenario.runs.clone(),
        },
        power_csv,
        runs_jsonl,
        inventory_json,
        manifest,
    })
}

/// Published per-workload measurements the reference scenarios are pinned to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceWorkload {
    pub name: &'static str,
    pub it_kw: f64,
    pub total_kw: f64,
    /// KB/s for data analysis, GFLOPS for Linpack.
    pub rate: f64,
    pub category: ApplicationCategory,
    /// Input size in bytes (data analysis workloads).
    pub data_bytes: u64,
    pub pue: f64,
    pub appue: f64,
    pub aopue: f64,
}

const GB: u64 = 1_000_000_000;

/// Linpack has no data-volume rate; its run length is chosen freely.
pub const LINPACK_DURATION: f64 = 3600.0;

pub const REFERENCE_WORKLOADS: [ReferenceWorkload; 5] = [
    ReferenceWorkload {
        name: "BigDataBench",
        it_kw: 100.412,
        total_kw: 147.323,
        rate: 563.271,
        category: ApplicationCategory::DataAnalysis,
        data_bytes: 100 * GB,
        pue: 1.467,
        appue: 5.6096,
        aopue: 3.823,
    },
    ReferenceWorkload {
        name: "SVM",
        it_kw: 103.766,
        total_kw: 150.897,
        rate: 134.854,
        category: ApplicationCategory::DataAnalysis,
        data_bytes: 20 * GB,
        pue: 1.454,
        appue: 1.2996,
        aopue: 0.894,
    },
    ReferenceWorkload {
        name: "Sort",
        it_kw: 92.122,
        total_kw: 138.481,
        rate: 1588.128,
        category: ApplicationCategory::DataAnalysis,
        data_bytes: 100 * GB,
        pue: 1.503,
        appue: 17.2394,
        aopue: 11.468,
    },
    ReferenceWorkload {
        name: "Grep",
        it_kw: 92.331,
        total_kw: 138.636,
        rate: 24916.998,
        category: ApplicationCategory::DataAnalysis,
        data_bytes: 100 * GB,
        pue: 1.502,
        appue: 269.866,
        aopue: 179.730,
    },
    ReferenceWorkload {
        name: "Linpack",
        it_kw: 122.679,
        total_kw: 170.685,
        rate: 50.46,
        category: ApplicationCategory::HighPerformanceComputing,
        data_bytes: 32 * GB,
        pue: 1.391,
        appue: 0.411,
        aopue: 0.295,
    },
];

const REFERENCE_FIXED_WATTS: f64 = 1500.0;
const REFERENCE_LOSS_FRACTION: f64 = 0.04;
const REFERENCE_SAMPLE_PERIOD: f64 = 30.0;

impl ReferenceWorkload {
    /// Run length that reproduces the published rate.
    pub fn duration(&self) -> f64 {
        match self.category {
            ApplicationCategory::HighPerformanceComputing => LINPACK_DURATION,
            _ => self.data_bytes as f64 / 1000.0 / self.rate,
        }
    }

    pub fn work(&self) -> WorkMeasure {
        match self.category {
            ApplicationCategory::HighPerformanceComputing => {
                WorkMeasure::FloatingPointOps((self.rate * 1e9 * LINPACK_DURATION).round() as u64)
            }
            _ => WorkMeasure::BytesProcessed(self.data_bytes),
        }
    }

    /// Single aggregate IT device at the published IT power with overhead
    /// calibrated to the published facility power.
    pub fn scenario(&self) -> SimScenario {
        let it_watts = self.it_kw * 1000.0;
        let overhead = FacilityOverheadModel::calibrated(
            it_watts,
            self.total_kw * 1000.0,
            REFERENCE_FIXED_WATTS,
            REFERENCE_LOSS_FRACTION,
        )
        .expect("published powers give a valid overhead model");
        let duration = self.duration();
        let device = "it-aggregate";
        let run = ApplicationRun::new(self.name, self.category, 0.0, duration, self.work(), [device])
            .expect("reference run is valid");
        SimScenario {
            name: self.name.to_ascii_lowercase(),
            seed: 0,
            duration,
            sample_period: REFERENCE_SAMPLE_PERIOD,
            devices: vec![SimDevice {
                record: DeviceRecord::new(
                    device,
                    DeviceCategory::ITEquipment,
                    "aggregate IT equipment (servers and switchgear)",
                ),
                model: DevicePowerModel::Fixed {
                    constant_watts: it_watts,
                },
                profile: UtilizationProfile::default(),
            }],
            runs: vec![run],
            overhead,
        }
    }
}

/// The five published workloads, in table order.
pub fn reference_scenarios() -> Vec<SimScenario> {
    REFERENCE_WORKLOADS.iter().map(ReferenceWorkload::scenario).collect()
}

/// Sort implementations compared on the same cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SortVariant {
    /// Sampled range partitioning across all reducers.
    Sampled,
    /// One reducer receives every intermediate record.
    SingleReducer,
}

const SORT_NODES: usize = 8;
const SORT_STORAGE: usize = 2;
const SORT_RAMP: f64 = 2.0;
const SORT_STARTUP: f64 = 20.0;
const SORT_SAMPLE_FIXED: f64 = 15.0;
const SORT_SAMPLE_RATE: f64 = 2e9;
const MAP_RATE_PER_NODE: f64 = 60e6;
const REDUCE_RATE_PER_NODE: f64 = 50e6;
const SINGLE_REDUCER_RATE: f64 = 150e6;

/// Desk-scale sort job over `data_bytes` on an 8-node cluster with two
/// storage arrays.
pub fn sort_scenario(variant: SortVariant, data_bytes: u64) -> SimScenario {
    let d = data_bytes as f64;
    let n = SORT_NODES as f64;
    let map = d / (n * MAP_RATE_PER_NODE);
    // (length, server u, hot reducer u, storage u)
    let phases: Vec<(f64, f64, f64, f64)> = match variant {
        SortVariant::Sampled => vec![
            (SORT_STARTUP, 0.15, 0.15, 0.1),
            (SORT_SAMPLE_FIXED + d / SORT_SAMPLE_RATE, 0.35, 0.35, 0.5),
            (map, 0.85, 0.85, 0.7),
            (d / (n * REDUCE_RATE_PER_NODE), 0.75, 0.75, 0.6),
        ],
        SortVariant::SingleReducer => vec![
            (SORT_STARTUP, 0.15, 0.15, 0.1),
            (map, 0.85, 0.85, 0.7),
            (d / SINGLE_REDUCER_RATE, 0.1, 1.0, 0.4),
        ],
    };
    let duration: f64 = phases.iter().map(|p| p.0).sum();
    let profile = |pick: fn(&(f64, f64, f64, f64)) -> f64| {
        let ph: Vec<(f64, f64)> = phases.iter().map(|p| (p.0, pick(p))).collect();
        UtilizationProfile::phases(&ph, SORT_RAMP)
    };

    let mut devices = Vec::new();
    for i in 1..=SORT_NODES {
        let hot = i == SORT_NODES;
        devices.push(SimDevice {
            record: DeviceRecord::new(
                format!("node-{i:02}"),
                DeviceCategory::ITEquipment,
                if hot { "server (reducer)" } else { "server" },
            ),
            model: DevicePowerModel::reference_server(),
            profile: if hot { profile(|p| p.2) } else { profile(|p| p.1) },
        });
    }
    for i in 1..=SORT_STORAGE {
        devices.push(SimDevice {
            record: DeviceRecord::new(format!("storage-{i:02}"), DeviceCategory::ITEquipment, "storage array"),
            model: DevicePowerModel::reference_storage(),
            profile: profile(|p| p.3),
        });
    }

    let name = match variant {
        SortVariant::Sampled => "sort1",
        SortVariant::SingleReducer => "sort2",
    };
    let run = ApplicationRun::new(
        name,
        ApplicationCategory::DataAnalysis,
        0.0,
        duration,
        WorkMeasure::BytesProcessed(data_bytes),
        devices.iter().map(|d| d.record.device_id.clone()),
    )
    .expect("sort run is valid");
    SimScenario {
        name: name.into(),
        seed: 0,
        duration,
        sample_period: 5.0,
        devices,
        runs: vec![run],
        overhead: FacilityOverheadModel {
            fixed_watts: 150.0,
            cooling_coefficient: 0.4,
            transmission_loss_fraction: 0.05,
        },
    }
}

/// Sort with sampled partitioning vs. a single reducer, both on 100 GB.
pub fn sort_comparison_scenarios() -> (SimScenario, SimScenario) {
    (
        sort_scenario(SortVariant::Sampled, 100 * GB),
        sort_scenario(SortVariant::SingleReducer, 100 * GB),
    )
}

/// Resolves `paper:<workload>` (case-insensitive), including `paper:sort1`
/// and `paper:sort2`.
pub fn builtin_scenario(name: &str) -> Option<SimScenario> {
    let key = name.strip_prefix("paper:")?.to_ascii_lowercase();
    match key.as_str() {
        "sort1" => Some(sort_comparison_scenarios().0),
        "sort2" => Some(sort_comparison_scenarios().1),
        _ => REFERENCE_WORKLOADS
            .iter()
            .find(|w| w.name.eq_ignore_ascii_case(&key))
            .map(ReferenceWorkload::scenario),
    }
}

pub fn builtin_scenario_names() -> Vec<String> {
    REFERENCE_WORKLOADS
        .iter()
        .map(|w| format!("paper:{}", w.name.to_ascii_lowercase()))
        .chain(["paper:sort1".to_string(), "paper:sort2".to_string()])
        .collect()
}
