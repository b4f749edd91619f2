//! PUE, ApPUE, AoPUE and the multi-application weighted ApPUE.
//!
//! Powers are carried in kilowatts and performance in its reported unit,
//! so every efficiency value is the direct quotient `performance / kW`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ApplicationRun, EnergyWindow, MetricsReport, Provenance, RunMetrics};
use crate::performance::{PerformanceRate, PerformanceUnit};

/// Relative slack allowed when summed per-run IT energy is compared with
/// the window's IT energy.
pub const ENERGY_SLACK: f64 = 1e-6;

/// Tolerance of the `AoPUE = ApPUE / PUE` check.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// An ApPUE or AoPUE value: performance (in `unit`) per kilowatt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    pub value: f64,
    pub unit: PerformanceUnit,
}

/// Total facility energy over IT energy.
pub fn compute_pue(window: &EnergyWindow) -> Result<f64> {
    let it = window.it_energy();
    if it <= 0.0 {
        return Err(Error::ZeroItEnergy);
    }
    Ok(window.total_facility_energy() / it)
}

/// Application performance per kilowatt of mean IT power.
pub fn compute_appue(perf: &PerformanceRate, it_power_kw: f64) -> Result<Efficiency> {
    if !it_power_kw.is_finite() || it_power_kw < 0.0 {
        return Err(Error::InvalidInputs(format!("IT power {it_power_kw} kW")));
    }
    if it_power_kw == 0.0 {
        return Err(Error::ZeroItPower);
    }
    Ok(Efficiency {
        value: perf.reported_value() / it_power_kw,
        unit: perf.unit,
    })
}

/// Application performance per kilowatt of mean total facility power.
pub fn compute_aopue(perf: &PerformanceRate, total_facility_power_kw: f64) -> Result<Efficiency> {
    if !total_facility_power_kw.is_finite() || total_facility_power_kw < 0.0 {
        return Err(Error::InvalidInputs(format!(
            "facility power {total_facility_power_kw} kW"
        )));
    }
    if total_facility_power_kw == 0.0 {
        return Err(Error::ZeroFacilityPower);
    }
    Ok(Efficiency {
        value: perf.reported_value() / total_facility_power_kw,
        unit: perf.unit,
    })
}

/// Each run's share of the summed IT power.
pub fn compute_weights(it_powers_kw: &[f64]) -> Result<Vec<f64>> {
    if it_powers_kw.is_empty() {
        return Err(Error::NoRuns);
    }
    if let Some(p) = it_powers_kw.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidInputs(format!("IT power {p} kW")));
    }
    let total: f64 = it_powers_kw.iter().sum();
    if total == 0.0 {
        return Err(Error::ZeroItPower);
    }
    Ok(it_powers_kw.iter().map(|p| p / total).collect())
}

/// Weighted sum of per-application ApPUE values.
///
/// All values must share a performance unit. The result is clamped to the
/// range of the inputs so rounding never breaks the convex-combination bound.
pub fn aggregate_appue(appues: &[Efficiency], weights: &[f64]) -> Result<Efficiency> {
    if appues.len() != weights.len() {
        return Err(Error::ShapeMismatch(appues.len(), weights.len()));
    }
    let first = appues.first().ok_or(Error::NoRuns)?;
    if let Some(other) = appues.iter().find(|a| a.unit != first.unit) {
        return Err(Error::UnitMismatch(
            first.unit.to_string(),
            other.unit.to_string(),
        ));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidInputs("weights must be non-negative".into()));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::InvalidInputs(format!("weights sum to {sum}, expected 1")));
    }
    let dot: f64 = appues.iter().zip(weights).map(|(a, w)| a.value * w).sum();
    let lo = appues.iter().map(|a| a.value).fold(f64::INFINITY, f64::min);
    let hi = appues.iter().map(|a| a.value).fold(f64::NEG_INFINITY, f64::max);
    Ok(Efficiency {
        value: dot.clamp(lo, hi),
        unit: first.unit,
    })
}

/// Whether `aopue` equals `appue / pue` to within 1e-9 relative.
pub fn verify_identity(appue: f64, pue: f64, aopue: f64) -> bool {
    if !(pue > 0.0) {
        return false;
    }
    (aopue - appue / pue).abs() <= IDENTITY_TOLERANCE * aopue.abs().max(1.0)
}

/// One run with its measured IT energy and performance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunInput {
    pub run: ApplicationRun,
    /// Energy of the run's attributed IT devices over the run window.
    pub it_energy: f64,
    /// Facility energy by category over the run window.
    pub run_window: EnergyWindow,
    pub performance: PerformanceRate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricInputs {
    window: EnergyWindow,
    runs: Vec<RunInput>,
}

impl MetricInputs {
    pub fn new(window: EnergyWindow, runs: Vec<RunInput>) -> Result<Self> {
        let mut total = 0.0;
        for r in &runs {
            let id = &r.run.run_id;
            if r.run_window.start() != r.run.start || r.run_window.end() != r.run.end {
                return Err(Error::InvalidInputs(format!(
                    "run `{id}`: energy window does not match run window"
                )));
            }
            if !r.it_energy.is_finite() || r.it_energy < 0.0 {
                return Err(Error::InvalidInputs(format!(
                    "run `{id}`: IT energy {} must be non-negative",
                    r.it_energy
                )));
            }
            if r.it_energy > r.run_window.it_energy() * (1.0 + ENERGY_SLACK) {
                return Err(Error::InvalidInputs(format!(
                    "run `{id}`: attributed IT energy exceeds IT energy of its window"
                )));
            }
            if r.performance.unit != r.run.category.performance_unit() {
                return Err(Error::CategoryMismatch {
                    run: id.clone(),
                    category: r.run.category.to_string(),
                    work: r.performance.unit.to_string(),
                });
            }
            total += r.it_energy;
        }
        if total > window.it_energy() * (1.0 + ENERGY_SLACK) {
            return Err(Error::InvalidInputs(format!(
                "summed run IT energy {total} J exceeds window IT energy {} J",
                window.it_energy()
            )));
        }
        Ok(Self { window, runs })
    }

    pub fn window(&self) -> &EnergyWindow {
        &self.window
    }

    pub fn runs(&self) -> &[RunInput] {
        &self.runs
    }
}

/// Assembles a full report from validated inputs.
///
/// Per-run facility power is the run's IT power scaled by the facility/IT
/// energy ratio observed over the run's own window, so each row satisfies
/// `AoPUE = ApPUE / PUE` with that row's PUE. The aggregated AoPUE is the
/// weighted ApPUE divided by the window PUE.
pub fn build_report(inputs: &MetricInputs, mut provenance: Provenance) -> Result<MetricsReport> {
    let window = inputs.window.clone();
    let pue = compute_pue(&window)?;

    let mut rows = Vec::with_capacity(inputs.runs.len());
    let mut appues = Vec::with_capacity(inputs.runs.len());
    for r in &inputs.runs {
        let it_power_kw = r.it_energy / r.run.duration() / 1000.0;
        let run_pue = compute_pue(&r.run_window)?;
        let facility_power_kw = it_power_kw * run_pue;
        let appue = compute_appue(&r.performance, it_power_kw)?;
        let aopue = compute_aopue(&r.performance, facility_power_kw)?;
        if !verify_identity(appue.value, run_pue, aopue.value) {
            return Err(Error::InvalidInputs(format!(
                "run `{}` violates AoPUE = ApPUE / PUE",
                r.run.run_id
            )));
        }
        appues.push(appue);
        rows.push(RunMetrics {
            run_id: r.run.run_id.clone(),
            category: r.run.category,
            start: r.run.start,
            end: r.run.end,
            it_energy_j: r.it_energy,
            it_power_kw,
            facility_power_kw,
            pue: run_pue,
            performance: r.performance,
            appue: appue.value,
            aopue: aopue.value,
            weight: 0.0,
        });
    }

    let (mut weighted_appue, mut aggregated_aopue, mut aggregate_unit) = (None, None, None);
    if !rows.is_empty() {
        let powers: Vec<f64> = rows.iter().map(|r| r.it_power_kw).collect();
        let weights = compute_weights(&powers)?;
        for (row, w) in rows.iter_mut().zip(&weights) {
            row.weight = *w;
        }
        match aggregate_appue(&appues, &weights) {
            Ok(agg) => {
                weighted_appue = Some(agg.value);
                aggregated_aopue = Some(agg.value / pue);
                aggregate_unit = Some(agg.unit);
            }
            Err(e @ Error::UnitMismatch(..)) => {
                provenance.notes.push(format!("aggregation skipped: {e}"));
            }
            Err(e) => return Err(e),
        }
    }

    Ok(MetricsReport {
        pue,
        it_power_kw: window.it_power_kw(),
        total_facility_power_kw: window.total_facility_power_kw(),
        window,
        runs: rows,
        weighted_appue,
        aggregated_aopue,
        aggregate_unit,
        provenance,
    })
}

impl MetricsReport {
    /// Re-checks the structural invariants of a report, e.g. after parsing.
    pub fn check_invariants(&self) -> Result<()> {
        let pue = compute_pue(&self.window)?;
        if pue != self.pue {
            return Err(Error::InvalidReport(format!(
                "PUE {} does not match window energies ({pue})",
                self.pue
            )));
        }
        for r in &self.runs {
            if !verify_identity(r.appue, r.pue, r.aopue) {
                return Err(Error::InvalidReport(format!(
                    "run `{}` violates AoPUE = ApPUE / PUE",
                    r.run_id
                )));
            }
        }
        if !self.runs.is_empty() {
            let sum: f64 = self.runs.iter().map(|r| r.weight).sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidReport(format!("weights sum to {sum}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ApplicationCategory, DeviceCategory, WorkMeasure};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn window(it: f64, total: f64) -> EnergyWindow {
        EnergyWindow::new(
            0.0,
            1.0,
            BTreeMap::from([
                (DeviceCategory::ITEquipment, it),
                (DeviceCategory::Other, total - it),
            ]),
        )
        .unwrap()
    }

    fn kbps(v: f64) -> PerformanceRate {
        PerformanceRate::kb_per_second(v).unwrap()
    }

    fn eff(v: f64) -> Efficiency {
        Efficiency {
            value: v,
            unit: PerformanceUnit::KBPerSecond,
        }
    }

    #[test]
    fn pue_table_rows() {
        assert!((compute_pue(&window(100.412, 147.323)).unwrap() - 1.467).abs() < 1e-3);
        assert!((compute_pue(&window(122.679, 170.685)).unwrap() - 1.391).abs() < 1e-3);
        assert_eq!(compute_pue(&window(5.0, 5.0)).unwrap(), 1.0);
        assert_eq!(compute_pue(&window(0.0, 5.0)), Err(Error::ZeroItEnergy));
    }

    #[test]
    fn appue_table_rows() {
        let a = compute_appue(&kbps(563.271), 100.412).unwrap();
        assert!((a.value - 5.6096).abs() < 1e-3);
        let a = compute_appue(&kbps(24916.998), 92.331).unwrap();
        assert!((a.value - 269.866).abs() < 1e-3);
        assert_eq!(compute_appue(&kbps(0.0), 12.0).unwrap().value, 0.0);
        assert_eq!(compute_appue(&kbps(1.0), 0.0), Err(Error::ZeroItPower));
    }

    #[test]
    fn aopue_table_rows() {
        assert!((compute_aopue(&kbps(563.271), 147.323).unwrap().value - 3.823).abs() < 1e-3);
        let linpack = PerformanceRate::gflops(50.46).unwrap();
        // published 0.295; the quotient is 0.29563, inside the ±0.001 band
        assert!((compute_aopue(&linpack, 170.685).unwrap().value - 0.295).abs() < 1e-3);
        assert!((compute_aopue(&kbps(1588.128), 138.481).unwrap().value - 11.468).abs() < 1e-3);
        assert_eq!(compute_aopue(&kbps(1.0), 0.0), Err(Error::ZeroFacilityPower));
    }

    #[test]
    fn weights() {
        assert_eq!(compute_weights(&[100.0, 100.0]).unwrap(), vec![0.5, 0.5]);
        assert_eq!(compute_weights(&[7.0]).unwrap(), vec![1.0]);
        let w = compute_weights(&[92.122, 92.331]).unwrap();
        // exact rational recomputation of 92.122 / 184.453 and 92.331 / 184.453
        assert!((w[0] - 0.499_433_460_014_204).abs() < 1e-12);
        assert!((w[1] - 0.500_566_539_985_795).abs() < 1e-12);
        assert!((w[0] - 0.499434).abs() < 1e-6 && (w[1] - 0.500566).abs() < 1e-6);
        assert_eq!(compute_weights(&[]), Err(Error::NoRuns));
        assert_eq!(compute_weights(&[0.0, 0.0]), Err(Error::ZeroItPower));
    }

    #[test]
    fn aggregation() {
        let agg = aggregate_appue(&[eff(17.2394), eff(269.866)], &[0.5, 0.5]).unwrap();
        let brute: f64 = [17.2394 * 0.5, 269.866 * 0.5].iter().sum();
        assert!((agg.value - 143.5527).abs() < 1e-9);
        assert_eq!(agg.value, brute);
        assert_eq!(aggregate_appue(&[eff(3.5)], &[1.0]).unwrap().value, 3.5);
        assert_eq!(
            aggregate_appue(&[eff(2.0), eff(2.0), eff(2.0)], &[0.2, 0.3, 0.5]).unwrap().value,
            2.0
        );
        assert_eq!(
            aggregate_appue(&[eff(1.0)], &[0.5, 0.5]),
            Err(Error::ShapeMismatch(1, 2))
        );
        let flops = Efficiency {
            value: 1.0,
            unit: PerformanceUnit::FlopsPerSecond,
        };
        assert!(matches!(
            aggregate_appue(&[eff(1.0), flops], &[0.5, 0.5]),
            Err(Error::UnitMismatch(..))
        ));
    }

    #[test]
    fn identity_predicate() {
        let appue = 563.271 / 100.412;
        let pue = 147.323 / 100.412;
        let aopue = 563.271 / 147.323;
        assert!(verify_identity(appue, pue, aopue));
        assert!(verify_identity(1.0, 1.0, 1.0));
        assert!(!verify_identity(2.0, 1.0, 3.0));
    }

    fn single_run_inputs(it_kw: f64, total_kw: f64, kbps: f64, duration: f64) -> MetricInputs {
        let energies = |it: f64, total: f64| {
            BTreeMap::from([
                (DeviceCategory::ITEquipment, it),
                (DeviceCategory::Cooling, total - it),
            ])
        };
        let it_j = it_kw * 1000.0 * duration;
        let total_j = total_kw * 1000.0 * duration;
        let w = EnergyWindow::new(0.0, duration, energies(it_j, total_j)).unwrap();
        let run = ApplicationRun::new(
            "job",
            ApplicationCategory::DataAnalysis,
            0.0,
            duration,
            WorkMeasure::BytesProcessed((kbps * duration * 1000.0).round() as u64),
            ["it"],
        )
        .unwrap();
        let performance = crate::performance::compute_performance(&run).unwrap();
        MetricInputs::new(
            w.clone(),
            vec![RunInput {
                run,
                it_energy: it_j,
                run_window: w,
                performance,
            }],
        )
        .unwrap()
    }

    #[test]
    fn report_without_overhead() {
        let r = build_report(&single_run_inputs(10.0, 10.0, 50.0, 100.0), Provenance::default()).unwrap();
        assert_eq!(r.pue, 1.0);
        assert_eq!(r.runs[0].appue, r.runs[0].aopue);
        assert_eq!(r.runs[0].weight, 1.0);
        assert_eq!(r.weighted_appue, Some(r.runs[0].appue));
        r.check_invariants().unwrap();
    }

    #[test]
    fn report_bigdatabench_row() {
        let duration = 1e8 / 563.271;
        let r = build_report(
            &single_run_inputs(100.412, 147.323, 563.271, duration),
            Provenance::default(),
        )
        .unwrap();
        assert!((r.pue - 1.467).abs() < 1e-3);
        assert!((r.runs[0].appue - 5.6096).abs() < 1e-3);
        assert!((r.runs[0].aopue - 3.823).abs() < 1e-3);
        assert!((r.runs[0].facility_power_kw - 147.323).abs() < 1e-9);
    }

    #[test]
    fn empty_report_keeps_pue() {
        let inputs = MetricInputs::new(window(2.0, 3.0), vec![]).unwrap();
        let r = build_report(&inputs, Provenance::default()).unwrap();
        assert_eq!(r.pue, 1.5);
        assert!(r.runs.is_empty());
        assert_eq!(r.weighted_appue, None);
    }

    #[test]
    fn inputs_reject_overattributed_energy() {
        let mut inputs = single_run_inputs(10.0, 12.0, 5.0, 10.0);
        inputs.runs[0].it_energy *= 1.01;
        let err = MetricInputs::new(inputs.window.clone(), inputs.runs.clone()).unwrap_err();
        assert!(matches!(err, Error::InvalidInputs(_)));
    }

    proptest! {
        #[test]
        fn weighted_appue_is_convex(
            rows in prop::collection::vec((0.0f64..1e4, 0.001f64..500.0), 1..20)
        ) {
            let appues: Vec<Efficiency> = rows.iter().map(|r| eff(r.0)).collect();
            let powers: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let w = compute_weights(&powers).unwrap();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let agg = aggregate_appue(&appues, &w).unwrap().value;
            let lo = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= agg && agg <= hi);
        }

        #[test]
        fn pue_at_least_one(it in 1e-3f64..1e9, overhead in 0.0f64..1e9) {
            prop_assert!(compute_pue(&window(it, it + overhead)).unwrap() >= 1.0);
        }
    }
}
