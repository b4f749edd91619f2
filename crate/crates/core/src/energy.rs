//! Power-to-energy integration over time windows.
//!
//! Traces are integrated with the trapezoidal rule. Window edges that fall
//! between samples are linearly interpolated; edges that fall before the
//! first or after the last sample are extended at constant power as long as
//! the overhang is within `max_gap`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::model::{DeviceCategory, EnergyWindow, Inventory, PowerSample};

/// Time-ordered samples of one device.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerTrace {
    device_id: String,
    samples: Vec<PowerSample>,
}

impl PowerTrace {
    /// Samples must share `device_id` and have strictly increasing timestamps.
    pub fn new(device_id: impl Into<String>, samples: Vec<PowerSample>) -> Result<Self> {
        let device_id = device_id.into();
        for s in &samples {
            if s.device_id != device_id {
                return Err(Error::InvalidTrace {
                    device: device_id,
                    reason: format!("sample belongs to `{}`", s.device_id),
                });
            }
        }
        for pair in samples.windows(2) {
            if pair[1].timestamp <= pair[0].timestamp {
                return Err(Error::InvalidTrace {
                    device: device_id,
                    reason: format!(
                        "timestamps not strictly increasing at t={}",
                        pair[1].timestamp
                    ),
                });
            }
        }
        Ok(Self { device_id, samples })
    }

    /// Builds a trace from `(timestamp, watts)` pairs, validating each sample.
    pub fn from_points(
        device_id: impl Into<String>,
        points: impl IntoIterator<Item = (f64, f64)>,
    ) -> Result<Self> {
        let device_id = device_id.into();
        let samples = points
            .into_iter()
            .map(|(t, w)| PowerSample::new(device_id.clone(), t, w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(device_id, samples)
    }

    pub fn device_id(&self) -> &str {
        &self.device_id
    }

    pub fn samples(&self) -> &[PowerSample] {
        &self.samples
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Earliest and latest sample timestamps.
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.timestamp, self.samples.last()?.timestamp))
    }

    /// Copy with every power value multiplied by `k` (k >= 0).
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::from_points(
            self.device_id.clone(),
            self.samples.iter().map(|s| (s.timestamp, s.watts * k)),
        )
    }
}

/// Trapezoidal energy in joules of `trace` over `[start, end]`.
pub fn integrate_power(trace: &PowerTrace, start: f64, end: f64, max_gap: f64) -> Result<f64> {
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(Error::window(start, end));
    }
    if !(max_gap >= 0.0) {
        return Err(Error::InvalidInputs(format!("max_gap must be non-negative, got {max_gap}")));
    }
    let s = trace.samples();
    let (first, last) = match (s.first(), s.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::NoSamples(trace.device_id.clone())),
    };
    let gap = |at: f64, gap: f64| Error::CoverageGap {
        device: trace.device_id.clone(),
        at,
        gap,
        max_gap,
    };

    if start < first.timestamp && first.timestamp - start > max_gap {
        return Err(gap(start, first.timestamp - start));
    }
    if end > last.timestamp && end - last.timestamp > max_gap {
        return Err(gap(last.timestamp, end - last.timestamp));
    }

    // first segment whose right endpoint lies after `start`
    let begin = s.partition_point(|p| p.timestamp <= start).saturating_sub(1);

    let mut energy = 0.0;
    if start < first.timestamp {
        energy += first.watts * (end.min(first.timestamp) - start);
    }
    if end > last.timestamp {
        energy += last.watts * (end - start.max(last.timestamp));
    }
    for seg in s[begin..].windows(2) {
        let (a, b) = (&seg[0], &seg[1]);
        if a.timestamp >= end {
            break;
        }
        if b.timestamp <= start {
            continue;
        }
        if b.timestamp - a.timestamp > max_gap {
            return Err(gap(a.timestamp, b.timestamp - a.timestamp));
        }
        let lo = a.timestamp.max(start);
        let hi = b.timestamp.min(end);
        energy += (hi - lo) * (interpolate(a, b, lo) + interpolate(a, b, hi)) / 2.0;
    }
    Ok(energy)
}

fn interpolate(a: &PowerSample, b: &PowerSample, t: f64) -> f64 {
    if t <= a.timestamp {
        a.watts
    } else if t >= b.timestamp {
        b.watts
    } else {
        a.watts + (b.watts - a.watts) * (t - a.timestamp) / (b.timestamp - a.timestamp)
    }
}

/// Mean power in watts of `energy` joules spread over `[start, end]`.
pub fn average_power(energy: f64, start: f64, end: f64) -> Result<f64> {
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(Error::window(start, end));
    }
    if !(energy >= 0.0) || !energy.is_finite() {
        return Err(Error::InvalidInputs(format!("energy must be non-negative, got {energy}")));
    }
    Ok(energy / (end - start))
}

/// Index of traces by device id; rejects duplicate device traces.
pub fn index_traces(traces: &[PowerTrace]) -> Result<HashMap<&str, &PowerTrace>> {
    let mut by_id = HashMap::with_capacity(traces.len());
    for t in traces {
        if by_id.insert(t.device_id(), t).is_some() {
            return Err(Error::DuplicateDevice(t.device_id().to_string()));
        }
    }
    Ok(by_id)
}

/// Integrates every inventory device over `[start, end]` and groups the
/// energies by facility category.
///
/// Every trace must belong to an inventory device and every inventory device
/// must have a trace.
pub fn category_energy(
    traces: &[PowerTrace],
    inventory: &Inventory,
    start: f64,
    end: f64,
    max_gap: f64,
) -> Result<EnergyWindow> {
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err(Error::window(start, end));
    }
    let by_id = index_traces(traces)?;
    if let Some(t) = traces.iter().find(|t| inventory.get(t.device_id()).is_none()) {
        return Err(Error::UnknownDevice(t.device_id().to_string()));
    }
    let mut energies: BTreeMap<DeviceCategory, f64> = BTreeMap::new();
    for device in inventory.devices() {
        let trace = by_id
            .get(device.device_id.as_str())
            .ok_or_else(|| Error::NoSamples(device.device_id.clone()))?;
        let e = integrate_power(trace, start, end, max_gap)?;
        *energies.entry(device.category).or_insert(0.0) += e;
    }
    EnergyWindow::new(start, end, energies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_inventory, DeviceRecord};
    use proptest::prelude::*;

    fn trace(points: &[(f64, f64)]) -> PowerTrace {
        PowerTrace::from_points("d", points.iter().copied()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn constant_power_times_duration() {
        let t = trace(&[(0.0, 100.0), (30.0, 100.0), (60.0, 100.0)]);
        assert_eq!(integrate_power(&t, 0.0, 60.0, 60.0).unwrap(), 6000.0);
    }

    #[test]
    fn linear_ramp_is_triangle() {
        let t = trace(&[(0.0, 0.0), (10.0, 100.0)]);
        assert_eq!(integrate_power(&t, 0.0, 10.0, 60.0).unwrap(), 500.0);
    }

    #[test]
    fn interior_window_interpolates_edges() {
        let t = trace(&[(0.0, 0.0), (10.0, 100.0)]);
        // power on [2, 6] ramps 20 -> 60
        let e = integrate_power(&t, 2.0, 6.0, 60.0).unwrap();
        assert!((e - 160.0).abs() < 1e-12);
    }

    #[test]
    fn edges_extend_at_constant_power() {
        let t = trace(&[(10.0, 50.0), (20.0, 50.0)]);
        assert_eq!(integrate_power(&t, 0.0, 30.0, 10.0).unwrap(), 1500.0);
        assert!(matches!(
            integrate_power(&t, -1.0, 30.0, 10.0),
            Err(Error::CoverageGap { .. })
        ));
        assert!(matches!(
            integrate_power(&t, 0.0, 31.0, 10.0),
            Err(Error::CoverageGap { .. })
        ));
    }

    #[test]
    fn single_sample_trace() {
        let t = trace(&[(10.0, 40.0)]);
        assert_eq!(integrate_power(&t, 8.0, 12.0, 2.0).unwrap(), 160.0);
    }

    #[test]
    fn window_wholly_before_first_sample() {
        let t = trace(&[(10.0, 40.0), (11.0, 80.0)]);
        assert_eq!(integrate_power(&t, 7.0, 9.0, 5.0).unwrap(), 80.0);
    }

    #[test]
    fn gap_inside_window_is_an_error() {
        let t = trace(&[(0.0, 1.0), (60.0, 1.0), (660.0, 1.0), (720.0, 1.0)]);
        match integrate_power(&t, 0.0, 720.0, 60.0) {
            Err(Error::CoverageGap { at, gap, .. }) => {
                assert_eq!(at, 60.0);
                assert_eq!(gap, 600.0);
            }
            other => panic!("expected gap, got {other:?}"),
        }
        // a window that avoids the outage is fine
        assert_eq!(integrate_power(&t, 0.0, 60.0, 60.0).unwrap(), 60.0);
    }

    #[test]
    fn gap_equal_to_max_gap_is_allowed() {
        let t = trace(&[(0.0, 1.0), (60.0, 1.0)]);
        assert!(integrate_power(&t, 0.0, 60.0, 60.0).is_ok());
    }

    #[test]
    fn errors() {
        let empty = PowerTrace::new("d", vec![]).unwrap();
        assert_eq!(
            integrate_power(&empty, 0.0, 1.0, 1.0),
            Err(Error::NoSamples("d".into()))
        );
        let t = trace(&[(0.0, 1.0), (1.0, 1.0)]);
        assert!(matches!(
            integrate_power(&t, 1.0, 1.0, 1.0),
            Err(Error::InvalidWindow { .. })
        ));
    }

    #[test]
    fn trace_rejects_unsorted_samples() {
        assert!(PowerTrace::from_points("d", [(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(PowerTrace::from_points("d", [(2.0, 1.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn average_power_cases() {
        assert_eq!(average_power(6000.0, 0.0, 60.0).unwrap(), 100.0);
        assert_eq!(average_power(0.0, 3.0, 17.5).unwrap(), 0.0);
        assert!(average_power(1.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn category_energy_groups_by_category() {
        let inv = validate_inventory(vec![
            DeviceRecord::new("it", DeviceCategory::ITEquipment, ""),
            DeviceRecord::new("rest", DeviceCategory::Other, ""),
        ])
        .unwrap();
        let hour = 3600.0;
        let traces = vec![
            PowerTrace::from_points("it", [(0.0, 100_412.0), (hour, 100_412.0)]).unwrap(),
            PowerTrace::from_points("rest", [(0.0, 46_911.0), (hour, 46_911.0)]).unwrap(),
        ];
        let w = category_energy(&traces, &inv, 0.0, hour, hour).unwrap();
        assert!(rel(w.it_energy(), 361.4832e6) < 1e-12);
        assert!(rel(w.total_facility_energy(), 530.3628e6) < 1e-12);
        assert_eq!(w.energy(DeviceCategory::Cooling), 0.0);
        assert_eq!(w.energy(DeviceCategory::PowerTransmission), 0.0);
    }

    #[test]
    fn category_energy_unknown_and_missing_devices() {
        let inv = validate_inventory(vec![DeviceRecord::new("it", DeviceCategory::ITEquipment, "")]).unwrap();
        let stray = vec![
            PowerTrace::from_points("it", [(0.0, 1.0), (1.0, 1.0)]).unwrap(),
            PowerTrace::from_points("ghost", [(0.0, 1.0), (1.0, 1.0)]).unwrap(),
        ];
        assert_eq!(
            category_energy(&stray, &inv, 0.0, 1.0, 1.0),
            Err(Error::UnknownDevice("ghost".into()))
        );
        assert_eq!(
            category_energy(&[], &inv, 0.0, 1.0, 1.0),
            Err(Error::NoSamples("it".into()))
        );
    }

    fn arb_trace() -> impl Strategy<Value = PowerTrace> {
        prop::collection::vec((0.1f64..10.0, 0.0f64..500.0), 2..40).prop_map(|steps| {
            let mut t = 0.0;
            let pts: Vec<(f64, f64)> = steps
                .into_iter()
                .map(|(dt, w)| {
                    t += dt;
                    (t, w)
                })
                .collect();
            PowerTrace::from_points("d", pts).unwrap()
        })
    }

    proptest! {
        #[test]
        fn split_additivity(tr in arb_trace(), a in 0.0f64..1.0, m in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = tr.span().unwrap();
            let mut xs = [lo + a * (hi - lo), lo + m * (hi - lo), lo + b * (hi - lo)];
            xs.sort_by(f64::total_cmp);
            prop_assume!(xs[1] - xs[0] > 1e-6 && xs[2] - xs[1] > 1e-6);
            let whole = integrate_power(&tr, xs[0], xs[2], 10.0).unwrap();
            let parts = integrate_power(&tr, xs[0], xs[1], 10.0).unwrap()
                + integrate_power(&tr, xs[1], xs[2], 10.0).unwrap();
            prop_assert!((whole - parts).abs() <= 1e-9 * whole.abs().max(1e-9));
        }

        #[test]
        fn scaling_is_linear(tr in arb_trace(), k in 0.01f64..100.0) {
            let (lo, hi) = tr.span().unwrap();
            let base = integrate_power(&tr, lo, hi, 10.0).unwrap();
            let scaled = integrate_power(&tr.scaled(k).unwrap(), lo, hi, 10.0).unwrap();
            prop_assert!((scaled - k * base).abs() <= 1e-12 * (k * base).abs().max(1e-12));
        }

        #[test]
        fn constant_average_roundtrip(p in 0.001f64..1e6, t0 in -1e6f64..1e6, len in 0.01f64..1e5) {
            let tr = PowerTrace::from_points("d", [(t0, p), (t0 + len, p)]).unwrap();
            let e = integrate_power(&tr, t0, t0 + len, 2.0 * len).unwrap();
            let avg = average_power(e, t0, t0 + len).unwrap();
            prop_assert!(rel(avg, p) <= 1e-12);
        }
    }
}
