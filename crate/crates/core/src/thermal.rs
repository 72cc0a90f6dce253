//! Power draw and lumped single-node thermal model.
//!
//! The die plus cooling stack is modeled as one thermal mass: resistance R
//! to ambient and capacitance C. Under constant power P the temperature
//! follows `T(t) = ambient + P*R*(1 - exp(-t/(R*C)))`, so the first
//! crossing of the throttle threshold has the closed form
//! `t* = R*C*ln(P*R / (P*R - dT))` with `dT = throttle - ambient`.

use serde::{Deserialize, Serialize};

use crate::soc::{SocProfile, ThermalParams};
use crate::utilization::UtilizationReport;
use crate::workload::WorkloadScenario;

/// Watts by source. `fixed_w` is the fixed-function draw (video encoder
/// and friends) that does not scale with utilization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub idle_w: f64,
    pub cpu_w: f64,
    pub gpu_w: f64,
    pub fixed_w: f64,
    pub total_w: f64,
}

/// Sampled temperature trajectory under constant power.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalTrace {
    pub timestep_s: f64,
    pub temps_c: Vec<f64>,
    /// Index of the first sample at or above the throttle threshold.
    pub throttle_index: Option<usize>,
}

/// Whether a load can run indefinitely or throttles after a finite time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThrottleOutcome {
    Sustained,
    Throttles { minutes: f64 },
}

impl ThrottleOutcome {
    pub fn minutes(&self) -> Option<f64> {
        match self {
            ThrottleOutcome::Sustained => None,
            ThrottleOutcome::Throttles { minutes } => Some(*minutes),
        }
    }
}

/// Converts a utilization report into a power breakdown.
///
/// The scenario must be the one the report was computed for, already
/// referenced to `soc` (fixed draws have been rescaled by then).
pub fn power_draw(
    report: &UtilizationReport,
    scenario: &WorkloadScenario,
    soc: &SocProfile,
) -> PowerBreakdown {
    let idle_w = soc.thermal.idle_power_w;
    let cpu_w = report.cpu_total_pct / 100.0 * soc.thermal.cpu_max_power_w;
    let gpu_w = report.gpu_total_pct / 100.0 * soc.thermal.gpu_max_power_w;
    let fixed_w: f64 = scenario.stages.iter().map(|s| s.extra_power_w).sum();
    PowerBreakdown {
        idle_w,
        cpu_w,
        gpu_w,
        fixed_w,
        total_w: idle_w + cpu_w + gpu_w + fixed_w,
    }
}

/// Samples the closed-form temperature trajectory at `k * timestep_s` for
/// the whole duration, starting from ambient at t = 0.
pub fn temp_trajectory(
    power_w: f64,
    params: &ThermalParams,
    duration_s: f64,
    timestep_s: f64,
) -> ThermalTrace {
    assert!(timestep_s > 0.0, "timestep_s must be positive");
    assert!(duration_s >= timestep_s, "duration_s must cover one step");
    let steps = (duration_s / timestep_s).floor() as usize;
    let tau = params.thermal_resistance_k_per_w * params.thermal_capacitance_j_per_k;
    let rise = power_w * params.thermal_resistance_k_per_w;
    let mut temps_c = Vec::with_capacity(steps + 1);
    let mut throttle_index = None;
    for k in 0..=steps {
        let t = k as f64 * timestep_s;
        let temp = params.ambient_c + rise * (1.0 - (-t / tau).exp());
        if throttle_index.is_none() && temp >= params.throttle_temp_c {
            throttle_index = Some(k);
        }
        temps_c.push(temp);
    }
    ThermalTrace {
        timestep_s,
        temps_c,
        throttle_index,
    }
}

/// Closed-form time to the throttle threshold, in minutes.
///
/// A load is sustained when the steady-state temperature stays at or below
/// the threshold (the boundary counts as sustained).
pub fn time_to_throttle(power_w: f64, params: &ThermalParams) -> ThrottleOutcome {
    let rise = power_w * params.thermal_resistance_k_per_w;
    let delta = params.throttle_temp_c - params.ambient_c;
    if rise <= delta {
        return ThrottleOutcome::Sustained;
    }
    let tau = params.thermal_resistance_k_per_w * params.thermal_capacitance_j_per_k;
    let seconds = tau * (rise / (rise - delta)).ln();
    ThrottleOutcome::Throttles {
        minutes: seconds / 60.0,
    }
}

/// Trace CSV with `time_s,temp_c` columns, for external plotting.
pub fn trace_csv(trace: &ThermalTrace) -> String {
    let mut out = String::from("time_s,temp_c\n");
    for (k, temp) in trace.temps_c.iter().enumerate() {
        out.push_str(&format!("{:.2},{:.3}\n", k as f64 * trace.timestep_s, temp));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::builtin_profiles;
    use crate::utilization::compute_utilization;
    use crate::workload::default_mr_scenario;

    fn xr2_thermal() -> ThermalParams {
        builtin_profiles().get("xr2-gen2").unwrap().thermal.clone()
    }

    #[test]
    fn full_mr_power_on_xr2() {
        let registry = builtin_profiles();
        let xr2 = registry.get("xr2-gen2").unwrap();
        let scenario = default_mr_scenario();
        let report = compute_utilization(&scenario, xr2, &registry).unwrap();
        let power = power_draw(&report, &scenario, xr2);
        assert!((power.total_w - 9.27).abs() < 1e-9);
        assert!((power.cpu_w - 2.2575).abs() < 1e-9);
        assert!((power.gpu_w - 3.2625).abs() < 1e-9);
        assert_eq!(power.fixed_w, 2.75);
        assert!(power.total_w > xr2.tdp_sustained_w && power.total_w <= xr2.tdp_peak_w);
        assert!(
            (power.total_w - (power.idle_w + power.cpu_w + power.gpu_w + power.fixed_w)).abs()
                < 1e-9
        );
    }

    #[test]
    fn zero_utilization_draws_idle_only() {
        let registry = builtin_profiles();
        let xr2 = registry.get("xr2-gen2").unwrap();
        let mut scenario = default_mr_scenario();
        scenario.stages.clear();
        let report = compute_utilization(&scenario, xr2, &registry).unwrap();
        let power = power_draw(&report, &scenario, xr2);
        assert_eq!(power.total_w, xr2.thermal.idle_power_w);
    }

    #[test]
    fn zero_power_trace_stays_at_ambient() {
        let params = xr2_thermal();
        let trace = temp_trajectory(0.0, &params, 600.0, 1.0);
        assert_eq!(trace.temps_c.len(), 601);
        assert!(trace.temps_c.iter().all(|&t| t == params.ambient_c));
        assert!(trace.throttle_index.is_none());
    }

    #[test]
    fn trajectory_approaches_asymptote_monotonically() {
        let params = xr2_thermal();
        let power = 9.27;
        let asymptote = params.ambient_c + power * params.thermal_resistance_k_per_w;
        let trace = temp_trajectory(power, &params, 7200.0, 1.0);
        for pair in trace.temps_c.windows(2) {
            assert!(pair[1] >= pair[0]);
        }
        assert!(trace.temps_c.iter().all(|&t| t <= asymptote));
        // After many time constants the trace is essentially at the asymptote.
        assert!((trace.temps_c.last().unwrap() - asymptote).abs() < 0.01);
    }

    #[test]
    fn throttle_crossing_matches_closed_form() {
        let params = xr2_thermal();
        let power = 9.27;
        let trace = temp_trajectory(power, &params, 900.0, 1.0);
        let index = trace.throttle_index.unwrap();
        let minutes = time_to_throttle(power, &params).minutes().unwrap();
        assert!((index as f64 - minutes * 60.0).abs() <= 1.0);
        assert!((minutes - 7.5564).abs() < 0.01);
    }

    #[test]
    fn throttle_windows_for_reference_loads() {
        let params = xr2_thermal();
        let full = time_to_throttle(9.27, &params).minutes().unwrap();
        assert!((5.0..=10.0).contains(&full));
        let recording = time_to_throttle(7.5, &params).minutes().unwrap();
        assert!((10.0..=15.0).contains(&recording));
        assert!((recording - 13.0735).abs() < 0.01);
    }

    #[test]
    fn sustained_when_steady_state_at_or_below_threshold() {
        let params = xr2_thermal();
        assert_eq!(time_to_throttle(0.0, &params), ThrottleOutcome::Sustained);
        // Steady-state exactly at the threshold: 20 K / 3 K/W.
        let boundary = 20.0 / 3.0;
        assert_eq!(time_to_throttle(boundary, &params), ThrottleOutcome::Sustained);
        assert!(matches!(
            time_to_throttle(boundary + 1e-6, &params),
            ThrottleOutcome::Throttles { .. }
        ));
    }

    #[test]
    fn time_constant_is_shared_but_steady_state_is_not() {
        // Two pairs with matched RC product but scaled R: the normalized
        // response is identical while the steady state shrinks with R.
        for (r, c, k) in [(3.0, 119.0, 2.0), (2.5, 140.0, 4.0)] {
            let mut a = xr2_thermal();
            a.thermal_resistance_k_per_w = r;
            a.thermal_capacitance_j_per_k = c;
            let mut b = a.clone();
            b.thermal_resistance_k_per_w = r / k;
            b.thermal_capacitance_j_per_k = c * k;

            let ta = temp_trajectory(9.27, &a, 60.0, 1.0);
            let tb = temp_trajectory(9.27, &b, 60.0, 1.0);
            for (x, y) in ta.temps_c.iter().zip(&tb.temps_c) {
                let rise_a = x - a.ambient_c;
                let rise_b = y - b.ambient_c;
                assert!((rise_a - k * rise_b).abs() < 1e-9);
            }
            // Reduced resistance keeps 9.27 W below the threshold for good.
            assert!(matches!(time_to_throttle(9.27, &a), ThrottleOutcome::Throttles { .. }));
            assert_eq!(time_to_throttle(9.27, &b), ThrottleOutcome::Sustained);
        }
    }

    #[test]
    fn trace_csv_shape() {
        let params = xr2_thermal();
        let trace = temp_trajectory(9.27, &params, 10.0, 1.0);
        let csv = trace_csv(&trace);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "time_s,temp_c");
        assert_eq!(lines.len(), 12);
        assert!(lines[1].starts_with("0.00,25.000"));
    }
}
