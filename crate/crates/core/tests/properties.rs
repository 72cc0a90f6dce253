//! Randomized invariant checks for ratios, scaling, aggregation, thermal
//! prediction and verdicts.

use proptest::prelude::*;

use xrheadroom::{
    builtin_profiles, compute_utilization, evaluate, perf_ratio, rescale_resolution,
    scale_scenario, time_to_throttle, AccountingKind, PipelineStage, ResourceKind, SessionMode,
    SocProfile, SocRegistry, ThermalParams, ThrottleOutcome, VerdictKind, WorkloadScenario,
};

fn profile_with(name: &str, single: f64, multi_factor: f64, gflops: f64, membw: f64) -> SocProfile {
    let mut profile = builtin_profiles().get("xr2-gen2").unwrap().clone();
    profile.name = name.to_string();
    profile.benchmarks.geekbench6_single = single;
    profile.benchmarks.geekbench6_multi = single * multi_factor;
    profile.benchmarks.estimated.clear();
    profile.gpu.gflops = gflops;
    profile.memory_bandwidth_gbps = membw;
    profile.validate().unwrap();
    profile
}

fn arb_profile(name: &'static str) -> impl Strategy<Value = SocProfile> {
    (
        500.0..3500.0f64,
        1.5..6.0f64,
        800.0..6000.0f64,
        20.0..150.0f64,
    )
        .prop_map(move |(single, multi_factor, gflops, membw)| {
            profile_with(name, single, multi_factor, gflops, membw)
        })
}

fn registry_of(profiles: Vec<SocProfile>) -> SocRegistry {
    let mut registry = builtin_profiles();
    for profile in profiles {
        registry.insert(profile, true).unwrap();
    }
    registry
}

fn arb_kind() -> impl Strategy<Value = AccountingKind> {
    prop_oneof![
        Just(AccountingKind::GpuBound),
        Just(AccountingKind::CpuBound),
        Just(AccountingKind::CpuGpuMixed),
        Just(AccountingKind::Overhead),
    ]
}

fn arb_stage(index: usize) -> impl Strategy<Value = PipelineStage> {
    (
        0.0..60.0f64,
        0.0..60.0f64,
        0.0..2.0f64,
        0.0..3.0f64,
        arb_kind(),
        any::<bool>(),
    )
        .prop_map(
            move |(cpu_pct, gpu_pct, ram_gb, extra_power_w, kind, pixel_rate_scaled)| {
                PipelineStage {
                    name: format!("stage_{index}"),
                    cpu_pct,
                    gpu_pct,
                    ram_gb,
                    extra_power_w,
                    kind,
                    pixel_rate_scaled,
                    reference_soc: "xr2-gen2".to_string(),
                }
            },
        )
}

fn arb_scenario() -> impl Strategy<Value = WorkloadScenario> {
    (prop::collection::vec(any::<bool>(), 0..8), any::<bool>())
        .prop_flat_map(|(slots, mixed)| {
            let stages: Vec<_> = slots
                .iter()
                .enumerate()
                .map(|(i, _)| arb_stage(i))
                .collect();
            (stages, Just(mixed))
        })
        .prop_map(|(stages, mixed)| WorkloadScenario {
            name: "random".to_string(),
            stages,
            width_px: 1280,
            height_px: 720,
            fps: 30.0,
            mode: if mixed {
                SessionMode::MixedReality
            } else {
                SessionMode::VrOnly
            },
            session_minutes: 10.0,
            live_streaming: false,
        })
}

fn relative_close(a: f64, b: f64, tolerance: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= tolerance * scale
}

proptest! {
    #[test]
    fn perf_ratio_reciprocity(a in arb_profile("a"), b in arb_profile("b")) {
        for kind in ResourceKind::ALL {
            let forward = perf_ratio(&a, &b, kind).unwrap();
            let backward = perf_ratio(&b, &a, kind).unwrap();
            prop_assert!((forward * backward - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn perf_ratio_transitivity(a in arb_profile("a"), b in arb_profile("b"), c in arb_profile("c")) {
        for kind in ResourceKind::ALL {
            let direct = perf_ratio(&a, &c, kind).unwrap();
            let chained = perf_ratio(&a, &b, kind).unwrap() * perf_ratio(&b, &c, kind).unwrap();
            prop_assert!(relative_close(direct, chained, 1e-12));
        }
    }

    #[test]
    fn scaling_identity_is_exact(scenario in arb_scenario()) {
        let registry = builtin_profiles();
        let xr2 = registry.get("xr2-gen2").unwrap();
        let scaled = scale_scenario(&scenario, xr2, &registry).unwrap();
        prop_assert_eq!(scaled.scenario, scenario);
    }

    #[test]
    fn scaling_composes(
        scenario in arb_scenario(),
        b in arb_profile("b"),
        c in arb_profile("c"),
    ) {
        let registry = registry_of(vec![b.clone(), c.clone()]);
        let via_b = scale_scenario(
            &scale_scenario(&scenario, &b, &registry).unwrap().scenario,
            &c,
            &registry,
        )
        .unwrap()
        .scenario;
        let direct = scale_scenario(&scenario, &c, &registry).unwrap().scenario;
        for (x, y) in via_b.stages.iter().zip(&direct.stages) {
            prop_assert!(relative_close(x.cpu_pct, y.cpu_pct, 1e-9));
            prop_assert!(relative_close(x.gpu_pct, y.gpu_pct, 1e-9));
            prop_assert!(relative_close(x.extra_power_w, y.extra_power_w, 1e-9));
            // RAM footprints are content-determined and never rescale.
            prop_assert_eq!(x.ram_gb, y.ram_gb);
        }
    }

    #[test]
    fn rescale_is_multiplicative(scenario in arb_scenario()) {
        let once = rescale_resolution(&scenario, 1920, 1080, 60.0);
        let twice = rescale_resolution(&once, 1280, 720, 30.0);
        for (x, y) in twice.stages.iter().zip(&scenario.stages) {
            prop_assert!(relative_close(x.cpu_pct, y.cpu_pct, 1e-9));
            prop_assert!(relative_close(x.gpu_pct, y.gpu_pct, 1e-9));
            prop_assert!(relative_close(x.extra_power_w, y.extra_power_w, 1e-9));
        }
    }

    #[test]
    fn headroom_closure(scenario in arb_scenario()) {
        let registry = builtin_profiles();
        let xr2 = registry.get("xr2-gen2").unwrap();
        let report = compute_utilization(&scenario, xr2, &registry).unwrap();
        // Defining identity, bit-exact by construction.
        prop_assert_eq!(report.headroom_pct, 100.0 - report.combined_total_pct);
        // For realistic totals the sum itself is exactly 100.
        if report.combined_total_pct <= 200.0 {
            prop_assert_eq!(report.combined_total_pct + report.headroom_pct, 100.0);
        }
    }

    // One generated case bumps several fields; proptest's case count times
    // the three checked fields comfortably exceeds 1000 random checks.
    #[test]
    fn utilization_monotone_under_stage_growth(
        scenario in arb_scenario(),
        index in 0usize..8,
        bump in 0.1..40.0f64,
    ) {
        prop_assume!(!scenario.stages.is_empty());
        let registry = builtin_profiles();
        let xr2 = registry.get("xr2-gen2").unwrap();
        let index = index % scenario.stages.len();
        let before = compute_utilization(&scenario, xr2, &registry).unwrap();

        for field in 0..3 {
            let mut grown = scenario.clone();
            match field {
                0 => grown.stages[index].cpu_pct += bump,
                1 => grown.stages[index].gpu_pct += bump,
                _ => grown.stages[index].ram_gb += bump / 10.0,
            }
            let after = compute_utilization(&grown, xr2, &registry).unwrap();
            prop_assert!(after.headroom_pct <= before.headroom_pct);
            prop_assert!(after.cpu_total_pct >= before.cpu_total_pct);
            prop_assert!(after.gpu_total_pct >= before.gpu_total_pct);
            prop_assert!(after.ram_used_gb >= before.ram_used_gb);
            prop_assert!(after.combined_total_pct >= before.combined_total_pct);
        }
    }

    #[test]
    fn totals_additive_over_disjoint_stage_sets(scenario in arb_scenario(), split in 0usize..8) {
        // VR mode keeps capacity multipliers at 1 for any stage subset, so
        // the halves aggregate under the same accounting as the union.
        let mut scenario = scenario;
        scenario.mode = SessionMode::VrOnly;
        let registry = builtin_profiles();
        let xr2 = registry.get("xr2-gen2").unwrap();
        let split = split.min(scenario.stages.len());

        let mut left = scenario.clone();
        left.stages = scenario.stages[..split].to_vec();
        let mut right = scenario.clone();
        right.stages = scenario.stages[split..].to_vec();

        let whole = compute_utilization(&scenario, xr2, &registry).unwrap();
        let a = compute_utilization(&left, xr2, &registry).unwrap();
        let b = compute_utilization(&right, xr2, &registry).unwrap();

        prop_assert!(relative_close(whole.cpu_total_pct, a.cpu_total_pct + b.cpu_total_pct, 1e-9));
        prop_assert!(relative_close(whole.gpu_total_pct, a.gpu_total_pct + b.gpu_total_pct, 1e-9));
        prop_assert!(relative_close(
            whole.combined_total_pct,
            a.combined_total_pct + b.combined_total_pct,
            1e-9
        ));
        prop_assert!(relative_close(
            whole.ram_app_visible_gb,
            a.ram_app_visible_gb + b.ram_app_visible_gb,
            1e-9
        ));
    }

    #[test]
    fn totals_invariant_under_reordering(scenario in arb_scenario(), seed in any::<u64>()) {
        let registry = builtin_profiles();
        let xr2 = registry.get("xr2-gen2").unwrap();
        let mut shuffled = scenario.clone();
        // Cheap deterministic shuffle.
        let n = shuffled.stages.len();
        for i in (1..n).rev() {
            let j = (seed as usize).wrapping_mul(2654435761).wrapping_add(i) % (i + 1);
            shuffled.stages.swap(i, j);
        }
        let a = compute_utilization(&scenario, xr2, &registry).unwrap();
        let b = compute_utilization(&shuffled, xr2, &registry).unwrap();
        prop_assert!(relative_close(a.cpu_total_pct, b.cpu_total_pct, 1e-9));
        prop_assert!(relative_close(a.gpu_total_pct, b.gpu_total_pct, 1e-9));
        prop_assert!(relative_close(a.combined_total_pct, b.combined_total_pct, 1e-9));
        prop_assert_eq!(a.over_budget_flags.len(), b.over_budget_flags.len());
    }
}

/// Independent explicit-Euler integration of `dT/dt = (P - (T-amb)/R)/C`,
/// returning the first threshold crossing.
fn euler_cross_seconds(power: f64, params: &ThermalParams, dt: f64, t_max: f64) -> Option<f64> {
    let mut temp = params.ambient_c;
    let mut t = 0.0;
    while t < t_max {
        if temp >= params.throttle_temp_c {
            return Some(t);
        }
        temp += dt
            * (power - (temp - params.ambient_c) / params.thermal_resistance_k_per_w)
            / params.thermal_capacitance_j_per_k;
        t += dt;
    }
    None
}

proptest! {
    #[test]
    fn closed_form_matches_numeric_integration(
        power in 0.0..15.0f64,
        resistance in 1.5..4.0f64,
        capacitance in 80.0..200.0f64,
    ) {
        let mut params = builtin_profiles().get("xr2-gen2").unwrap().thermal.clone();
        params.thermal_resistance_k_per_w = resistance;
        params.thermal_capacitance_j_per_k = capacitance;
        let dt = 0.5;
        match time_to_throttle(power, &params) {
            ThrottleOutcome::Throttles { minutes } => {
                let closed = minutes * 60.0;
                let numeric = euler_cross_seconds(power, &params, dt, closed * 2.0 + 60.0)
                    .expect("numeric integration must cross when closed form does");
                prop_assert!(
                    (numeric - closed).abs() <= 0.01 * closed + dt,
                    "closed {closed} vs numeric {numeric}"
                );
            }
            ThrottleOutcome::Sustained => {
                let tau = resistance * capacitance;
                prop_assert!(euler_cross_seconds(power, &params, dt, 10.0 * tau).is_none());
            }
        }
    }

    #[test]
    fn throttle_time_strictly_decreasing_in_power(
        power in 7.0..14.0f64,
        step in 0.01..1.0f64,
    ) {
        let params = builtin_profiles().get("xr2-gen2").unwrap().thermal.clone();
        let a = time_to_throttle(power, &params).minutes().unwrap();
        let b = time_to_throttle(power + step, &params).minutes().unwrap();
        prop_assert!(b < a);
    }

    #[test]
    fn verdict_never_improves_when_stages_are_added(
        scenario in arb_scenario(),
        added in arb_stage(99),
    ) {
        // Keep the overhead accounting model unchanged: an added overhead
        // stage would legitimately switch a scenario from multiplier-based
        // to explicit-stage accounting.
        let mut added = added;
        if !scenario.stages.iter().any(|s| s.kind == AccountingKind::Overhead)
            && added.kind == AccountingKind::Overhead
        {
            added.kind = AccountingKind::CpuGpuMixed;
        }
        let registry = builtin_profiles();
        let before = evaluate(&scenario, "xr2-gen2", &registry).unwrap();
        let mut grown = scenario;
        grown.stages.push(added);
        let after = evaluate(&grown, "xr2-gen2", &registry).unwrap();

        prop_assert!(after.verdict.kind.rank() <= before.verdict.kind.rank());
        if let (
            VerdictKind::BurstFeasible { minutes: t_before },
            VerdictKind::BurstFeasible { minutes: t_after },
        ) = (&before.verdict.kind, &after.verdict.kind)
        {
            prop_assert!(t_after <= t_before);
        }
    }
}
