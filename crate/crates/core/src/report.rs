//! Feasibility verdicts and multi-SoC comparison reports.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::par;
use crate::registry::SocRegistry;
use crate::soc::{perf_ratio_flagged, ResourceKind, SocProfile};
use crate::thermal::{power_draw, time_to_throttle, PowerBreakdown, ThrottleOutcome};
use crate::utilization::{
    compute_utilization, stage_lines, OverBudgetFlag, StageLine, UtilizationReport,
};
use crate::workload::{scale_scenario, WorkloadScenario};

/// Chips with published per-stage load estimates to compare against; rows
/// for any other chip are labeled as pure predictions.
const PROFILED_SOCS: [&str; 2] = ["xr2-gen2", "sd8-gen3"];

const PREDICTED_NOTE: &str = "predicted (no published per-stage load estimates for this chip)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resource {
    Cpu,
    Gpu,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resource::Cpu => f.write_str("cpu"),
            Resource::Gpu => f.write_str("gpu"),
        }
    }
}

/// Machine-readable grounds for a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum VerdictReason {
    ResourceOver { resource: Resource },
    RamOverDevBudget,
    ThermalLimited { minutes: f64 },
    StreamingUnsupported,
}

impl fmt::Display for VerdictReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictReason::ResourceOver { resource } => write!(f, "resource_over({resource})"),
            VerdictReason::RamOverDevBudget => f.write_str("ram_over_dev_budget"),
            VerdictReason::ThermalLimited { minutes } => {
                write!(f, "thermal_limited({minutes:.2}min)")
            }
            VerdictReason::StreamingUnsupported => f.write_str("streaming_unsupported"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictKind {
    SustainedFeasible,
    BurstFeasible { minutes: f64 },
    Infeasible,
}

impl VerdictKind {
    /// Ordering for monotonicity checks: sustained (2) > burst (1) >
    /// infeasible (0).
    pub fn rank(&self) -> u8 {
        match self {
            VerdictKind::SustainedFeasible => 2,
            VerdictKind::BurstFeasible { .. } => 1,
            VerdictKind::Infeasible => 0,
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::SustainedFeasible => f.write_str("sustained-feasible"),
            VerdictKind::BurstFeasible { minutes } => {
                write!(f, "burst-feasible({minutes:.2}min)")
            }
            VerdictKind::Infeasible => f.write_str("infeasible"),
        }
    }
}

/// Verdict plus the coded reasons behind it. Infeasible verdicts always
/// carry at least one reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub kind: VerdictKind,
    pub reasons: Vec<VerdictReason>,
}

/// Everything computed for one scenario on one SoC: the scaled stage
/// lines, utilization, power, throttle prediction and verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocRunReport {
    pub soc: String,
    pub stages: Vec<StageLine>,
    pub utilization: UtilizationReport,
    pub power: PowerBreakdown,
    pub throttle: ThrottleOutcome,
    pub verdict: FeasibilityVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Performance ratio of one compared SoC over the report's reference SoC.
/// `estimated` marks ratios derived from estimated benchmark scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioAnnotation {
    pub soc: String,
    pub kind: ResourceKind,
    pub ratio: f64,
    pub estimated: bool,
}

/// One scenario evaluated across several SoCs, with benchmark-ratio
/// annotations relative to the scenario's reference chip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub scenario: String,
    pub reference_soc: String,
    pub rows: Vec<SocRunReport>,
    pub annotations: Vec<RatioAnnotation>,
}

/// Full evaluation pipeline for one SoC: scale, aggregate, power, thermal,
/// verdict.
pub fn evaluate(
    scenario: &WorkloadScenario,
    soc_name: &str,
    registry: &SocRegistry,
) -> Result<SocRunReport> {
    let soc = registry.resolve(soc_name)?;
    let scaled = scale_scenario(scenario, soc, registry)?;
    let mut utilization = compute_utilization(&scaled.scenario, soc, registry)?;
    utilization.is_estimate |= scaled.used_estimates;
    let power = power_draw(&utilization, &scaled.scenario, soc);
    let throttle = time_to_throttle(power.total_w, &soc.thermal);
    let verdict = derive_verdict(&utilization, throttle, scenario.live_streaming, soc);
    let stages = stage_lines(&scaled.scenario, &utilization);
    let note = (!PROFILED_SOCS.contains(&soc_name)).then(|| PREDICTED_NOTE.to_string());
    Ok(SocRunReport {
        soc: soc.name.clone(),
        stages,
        utilization,
        power,
        throttle,
        verdict,
        note,
    })
}

/// Feasibility verdict for a scenario on a SoC.
pub fn verdict(
    scenario: &WorkloadScenario,
    soc_name: &str,
    registry: &SocRegistry,
) -> Result<FeasibilityVerdict> {
    Ok(evaluate(scenario, soc_name, registry)?.verdict)
}

fn derive_verdict(
    utilization: &UtilizationReport,
    throttle: ThrottleOutcome,
    live_streaming: bool,
    soc: &SocProfile,
) -> FeasibilityVerdict {
    let mut reasons = Vec::new();
    for flag in &utilization.over_budget_flags {
        match flag {
            OverBudgetFlag::CpuOver => reasons.push(VerdictReason::ResourceOver {
                resource: Resource::Cpu,
            }),
            OverBudgetFlag::GpuOver => reasons.push(VerdictReason::ResourceOver {
                resource: Resource::Gpu,
            }),
            OverBudgetFlag::RamOverDevBudget => reasons.push(VerdictReason::RamOverDevBudget),
            // Exceeding total RAM already implies exceeding the dev budget.
            OverBudgetFlag::RamOverTotal => {}
        }
    }
    let resource_infeasible = !reasons.is_empty();
    // Live streaming is a categorical rule: unsupported everywhere, and a
    // hard stop on chips in the 10 W peak class.
    let streaming_cap = live_streaming && soc.tdp_peak_w <= 10.0;
    if live_streaming {
        reasons.push(VerdictReason::StreamingUnsupported);
    }
    if resource_infeasible || streaming_cap {
        return FeasibilityVerdict {
            kind: VerdictKind::Infeasible,
            reasons,
        };
    }
    match throttle {
        ThrottleOutcome::Throttles { minutes } => {
            reasons.push(VerdictReason::ThermalLimited { minutes });
            FeasibilityVerdict {
                kind: VerdictKind::BurstFeasible { minutes },
                reasons,
            }
        }
        ThrottleOutcome::Sustained => FeasibilityVerdict {
            kind: VerdictKind::SustainedFeasible,
            reasons,
        },
    }
}

/// Kinds annotated on every comparison (raster is omitted: not all chips
/// publish it).
const ANNOTATED_KINDS: [ResourceKind; 4] = [
    ResourceKind::CpuSingle,
    ResourceKind::CpuMulti,
    ResourceKind::GpuCompute,
    ResourceKind::MemBw,
];

/// Evaluates the scenario on each named SoC. Rows keep the order of
/// `soc_names`; evaluation fans out in parallel when the `parallel`
/// feature is enabled.
pub fn compare(
    scenario: &WorkloadScenario,
    soc_names: &[String],
    registry: &SocRegistry,
) -> Result<ComparisonReport> {
    for name in soc_names {
        registry.resolve(name)?;
    }
    let reference_name = scenario
        .reference_soc()
        .unwrap_or_else(|| soc_names.first().map(String::as_str).unwrap_or("xr2-gen2"))
        .to_string();
    let reference = registry.resolve(&reference_name)?;

    let rows: Vec<Result<SocRunReport>> =
        par::map_slice(soc_names, |name| evaluate(scenario, name, registry));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut annotations = Vec::new();
    for row in &rows {
        let soc = registry.resolve(&row.soc)?;
        for kind in ANNOTATED_KINDS {
            let (ratio, estimated) = perf_ratio_flagged(soc, reference, kind)?;
            annotations.push(RatioAnnotation {
                soc: row.soc.clone(),
                kind,
                ratio,
                estimated,
            });
        }
    }
    Ok(ComparisonReport {
        scenario: scenario.name.clone(),
        reference_soc: reference_name,
        rows,
        annotations,
    })
}
