//! Aggregates stage demands into per-resource utilization, combined budget
//! shares with headroom, and RAM accounting.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::registry::SocRegistry;
use crate::workload::{
    mr_mode_capacity, scale_scenario, AccountingKind, CapacityMultipliers, WorkloadScenario,
};
use crate::soc::SocProfile;

/// Budget overruns detected while aggregating a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OverBudgetFlag {
    CpuOver,
    GpuOver,
    RamOverDevBudget,
    RamOverTotal,
}

/// Aggregated utilization of one scenario on one SoC.
///
/// `headroom_pct` is defined as `100 - combined_total_pct` and may be
/// negative: over-demand stays visible to the feasibility verdict instead
/// of being clamped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilizationReport {
    pub soc: String,
    pub cpu_total_pct: f64,
    pub gpu_total_pct: f64,
    pub combined_shares: Vec<(String, f64)>,
    pub combined_total_pct: f64,
    pub headroom_pct: f64,
    pub ram_used_gb: f64,
    pub ram_os_reserved_gb: f64,
    pub ram_app_visible_gb: f64,
    pub over_budget_flags: BTreeSet<OverBudgetFlag>,
    pub is_estimate: bool,
}

/// RAM accounting for a scenario on a device: OS reservation plus the
/// application-visible stage footprints. RAM never rescales across SoCs
/// (footprints are content-determined).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RamAccounting {
    pub used_gb: f64,
    pub os_reserved_gb: f64,
    pub app_visible_gb: f64,
    pub over_dev_budget: bool,
    pub over_total: bool,
}

/// How mode-capacity multipliers interact with overhead stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverheadPolicy {
    /// Apply mode multipliers only when no overhead stage models the same
    /// cost explicitly.
    #[default]
    Auto,
    /// Apply mode multipliers unconditionally; errors if an overhead stage
    /// is present (the two would double count).
    ForceModeCapacity,
}

pub fn ram_accounting(scenario: &WorkloadScenario, soc: &SocProfile) -> RamAccounting {
    let os_reserved_gb = soc.total_ram_gb - soc.dev_accessible_ram_gb;
    let app_visible_gb: f64 = scenario.stages.iter().map(|s| s.ram_gb).sum();
    let used_gb = os_reserved_gb + app_visible_gb;
    RamAccounting {
        used_gb,
        os_reserved_gb,
        app_visible_gb,
        over_dev_budget: app_visible_gb > soc.dev_accessible_ram_gb,
        over_total: used_gb > soc.total_ram_gb,
    }
}

pub fn compute_utilization(
    scenario: &WorkloadScenario,
    soc: &SocProfile,
    registry: &SocRegistry,
) -> Result<UtilizationReport> {
    compute_utilization_with(scenario, soc, registry, OverheadPolicy::Auto)
}

/// Aggregates a scenario on `soc`, auto-scaling first when the stages
/// reference a different chip.
pub fn compute_utilization_with(
    scenario: &WorkloadScenario,
    soc: &SocProfile,
    registry: &SocRegistry,
    policy: OverheadPolicy,
) -> Result<UtilizationReport> {
    let needs_scaling = scenario
        .reference_soc()
        .is_some_and(|reference| reference != soc.name);
    let (scenario, used_estimates) = if needs_scaling {
        let scaled = scale_scenario(scenario, soc, registry)?;
        (scaled.scenario, scaled.used_estimates)
    } else {
        (scenario.clone(), false)
    };
    let report = aggregate(&scenario, soc, policy, used_estimates)?;
    Ok(report)
}

/// Core accounting over stages already referenced to `soc`.
fn aggregate(
    scenario: &WorkloadScenario,
    soc: &SocProfile,
    policy: OverheadPolicy,
    is_estimate: bool,
) -> Result<UtilizationReport> {
    let multipliers = effective_multipliers(scenario, soc, policy)?;

    let mut cpu_total_pct = 0.0;
    let mut gpu_total_pct = 0.0;
    let mut combined_shares = Vec::new();
    for stage in &scenario.stages {
        let cpu = stage.cpu_pct / multipliers.cpu;
        let gpu = stage.gpu_pct / multipliers.gpu;
        cpu_total_pct += cpu;
        gpu_total_pct += gpu;
        let share = match stage.kind {
            AccountingKind::GpuBound => Some(gpu),
            AccountingKind::CpuBound => Some(cpu),
            AccountingKind::CpuGpuMixed => Some(cpu + gpu),
            AccountingKind::Overhead => None,
        };
        if let Some(share) = share {
            combined_shares.push((stage.name.clone(), share));
        }
    }
    let combined_total_pct: f64 = combined_shares.iter().map(|(_, s)| s).sum();
    let headroom_pct = 100.0 - combined_total_pct;

    let ram = ram_accounting(scenario, soc);
    let mut over_budget_flags = BTreeSet::new();
    if cpu_total_pct > 100.0 {
        over_budget_flags.insert(OverBudgetFlag::CpuOver);
    }
    if gpu_total_pct > 100.0 {
        over_budget_flags.insert(OverBudgetFlag::GpuOver);
    }
    if ram.over_dev_budget {
        over_budget_flags.insert(OverBudgetFlag::RamOverDevBudget);
    }
    if ram.over_total {
        over_budget_flags.insert(OverBudgetFlag::RamOverTotal);
    }

    Ok(UtilizationReport {
        soc: soc.name.clone(),
        cpu_total_pct,
        gpu_total_pct,
        combined_shares,
        combined_total_pct,
        headroom_pct,
        ram_used_gb: ram.used_gb,
        ram_os_reserved_gb: ram.os_reserved_gb,
        ram_app_visible_gb: ram.app_visible_gb,
        over_budget_flags,
        is_estimate,
    })
}

/// Mode multipliers to divide demands by; 1.0 when an overhead stage
/// already models the mixed-reality cost.
fn effective_multipliers(
    scenario: &WorkloadScenario,
    soc: &SocProfile,
    policy: OverheadPolicy,
) -> Result<CapacityMultipliers> {
    let overhead_stage = scenario
        .stages
        .iter()
        .find(|s| s.kind == AccountingKind::Overhead);
    match (policy, overhead_stage) {
        (OverheadPolicy::ForceModeCapacity, Some(stage)) => Err(Error::ConflictingOverheadModel {
            stage: stage.name.clone(),
        }),
        (OverheadPolicy::Auto, Some(_)) => Ok(CapacityMultipliers { cpu: 1.0, gpu: 1.0 }),
        (_, None) => Ok(mr_mode_capacity(soc, scenario.mode)),
    }
}

/// Per-stage utilization line for tabular report output. `combined_share`
/// is 0 for overhead stages, which sit outside the combined budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageLine {
    pub stage: String,
    pub cpu_pct: f64,
    pub gpu_pct: f64,
    pub combined_share: f64,
    pub ram_gb: f64,
}

/// Expands a report into one line per stage of the scenario it was
/// computed from (the scenario must already be referenced to the report's
/// SoC, as produced by [`crate::workload::scale_scenario`]).
pub fn stage_lines(scenario: &WorkloadScenario, report: &UtilizationReport) -> Vec<StageLine> {
    scenario
        .stages
        .iter()
        .map(|stage| {
            let share = report
                .combined_shares
                .iter()
                .find(|(name, _)| name == &stage.name)
                .map(|(_, share)| *share)
                .unwrap_or(0.0);
            StageLine {
                stage: stage.name.clone(),
                cpu_pct: stage.cpu_pct,
                gpu_pct: stage.gpu_pct,
                combined_share: share,
                ram_gb: stage.ram_gb,
            }
        })
        .collect()
}

/// CSV document for a stage breakdown: one row per stage plus a totals
/// row, column order `stage,cpu_pct,gpu_pct,combined_share,ram_gb`.
pub fn stage_csv(lines: &[StageLine], report: &UtilizationReport) -> String {
    let mut out = String::from("stage,cpu_pct,gpu_pct,combined_share,ram_gb\n");
    for line in lines {
        out.push_str(&format!(
            "{},{:.1},{:.1},{:.1},{:.2}\n",
            line.stage, line.cpu_pct, line.gpu_pct, line.combined_share, line.ram_gb
        ));
    }
    out.push_str(&format!(
        "total,{:.1},{:.1},{:.1},{:.2}\n",
        report.cpu_total_pct,
        report.gpu_total_pct,
        report.combined_total_pct,
        report.ram_app_visible_gb
    ));
    out
}
