//! Capacity, power and thermal headroom simulator for real-time
//! mixed-reality compositing pipelines on ARM SoCs.
//!
//! The crate models a compositing pipeline as a set of stages with
//! per-resource demands referenced to a specific chip, rescales those
//! demands onto other chips via benchmark ratios, aggregates them into
//! utilization and power, and predicts time-to-throttle with a lumped RC
//! thermal model. On top of that sit feasibility verdicts, multi-SoC
//! comparisons and deterministic report rendering.
//!
//! Quick start:
//!
//! ```
//! use xrheadroom::{builtin_profiles, default_mr_scenario, evaluate};
//!
//! let registry = builtin_profiles();
//! let report = evaluate(&default_mr_scenario(), "xr2-gen2", &registry).unwrap();
//! assert_eq!(report.utilization.headroom_pct, 5.0);
//! ```

pub mod error;
mod par;
pub mod registry;
pub mod render;
pub mod report;
pub mod soc;
pub mod sweep;
pub mod thermal;
pub mod utilization;
pub mod workload;

pub use error::{Error, Result};
pub use registry::{
    builtin_profiles, parse_profile_document, parse_profiles, serialize_profiles, ProfileDocument,
    SocRegistry,
};
pub use render::{render_report, ReportFormat};
pub use report::{
    compare, evaluate, verdict, ComparisonReport, FeasibilityVerdict, RatioAnnotation, Resource,
    SocRunReport, VerdictKind, VerdictReason,
};
pub use soc::{
    perf_ratio, BenchmarkScores, CpuCluster, GpuSpec, ResourceKind, SocProfile, ThermalParams,
};
pub use sweep::{evaluate_point, feasibility_grid, SweepPoint};
pub use thermal::{
    power_draw, temp_trajectory, time_to_throttle, trace_csv, PowerBreakdown, ThermalTrace,
    ThrottleOutcome,
};
pub use utilization::{
    compute_utilization, compute_utilization_with, ram_accounting, stage_csv, stage_lines,
    OverBudgetFlag, OverheadPolicy, RamAccounting, StageLine, UtilizationReport,
};
pub use workload::{
    default_mr_scenario, mr_mode_capacity, parse_scenario, rescale_resolution, scale_scenario,
    scale_stage, serialize_scenario, AccountingKind, CapacityMultipliers, GpuScalingBasis,
    PipelineStage, ScaledScenario, SessionMode, WorkloadScenario,
};
