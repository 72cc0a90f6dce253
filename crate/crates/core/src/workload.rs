//! Pipeline stages, workload scenarios and cross-SoC demand scaling.
//!
//! Stage demands are percentages of a *reference* SoC's capacity. Moving a
//! scenario to another chip rescales each demand by the benchmark ratio of
//! the two chips: CPU demands by the single-core ratio (the pipeline's
//! per-frame loops are latency-critical), GPU demands by the GFLOPS ratio,
//! and fixed encoder draw by the relative encoder efficiency.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::registry::{check_object_keys, SocRegistry};
use crate::soc::{perf_ratio_flagged, positive, ResourceKind, SocProfile};

/// How a stage participates in the combined 100 % budget accounting.
///
/// `Overhead` stages (runtime, sensor fusion, passthrough plumbing) count
/// toward per-resource totals but are excluded from the combined budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccountingKind {
    #[serde(rename = "gpu")]
    GpuBound,
    #[serde(rename = "cpu")]
    CpuBound,
    #[serde(rename = "cpu_gpu")]
    CpuGpuMixed,
    Overhead,
}

/// One pipeline task with its per-resource demands on the reference SoC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineStage {
    pub name: String,
    #[serde(default)]
    pub cpu_pct: f64,
    #[serde(default)]
    pub gpu_pct: f64,
    #[serde(default)]
    pub ram_gb: f64,
    #[serde(default)]
    pub extra_power_w: f64,
    pub kind: AccountingKind,
    #[serde(default)]
    pub pixel_rate_scaled: bool,
    pub reference_soc: String,
}

/// Rendering mode of a scenario. Mixed reality carries a sensor-processing
/// capacity penalty unless the scenario models it as an explicit overhead
/// stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionMode {
    VrOnly,
    MixedReality,
}

/// An ordered set of stages plus the output target they serve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadScenario {
    pub name: String,
    pub stages: Vec<PipelineStage>,
    pub width_px: u32,
    pub height_px: u32,
    pub fps: f64,
    pub mode: SessionMode,
    pub session_minutes: f64,
    #[serde(default)]
    pub live_streaming: bool,
}

/// Effective capacity multipliers for a rendering mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityMultipliers {
    pub cpu: f64,
    pub gpu: f64,
}

/// A scenario rescaled to another SoC, plus whether any estimated
/// benchmark field was consumed doing so.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledScenario {
    pub scenario: WorkloadScenario,
    pub used_estimates: bool,
}

/// Which benchmark axis drives GPU demand scaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpuScalingBasis {
    /// GFLOPS ratio (always available).
    Compute,
    /// GFXBench raster ratio; errors when either side lacks the score.
    Raster,
}

/// The canonical 720p30 mixed-reality compositing workload, referenced to
/// the xr2-gen2 profile.
///
/// Demands were calibrated so the per-resource totals land at 72.5 % GPU
/// and 64.5 % CPU, the accounted stages fill 95 % of the combined budget,
/// and peak RAM lands at 7 GB of 8.
pub fn default_mr_scenario() -> WorkloadScenario {
    let stage = |name: &str,
                 cpu_pct: f64,
                 gpu_pct: f64,
                 ram_gb: f64,
                 extra_power_w: f64,
                 kind: AccountingKind,
                 pixel_rate_scaled: bool| PipelineStage {
        name: name.to_string(),
        cpu_pct,
        gpu_pct,
        ram_gb,
        extra_power_w,
        kind,
        pixel_rate_scaled,
        reference_soc: "xr2-gen2".to_string(),
    };
    WorkloadScenario {
        name: "default-mr-720p30".to_string(),
        stages: vec![
            stage("passthrough", 2.0, 12.5, 0.5, 0.0, AccountingKind::GpuBound, false),
            stage("avatar_scene", 10.0, 32.5, 1.6, 0.0, AccountingKind::GpuBound, false),
            stage("segmentation", 22.5, 5.0, 0.9, 0.0, AccountingKind::CpuBound, false),
            stage(
                "composite_encode",
                15.0,
                12.5,
                0.75,
                2.75,
                AccountingKind::CpuGpuMixed,
                true,
            ),
            stage(
                "runtime_sensor_baseline",
                15.0,
                10.0,
                1.0,
                0.0,
                AccountingKind::Overhead,
                false,
            ),
        ],
        width_px: 1280,
        height_px: 720,
        fps: 30.0,
        mode: SessionMode::MixedReality,
        session_minutes: 10.0,
        live_streaming: false,
    }
}

/// Effective capacity left to an application in the given mode.
///
/// Mixed reality costs 14 % of CPU and 17 % of GPU capacity to sensor and
/// passthrough processing. Scenarios that model that cost as an explicit
/// overhead stage must not apply these multipliers on top.
pub fn mr_mode_capacity(_soc: &SocProfile, mode: SessionMode) -> CapacityMultipliers {
    match mode {
        SessionMode::VrOnly => CapacityMultipliers { cpu: 1.0, gpu: 1.0 },
        SessionMode::MixedReality => CapacityMultipliers { cpu: 0.86, gpu: 0.83 },
    }
}

/// Rescales one stage's demands from its reference SoC onto `to`.
pub fn scale_stage(
    stage: &PipelineStage,
    to: &SocProfile,
    registry: &SocRegistry,
) -> Result<PipelineStage> {
    Ok(scale_stage_flagged(stage, to, registry, GpuScalingBasis::Compute)?.0)
}

/// [`scale_stage`] with an explicit GPU scaling basis, also reporting
/// whether an estimated benchmark field was consumed.
pub fn scale_stage_flagged(
    stage: &PipelineStage,
    to: &SocProfile,
    registry: &SocRegistry,
    basis: GpuScalingBasis,
) -> Result<(PipelineStage, bool)> {
    let reference = registry.resolve(&stage.reference_soc)?;
    if reference.name == to.name {
        return Ok((stage.clone(), false));
    }
    let gpu_kind = match basis {
        GpuScalingBasis::Compute => ResourceKind::GpuCompute,
        GpuScalingBasis::Raster => ResourceKind::GpuRaster,
    };
    let (cpu_ratio, cpu_est) = perf_ratio_flagged(to, reference, ResourceKind::CpuSingle)?;
    let (gpu_ratio, gpu_est) = perf_ratio_flagged(to, reference, gpu_kind)?;
    // Relative encoder efficiency keeps scaling composable: chaining
    // a->b->c equals a->c.
    let encoder_ratio = to.encoder_efficiency / reference.encoder_efficiency;
    let scaled = PipelineStage {
        name: stage.name.clone(),
        cpu_pct: stage.cpu_pct / cpu_ratio,
        gpu_pct: stage.gpu_pct / gpu_ratio,
        ram_gb: stage.ram_gb,
        extra_power_w: stage.extra_power_w * encoder_ratio,
        kind: stage.kind,
        pixel_rate_scaled: stage.pixel_rate_scaled,
        reference_soc: to.name.clone(),
    };
    Ok((scaled, cpu_est || gpu_est))
}

/// Rescales every stage of a scenario onto `to`.
pub fn scale_scenario(
    scenario: &WorkloadScenario,
    to: &SocProfile,
    registry: &SocRegistry,
) -> Result<ScaledScenario> {
    let mut used_estimates = false;
    let mut stages = Vec::with_capacity(scenario.stages.len());
    for stage in &scenario.stages {
        let (scaled, est) = scale_stage_flagged(stage, to, registry, GpuScalingBasis::Compute)?;
        used_estimates |= est;
        stages.push(scaled);
    }
    Ok(ScaledScenario {
        scenario: WorkloadScenario {
            stages,
            ..scenario.clone()
        },
        used_estimates,
    })
}

/// Retargets the scenario to a new resolution and frame rate.
///
/// Stages flagged `pixel_rate_scaled` have cpu, gpu and fixed power
/// demands multiplied by the pixel-rate ratio; all other stages are
/// resolution-independent.
pub fn rescale_resolution(
    scenario: &WorkloadScenario,
    new_width: u32,
    new_height: u32,
    new_fps: f64,
) -> WorkloadScenario {
    let old_rate = scenario.width_px as f64 * scenario.height_px as f64 * scenario.fps;
    let new_rate = new_width as f64 * new_height as f64 * new_fps;
    let factor = new_rate / old_rate;
    let stages = scenario
        .stages
        .iter()
        .map(|stage| {
            if stage.pixel_rate_scaled {
                PipelineStage {
                    cpu_pct: stage.cpu_pct * factor,
                    gpu_pct: stage.gpu_pct * factor,
                    extra_power_w: stage.extra_power_w * factor,
                    ..stage.clone()
                }
            } else {
                stage.clone()
            }
        })
        .collect();
    WorkloadScenario {
        stages,
        width_px: new_width,
        height_px: new_height,
        fps: new_fps,
        ..scenario.clone()
    }
}

impl WorkloadScenario {
    /// Checks scenario and stage invariants.
    pub fn validate(&self) -> Result<()> {
        let ctx = format!("scenario `{}`", self.name);
        let fail = |field: &str, invariant: &str| {
            Err(Error::Validation {
                context: ctx.clone(),
                field: field.to_string(),
                invariant: invariant.to_string(),
            })
        };
        if self.width_px == 0 || self.height_px == 0 {
            return fail("width_px", "dimensions are positive");
        }
        if !positive(self.fps) {
            return fail("fps", "fps > 0");
        }
        if !positive(self.session_minutes) {
            return fail("session_minutes", "session_minutes > 0");
        }
        let mut names = std::collections::BTreeSet::new();
        for stage in &self.stages {
            if !names.insert(stage.name.as_str()) {
                return fail("stages", "stage names are unique");
            }
            if stage.reference_soc != self.stages[0].reference_soc {
                return fail("reference_soc", "reference_soc identical across stages");
            }
            if !(0.0..=400.0).contains(&stage.cpu_pct) {
                return fail("cpu_pct", "0 <= cpu_pct <= 400");
            }
            if !(0.0..=400.0).contains(&stage.gpu_pct) {
                return fail("gpu_pct", "0 <= gpu_pct <= 400");
            }
            if stage.ram_gb < 0.0 {
                return fail("ram_gb", "ram_gb >= 0");
            }
            if stage.extra_power_w < 0.0 {
                return fail("extra_power_w", "extra_power_w >= 0");
            }
        }
        Ok(())
    }

    /// Reference SoC shared by all stages, when the scenario has any.
    pub fn reference_soc(&self) -> Option<&str> {
        self.stages.first().map(|s| s.reference_soc.as_str())
    }

    pub fn has_overhead_stage(&self) -> bool {
        self.stages
            .iter()
            .any(|s| s.kind == AccountingKind::Overhead)
    }
}

const SCENARIO_KEYS: &[&str] = &[
    "name",
    "stages",
    "width_px",
    "height_px",
    "fps",
    "mode",
    "session_minutes",
    "live_streaming",
];
const STAGE_KEYS: &[&str] = &[
    "name",
    "cpu_pct",
    "gpu_pct",
    "ram_gb",
    "extra_power_w",
    "kind",
    "pixel_rate_scaled",
    "reference_soc",
];

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str, lenient: bool) -> Result<WorkloadScenario> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        message: e.to_string(),
    })?;
    if !lenient {
        let ctx = value
            .get("name")
            .and_then(Value::as_str)
            .map(|n| format!("scenario `{n}`"))
            .unwrap_or_else(|| "scenario".to_string());
        check_object_keys(&value, SCENARIO_KEYS, &ctx)?;
        if let Some(stages) = value.get("stages").and_then(Value::as_array) {
            for stage in stages {
                check_object_keys(stage, STAGE_KEYS, &ctx)?;
            }
        }
    }
    let scenario: WorkloadScenario = serde_json::from_value(value).map_err(|e| Error::Syntax {
        message: e.to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

/// Serializes a scenario in the same schema [`parse_scenario`] reads.
pub fn serialize_scenario(scenario: &WorkloadScenario) -> String {
    let mut out = serde_json::to_string_pretty(scenario).expect("scenario serializes to JSON");
    out.push('\n');
    out
}
