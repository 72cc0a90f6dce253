//! SoC hardware profiles and benchmark-ratio capability queries.
//!
//! A [`SocProfile`] captures everything the simulator needs to know about a
//! chip: CPU clusters, GPU compute, memory bandwidth, RAM budgets, the TDP
//! envelope, public benchmark scores and the lumped thermal parameters.
//! Cross-SoC performance ratios are derived from the benchmark scores via
//! [`perf_ratio`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One homogeneous CPU cluster (same core type, same clock).
///
/// Clusters are stored for documentation and future scheduling models; the
/// default scaling model works from benchmark scores instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CpuCluster {
    pub core_name: String,
    pub count: u32,
    pub clock_ghz: f64,
}

/// Integrated GPU identity and raw compute capability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpuSpec {
    pub name: String,
    pub clock_mhz: f64,
    pub gflops: f64,
}

/// Public benchmark scores used to derive cross-SoC performance ratios.
///
/// `estimated` lists the fields whose values are estimates rather than
/// published measurements; any operation that consumes an estimated field
/// propagates an `is_estimate` marker into its report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkScores {
    pub geekbench6_single: f64,
    pub geekbench6_multi: f64,
    pub antutu10: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gfxbench_aztec_1080p_fps: Option<f64>,
    #[serde(default)]
    pub estimated: BTreeSet<String>,
}

/// Lumped single-node thermal model parameters plus the power-split
/// calibration used to convert utilization into watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    pub thermal_resistance_k_per_w: f64,
    pub thermal_capacitance_j_per_k: f64,
    pub ambient_c: f64,
    pub throttle_temp_c: f64,
    pub idle_power_w: f64,
    pub cpu_max_power_w: f64,
    pub gpu_max_power_w: f64,
}

/// A chip's full capacity description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SocProfile {
    pub name: String,
    pub process_node: String,
    pub cpu_clusters: Vec<CpuCluster>,
    pub gpu: GpuSpec,
    pub memory_bandwidth_gbps: f64,
    pub tdp_sustained_w: f64,
    pub tdp_peak_w: f64,
    pub total_ram_gb: f64,
    pub dev_accessible_ram_gb: f64,
    pub benchmarks: BenchmarkScores,
    pub thermal: ThermalParams,
    /// Relative fixed-function encoder draw of this SoC (1.0 = same as the
    /// reference generation; below 1.0 means more efficient encoding units).
    #[serde(default = "default_encoder_efficiency")]
    pub encoder_efficiency: f64,
}

fn default_encoder_efficiency() -> f64 {
    1.0
}

/// Capability axes a performance ratio can be taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResourceKind {
    CpuSingle,
    CpuMulti,
    GpuCompute,
    GpuRaster,
    MemBw,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 5] = [
        ResourceKind::CpuSingle,
        ResourceKind::CpuMulti,
        ResourceKind::GpuCompute,
        ResourceKind::GpuRaster,
        ResourceKind::MemBw,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ResourceKind::CpuSingle => "cpu_single",
            ResourceKind::CpuMulti => "cpu_multi",
            ResourceKind::GpuCompute => "gpu_compute",
            ResourceKind::GpuRaster => "gpu_raster",
            ResourceKind::MemBw => "mem_bw",
        }
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The capability number behind a [`ResourceKind`] plus whether it is an
/// estimated value.
pub(crate) fn capability(profile: &SocProfile, kind: ResourceKind) -> Result<(f64, bool)> {
    let flagged = |field: &str| profile.benchmarks.estimated.contains(field);
    match kind {
        ResourceKind::CpuSingle => Ok((
            profile.benchmarks.geekbench6_single,
            flagged("geekbench6_single"),
        )),
        ResourceKind::CpuMulti => Ok((
            profile.benchmarks.geekbench6_multi,
            flagged("geekbench6_multi"),
        )),
        ResourceKind::GpuCompute => Ok((profile.gpu.gflops, false)),
        ResourceKind::GpuRaster => profile
            .benchmarks
            .gfxbench_aztec_1080p_fps
            .map(|fps| (fps, flagged("gfxbench_aztec_1080p_fps")))
            .ok_or_else(|| Error::MissingBenchmark {
                soc: profile.name.clone(),
                kind,
            }),
        ResourceKind::MemBw => Ok((profile.memory_bandwidth_gbps, false)),
    }
}

/// Ratio of `a`'s capability to `b`'s along the given axis.
///
/// Satisfies reciprocity (`perf_ratio(a,b,k) * perf_ratio(b,a,k) = 1`) and
/// transitivity within floating-point rounding.
pub fn perf_ratio(a: &SocProfile, b: &SocProfile, kind: ResourceKind) -> Result<f64> {
    Ok(perf_ratio_flagged(a, b, kind)?.0)
}

/// Like [`perf_ratio`], additionally reporting whether an estimated
/// benchmark field was consumed on either side.
pub fn perf_ratio_flagged(a: &SocProfile, b: &SocProfile, kind: ResourceKind) -> Result<(f64, bool)> {
    let (ca, ea) = capability(a, kind)?;
    let (cb, eb) = capability(b, kind)?;
    Ok((ca / cb, ea || eb))
}

impl CpuCluster {
    pub(crate) fn validate(&self, context: &str) -> Result<()> {
        if self.count < 1 {
            return invariant(context, "count", "count >= 1");
        }
        if !(0.5..=5.0).contains(&self.clock_ghz) {
            return invariant(context, "clock_ghz", "0.5 <= clock_ghz <= 5.0");
        }
        Ok(())
    }
}

impl GpuSpec {
    pub(crate) fn validate(&self, context: &str) -> Result<()> {
        if !positive(self.gflops) {
            return invariant(context, "gflops", "gflops > 0");
        }
        if !positive(self.clock_mhz) {
            return invariant(context, "clock_mhz", "clock_mhz > 0");
        }
        Ok(())
    }
}

impl BenchmarkScores {
    const FIELD_NAMES: [&'static str; 4] = [
        "geekbench6_single",
        "geekbench6_multi",
        "antutu10",
        "gfxbench_aztec_1080p_fps",
    ];

    pub(crate) fn validate(&self, context: &str) -> Result<()> {
        if !positive(self.geekbench6_single) {
            return invariant(context, "geekbench6_single", "geekbench6_single > 0");
        }
        if !positive(self.geekbench6_multi) {
            return invariant(context, "geekbench6_multi", "geekbench6_multi > 0");
        }
        if self.geekbench6_multi < self.geekbench6_single {
            return invariant(
                context,
                "geekbench6_multi",
                "geekbench6_multi >= geekbench6_single",
            );
        }
        if !positive(self.antutu10) {
            return invariant(context, "antutu10", "antutu10 > 0");
        }
        if let Some(fps) = self.gfxbench_aztec_1080p_fps {
            if !positive(fps) {
                return invariant(
                    context,
                    "gfxbench_aztec_1080p_fps",
                    "gfxbench_aztec_1080p_fps > 0",
                );
            }
        }
        for name in &self.estimated {
            if !Self::FIELD_NAMES.contains(&name.as_str()) {
                return invariant(context, "estimated", "estimated names an existing field");
            }
        }
        Ok(())
    }
}

impl ThermalParams {
    pub(crate) fn validate(&self, context: &str) -> Result<()> {
        if !positive(self.thermal_resistance_k_per_w) {
            return invariant(
                context,
                "thermal_resistance_k_per_w",
                "thermal_resistance_k_per_w > 0",
            );
        }
        if !positive(self.thermal_capacitance_j_per_k) {
            return invariant(
                context,
                "thermal_capacitance_j_per_k",
                "thermal_capacitance_j_per_k > 0",
            );
        }
        if self.throttle_temp_c <= self.ambient_c {
            return invariant(context, "throttle_temp_c", "throttle_temp_c > ambient_c");
        }
        if self.idle_power_w < 0.0 {
            return invariant(context, "idle_power_w", "idle_power_w >= 0");
        }
        if !positive(self.cpu_max_power_w) {
            return invariant(context, "cpu_max_power_w", "cpu_max_power_w > 0");
        }
        if !positive(self.gpu_max_power_w) {
            return invariant(context, "gpu_max_power_w", "gpu_max_power_w > 0");
        }
        if self.idle_power_w >= self.cpu_max_power_w + self.gpu_max_power_w {
            return invariant(
                context,
                "idle_power_w",
                "idle_power_w < cpu_max_power_w + gpu_max_power_w",
            );
        }
        Ok(())
    }
}

impl SocProfile {
    /// Checks every type invariant, returning the first violation.
    pub fn validate(&self) -> Result<()> {
        let ctx = if self.name.is_empty() {
            "profile".to_string()
        } else {
            format!("profile `{}`", self.name)
        };
        if self.name.is_empty() {
            return invariant(&ctx, "name", "name is non-empty");
        }
        for cluster in &self.cpu_clusters {
            cluster.validate(&ctx)?;
        }
        self.gpu.validate(&ctx)?;
        if !positive(self.memory_bandwidth_gbps) {
            return invariant(&ctx, "memory_bandwidth_gbps", "memory_bandwidth_gbps > 0");
        }
        if !positive(self.tdp_sustained_w) {
            return invariant(&ctx, "tdp_sustained_w", "tdp_sustained_w > 0");
        }
        if self.tdp_peak_w < self.tdp_sustained_w {
            return invariant(&ctx, "tdp_peak_w", "tdp_peak_w >= tdp_sustained_w");
        }
        if !positive(self.total_ram_gb) {
            return invariant(&ctx, "total_ram_gb", "total_ram_gb > 0");
        }
        if !positive(self.dev_accessible_ram_gb) {
            return invariant(&ctx, "dev_accessible_ram_gb", "dev_accessible_ram_gb > 0");
        }
        if self.dev_accessible_ram_gb > self.total_ram_gb {
            return invariant(
                &ctx,
                "dev_accessible_ram_gb",
                "dev_accessible_ram_gb <= total_ram_gb",
            );
        }
        if !positive(self.encoder_efficiency) {
            return invariant(&ctx, "encoder_efficiency", "encoder_efficiency > 0");
        }
        self.benchmarks.validate(&ctx)?;
        self.thermal.validate(&ctx)?;
        Ok(())
    }
}

/// Strictly positive and not NaN.
pub(crate) fn positive(x: f64) -> bool {
    x > 0.0
}

fn invariant<T>(context: &str, field: &str, invariant: &str) -> Result<T> {
    Err(Error::Validation {
        context: context.to_string(),
        field: field.to_string(),
        invariant: invariant.to_string(),
    })
}

fn cluster(core_name: &str, count: u32, clock_ghz: f64) -> CpuCluster {
    CpuCluster {
        core_name: core_name.to_string(),
        count,
        clock_ghz,
    }
}

/// The Quest 3 class XR chip: tight passive-cooling envelope, estimated
/// CPU benchmark scores (no public phone-style submissions exist).
pub(crate) fn builtin_xr2_gen2() -> SocProfile {
    SocProfile {
        name: "xr2-gen2".to_string(),
        process_node: "4 nm (TSMC)".to_string(),
        cpu_clusters: vec![
            cluster("Cortex-X3", 1, 2.84),
            cluster("Cortex-A715", 4, 2.8),
            cluster("Cortex-A510", 3, 2.0),
        ],
        gpu: GpuSpec {
            name: "Adreno 740".to_string(),
            clock_mhz: 680.0,
            gflops: 2089.0,
        },
        memory_bandwidth_gbps: 64.0,
        tdp_sustained_w: 5.0,
        tdp_peak_w: 10.0,
        total_ram_gb: 8.0,
        dev_accessible_ram_gb: 5.75,
        benchmarks: BenchmarkScores {
            geekbench6_single: 1350.0,
            geekbench6_multi: 4250.0,
            antutu10: 1_500_000.0,
            gfxbench_aztec_1080p_fps: Some(120.0),
            estimated: [
                "geekbench6_single".to_string(),
                "geekbench6_multi".to_string(),
                "gfxbench_aztec_1080p_fps".to_string(),
            ]
            .into_iter()
            .collect(),
        },
        thermal: ThermalParams {
            thermal_resistance_k_per_w: 3.0,
            thermal_capacitance_j_per_k: 119.0,
            ambient_c: 25.0,
            throttle_temp_c: 45.0,
            idle_power_w: 1.0,
            cpu_max_power_w: 3.5,
            gpu_max_power_w: 4.5,
        },
        encoder_efficiency: 1.0,
    }
}

pub(crate) fn builtin_sd8_gen3() -> SocProfile {
    SocProfile {
        name: "sd8-gen3".to_string(),
        process_node: "4 nm (TSMC)".to_string(),
        cpu_clusters: vec![
            cluster("Cortex-X4", 1, 3.3),
            cluster("Cortex-A720", 3, 3.15),
            cluster("Cortex-A520", 2, 2.27),
        ],
        gpu: GpuSpec {
            name: "Adreno 750".to_string(),
            clock_mhz: 950.0,
            gflops: 2774.0,
        },
        memory_bandwidth_gbps: 76.8,
        tdp_sustained_w: 8.0,
        tdp_peak_w: 12.0,
        total_ram_gb: 12.0,
        dev_accessible_ram_gb: 9.75,
        benchmarks: BenchmarkScores {
            geekbench6_single: 2200.0,
            geekbench6_multi: 7850.0,
            antutu10: 2_000_000.0,
            gfxbench_aztec_1080p_fps: Some(241.0),
            estimated: BTreeSet::new(),
        },
        thermal: ThermalParams {
            thermal_resistance_k_per_w: 2.5,
            thermal_capacitance_j_per_k: 140.0,
            ambient_c: 25.0,
            throttle_temp_c: 45.0,
            idle_power_w: 1.0,
            cpu_max_power_w: 3.5,
            gpu_max_power_w: 4.5,
        },
        // More efficient fixed-function encoding units than the XR2 class.
        encoder_efficiency: 0.73,
    }
}

pub(crate) fn builtin_dimensity_9300() -> SocProfile {
    SocProfile {
        name: "dimensity-9300".to_string(),
        process_node: "4 nm (TSMC)".to_string(),
        cpu_clusters: vec![
            cluster("Cortex-X4", 1, 3.25),
            cluster("Cortex-A720", 3, 2.85),
            cluster("Cortex-A720", 4, 2.0),
        ],
        gpu: GpuSpec {
            name: "Mali-G720 Immortalis MP12".to_string(),
            clock_mhz: 1300.0,
            gflops: 3994.0,
        },
        memory_bandwidth_gbps: 76.8,
        tdp_sustained_w: 7.0,
        tdp_peak_w: 10.5,
        total_ram_gb: 12.0,
        dev_accessible_ram_gb: 9.75,
        benchmarks: BenchmarkScores {
            geekbench6_single: 2225.0,
            geekbench6_multi: 7857.0,
            antutu10: 2_070_000.0,
            gfxbench_aztec_1080p_fps: None,
            estimated: BTreeSet::new(),
        },
        thermal: ThermalParams {
            thermal_resistance_k_per_w: 2.5,
            thermal_capacitance_j_per_k: 140.0,
            ambient_c: 25.0,
            throttle_temp_c: 45.0,
            idle_power_w: 1.0,
            cpu_max_power_w: 3.5,
            gpu_max_power_w: 4.5,
        },
        encoder_efficiency: 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_pass_invariants() {
        for p in [builtin_xr2_gen2(), builtin_sd8_gen3(), builtin_dimensity_9300()] {
            p.validate().unwrap();
        }
    }

    #[test]
    fn headline_builtin_values() {
        let xr2 = builtin_xr2_gen2();
        assert_eq!(xr2.gpu.gflops, 2089.0);
        assert_eq!(xr2.memory_bandwidth_gbps, 64.0);
        assert_eq!(xr2.tdp_sustained_w, 5.0);
        assert_eq!(xr2.tdp_peak_w, 10.0);
        assert_eq!(xr2.total_ram_gb, 8.0);
        assert_eq!(xr2.dev_accessible_ram_gb, 5.75);

        let g3 = builtin_sd8_gen3();
        assert_eq!(g3.benchmarks.geekbench6_multi, 7850.0);
        assert_eq!(g3.gpu.gflops, 2774.0);
        assert_eq!(g3.memory_bandwidth_gbps, 76.8);
        assert_eq!(g3.tdp_sustained_w, 8.0);

        let d93 = builtin_dimensity_9300();
        assert_eq!(d93.gpu.gflops, 3994.0);
        assert_eq!(d93.tdp_sustained_w, 7.0);
        assert!(d93.benchmarks.gfxbench_aztec_1080p_fps.is_none());
    }

    #[test]
    fn perf_ratio_identity_and_bandwidth() {
        let xr2 = builtin_xr2_gen2();
        let g3 = builtin_sd8_gen3();
        for kind in ResourceKind::ALL {
            assert_eq!(perf_ratio(&xr2, &xr2, kind).unwrap(), 1.0);
        }
        assert!((perf_ratio(&g3, &xr2, ResourceKind::MemBw).unwrap() - 1.2).abs() < 1e-12);
        let multi = perf_ratio(&g3, &xr2, ResourceKind::CpuMulti).unwrap();
        assert!((multi - 7850.0 / 4250.0).abs() < 1e-12);
    }

    #[test]
    fn missing_raster_benchmark_is_an_error() {
        let d93 = builtin_dimensity_9300();
        let xr2 = builtin_xr2_gen2();
        match perf_ratio(&d93, &xr2, ResourceKind::GpuRaster) {
            Err(Error::MissingBenchmark { soc, kind }) => {
                assert_eq!(soc, "dimensity-9300");
                assert_eq!(kind, ResourceKind::GpuRaster);
            }
            other => panic!("expected MissingBenchmark, got {other:?}"),
        }
    }

    #[test]
    fn estimated_fields_flag_ratios() {
        let xr2 = builtin_xr2_gen2();
        let g3 = builtin_sd8_gen3();
        let (_, est) = perf_ratio_flagged(&g3, &xr2, ResourceKind::CpuSingle).unwrap();
        assert!(est);
        let (_, est) = perf_ratio_flagged(&g3, &xr2, ResourceKind::GpuCompute).unwrap();
        assert!(!est);
    }

    #[test]
    fn invariant_violations_name_the_field() {
        let mut p = builtin_xr2_gen2();
        p.tdp_peak_w = 4.0;
        p.tdp_sustained_w = 6.0;
        match p.validate() {
            Err(Error::Validation { field, invariant, .. }) => {
                assert_eq!(field, "tdp_peak_w");
                assert_eq!(invariant, "tdp_peak_w >= tdp_sustained_w");
            }
            other => panic!("expected Validation, got {other:?}"),
        }

        let mut p = builtin_xr2_gen2();
        p.benchmarks.estimated.insert("no_such_field".to_string());
        assert!(matches!(p.validate(), Err(Error::Validation { field, .. }) if field == "estimated"));
    }
}
