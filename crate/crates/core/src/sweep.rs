//! Batch what-if evaluation: resolution / frame-rate / SoC grids.
//!
//! Each grid cell is independent, so the sweep fans out on the rayon pool
//! when the `parallel` feature is enabled.

use crate::error::Result;
use crate::par;
use crate::registry::SocRegistry;
use crate::report::{evaluate, SocRunReport};
use crate::workload::{rescale_resolution, WorkloadScenario};

/// One what-if cell: an output target and the chip to run it on.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub width_px: u32,
    pub height_px: u32,
    pub fps: f64,
    pub soc: String,
}

/// Evaluates one cell of the grid.
pub fn evaluate_point(
    base: &WorkloadScenario,
    point: &SweepPoint,
    registry: &SocRegistry,
) -> Result<SocRunReport> {
    let rescaled = rescale_resolution(base, point.width_px, point.height_px, point.fps);
    evaluate(&rescaled, &point.soc, registry)
}

/// Evaluates every cell, preserving input order.
pub fn feasibility_grid(
    base: &WorkloadScenario,
    points: &[SweepPoint],
    registry: &SocRegistry,
) -> Result<Vec<SocRunReport>> {
    par::map_slice(points, |point| evaluate_point(base, point, registry))
        .into_iter()
        .collect()
}
