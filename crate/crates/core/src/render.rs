//! Deterministic report rendering: text table, CSV, JSON and stacked SVG
//! bars. Fixed decimal places (1 for percentages, 2 for watts, GB and
//! minutes, 3 for ratios) keep output byte-stable across runs.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::report::{ComparisonReport, SocRunReport, VerdictKind};
use crate::soc::ResourceKind;
use crate::thermal::ThrottleOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TextTable,
    Csv,
    Json,
    SvgBars,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text-table" | "text" => Ok(ReportFormat::TextTable),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "svg-bars" | "svg" => Ok(ReportFormat::SvgBars),
            other => Err(Error::UnsupportedFormat {
                name: other.to_string(),
            }),
        }
    }
}

/// Renders a comparison report. Output is a pure function of the report:
/// no timestamps, stable ordering, fixed decimals.
pub fn render_report(report: &ComparisonReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::TextTable => render_text(report),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => render_json(report),
        ReportFormat::SvgBars => render_svg(report),
    }
}

fn round_dp(x: f64, dp: i32) -> f64 {
    let p = 10f64.powi(dp);
    let r = (x * p).round() / p;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn throttle_text(outcome: &ThrottleOutcome) -> String {
    match outcome {
        ThrottleOutcome::Sustained => "sustained".to_string(),
        ThrottleOutcome::Throttles { minutes } => format!("throttles after {minutes:.2} min"),
    }
}

fn render_text(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario: {}", report.scenario);
    let _ = writeln!(out, "reference soc: {}", report.reference_soc);
    for row in &report.rows {
        out.push('\n');
        render_text_row(&mut out, row);
    }
    if !report.annotations.is_empty() {
        let _ = writeln!(out, "\nperformance ratios vs {}:", report.reference_soc);
        let _ = writeln!(
            out,
            "  {:<16} {:>10} {:>10} {:>11} {:>8}",
            "soc", "cpu_single", "cpu_multi", "gpu_compute", "mem_bw"
        );
        for row in &report.rows {
            let ratio = |kind: ResourceKind| {
                report
                    .annotations
                    .iter()
                    .find(|a| a.soc == row.soc && a.kind == kind)
                    .map(|a| format!("{:.3}", a.ratio))
                    .unwrap_or_else(|| "n/a".to_string())
            };
            let _ = writeln!(
                out,
                "  {:<16} {:>10} {:>10} {:>11} {:>8}",
                row.soc,
                ratio(ResourceKind::CpuSingle),
                ratio(ResourceKind::CpuMulti),
                ratio(ResourceKind::GpuCompute),
                ratio(ResourceKind::MemBw),
            );
        }
    }
    out
}

fn render_text_row(out: &mut String, row: &SocRunReport) {
    let u = &row.utilization;
    let estimate_mark = if u.is_estimate {
        " (uses estimated benchmark scores)"
    } else {
        ""
    };
    let _ = writeln!(out, "soc: {}{}", row.soc, estimate_mark);
    if let Some(note) = &row.note {
        let _ = writeln!(out, "  note: {note}");
    }
    let _ = writeln!(
        out,
        "  {:<26} {:>7} {:>7} {:>7} {:>7}",
        "stage", "cpu%", "gpu%", "share", "ram_gb"
    );
    for line in &row.stages {
        let _ = writeln!(
            out,
            "  {:<26} {:>7.1} {:>7.1} {:>7.1} {:>7.2}",
            line.stage, line.cpu_pct, line.gpu_pct, line.combined_share, line.ram_gb
        );
    }
    let _ = writeln!(
        out,
        "  {:<26} {:>7.1} {:>7.1} {:>7.1} {:>7.2}",
        "total", u.cpu_total_pct, u.gpu_total_pct, u.combined_total_pct, u.ram_app_visible_gb
    );
    let _ = writeln!(out, "  headroom: {:.1} %", u.headroom_pct);
    let _ = writeln!(
        out,
        "  ram: {:.2} GB used (os {:.2} + app {:.2})",
        u.ram_used_gb, u.ram_os_reserved_gb, u.ram_app_visible_gb
    );
    if !u.over_budget_flags.is_empty() {
        let flags: Vec<String> = u.over_budget_flags.iter().map(|f| format!("{f:?}")).collect();
        let _ = writeln!(out, "  over budget: {}", flags.join(", "));
    }
    let _ = writeln!(
        out,
        "  power: {:.2} W (idle {:.2} + cpu {:.2} + gpu {:.2} + fixed {:.2})",
        row.power.total_w, row.power.idle_w, row.power.cpu_w, row.power.gpu_w, row.power.fixed_w
    );
    let _ = writeln!(out, "  thermal: {}", throttle_text(&row.throttle));
    let reasons = if row.verdict.reasons.is_empty() {
        String::new()
    } else {
        let list: Vec<String> = row.verdict.reasons.iter().map(|r| r.to_string()).collect();
        format!(" [{}]", list.join(", "))
    };
    let _ = writeln!(out, "  verdict: {}{}", row.verdict.kind, reasons);
}

fn render_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("soc");
    if let Some(first) = report.rows.first() {
        for (name, _) in &first.utilization.combined_shares {
            let _ = write!(out, ",{name}");
        }
    }
    out.push_str(
        ",combined_total,headroom,cpu_total,gpu_total,power_w,\
         ratio_cpu_single,ratio_cpu_multi,ratio_gpu_compute,ratio_mem_bw,verdict,reasons\n",
    );
    for row in &report.rows {
        let u = &row.utilization;
        let _ = write!(out, "{}", row.soc);
        for (_, share) in &u.combined_shares {
            let _ = write!(out, ",{share:.1}");
        }
        let _ = write!(
            out,
            ",{:.1},{:.1},{:.1},{:.1},{:.2}",
            u.combined_total_pct, u.headroom_pct, u.cpu_total_pct, u.gpu_total_pct, row.power.total_w
        );
        for kind in [
            ResourceKind::CpuSingle,
            ResourceKind::CpuMulti,
            ResourceKind::GpuCompute,
            ResourceKind::MemBw,
        ] {
            let ratio = report
                .annotations
                .iter()
                .find(|a| a.soc == row.soc && a.kind == kind)
                .map(|a| format!("{:.3}", a.ratio))
                .unwrap_or_default();
            let _ = write!(out, ",{ratio}");
        }
        let reasons: Vec<String> = row.verdict.reasons.iter().map(|r| r.to_string()).collect();
        let _ = writeln!(out, ",{},{}", row.verdict.kind, reasons.join(";"));
    }
    out
}

fn render_json(report: &ComparisonReport) -> String {
    let mut rounded = report.clone();
    for row in &mut rounded.rows {
        for line in &mut row.stages {
            line.cpu_pct = round_dp(line.cpu_pct, 1);
            line.gpu_pct = round_dp(line.gpu_pct, 1);
            line.combined_share = round_dp(line.combined_share, 1);
            line.ram_gb = round_dp(line.ram_gb, 2);
        }
        let u = &mut row.utilization;
        u.cpu_total_pct = round_dp(u.cpu_total_pct, 1);
        u.gpu_total_pct = round_dp(u.gpu_total_pct, 1);
        for (_, share) in &mut u.combined_shares {
            *share = round_dp(*share, 1);
        }
        u.combined_total_pct = round_dp(u.combined_total_pct, 1);
        u.headroom_pct = round_dp(u.headroom_pct, 1);
        u.ram_used_gb = round_dp(u.ram_used_gb, 2);
        u.ram_os_reserved_gb = round_dp(u.ram_os_reserved_gb, 2);
        u.ram_app_visible_gb = round_dp(u.ram_app_visible_gb, 2);
        row.power.idle_w = round_dp(row.power.idle_w, 2);
        row.power.cpu_w = round_dp(row.power.cpu_w, 2);
        row.power.gpu_w = round_dp(row.power.gpu_w, 2);
        row.power.fixed_w = round_dp(row.power.fixed_w, 2);
        row.power.total_w = round_dp(row.power.total_w, 2);
        if let ThrottleOutcome::Throttles { minutes } = &mut row.throttle {
            *minutes = round_dp(*minutes, 2);
        }
        if let VerdictKind::BurstFeasible { minutes } = &mut row.verdict.kind {
            *minutes = round_dp(*minutes, 2);
        }
        for reason in &mut row.verdict.reasons {
            if let crate::report::VerdictReason::ThermalLimited { minutes } = reason {
                *minutes = round_dp(*minutes, 2);
            }
        }
    }
    for annotation in &mut rounded.annotations {
        annotation.ratio = round_dp(annotation.ratio, 3);
    }
    let mut out = serde_json::to_string_pretty(&rounded).expect("report serializes to JSON");
    out.push('\n');
    out
}

/// Stable palette for stage segments; headroom is always the trailing
/// gray segment.
const PALETTE: [&str; 8] = [
    "#4c78a8", "#f58518", "#54a24b", "#b279a2", "#e45756", "#72b7b2", "#eeca3b", "#9d755d",
];
const HEADROOM_COLOR: &str = "#d3d3d3";

fn css_class(stage: &str) -> String {
    stage
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// One horizontal stacked bar per SoC: a segment per accounted stage plus
/// the headroom segment, on a 1000-wide viewBox.
fn render_svg(report: &ComparisonReport) -> String {
    const LABEL_W: f64 = 150.0;
    const BAR_W: f64 = 830.0;
    const BAR_H: f64 = 28.0;
    const GROUP_H: f64 = 44.0;
    const TOP: f64 = 34.0;

    let stage_names: Vec<&str> = report
        .rows
        .first()
        .map(|row| {
            row.utilization
                .combined_shares
                .iter()
                .map(|(name, _)| name.as_str())
                .collect()
        })
        .unwrap_or_default();
    let max_total = report
        .rows
        .iter()
        .map(|r| r.utilization.combined_total_pct)
        .fold(100.0, f64::max);
    let scale = BAR_W / max_total;
    let height = TOP + report.rows.len() as f64 * GROUP_H + 10.0;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 {height:.0}\" \
         font-family=\"sans-serif\" font-size=\"12\">"
    );
    out.push_str("<style>\n");
    for (i, name) in stage_names.iter().enumerate() {
        let _ = writeln!(
            out,
            ".{} {{ fill: {}; }}",
            css_class(name),
            PALETTE[i % PALETTE.len()]
        );
    }
    let _ = writeln!(out, ".headroom {{ fill: {HEADROOM_COLOR}; }}");
    out.push_str("</style>\n");
    let _ = writeln!(
        out,
        "<text x=\"8\" y=\"18\">{}: combined budget by stage (%)</text>",
        xml_escape(&report.scenario)
    );

    for (i, row) in report.rows.iter().enumerate() {
        let y = TOP + i as f64 * GROUP_H;
        let _ = writeln!(out, "<g class=\"bar-group\" id=\"{}\">", xml_escape(&row.soc));
        let _ = writeln!(
            out,
            "<text x=\"8\" y=\"{:.1}\">{}</text>",
            y + BAR_H / 2.0 + 4.0,
            xml_escape(&row.soc)
        );
        let mut x = LABEL_W;
        for (name, share) in &row.utilization.combined_shares {
            let w = (share.max(0.0)) * scale;
            let _ = writeln!(
                out,
                "<rect class=\"{}\" x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.0}\"/>",
                css_class(name),
                x,
                y,
                w,
                BAR_H
            );
            x += w;
        }
        let headroom_w = row.utilization.headroom_pct.max(0.0) * scale;
        let _ = writeln!(
            out,
            "<rect class=\"headroom\" x=\"{:.1}\" y=\"{:.1}\" width=\"{:.1}\" height=\"{:.0}\"/>",
            x, y, headroom_w, BAR_H
        );
        let _ = writeln!(
            out,
            "<text x=\"{:.1}\" y=\"{:.1}\">headroom {:.1}%</text>",
            x + headroom_w + 6.0,
            y + BAR_H / 2.0 + 4.0,
            row.utilization.headroom_pct
        );
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::builtin_profiles;
    use crate::report::compare;
    use crate::workload::default_mr_scenario;

    fn default_comparison() -> ComparisonReport {
        let registry = builtin_profiles();
        let names = vec!["xr2-gen2".to_string(), "sd8-gen3".to_string()];
        compare(&default_mr_scenario(), &names, &registry).unwrap()
    }

    #[test]
    fn format_names_parse() {
        assert_eq!("text-table".parse::<ReportFormat>().unwrap(), ReportFormat::TextTable);
        assert_eq!("csv".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert_eq!("json".parse::<ReportFormat>().unwrap(), ReportFormat::Json);
        assert_eq!("svg-bars".parse::<ReportFormat>().unwrap(), ReportFormat::SvgBars);
        assert!(matches!(
            "yaml".parse::<ReportFormat>(),
            Err(Error::UnsupportedFormat { name }) if name == "yaml"
        ));
    }

    #[test]
    fn rendering_is_deterministic() {
        let report = default_comparison();
        for format in [
            ReportFormat::TextTable,
            ReportFormat::Csv,
            ReportFormat::Json,
            ReportFormat::SvgBars,
        ] {
            assert_eq!(render_report(&report, format), render_report(&report, format));
        }
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let report = default_comparison();
        let first = render_report(&report, ReportFormat::Json);
        let parsed: ComparisonReport = serde_json::from_str(&first).unwrap();
        let second = render_report(&parsed, ReportFormat::Json);
        assert_eq!(first, second);
    }

    #[test]
    fn csv_headrooms_match_report() {
        let report = default_comparison();
        let csv = render_report(&report, ReportFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with(
            "soc,passthrough,avatar_scene,segmentation,composite_encode,combined_total,headroom"
        ));
        let xr2: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(xr2[0], "xr2-gen2");
        assert_eq!(xr2[1..5], ["12.5", "32.5", "22.5", "27.5"]);
        assert_eq!(xr2[5], "95.0");
        assert_eq!(xr2[6], "5.0");
        let g3: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(g3[6], "33.7");
        assert_eq!(g3[11], "1.847");
    }

    #[test]
    fn svg_has_one_group_per_soc_and_a_segment_per_stage_plus_headroom() {
        let report = default_comparison();
        let svg = render_report(&report, ReportFormat::SvgBars);
        assert_eq!(svg.matches("<g class=\"bar-group\"").count(), 2);
        assert_eq!(svg.matches("<rect ").count(), 2 * 5);
        assert!(svg.contains("viewBox=\"0 0 1000 "));
        assert!(svg.contains("class=\"composite_encode\""));
    }
}
