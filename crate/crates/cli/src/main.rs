//! Command-line front end: profile ingestion, simulation, comparison,
//! throttle prediction and report export.
//!
//! Exit codes for `simulate` encode the verdict so scripts can branch on
//! it: 0 sustained-feasible, 2 burst-feasible, 3 infeasible, 1 usage or
//! I/O error. All other subcommands exit 0 on success and 1 on error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use xrheadroom::{
    builtin_profiles, compare, default_mr_scenario, evaluate, parse_profile_document,
    parse_scenario, render_report, rescale_resolution, stage_csv, time_to_throttle, trace_csv,
    temp_trajectory, ComparisonReport, ReportFormat, SocRegistry, ThrottleOutcome, VerdictKind,
    WorkloadScenario,
};

const PROFILE_PATH_ENV: &str = "XRHEADROOM_PROFILE_PATH";

#[derive(Parser)]
#[command(
    name = "xrheadroom",
    version,
    about = "Resource, power and thermal headroom simulator for MR compositing pipelines on ARM SoCs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List builtin and loaded SoC profiles with key specs.
    ListSocs(LoadArgs),
    /// Evaluate a scenario on one SoC; the exit code encodes the verdict.
    Simulate(SimulateArgs),
    /// Evaluate a scenario across several SoCs side by side.
    Compare(CompareArgs),
    /// Predict time to thermal throttling, optionally exporting the
    /// temperature trace as CSV.
    Throttle(ThrottleArgs),
    /// Render the comparison report in a chosen document format.
    Export(CompareArgs),
}

#[derive(Args)]
struct LoadArgs {
    /// Additional profile JSON files (merged after builtins).
    #[arg(long = "profiles", value_name = "FILE")]
    profiles: Vec<PathBuf>,
    /// Accept unknown fields in profile and scenario files.
    #[arg(long)]
    lenient: bool,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file (defaults to the built-in 720p30 MR workload).
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,
    /// Override output resolution, e.g. 1920x1080.
    #[arg(long, value_name = "WxH", value_parser = parse_resolution)]
    resolution: Option<(u32, u32)>,
    /// Override output frame rate.
    #[arg(long, value_name = "N")]
    fps: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format: text-table, csv, json or svg-bars.
    #[arg(long, default_value = "text-table")]
    format: String,
    /// Write the document to a file instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Prepend a generation timestamp (off by default so identical
    /// invocations produce byte-identical documents).
    #[arg(long)]
    stamp: bool,
}

#[derive(Args)]
struct SimulateArgs {
    /// Target SoC profile name.
    #[arg(long, default_value = "xr2-gen2")]
    soc: String,
    #[command(flatten)]
    load: LoadArgs,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Comma-separated SoC names to compare.
    #[arg(
        long = "socs",
        value_delimiter = ',',
        default_value = "xr2-gen2,sd8-gen3"
    )]
    socs: Vec<String>,
    #[command(flatten)]
    load: LoadArgs,
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ThrottleArgs {
    /// Target SoC profile name.
    #[arg(long, default_value = "xr2-gen2")]
    soc: String,
    /// Constant power draw in watts; computed from the scenario when
    /// omitted.
    #[arg(long, value_name = "W")]
    power: Option<f64>,
    /// Trace duration in minutes (defaults to the scenario session).
    #[arg(long, value_name = "MIN")]
    duration_minutes: Option<f64>,
    /// Trace sample step in seconds.
    #[arg(long, value_name = "S", default_value_t = 1.0)]
    timestep_s: f64,
    /// Write the temperature trace (time_s,temp_c) to a CSV file.
    #[arg(long, value_name = "PATH")]
    trace_out: Option<PathBuf>,
    #[command(flatten)]
    load: LoadArgs,
    #[command(flatten)]
    scenario: ScenarioArgs,
}

fn parse_resolution(value: &str) -> Result<(u32, u32), String> {
    let (w, h) = value
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("`{value}` is not WxH"))?;
    let width: u32 = w.trim().parse().map_err(|_| format!("bad width in `{value}`"))?;
    let height: u32 = h.trim().parse().map_err(|_| format!("bad height in `{value}`"))?;
    if width == 0 || height == 0 {
        return Err(format!("`{value}` must have positive dimensions"));
    }
    Ok((width, height))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::ListSocs(load) => {
            let registry = load_registry(&load)?;
            print!("{}", list_socs_table(&registry));
            Ok(0)
        }
        Command::Simulate(args) => cmd_simulate(args),
        Command::Compare(args) | Command::Export(args) => cmd_compare(args),
        Command::Throttle(args) => cmd_throttle(args),
    }
}

/// Builtins, then files from XRHEADROOM_PROFILE_PATH, then --profiles, in
/// that order.
fn load_registry(load: &LoadArgs) -> Result<SocRegistry> {
    let mut registry = builtin_profiles();
    let mut paths = Vec::new();
    if let Ok(env_paths) = std::env::var(PROFILE_PATH_ENV) {
        for entry in env_paths.split(':').filter(|e| !e.is_empty()) {
            paths.extend(expand_profile_path(Path::new(entry))?);
        }
    }
    paths.extend(load.profiles.iter().cloned());
    for path in paths {
        let text = fs::read_to_string(&path)
            .with_context(|| format!("cannot read profile file {}", path.display()))?;
        let doc = parse_profile_document(&text, load.lenient)
            .with_context(|| format!("in profile file {}", path.display()))?;
        registry.merge_document(&doc)?;
    }
    Ok(registry)
}

/// A search-path entry is either a profile file or a directory of *.json
/// files (loaded in name order).
fn expand_profile_path(entry: &Path) -> Result<Vec<PathBuf>> {
    if entry.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(entry)
            .with_context(|| format!("cannot read profile directory {}", entry.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        Ok(files)
    } else {
        Ok(vec![entry.to_path_buf()])
    }
}

fn load_scenario(args: &ScenarioArgs, lenient: bool) -> Result<WorkloadScenario> {
    let mut scenario = match &args.scenario {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read scenario file {}", path.display()))?;
            parse_scenario(&text, lenient)
                .with_context(|| format!("in scenario file {}", path.display()))?
        }
        None => default_mr_scenario(),
    };
    if let Some(fps) = args.fps {
        anyhow::ensure!(fps > 0.0, "--fps must be positive");
    }
    if args.resolution.is_some() || args.fps.is_some() {
        let (width, height) = args
            .resolution
            .unwrap_or((scenario.width_px, scenario.height_px));
        let fps = args.fps.unwrap_or(scenario.fps);
        scenario = rescale_resolution(&scenario, width, height, fps);
    }
    Ok(scenario)
}

fn emit(document: &str, output: &OutputArgs, format: ReportFormat) -> Result<()> {
    let mut text = String::new();
    if output.stamp {
        let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
        match format {
            ReportFormat::TextTable | ReportFormat::Csv => {
                text.push_str(&format!("# generated: {now}\n"));
            }
            ReportFormat::SvgBars => text.push_str(&format!("<!-- generated: {now} -->\n")),
            // JSON stays a pure document; the stamp would break parsers.
            ReportFormat::Json => {}
        }
    }
    text.push_str(document);
    match &output.out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write output file {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8> {
    let registry = load_registry(&args.load)?;
    let scenario = load_scenario(&args.scenario, args.load.lenient)?;
    let format: ReportFormat = args.output.format.parse()?;
    let row = evaluate(&scenario, &args.soc, &registry)?;

    let document = match format {
        // Single-SoC csv is the per-stage breakdown.
        ReportFormat::Csv => stage_csv(&row.stages, &row.utilization),
        _ => {
            let report = ComparisonReport {
                scenario: scenario.name.clone(),
                reference_soc: scenario
                    .reference_soc()
                    .unwrap_or(args.soc.as_str())
                    .to_string(),
                rows: vec![row.clone()],
                annotations: Vec::new(),
            };
            render_report(&report, format)
        }
    };
    emit(&document, &args.output, format)?;

    Ok(match row.verdict.kind {
        VerdictKind::SustainedFeasible => 0,
        VerdictKind::BurstFeasible { .. } => 2,
        VerdictKind::Infeasible => 3,
    })
}

fn cmd_compare(args: CompareArgs) -> Result<u8> {
    let registry = load_registry(&args.load)?;
    let scenario = load_scenario(&args.scenario, args.load.lenient)?;
    let format: ReportFormat = args.output.format.parse()?;
    let report = compare(&scenario, &args.socs, &registry)?;
    emit(&render_report(&report, format), &args.output, format)?;
    Ok(0)
}

fn cmd_throttle(args: ThrottleArgs) -> Result<u8> {
    anyhow::ensure!(args.timestep_s > 0.0, "--timestep-s must be positive");
    if let Some(minutes) = args.duration_minutes {
        anyhow::ensure!(minutes > 0.0, "--duration-minutes must be positive");
    }
    if let Some(power) = args.power {
        anyhow::ensure!(power >= 0.0, "--power must be non-negative");
    }
    let registry = load_registry(&args.load)?;
    let scenario = load_scenario(&args.scenario, args.load.lenient)?;
    let soc = registry.resolve(&args.soc)?;
    let power = match args.power {
        Some(power) => power,
        None => evaluate(&scenario, &args.soc, &registry)?.power.total_w,
    };

    match time_to_throttle(power, &soc.thermal) {
        ThrottleOutcome::Sustained => println!("Sustained"),
        ThrottleOutcome::Throttles { minutes } => println!("{minutes:.2} min"),
    }

    if let Some(path) = &args.trace_out {
        let minutes = args.duration_minutes.unwrap_or(scenario.session_minutes);
        let trace = temp_trajectory(power, &soc.thermal, minutes * 60.0, args.timestep_s);
        fs::write(path, trace_csv(&trace))
            .with_context(|| format!("cannot write trace file {}", path.display()))?;
    }
    Ok(0)
}

fn list_socs_table(registry: &SocRegistry) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<18} {:<12} {:>8} {:>8} {:>11} {:>9} {:>10}",
        "name", "process", "gflops", "gb/s", "tdp w (s/p)", "ram gb", "gb6 multi"
    );
    for profile in registry.iter() {
        let _ = writeln!(
            out,
            "{:<18} {:<12} {:>8.0} {:>8.1} {:>5.1}/{:<5.1} {:>9.2} {:>10.0}",
            profile.name,
            profile.process_node,
            profile.gpu.gflops,
            profile.memory_bandwidth_gbps,
            profile.tdp_sustained_w,
            profile.tdp_peak_w,
            profile.total_ram_gb,
            profile.benchmarks.geekbench6_multi,
        );
    }
    out
}
