//! Command-line driver for the scene workbench: simulate scenes, generate
//! the benchmark, score responses, re-validate runs, inspect scenes.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use foa_scene::config::PipelineConfig;
use foa_scene::pipeline::{
    load_manifest, run_bench, run_inspect, run_score, run_simulate, run_validate, PipelineError,
};
use foa_scene::scorer::{Protocol, RewardConfig};

#[derive(Parser)]
#[command(name = "foa-scene", version, about = "Deterministic FOA scene workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProtocolArg {
    Mcqa,
    PerOptionBinary,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Protocol {
        match p {
            ProtocolArg::Mcqa => Protocol::Mcqa,
            ProtocolArg::PerOptionBinary => Protocol::PerOptionBinary,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample, render and describe scenes into a run directory.
    Simulate {
        /// TOML config file; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        n_scenes: Option<usize>,
        #[arg(long)]
        out_dir: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
        /// Also write per-source RIR WAVs.
        #[arg(long)]
        dump_rirs: bool,
    },
    /// Generate the multiple-choice benchmark for a finished run.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
        /// Number of questions; defaults to the run config's n_items.
        #[arg(long)]
        n_items: Option<usize>,
        /// Benchmark RNG seed; defaults to the run seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score a JSON-lines response file against a benchmark file.
    Score {
        #[arg(long)]
        benchmark: PathBuf,
        #[arg(long)]
        responses: PathBuf,
        #[arg(long, value_enum, default_value_t = ProtocolArg::Mcqa)]
        protocol: ProtocolArg,
        /// Write the report JSON here as well.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Optional TOML config supplying the [reward] table.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Re-run the answer-key oracle over a serialized run.
    Validate {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Print ground truth and verification checks for one scene.
    Inspect {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        scene_id: String,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<PipelineConfig, PipelineError> {
    match path {
        Some(p) => Ok(PipelineConfig::load(p)?),
        None => Ok(PipelineConfig::default()),
    }
}

fn cmd_simulate(
    config: Option<PathBuf>,
    seed: Option<u64>,
    n_scenes: Option<usize>,
    out_dir: Option<String>,
    workers: Option<usize>,
    dump_rirs: bool,
) -> Result<(), PipelineError> {
    let mut cfg = load_config(config.as_ref())?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = n_scenes {
        cfg.n_scenes = n;
    }
    if let Some(o) = out_dir {
        cfg.out_dir = o;
    }
    if workers.is_some() {
        cfg.workers = workers;
    }
    if dump_rirs {
        cfg.dump_rirs = true;
    }
    let (manifest, path) = run_simulate(&cfg)?;
    println!("run {} complete: {} scenes", manifest.run_id, manifest.scenes.len());
    println!("manifest: {}", path.display());
    Ok(())
}

fn cmd_bench(
    manifest: PathBuf,
    n_items: Option<usize>,
    seed: Option<u64>,
) -> Result<(), PipelineError> {
    let loaded = load_manifest(&manifest)?;
    let n = n_items.unwrap_or(loaded.config.n_items);
    let s = seed.unwrap_or(loaded.seed);
    let summary = run_bench(&manifest, n, s)?;
    println!("benchmark: {}", summary.benchmark_path);
    println!("items: {}", summary.n_items);
    println!(
        "level mix: L1 {:.1}%  L2 {:.1}%  L3 {:.1}%",
        summary.level_mix[0] * 100.0,
        summary.level_mix[1] * 100.0,
        summary.level_mix[2] * 100.0
    );
    for (task, count) in &summary.per_task_counts {
        println!("  {task:<28} {count}");
    }
    Ok(())
}

fn cmd_score(
    benchmark: PathBuf,
    responses: PathBuf,
    protocol: ProtocolArg,
    report: Option<PathBuf>,
    config: Option<PathBuf>,
) -> Result<(), PipelineError> {
    let reward_cfg: RewardConfig = match config {
        Some(p) => PipelineConfig::load(&p)?.reward,
        None => RewardConfig::default(),
    };
    let result = run_score(&benchmark, &responses, protocol.into(), &reward_cfg, report.as_deref())?;
    println!("protocol: {:?}", result.protocol);
    println!("items scored: {}", result.n_items);
    println!("overall accuracy: {:.4}", result.overall_acc);
    println!("mean reward: {:.4}", result.mean_reward);
    println!("per level:");
    for (level, acc) in &result.per_level_acc {
        println!("  {level:<4} {acc:.4}");
    }
    println!("per task:");
    for (task, acc) in &result.per_task_acc {
        println!("  {task:<28} {acc:.4}");
    }
    Ok(())
}

fn cmd_validate(manifest: PathBuf) -> Result<bool, PipelineError> {
    let report = run_validate(&manifest)?;
    println!("items checked: {}", report.checked);
    println!("oracle failures: {}", report.oracle_failures.len());
    println!("lint failures: {}", report.lint_failures.len());
    for id in report.oracle_failures.iter().chain(report.lint_failures.iter()).take(20) {
        println!("  failed: {id}");
    }
    Ok(report.all_passed())
}

fn cmd_inspect(manifest: PathBuf, scene_id: String) -> Result<(), PipelineError> {
    let report = run_inspect(&manifest, &scene_id)?;
    println!("scene {}", report.scene_id);
    println!("--- scene description ---");
    print!("{}", report.rtsd_text);
    println!("--- relations ---");
    for r in &report.relations {
        println!("  {r}");
    }
    println!(
        "sabine rt60: {:.3} s (description file: {:.3} s)",
        report.sabine_rt60_s, report.rtsd_rt60_s
    );
    if let Some(t) = report.measured_t60_s {
        println!("schroeder t60 of simulated rir: {t:.3} s");
    }
    println!("--- pseudo-intensity direction checks ---");
    for c in &report.doa_checks {
        println!(
            "  source {}: true ({:.1}°, {:.1}°) estimated ({:.1}°, {:.1}°) error {:.2}°",
            c.source_id,
            c.true_azimuth_deg,
            c.true_elevation_deg,
            c.estimated_azimuth_deg,
            c.estimated_elevation_deg,
            c.angular_error_deg
        );
    }
    Ok(())
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome: Result<i32, PipelineError> = match cli.command {
        Command::Simulate { config, seed, n_scenes, out_dir, workers, dump_rirs } => {
            cmd_simulate(config, seed, n_scenes, out_dir, workers, dump_rirs).map(|_| 0)
        }
        Command::Bench { manifest, n_items, seed } => cmd_bench(manifest, n_items, seed).map(|_| 0),
        Command::Score { benchmark, responses, protocol, report, config } => {
            cmd_score(benchmark, responses, protocol, report, config).map(|_| 0)
        }
        Command::Validate { manifest } => cmd_validate(manifest).map(|ok| if ok { 0 } else { 2 }),
        Command::Inspect { manifest, scene_id } => cmd_inspect(manifest, scene_id).map(|_| 0),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
