//! Command-line front end: validate and generate scenes, combine and count
//! datasets, and score detector predictions.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use crackforge::eval::{plot_pr_curve, read_predictions, EvalError, MetricMode};
use crackforge::pipeline::{
    dataset_stats, evaluate_dataset, generate_dataset, parse_scene, rebalance, DatasetManifest, GenerateOptions,
    PipelineError,
};

#[derive(Parser)]
#[command(name = "crackforge", version, about = "Semi-synthetic crack datasets from 3D meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Standard,
    M2m,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a scene file and check it against its mesh.
    Validate { scene: PathBuf },
    /// Render every damage level along every flight.
    Generate {
        scene: PathBuf,
        /// Inclusive level range such as `0..3`, or a single level.
        #[arg(long, value_parser = parse_levels)]
        levels: Option<RangeInclusive<u32>>,
        /// Also write box overlays next to the images.
        #[arg(long)]
        overlays: bool,
    },
    /// Oversample a real manifest and mix in a synthetic one.
    Rebalance {
        real: PathBuf,
        synthetic: PathBuf,
        #[arg(long)]
        ratio: u32,
        #[arg(long)]
        seed: u64,
        /// Output manifest; printed to stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count images and boxes of a manifest.
    Stats { manifest: PathBuf },
    /// Score a predictions file against a ground-truth manifest.
    Evaluate {
        manifest: PathBuf,
        predictions: PathBuf,
        #[arg(long, value_enum, default_value = "standard")]
        mode: Mode,
        #[arg(long, default_value_t = 0.5)]
        iou: f64,
        #[arg(long, default_value_t = 0.5)]
        iop: f64,
        #[arg(long, default_value_t = 0.5)]
        iog: f64,
        /// Grow ground-truth boxes by this many pixels first.
        #[arg(long, default_value_t = 0)]
        expand: u32,
        /// Write a precision/recall plot to this PNG.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
}

fn parse_levels(s: &str) -> Result<RangeInclusive<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad level {t:?}: {e}"));
    let range = match s.split_once("..") {
        Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
        None => num(s)?..=num(s)?,
    };
    if range.is_empty() {
        return Err(format!("empty level range {s:?}"));
    }
    Ok(range)
}

fn check_threshold(name: &str, v: f64) -> Result<(), PipelineError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(PipelineError::Config {
            key: format!("--{name}"),
            message: format!("threshold {v} is outside [0, 1]"),
        })
    }
}

fn load_manifest(path: &Path) -> Result<DatasetManifest, PipelineError> {
    DatasetManifest::load(path)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Validate { scene } => {
            let cfg = parse_scene(&scene)?;
            let built = cfg.build()?;
            let frames: usize = built.flights.iter().map(|f| f.path.frame_count()).sum();
            println!(
                "{}: ok ({} annotations, levels {:?}, {} frames per level)",
                scene.display(),
                cfg.annotations.len(),
                cfg.render_levels(),
                frames
            );
        }
        Command::Generate { scene, levels, overlays } => {
            let cfg = parse_scene(&scene)?;
            let options = GenerateOptions {
                levels: levels.map(|r| r.collect()),
                overlays: overlays.then_some(true),
            };
            log::info!("generating {} into {}", scene.display(), cfg.output_path().display());
            let manifest = generate_dataset(&cfg, &options)?;
            let c = manifest.counts();
            println!(
                "wrote {} images to {} ({} damaged, {} clean)",
                c.total,
                cfg.output_path().display(),
                c.damaged,
                c.non_damaged
            );
        }
        Command::Rebalance { real, synthetic, ratio, seed, output } => {
            let combined = rebalance(&load_manifest(&real)?, &load_manifest(&synthetic)?, ratio, seed)?;
            match output {
                Some(path) => {
                    combined.save(&path)?;
                    let c = combined.counts();
                    println!("wrote {} entries ({} real, {} synthetic) to {}", c.total, c.real, c.synthetic, path.display());
                }
                None => println!("{}", combined.to_json()),
            }
        }
        Command::Stats { manifest } => {
            let stats = dataset_stats(&load_manifest(&manifest)?)?;
            println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
        }
        Command::Evaluate { manifest, predictions, mode, iou, iop, iog, expand, plot } => {
            let mode = match mode {
                Mode::Standard => {
                    check_threshold("iou", iou)?;
                    MetricMode::Standard { iou }
                }
                Mode::M2m => {
                    check_threshold("iop", iop)?;
                    check_threshold("iog", iog)?;
                    MetricMode::ManyToMany { iop, iog }
                }
            };
            let gt = load_manifest(&manifest)?;
            let preds = read_predictions(&predictions)?;
            let (report, curve) = evaluate_dataset(&gt, &preds, mode, expand)?;
            if let Some(path) = plot {
                plot_pr_curve(&curve, 512).save(&path).map_err(|e| PipelineError::Io {
                    path: path.clone(),
                    source: std::io::Error::other(e),
                })?;
            }
            println!("{}", report.to_json());
        }
    }
    Ok(())
}

/// Bad input is a validation failure; everything else is a runtime failure.
fn exit_code(err: &PipelineError) -> u8 {
    let input = err.is_validation()
        || matches!(
            err,
            PipelineError::Manifest(_)
                | PipelineError::Annotation { .. }
                | PipelineError::UnknownImage(_)
                | PipelineError::AmbiguousImage(_)
                | PipelineError::OutputNotEmpty(_)
                | PipelineError::Eval(EvalError::Prediction { .. })
        );
    if input {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
