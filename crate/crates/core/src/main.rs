use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use textloc::app;
use textloc::classifier::load_model;
use textloc::evaluation::DEFAULT_IOU_THRESHOLD;
use textloc::io::ImageFormat;
use textloc::synthetic::SynthConfig;
use textloc::{ConfigFile, Detector};

#[derive(Parser)]
#[command(name = "textloc", version, about = "Localize text regions in grayscale scene images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect text boxes in one or more images and print them as JSON.
    Detect {
        #[arg(required = true)]
        images: Vec<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for annotated PNG copies.
        #[arg(long)]
        annotate: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Train the region classifier on a corpus with ground truth.
    Train {
        corpus: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output model path.
        #[arg(long)]
        out: PathBuf,
        /// Overrides `train.seed` from the config.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
        iou: f64,
    },
    /// Detect on a corpus and report recall, false-alarm rate and speed.
    Eval {
        corpus: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the report as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
        iou: f64,
    },
    /// Time the detect loop on preloaded images, single-threaded.
    Bench {
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded synthetic corpus plus gt.json.
    GenSynthetic {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 640)]
        width: usize,
        #[arg(long, default_value_t = 480)]
        height: usize,
        #[arg(long, default_value = "pgm")]
        format: ImageFormat,
    },
}

fn detector(config: Option<&Path>, model: &Path) -> Result<Detector> {
    let cfg = ConfigFile::load_or_default(config).context("loading config")?;
    let model = load_model(model).with_context(|| format!("loading model {}", model.display()))?;
    Ok(Detector::new(cfg.pipeline_config()?, model)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Detect {
            images,
            model,
            config,
            out,
            annotate,
            jobs,
        } => {
            let det = detector(config.as_deref(), &model)?;
            let run = app::detect_paths(&det, &images, jobs, annotate.as_deref())?;
            write_or_print(out.as_deref(), &run.document.to_json())?;
            for (path, err) in &run.failures {
                eprintln!("error: {}: {err}", path.display());
            }
            return Ok(if run.failures.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Train {
            corpus,
            gt,
            config,
            out,
            seed,
            iou,
        } => {
            let cfg = ConfigFile::load_or_default(config.as_deref())?;
            let mut train_cfg = cfg.train;
            if let Some(s) = seed {
                train_cfg.seed = s;
            }
            let run = app::train_corpus(&corpus, &gt, &cfg.pipeline_config()?, &train_cfg, iou, &out)?;
            for w in &run.warnings {
                eprintln!("warning: {w}");
            }
            let o = &run.outcome;
            println!("images: {}", run.n_images);
            println!("samples: {} positive, {} negative", o.positives, o.negatives);
            println!(
                "iterations: {} ({})",
                o.iterations,
                if o.converged { "converged" } else { "epoch limit" }
            );
            println!("final objective: {}", o.final_objective());
            println!("training accuracy: {:.2}%", 100.0 * o.training_accuracy);
            println!("model written to {}", out.display());
        }
        Command::Eval {
            corpus,
            gt,
            model,
            config,
            out,
            jobs,
            iou,
        } => {
            let det = detector(config.as_deref(), &model)?;
            let report = app::eval_corpus(&corpus, &gt, &det, jobs, iou)?;
            println!("{report}");
            if let Some(p) = out {
                std::fs::write(&p, report.to_json())?;
            }
        }
        Command::Bench {
            corpus,
            model,
            config,
            out,
        } => {
            let det = detector(config.as_deref(), &model)?;
            let report = app::bench_dir(&corpus, &det)?;
            println!("{report}");
            if let Some(p) = out {
                std::fs::write(&p, serde_json::to_string_pretty(&report)?)?;
            }
        }
        Command::GenSynthetic {
            n,
            seed,
            out,
            width,
            height,
            format,
        } => {
            let synth = SynthConfig {
                width,
                height,
                ..SynthConfig::default()
            };
            let gt = app::gen_synthetic(n, seed, &out, &synth, format)?;
            let boxes: usize = gt.images.iter().map(|i| i.boxes.len()).sum();
            println!("wrote {} images with {boxes} text boxes to {}", gt.images.len(), out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
