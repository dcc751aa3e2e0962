//! Single-threaded throughput on 640x480 synthetic frames, with per-stage
//! means.
//!
//! ```bash
//! cargo run --release -p textloc --example realtime_bench -- [n_frames]
//! ```

use textloc::app::{bench_images, build_training_set};
use textloc::classifier::train;
use textloc::evaluation::DEFAULT_IOU_THRESHOLD;
use textloc::synthetic::{generate_corpus, ground_truth_of, SynthConfig};
use textloc::{Detector, PipelineConfig, TrainConfig};

fn main() -> textloc::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100);
    let pipeline = PipelineConfig::default();
    let synth = SynthConfig::default();

    let train_set = generate_corpus(40, 1, &synth);
    let gt = ground_truth_of(&train_set);
    let images: Vec<_> = train_set.into_iter().map(|s| (s.id, s.image)).collect();
    let model = train(&build_training_set(&images, &gt, &pipeline, DEFAULT_IOU_THRESHOLD)?, &TrainConfig::default())?;
    let detector = Detector::new(pipeline, model)?;

    let frames: Vec<_> = generate_corpus(n, 3, &synth).into_iter().map(|s| s.image).collect();
    // warm caches before timing
    bench_images(&detector, &frames[..frames.len().min(5)])?;
    let report = bench_images(&detector, &frames)?;
    println!("{report}");
    if report.images_per_second < 10.0 {
        println!("below 10 img/s on this machine");
    }
    Ok(())
}
