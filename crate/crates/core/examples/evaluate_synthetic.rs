//! Train on one seeded synthetic corpus and score a disjoint one.
//!
//! ```bash
//! cargo run --release -p textloc --example evaluate_synthetic -- [train_n] [test_n]
//! ```

use textloc::app::{build_training_set, evaluate_images};
use textloc::classifier::train_detailed;
use textloc::evaluation::DEFAULT_IOU_THRESHOLD;
use textloc::synthetic::{generate_corpus, ground_truth_of, SynthConfig};
use textloc::{Detector, PipelineConfig, TrainConfig};

fn main() -> textloc::Result<()> {
    let mut args = std::env::args().skip(1);
    let train_n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let test_n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(50);

    let synth = SynthConfig::default();
    let pipeline = PipelineConfig::default();

    let train = generate_corpus(train_n, 1, &synth);
    let train_gt = ground_truth_of(&train);
    let images: Vec<_> = train.into_iter().map(|s| (s.id, s.image)).collect();
    let ts = build_training_set(&images, &train_gt, &pipeline, DEFAULT_IOU_THRESHOLD)?;
    let (pos, neg) = ts.class_counts();
    println!("training samples: {pos} positive, {neg} negative");

    let outcome = train_detailed(&ts, &TrainConfig::default())?;
    println!(
        "trained in {} iterations, objective {:.4}, training accuracy {:.2}%",
        outcome.iterations,
        outcome.final_objective(),
        100.0 * outcome.training_accuracy
    );

    let test = generate_corpus(test_n, 2, &synth);
    let test_gt = ground_truth_of(&test);
    let images: Vec<_> = test.into_iter().map(|s| (s.id, s.image)).collect();
    let detector = Detector::new(pipeline, outcome.model)?;
    let report = evaluate_images(&detector, &images, &test_gt, 1, DEFAULT_IOU_THRESHOLD)?;
    println!("{report}");
    Ok(())
}
