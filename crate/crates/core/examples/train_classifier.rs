//! Builds a training set from a synthetic corpus, trains the SVM, prints the
//! objective trajectory and saves the model.
//!
//! ```bash
//! cargo run --release -p textloc --example train_classifier -- [n_images] [model.svm]
//! ```

use textloc::app::build_training_set;
use textloc::classifier::{load_model, predict_batch, save_model, train_detailed};
use textloc::evaluation::DEFAULT_IOU_THRESHOLD;
use textloc::synthetic::{generate_corpus, ground_truth_of, SynthConfig};
use textloc::{Label, PipelineConfig, TrainConfig};

fn main() -> textloc::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(60);
    let out = args.next().unwrap_or_else(|| "textloc-example.svm".into());

    let corpus = generate_corpus(n, 1, &SynthConfig::default());
    let gt = ground_truth_of(&corpus);
    let images: Vec<_> = corpus.into_iter().map(|s| (s.id, s.image)).collect();
    let ts = build_training_set(&images, &gt, &PipelineConfig::default(), DEFAULT_IOU_THRESHOLD)?;
    let (pos, neg) = ts.class_counts();
    println!("{} candidates: {pos} text, {neg} non-text", ts.len());

    let cfg = TrainConfig { c: 1.0, ..TrainConfig::default() };
    let outcome = train_detailed(&ts, &cfg)?;
    println!("objective at each epoch checkpoint:");
    for (i, obj) in outcome.objective_history.iter().enumerate() {
        println!("  {i:>3} {obj:.6}");
    }
    println!(
        "{} after {} pair updates, training accuracy {:.2}%",
        if outcome.converged { "converged" } else { "stopped at epoch limit" },
        outcome.iterations,
        100.0 * outcome.training_accuracy
    );
    println!("weights (z-scored feature space): {:?}", outcome.model.weights);

    save_model(&outcome.model, &out)?;
    let reloaded = load_model(&out)?;
    let fvs: Vec<_> = ts.samples.iter().map(|(f, _)| *f).collect();
    let agree = predict_batch(&reloaded, &fvs)?
        .iter()
        .zip(&ts.samples)
        .filter(|((l, _), (_, truth))| l == truth)
        .count();
    let text_margins: Vec<f64> = predict_batch(&reloaded, &fvs)?
        .into_iter()
        .filter(|(l, _)| *l == Label::Text)
        .map(|(_, m)| m)
        .collect();
    println!("model saved to {out}; reloaded model agrees with labels on {agree}/{}", ts.len());
    if let Some(min) = text_margins.iter().copied().reduce(f64::min) {
        println!("smallest positive margin {min:.3}");
    }
    Ok(())
}
