//! Detects text in an image with a saved model and writes an annotated copy.
//! Without arguments it trains a quick model and uses a synthetic scene.
//!
//! ```bash
//! cargo run --release -p textloc --example detect_image -- [image] [model.svm] [annotated.png]
//! ```

use textloc::app::build_training_set;
use textloc::classifier::{load_model, train};
use textloc::evaluation::DEFAULT_IOU_THRESHOLD;
use textloc::io::{annotate, load_image, save_image, ImageFormat};
use textloc::synthetic::{generate_corpus, generate_image, ground_truth_of, SynthConfig};
use textloc::{Detector, PipelineConfig, Rect, TrainConfig};

fn main() -> textloc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let pipeline = PipelineConfig::default();

    let img = match args.first() {
        Some(p) => load_image(p)?,
        None => generate_image(&SynthConfig::default(), 99, 4).image,
    };
    let model = match args.get(1) {
        Some(p) => load_model(p)?,
        None => {
            let corpus = generate_corpus(30, 1, &SynthConfig::default());
            let gt = ground_truth_of(&corpus);
            let images: Vec<_> = corpus.into_iter().map(|s| (s.id, s.image)).collect();
            train(&build_training_set(&images, &gt, &pipeline, DEFAULT_IOU_THRESHOLD)?, &TrainConfig::default())?
        }
    };

    let detector = Detector::new(pipeline, model)?;
    let dets = detector.detect(&img)?;
    println!("text present: {}", !dets.is_empty());
    for d in &dets {
        println!("  {:?} margin {:.3}", d.rect, d.margin);
    }
    let out = args.get(2).map(String::as_str).unwrap_or("detections.png");
    let rects: Vec<Rect> = dets.iter().map(|d| d.rect).collect();
    save_image(&annotate(&img, &rects), out, ImageFormat::Png)?;
    println!("annotated copy written to {out}");
    Ok(())
}
