//! Runs the candidate stage on one image and prints what each step kept.
//! Without an argument a seeded synthetic scene is used.
//!
//! ```bash
//! cargo run --release -p textloc --example candidate_regions -- [image.pgm|png] [annotated.png]
//! ```

use textloc::candidates::extract_candidate_stages;
use textloc::io::{annotate, load_image, save_image, ImageFormat};
use textloc::synthetic::{generate_image, SynthConfig};
use textloc::{PipelineConfig, Rect};

fn main() -> textloc::Result<()> {
    let mut args = std::env::args().skip(1);
    let (img, truth) = match args.next() {
        Some(path) => (load_image(path)?, Vec::new()),
        None => {
            let s = generate_image(&SynthConfig::default(), 7, 0);
            (s.image, s.boxes)
        }
    };
    let cfg = PipelineConfig::default();
    let stages = extract_candidate_stages(&img, &cfg)?;

    println!("image {}x{}", img.width(), img.height());
    println!(
        "edge response mean {:.2}, threshold {:.2}",
        stages.edges.mean(),
        cfg.threshold_factor * stages.edges.mean()
    );
    println!("mask pixels set: {}", stages.mask.count_set());
    println!("components: {}", stages.components.len());
    println!("candidates after aspect/density filter: {}", stages.candidates.len());
    for r in &stages.candidates {
        let b = r.bbox();
        let best = truth.iter().map(|t| t.iou(&b)).fold(0.0, f64::max);
        println!(
            "  [{:>3} {:>3} {:>3} {:>3}] aspect {:>5.2} density {:.2}{}",
            b.x,
            b.y,
            b.w,
            b.h,
            r.aspect(),
            r.density(),
            if truth.is_empty() { String::new() } else { format!(" best iou {best:.2}") }
        );
    }
    if !truth.is_empty() {
        println!("ground truth: {truth:?}");
    }

    if let Some(out) = args.next() {
        let rects: Vec<Rect> = stages.candidates.iter().map(|r| r.bbox()).collect();
        save_image(&annotate(&img, &rects), &out, ImageFormat::Png)?;
        println!("annotated copy written to {out}");
    }
    Ok(())
}
