//! Batch commands behind the `textloc` binary: detect, train, eval, bench
//! and synthetic corpus generation.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidates::{extract_candidates, PipelineConfig};
use crate::classifier::{save_model, train_detailed, Label, TrainConfig, TrainOutcome, TrainingSet};
use crate::detector::{describe_candidates, Detection, Detector, StageTimings};
use crate::error::{invalid, Error, Result};
use crate::evaluation::{evaluate, BoxDocument, EvalReport, GroundTruth, ImageBoxes};
use crate::geometry::Rect;
use crate::image::GrayImage;
use crate::io::{annotate, load_image, save_image, ImageFormat};
use crate::synthetic::{generate_corpus, write_corpus, SynthConfig};

/// PGM and PNG files directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && ImageFormat::from_path(p).is_some())
        .collect();
    out.sort();
    Ok(out)
}

/// Image id used in box documents: the file stem.
pub fn image_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug)]
pub struct DetectRun {
    pub document: BoxDocument,
    /// Files that could not be read or processed, in input order.
    pub failures: Vec<(PathBuf, Error)>,
    /// Wall-clock time of the in-memory detection batch.
    pub elapsed: Duration,
}

fn detection_entry(id: String, img: &GrayImage, dets: &[Detection]) -> ImageBoxes {
    let mut entry = ImageBoxes::new(id, img.width(), img.height(), dets.iter().map(|d| d.rect).collect());
    entry.margins = Some(dets.iter().map(|d| d.margin).collect());
    entry.text_present = Some(!dets.is_empty());
    entry
}

/// Loads every path, detects on the decoded images (in parallel when
/// `jobs > 1`) and optionally writes annotated PNG copies into
/// `annotate_dir`. Output order follows input order.
pub fn detect_paths(detector: &Detector, paths: &[PathBuf], jobs: usize, annotate_dir: Option<&Path>) -> Result<DetectRun> {
    let loaded: Vec<(PathBuf, Result<GrayImage>)> =
        with_pool(jobs, || paths.par_iter().map(|p| (p.clone(), load_image(p))).collect())?;

    let start = Instant::now();
    let results: Vec<Option<Result<Vec<Detection>>>> = with_pool(jobs, || {
        loaded
            .par_iter()
            .map(|(_, img)| img.as_ref().ok().map(|img| detector.detect(img)))
            .collect()
    })?;
    let elapsed = start.elapsed();

    if let Some(dir) = annotate_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut document = BoxDocument::default();
    let mut failures = Vec::new();
    for ((path, img), res) in loaded.into_iter().zip(results) {
        let img = match img {
            Ok(img) => img,
            Err(e) => {
                failures.push((path, e));
                continue;
            }
        };
        match res.expect("present for decoded images") {
            Ok(dets) => {
                if let Some(dir) = annotate_dir {
                    let rects: Vec<Rect> = dets.iter().map(|d| d.rect).collect();
                    let out = dir.join(format!("{}.png", image_id(&path)));
                    save_image(&annotate(&img, &rects), out, ImageFormat::Png)?;
                }
                document.images.push(detection_entry(image_id(&path), &img, &dets));
            }
            Err(e) => failures.push((path, e)),
        }
    }
    Ok(DetectRun {
        document,
        failures,
        elapsed,
    })
}

/// Images of a corpus directory paired with their ground-truth entries.
#[derive(Debug, Default)]
pub struct Corpus {
    pub images: Vec<(String, GrayImage)>,
    pub warnings: Vec<String>,
}

/// Loads every image in `dir` that has a ground-truth entry. Images without
/// one are skipped with a warning.
pub fn load_corpus(dir: &Path, gt: &GroundTruth) -> Result<Corpus> {
    let by_id = gt.by_id();
    let mut corpus = Corpus::default();
    for path in list_images(dir)? {
        let id = image_id(&path);
        if !by_id.contains_key(id.as_str()) {
            corpus.warnings.push(format!("no ground truth for `{id}`; excluded"));
            continue;
        }
        corpus.images.push((id, load_image(&path)?));
    }
    Ok(corpus)
}

/// Labels every candidate positive iff it overlaps some ground-truth box at
/// `iou >= iou_threshold`.
pub fn build_training_set(
    images: &[(String, GrayImage)],
    gt: &GroundTruth,
    pipeline: &PipelineConfig,
    iou_threshold: f64,
) -> Result<TrainingSet> {
    let by_id = gt.by_id();
    let mut ts = TrainingSet::new();
    for (id, img) in images {
        let truth: &[Rect] = by_id.get(id.as_str()).map_or(&[], |e| e.boxes.as_slice());
        let candidates = extract_candidates(img, pipeline)?;
        for (region, fv) in describe_candidates(img, &candidates) {
            let b = region.bbox();
            let positive = truth.iter().any(|g| b.iou(g) >= iou_threshold);
            ts.push(fv, if positive { Label::Text } else { Label::NonText });
        }
    }
    Ok(ts)
}

#[derive(Debug)]
pub struct TrainRun {
    pub outcome: TrainOutcome,
    pub n_images: usize,
    pub warnings: Vec<String>,
}

pub fn train_corpus(
    dir: &Path,
    gt_path: &Path,
    pipeline: &PipelineConfig,
    train_cfg: &TrainConfig,
    iou_threshold: f64,
    out_model: &Path,
) -> Result<TrainRun> {
    let gt = GroundTruth::load(gt_path)?;
    let corpus = load_corpus(dir, &gt)?;
    let ts = build_training_set(&corpus.images, &gt, pipeline, iou_threshold)?;
    let (positives, negatives) = ts.class_counts();
    if positives == 0 || negatives == 0 {
        return Err(Error::InsufficientData { positives, negatives });
    }
    let outcome = train_detailed(&ts, train_cfg)?;
    save_model(&outcome.model, out_model)?;
    Ok(TrainRun {
        outcome,
        n_images: corpus.images.len(),
        warnings: corpus.warnings,
    })
}

/// Detects on preloaded images and scores against `gt`. The speed figure
/// covers the detection batch only.
pub fn evaluate_images(
    detector: &Detector,
    images: &[(String, GrayImage)],
    gt: &GroundTruth,
    jobs: usize,
    iou_threshold: f64,
) -> Result<EvalReport> {
    let start = Instant::now();
    let results: Vec<Result<Vec<Detection>>> =
        with_pool(jobs, || images.par_iter().map(|(_, img)| detector.detect(img)).collect())?;
    let elapsed = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
    let mut dets = BoxDocument::default();
    for ((id, img), res) in images.iter().zip(results) {
        dets.images.push(detection_entry(id.clone(), img, &res?));
    }
    evaluate(&dets, gt, elapsed, iou_threshold)
}

pub fn eval_corpus(dir: &Path, gt_path: &Path, detector: &Detector, jobs: usize, iou_threshold: f64) -> Result<EvalReport> {
    let gt = GroundTruth::load(gt_path)?;
    let corpus = load_corpus(dir, &gt)?;
    let mut report = evaluate_images(detector, &corpus.images, &gt, jobs, iou_threshold)?;
    report.flags.splice(0..0, corpus.warnings);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageMillis {
    pub smooth: f64,
    pub edge: f64,
    pub threshold: f64,
    pub label: f64,
    pub features: f64,
    pub svm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub n_images: usize,
    pub total_seconds: f64,
    pub images_per_second: f64,
    /// Mean milliseconds per image for each stage.
    pub stage_ms: StageMillis,
    /// Sum of the per-stage means, for comparison with `total_seconds`.
    pub stage_sum_ms: f64,
    pub mean_total_ms: f64,
}

impl std::fmt::Display for BenchReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{} images in {:.3} s: {:.1} img/s ({:.2} ms/img)",
            self.n_images, self.total_seconds, self.images_per_second, self.mean_total_ms
        )?;
        let s = &self.stage_ms;
        for (name, ms) in [
            ("smooth", s.smooth),
            ("edge", s.edge),
            ("threshold", s.threshold),
            ("label", s.label),
            ("features", s.features),
            ("svm", s.svm),
        ] {
            writeln!(f, "  {name:<10}{ms:>9.3} ms")?;
        }
        write!(f, "  {:<10}{:>9.3} ms", "sum", self.stage_sum_ms)
    }
}

/// Single-threaded timing of the detect loop over preloaded images.
pub fn bench_images(detector: &Detector, images: &[GrayImage]) -> Result<BenchReport> {
    if images.is_empty() {
        return invalid("bench needs at least one image");
    }
    let mut stages = StageTimings::default();
    let start = Instant::now();
    for img in images {
        let (_, t) = detector.detect_timed(img)?;
        stages.accumulate(&t);
    }
    let total = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
    let n = images.len() as f64;
    let ms = |d: Duration| d.as_secs_f64() * 1e3 / n;
    let stage_ms = StageMillis {
        smooth: ms(stages.smooth),
        edge: ms(stages.edge),
        threshold: ms(stages.threshold),
        label: ms(stages.label),
        features: ms(stages.features),
        svm: ms(stages.svm),
    };
    Ok(BenchReport {
        n_images: images.len(),
        total_seconds: total,
        images_per_second: crate::evaluation::speed(images.len(), total)?,
        stage_sum_ms: ms(stages.total()),
        mean_total_ms: total * 1e3 / n,
        stage_ms,
    })
}

pub fn bench_dir(dir: &Path, detector: &Detector) -> Result<BenchReport> {
    let images = list_images(dir)?
        .iter()
        .map(load_image)
        .collect::<Result<Vec<_>>>()?;
    bench_images(detector, &images)
}

pub fn gen_synthetic(n: usize, seed: u64, out_dir: &Path, synth: &SynthConfig, format: ImageFormat) -> Result<BoxDocument> {
    if n == 0 {
        return invalid("corpus needs at least one image");
    }
    write_corpus(&generate_corpus(n, seed, synth), out_dir, format)
}
