//! Two-stage localizer: morphological candidates verified by the SVM.

use std::time::{Duration, Instant};

use crate::candidates::{filter_regions, label_components, smooth, threshold, edge_response, PipelineConfig, Region};
use crate::classifier::{predict_batch, Label, SvmModel};
use crate::error::{invalid, Result};
use crate::features::{extract_features, FeatureVector};
use crate::geometry::Rect;
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub rect: Rect,
    pub margin: f64,
}

/// Wall-clock time spent in each stage of one or more `detect` calls.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub smooth: Duration,
    pub edge: Duration,
    pub threshold: Duration,
    /// Labeling plus the geometric filter.
    pub label: Duration,
    pub features: Duration,
    pub svm: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.smooth + self.edge + self.threshold + self.label + self.features + self.svm
    }

    pub fn accumulate(&mut self, other: &StageTimings) {
        self.smooth += other.smooth;
        self.edge += other.edge;
        self.threshold += other.threshold;
        self.label += other.label;
        self.features += other.features;
        self.svm += other.svm;
    }

    /// `(name, duration)` pairs in pipeline order.
    pub fn stages(&self) -> [(&'static str, Duration); 6] {
        [
            ("smooth", self.smooth),
            ("edge", self.edge),
            ("threshold", self.threshold),
            ("label", self.label),
            ("features", self.features),
            ("svm", self.svm),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct Detector {
    pub pipeline: PipelineConfig,
    pub model: SvmModel,
}

/// Candidate regions with their features; regions too small for the wavelet
/// stage are dropped.
pub fn describe_candidates(img: &GrayImage, candidates: &[Region]) -> Vec<(Region, FeatureVector)> {
    candidates
        .iter()
        .filter_map(|r| extract_features(img, r).ok().map(|f| (*r, f)))
        .collect()
}

impl Detector {
    pub fn new(pipeline: PipelineConfig, model: SvmModel) -> Result<Self> {
        pipeline.validate()?;
        model.validate()?;
        Ok(Self { pipeline, model })
    }

    pub fn detect(&self, img: &GrayImage) -> Result<Vec<Detection>> {
        self.detect_timed(img).map(|(d, _)| d)
    }

    pub fn detect_timed(&self, img: &GrayImage) -> Result<(Vec<Detection>, StageTimings)> {
        let cfg = &self.pipeline;
        let (mw, mh) = cfg.min_image_size();
        if img.width() < mw || img.height() < mh {
            return invalid(format!(
                "image {}x{} smaller than structuring elements ({mw}x{mh})",
                img.width(),
                img.height()
            ));
        }
        let mut t = StageTimings::default();

        let start = Instant::now();
        let smoothed = smooth(img, cfg);
        let mark = Instant::now();
        t.smooth = mark - start;

        let edges = edge_response(&smoothed, cfg);
        let start = Instant::now();
        t.edge = start - mark;

        let mask = threshold(&edges, cfg);
        let mark = Instant::now();
        t.threshold = mark - start;

        let candidates = filter_regions(&label_components(&mask, cfg), cfg);
        let start = Instant::now();
        t.label = start - mark;

        let described = describe_candidates(img, &candidates);
        let mark = Instant::now();
        t.features = mark - start;

        let fvs: Vec<FeatureVector> = described.iter().map(|(_, f)| *f).collect();
        let verdicts = predict_batch(&self.model, &fvs)?;
        let detections = described
            .iter()
            .zip(verdicts)
            .filter(|(_, (label, _))| *label == Label::Text)
            .map(|((r, _), (_, margin))| Detection { rect: r.bbox(), margin })
            .collect();
        t.svm = mark.elapsed();

        Ok((detections, t))
    }
}
