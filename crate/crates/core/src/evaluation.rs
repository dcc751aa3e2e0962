//! Detection scoring: recall, false-alarm rate and throughput.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Rect;

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

/// One image entry of a ground-truth or detection document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageBoxes {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub boxes: Vec<Rect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margins: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_present: Option<bool>,
}

impl ImageBoxes {
    pub fn new(id: impl Into<String>, width: usize, height: usize, boxes: Vec<Rect>) -> Self {
        Self {
            id: id.into(),
            width,
            height,
            boxes,
            margins: None,
            text_present: None,
        }
    }
}

/// `{"images": [...]}`, used for both ground truth and detections.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoxDocument {
    pub images: Vec<ImageBoxes>,
}

pub type GroundTruth = BoxDocument;

impl BoxDocument {
    pub fn validate(&self) -> Result<()> {
        for img in &self.images {
            for b in &img.boxes {
                if b.w == 0 || b.h == 0 || !b.fits_within(img.width, img.height) {
                    return invalid(format!(
                        "image `{}`: box {:?} outside {}x{} or empty",
                        img.id, b, img.width, img.height
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn by_id(&self) -> BTreeMap<&str, &ImageBoxes> {
        self.images.iter().map(|i| (i.id.as_str(), i)).collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let doc: BoxDocument = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MatchCounts {
    pub n_correct: usize,
    pub n_false: usize,
}

/// Greedy one-to-one matching by descending IoU. Ties go to the lower
/// detection index, then the lower ground-truth index.
pub fn match_detections(dets: &[Rect], gts: &[Rect], iou_threshold: f64) -> MatchCounts {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (d, det) in dets.iter().enumerate() {
        for (g, gt) in gts.iter().enumerate() {
            let iou = det.iou(gt);
            if iou >= iou_threshold && iou > 0.0 {
                pairs.push((iou, d, g));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut det_used = vec![false; dets.len()];
    let mut gt_used = vec![false; gts.len()];
    let mut n_correct = 0;
    for (_, d, g) in pairs {
        if !det_used[d] && !gt_used[g] {
            det_used[d] = true;
            gt_used[g] = true;
            n_correct += 1;
        }
    }
    MatchCounts {
        n_correct,
        n_false: dets.len() - n_correct,
    }
}

/// `100 * correct / n_gt`, or 0 when there is no ground truth.
pub fn recall(n_correct: usize, n_gt: usize) -> f64 {
    if n_gt == 0 {
        0.0
    } else {
        100.0 * n_correct as f64 / n_gt as f64
    }
}

/// `100 * false / detected`, or 0 when nothing was detected.
pub fn false_alarm_rate(n_false: usize, n_detected: usize) -> f64 {
    if n_detected == 0 {
        0.0
    } else {
        100.0 * n_false as f64 / n_detected as f64
    }
}

/// Images per second of wall-clock time.
pub fn speed(n_images: usize, elapsed_seconds: f64) -> Result<f64> {
    if elapsed_seconds.is_nan() || elapsed_seconds <= 0.0 || elapsed_seconds.is_infinite() {
        return invalid(format!("elapsed time must be positive, got {elapsed_seconds}"));
    }
    Ok(n_images as f64 / elapsed_seconds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub recall_pct: f64,
    pub false_alarm_pct: f64,
    pub images_per_second: f64,
    pub n_images: usize,
    pub n_gt: usize,
    pub n_detected: usize,
    pub n_correct: usize,
    pub n_false: usize,
    pub iou_threshold: f64,
    /// Degenerate denominators and other caveats.
    pub flags: Vec<String>,
}

/// Scores a detection document against ground truth. Images absent from
/// `gt` are skipped and named in `flags`.
pub fn evaluate(dets: &BoxDocument, gt: &GroundTruth, elapsed_seconds: f64, iou_threshold: f64) -> Result<EvalReport> {
    let gt_by_id = gt.by_id();
    let mut flags = Vec::new();
    let (mut n_gt, mut n_detected, mut n_correct, mut n_false, mut n_images) = (0, 0, 0, 0, 0);
    for img in &dets.images {
        let Some(truth) = gt_by_id.get(img.id.as_str()) else {
            flags.push(format!("missing ground truth for `{}`", img.id));
            continue;
        };
        let m = match_detections(&img.boxes, &truth.boxes, iou_threshold);
        n_images += 1;
        n_gt += truth.boxes.len();
        n_detected += img.boxes.len();
        n_correct += m.n_correct;
        n_false += m.n_false;
    }
    if n_gt == 0 {
        flags.push("no ground-truth boxes: recall reported as 0".into());
    }
    if n_detected == 0 {
        flags.push("no detections: false alarm rate reported as 0".into());
    }
    Ok(EvalReport {
        recall_pct: recall(n_correct, n_gt),
        false_alarm_pct: false_alarm_rate(n_false, n_detected),
        images_per_second: speed(dets.images.len(), elapsed_seconds)?,
        n_images,
        n_gt,
        n_detected,
        n_correct,
        n_false,
        iou_threshold,
        flags,
    })
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

impl fmt::Display for EvalReport {
    /// Aligned table with Speed, False Alarm Rate and Recall columns.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<12}{:>10}{:>24}{:>12}", "Method", "Speed", "False Alarm Rate (%)", "Recall(%)")?;
        writeln!(
            f,
            "{:<12}{:>10.1}{:>24.1}{:>12.1}",
            "textloc", self.images_per_second, self.false_alarm_pct, self.recall_pct
        )?;
        write!(
            f,
            "images={} gt={} detected={} correct={} false={} iou>={}",
            self.n_images, self.n_gt, self.n_detected, self.n_correct, self.n_false, self.iou_threshold
        )?;
        for flag in &self.flags {
            write!(f, "\nnote: {flag}")?;
        }
        Ok(())
    }
}
