//! Morphological text-candidate extraction.
//!
//! The pipeline is: smoothing (open then close), open/close differencing
//! with a short horizontal element, an edge-bridging closing, a global
//! threshold at `k` times the mean response, connected-component labeling,
//! and finally the aspect/density filter.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Rect;
use crate::image::{BinaryImage, GrayImage};
use crate::morphology::{absdiff, close, open, StructuringElement};

/// Pixel adjacency used for labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl TryFrom<u8> for Connectivity {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, Self::Error> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(format!("connectivity must be 4 or 8, got {other}")),
        }
    }
}

impl From<Connectivity> for u8 {
    fn from(c: Connectivity) -> u8 {
        match c {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

pub const MIN_THRESHOLD_FACTOR: f64 = 0.8;
pub const MAX_THRESHOLD_FACTOR: f64 = 1.2;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub smooth_se: StructuringElement,
    pub openclose_se: StructuringElement,
    pub edgeclose_se: StructuringElement,
    /// Multiplier `k` on the mean edge response.
    pub threshold_factor: f64,
    /// Lifts the `[0.8, 1.2]` restriction on `threshold_factor`.
    pub allow_any_threshold_factor: bool,
    pub min_aspect: f64,
    pub min_density: f64,
    pub connectivity: Connectivity,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            // 3 wide, 4 tall
            smooth_se: StructuringElement::rect(3, 4).expect("valid"),
            // 5 wide, 1 tall
            openclose_se: StructuringElement::rect(5, 1).expect("valid"),
            edgeclose_se: StructuringElement::rect(5, 1).expect("valid"),
            threshold_factor: 1.0,
            allow_any_threshold_factor: false,
            min_aspect: 1.5,
            min_density: 0.1,
            connectivity: Connectivity::Eight,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.threshold_factor;
        if !k.is_finite() || k < 0.0 {
            return invalid(format!("threshold factor must be finite and non-negative, got {k}"));
        }
        if !self.allow_any_threshold_factor && !(MIN_THRESHOLD_FACTOR..=MAX_THRESHOLD_FACTOR).contains(&k) {
            return invalid(format!(
                "threshold factor {k} outside [{MIN_THRESHOLD_FACTOR}, {MAX_THRESHOLD_FACTOR}] (set allow_any_threshold_factor to override)"
            ));
        }
        if !(self.min_aspect > 0.0 && self.min_aspect.is_finite()) {
            return invalid(format!("min_aspect must be positive, got {}", self.min_aspect));
        }
        if !(self.min_density > 0.0 && self.min_density <= 1.0) {
            return invalid(format!("min_density must lie in (0, 1], got {}", self.min_density));
        }
        Ok(())
    }

    /// Smallest image extent every element fits into.
    pub fn min_image_size(&self) -> (usize, usize) {
        let ses = [&self.smooth_se, &self.openclose_se, &self.edgeclose_se];
        (
            ses.iter().map(|s| s.width()).max().unwrap_or(1),
            ses.iter().map(|s| s.height()).max().unwrap_or(1),
        )
    }
}

/// A connected component of the thresholded response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Region {
    pub label: u32,
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
    pub pixel_count: usize,
}

impl Region {
    pub fn bbox(&self) -> Rect {
        Rect::new(self.x, self.y, self.w, self.h)
    }

    pub fn aspect(&self) -> f64 {
        self.w as f64 / self.h as f64
    }

    pub fn density(&self) -> f64 {
        self.pixel_count as f64 / (self.w * self.h) as f64
    }
}

/// Morphological smoothing: opening then closing with the smoothing element.
pub fn smooth(img: &GrayImage, cfg: &PipelineConfig) -> GrayImage {
    close(&open(img, &cfg.smooth_se), &cfg.smooth_se)
}

/// `close(|open(img) - close(img)|)`: local contrast, bridged horizontally.
pub fn edge_response(img: &GrayImage, cfg: &PipelineConfig) -> GrayImage {
    let opened = open(img, &cfg.openclose_se);
    let closed = close(img, &cfg.openclose_se);
    let diff = absdiff(&opened, &closed).expect("same dimensions");
    close(&diff, &cfg.edgeclose_se)
}

/// Sets pixels whose response strictly exceeds `k * mean(edge)`.
pub fn threshold(edge: &GrayImage, cfg: &PipelineConfig) -> BinaryImage {
    let cut = cfg.threshold_factor * edge.mean();
    let bits = edge.pixels().iter().map(|&v| v as f64 > cut).collect();
    BinaryImage::from_vec(edge.width(), edge.height(), bits).expect("dimensions preserved")
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        // slot 0 is background
        Self { parent: vec![0] }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Two-pass union-find labeling. Labels follow raster-scan discovery order
/// starting at 1.
pub fn label_components(bin: &BinaryImage, cfg: &PipelineConfig) -> Vec<Region> {
    let (w, h) = (bin.width(), bin.height());
    let bits = bin.bits();
    let mut labels = vec![0u32; w * h];
    let mut sets = DisjointSet::new();
    let eight = cfg.connectivity == Connectivity::Eight;

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !bits[i] {
                continue;
            }
            let mut current = 0u32;
            let mut visit = |n: u32| {
                if n != 0 {
                    current = if current == 0 { n } else { sets.union(current, n) };
                }
            };
            if x > 0 {
                visit(labels[i - 1]);
            }
            if y > 0 {
                let up = i - w;
                visit(labels[up]);
                if eight {
                    if x > 0 {
                        visit(labels[up - 1]);
                    }
                    if x + 1 < w {
                        visit(labels[up + 1]);
                    }
                }
            }
            labels[i] = if current == 0 { sets.make() } else { current };
        }
    }

    // Resolve roots to final labels in order of first raster appearance.
    let mut final_of_root = vec![0u32; sets.parent.len()];
    let mut regions: Vec<Region> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let l = labels[y * w + x];
            if l == 0 {
                continue;
            }
            let root = sets.find(l) as usize;
            if final_of_root[root] == 0 {
                regions.push(Region {
                    label: regions.len() as u32 + 1,
                    x,
                    y,
                    w: 1,
                    h: 1,
                    pixel_count: 0,
                });
                final_of_root[root] = regions.len() as u32;
            }
            let r = &mut regions[final_of_root[root] as usize - 1];
            // r.x/r.y hold the running min corner, w/h the running max corner
            // until the fix-up below.
            r.x = r.x.min(x);
            r.w = r.w.max(x + 1);
            r.h = r.h.max(y + 1);
            r.pixel_count += 1;
        }
    }
    for r in &mut regions {
        r.w -= r.x;
        r.h -= r.y;
    }
    regions
}

/// Keeps regions with `w / h > min_aspect` and `count / (w * h) > min_density`.
pub fn filter_regions(regions: &[Region], cfg: &PipelineConfig) -> Vec<Region> {
    regions
        .iter()
        .filter(|r| r.aspect() > cfg.min_aspect && r.density() > cfg.min_density)
        .copied()
        .collect()
}

/// Every intermediate product of [`extract_candidates`].
#[derive(Debug, Clone)]
pub struct CandidateStages {
    pub smoothed: GrayImage,
    pub edges: GrayImage,
    pub mask: BinaryImage,
    pub components: Vec<Region>,
    pub candidates: Vec<Region>,
}

fn check_input(img: &GrayImage, cfg: &PipelineConfig) -> Result<()> {
    cfg.validate()?;
    let (mw, mh) = cfg.min_image_size();
    if img.width() < mw || img.height() < mh {
        return invalid(format!(
            "image {}x{} smaller than structuring elements ({mw}x{mh})",
            img.width(),
            img.height()
        ));
    }
    Ok(())
}

/// Runs the full pipeline and keeps every intermediate.
pub fn extract_candidate_stages(img: &GrayImage, cfg: &PipelineConfig) -> Result<CandidateStages> {
    check_input(img, cfg)?;
    let smoothed = smooth(img, cfg);
    let edges = edge_response(&smoothed, cfg);
    let mask = threshold(&edges, cfg);
    let components = label_components(&mask, cfg);
    let candidates = filter_regions(&components, cfg);
    Ok(CandidateStages {
        smoothed,
        edges,
        mask,
        components,
        candidates,
    })
}

pub fn extract_candidates(img: &GrayImage, cfg: &PipelineConfig) -> Result<Vec<Region>> {
    extract_candidate_stages(img, cfg).map(|s| s.candidates)
}
