//! Grayscale morphology over [`GrayImage`]s.
//!
//! Offsets that fall outside the image are skipped rather than padded, which
//! is the same as padding with the identity of the reduction (`-inf` for max,
//! `+inf` for min). Results of non-flat elements saturate to `[0, 255]`.
//!
//! Dilation reads `I(x - z) + S(z)` and erosion reads `I(x + z) - S(z)`, so
//! opening and closing are the usual idempotent filters and erosion is dual
//! to dilation by the *reflected* element.

use crate::error::{invalid, Result};
use crate::image::GrayImage;

/// An `width` x `height` structuring element with per-cell additive heights.
///
/// Inactive cells are `None`. A flat element has every active height at zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    width: usize,
    height: usize,
    cells: Vec<Option<i16>>,
    origin: (usize, usize),
}

/// Geometric centre with ties broken toward the top-left cell.
fn centre(len: usize) -> usize {
    (len - 1) / 2
}

impl StructuringElement {
    pub fn new(width: usize, height: usize, cells: Vec<Option<i16>>, origin: (usize, usize)) -> Result<Self> {
        if width == 0 || height == 0 {
            return invalid(format!("structuring element must be at least 1x1, got {width}x{height}"));
        }
        if cells.len() != width * height {
            return invalid(format!(
                "structuring element has {} cells, expected {}",
                cells.len(),
                width * height
            ));
        }
        if origin.0 >= width || origin.1 >= height {
            return invalid(format!("origin {origin:?} outside {width}x{height} element"));
        }
        if cells.iter().all(Option::is_none) {
            return invalid("structuring element has no active cell");
        }
        Ok(Self {
            width,
            height,
            cells,
            origin,
        })
    }

    /// Fully active flat rectangle with a centred origin.
    pub fn rect(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return invalid(format!("structuring element must be at least 1x1, got {width}x{height}"));
        }
        Self::new(width, height, vec![Some(0); width * height], (centre(width), centre(height)))
    }

    /// Flat element from a row-major activity mask with a centred origin.
    pub fn from_mask(width: usize, height: usize, mask: &[bool]) -> Result<Self> {
        let cells = mask.iter().map(|&on| on.then_some(0)).collect();
        Self::new(width, height, cells, (centre(width.max(1)), centre(height.max(1))))
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn cell(&self, cx: usize, cy: usize) -> Option<i16> {
        self.cells[cy * self.width + cx]
    }

    pub fn is_flat(&self) -> bool {
        self.cells.iter().flatten().all(|&h| h == 0)
    }

    pub fn origin_active(&self) -> bool {
        self.cell(self.origin.0, self.origin.1).is_some()
    }

    fn is_full_flat_rect(&self) -> bool {
        self.cells.iter().all(|c| *c == Some(0))
    }

    /// Active cells as `(dx, dy, height)` offsets relative to the origin.
    pub fn offsets(&self) -> impl Iterator<Item = (isize, isize, i16)> + '_ {
        let (ox, oy) = self.origin;
        self.cells.iter().enumerate().filter_map(move |(i, c)| {
            c.map(|h| {
                let cx = (i % self.width) as isize;
                let cy = (i / self.width) as isize;
                (cx - ox as isize, cy - oy as isize, h)
            })
        })
    }

    /// Mirror through the origin: every offset `z` becomes `-z`.
    pub fn reflect(&self) -> StructuringElement {
        let (w, h) = (self.width, self.height);
        let mut cells = vec![None; w * h];
        for cy in 0..h {
            for cx in 0..w {
                cells[(h - 1 - cy) * w + (w - 1 - cx)] = self.cells[cy * w + cx];
            }
        }
        StructuringElement {
            width: w,
            height: h,
            cells,
            origin: (w - 1 - self.origin.0, h - 1 - self.origin.1),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Extremum {
    Max,
    Min,
}

impl Extremum {
    #[inline]
    fn pick(self, a: u8, b: u8) -> u8 {
        match self {
            Extremum::Max => a.max(b),
            Extremum::Min => a.min(b),
        }
    }
}

/// Separable rectangular reduction. The window around `(x, y)` spans
/// `[x - left, x + right] x [y - up, y + down]`, clipped to the image.
fn rect_reduce(img: &GrayImage, left: usize, right: usize, up: usize, down: usize, op: Extremum) -> GrayImage {
    let (w, h) = img.dimensions();
    let src = img.pixels();

    let mut horiz = vec![0u8; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let out = &mut horiz[y * w..(y + 1) * w];
        for (x, o) in out.iter_mut().enumerate() {
            let lo = x.saturating_sub(left);
            let hi = (x + right).min(w - 1);
            *o = row[lo + 1..=hi].iter().fold(row[lo], |acc, &v| op.pick(acc, v));
        }
    }
    if up == 0 && down == 0 {
        return GrayImage::from_vec(w, h, horiz).expect("dimensions preserved");
    }

    let mut out = vec![0u8; w * h];
    for y in 0..h {
        let lo = y.saturating_sub(up);
        let hi = (y + down).min(h - 1);
        let dst = &mut out[y * w..(y + 1) * w];
        dst.copy_from_slice(&horiz[lo * w..(lo + 1) * w]);
        for r in lo + 1..=hi {
            let row = &horiz[r * w..(r + 1) * w];
            for (d, &v) in dst.iter_mut().zip(row) {
                *d = op.pick(*d, v);
            }
        }
    }
    GrayImage::from_vec(w, h, out).expect("dimensions preserved")
}

/// General path for masked or non-flat elements. `sign` is -1 for dilation
/// (reads `x - z`) and +1 for erosion (reads `x + z`).
fn general_reduce(img: &GrayImage, se: &StructuringElement, op: Extremum) -> GrayImage {
    let (w, h) = img.dimensions();
    let offsets: Vec<(isize, isize, i32)> = se.offsets().map(|(dx, dy, v)| (dx, dy, v as i32)).collect();
    let sign: isize = match op {
        Extremum::Max => -1,
        Extremum::Min => 1,
    };
    let mut out = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc: Option<i32> = None;
            for &(dx, dy, sh) in &offsets {
                let sx = x as isize + sign * dx;
                let sy = y as isize + sign * dy;
                if sx < 0 || sy < 0 || sx >= w as isize || sy >= h as isize {
                    continue;
                }
                let v = img.get(sx as usize, sy as usize) as i32;
                acc = Some(match (op, acc) {
                    (Extremum::Max, None) => v + sh,
                    (Extremum::Max, Some(a)) => a.max(v + sh),
                    (Extremum::Min, None) => v - sh,
                    (Extremum::Min, Some(a)) => a.min(v - sh),
                });
            }
            out[y * w + x] = match (op, acc) {
                (_, Some(a)) => a.clamp(0, 255) as u8,
                // empty support: identity of the reduction, saturated
                (Extremum::Max, None) => 0,
                (Extremum::Min, None) => 255,
            };
        }
    }
    GrayImage::from_vec(w, h, out).expect("dimensions preserved")
}

/// Grayscale dilation: maximum of `I(x - z) + S(z)` over in-bounds offsets.
pub fn dilate(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    if se.is_full_flat_rect() {
        let (ox, oy) = se.origin;
        rect_reduce(img, se.width - 1 - ox, ox, se.height - 1 - oy, oy, Extremum::Max)
    } else {
        general_reduce(img, se, Extremum::Max)
    }
}

/// Grayscale erosion: minimum of `I(x + z) - S(z)` over in-bounds offsets.
pub fn erode(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    if se.is_full_flat_rect() {
        let (ox, oy) = se.origin;
        rect_reduce(img, ox, se.width - 1 - ox, oy, se.height - 1 - oy, Extremum::Min)
    } else {
        general_reduce(img, se, Extremum::Min)
    }
}

/// Erosion followed by dilation with the same element.
pub fn open(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    dilate(&erode(img, se), se)
}

/// Dilation followed by erosion with the same element.
pub fn close(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    erode(&dilate(img, se), se)
}

/// Per-pixel `|a - b|`.
pub fn absdiff(a: &GrayImage, b: &GrayImage) -> Result<GrayImage> {
    if a.dimensions() != b.dimensions() {
        return invalid(format!(
            "absdiff dimension mismatch: {:?} vs {:?}",
            a.dimensions(),
            b.dimensions()
        ));
    }
    let pixels = a.pixels().iter().zip(b.pixels()).map(|(&p, &q)| p.abs_diff(q)).collect();
    GrayImage::from_vec(a.width(), a.height(), pixels)
}
