//! Wavelet-moment texture descriptor.
//!
//! A candidate crop is decomposed by one level of the orthonormal Haar
//! transform. The mean and the second and third central moments of each
//! detail subband give nine values, laid out as `(m, mu2, mu3)` for LH, then
//! HL, then HH. Subband names give the horizontal filter first: HL is
//! high-pass along x, so vertical strokes land there.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::candidates::Region;
use crate::error::{invalid, Result};
use crate::image::GrayImage;

pub const FEATURE_DIM: usize = 9;

/// Real-valued row-major coefficient grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Subband {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Subband {
    fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    pub ll: Subband,
    pub lh: Subband,
    pub hl: Subband,
    pub hh: Subband,
}

/// Single-level orthonormal Haar DWT, rows first then columns. Odd trailing
/// rows/columns are dropped.
pub fn haar_dwt_level1(img: &GrayImage) -> Result<WaveletDecomposition> {
    let (w, h) = img.dimensions();
    if w < 2 || h < 2 {
        return invalid(format!("wavelet input must be at least 2x2, got {w}x{h}"));
    }
    let (hw, hh_) = (w / 2, h / 2);

    // Row pass: low and high halves for each of the 2*hh_ rows kept.
    let mut row_lo = vec![0.0f64; hw * 2 * hh_];
    let mut row_hi = vec![0.0f64; hw * 2 * hh_];
    for y in 0..2 * hh_ {
        let row = img.row(y);
        for i in 0..hw {
            let a = row[2 * i] as f64;
            let b = row[2 * i + 1] as f64;
            row_lo[y * hw + i] = (a + b) * FRAC_1_SQRT_2;
            row_hi[y * hw + i] = (a - b) * FRAC_1_SQRT_2;
        }
    }

    let mut ll = Subband::zeros(hw, hh_);
    let mut lh = Subband::zeros(hw, hh_);
    let mut hl = Subband::zeros(hw, hh_);
    let mut hh = Subband::zeros(hw, hh_);
    for j in 0..hh_ {
        for i in 0..hw {
            let (top, bot) = (2 * j * hw + i, (2 * j + 1) * hw + i);
            let o = j * hw + i;
            ll.data[o] = (row_lo[top] + row_lo[bot]) * FRAC_1_SQRT_2;
            lh.data[o] = (row_lo[top] - row_lo[bot]) * FRAC_1_SQRT_2;
            hl.data[o] = (row_hi[top] + row_hi[bot]) * FRAC_1_SQRT_2;
            hh.data[o] = (row_hi[top] - row_hi[bot]) * FRAC_1_SQRT_2;
        }
    }
    Ok(WaveletDecomposition { ll, lh, hl, hh })
}

/// Population mean, second and third central moments of a coefficient grid.
pub fn subband_moments(t: &[f64]) -> Result<(f64, f64, f64)> {
    if t.is_empty() {
        return invalid("moments of an empty subband");
    }
    let n = t.len() as f64;
    let mean = t.iter().sum::<f64>() / n;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &v in t {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
    }
    Ok((mean, m2 / n, m3 / n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl FeatureVector {
    pub fn values(&self) -> &[f64; FEATURE_DIM] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<[f64; FEATURE_DIM]> for FeatureVector {
    fn from(v: [f64; FEATURE_DIM]) -> Self {
        FeatureVector(v)
    }
}

/// Nine moments of an already cropped patch.
pub fn features_of_crop(crop: &GrayImage) -> Result<FeatureVector> {
    let dwt = haar_dwt_level1(crop)?;
    let mut out = [0.0; FEATURE_DIM];
    for (k, band) in [&dwt.lh, &dwt.hl, &dwt.hh].into_iter().enumerate() {
        let (m, mu2, mu3) = subband_moments(&band.data)?;
        out[3 * k] = m;
        out[3 * k + 1] = mu2;
        out[3 * k + 2] = mu3;
    }
    Ok(FeatureVector(out))
}

/// Crops the region's bounding box from the original image and describes it.
pub fn extract_features(img: &GrayImage, region: &Region) -> Result<FeatureVector> {
    let crop = img.crop(region.x, region.y, region.w, region.h)?;
    features_of_crop(&crop)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_crop_has_only_dc() {
        let img = GrayImage::filled(6, 4, 37).unwrap();
        let d = haar_dwt_level1(&img).unwrap();
        assert!(d.ll.data.iter().all(|&v| (v - 74.0).abs() < 1e-12));
        for band in [&d.lh, &d.hl, &d.hh] {
            assert!(band.data.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn two_by_two_butterfly() {
        let img = GrayImage::from_vec(2, 2, vec![100, 50, 60, 90]).unwrap();
        let d = haar_dwt_level1(&img).unwrap();
        // LL=(a+b+c+d)/2, HL=((a-b)+(c-d))/2, LH=((a+b)-(c+d))/2, HH=((a-b)-(c-d))/2
        assert!((d.ll.data[0] - 150.0).abs() < 1e-12);
        assert!((d.hl.data[0] - 10.0).abs() < 1e-12);
        assert!((d.lh.data[0] - 0.0).abs() < 1e-12);
        assert!((d.hh.data[0] - 40.0).abs() < 1e-12);
    }

    #[test]
    fn odd_sizes_truncate() {
        let img = GrayImage::filled(5, 7, 1).unwrap();
        let d = haar_dwt_level1(&img).unwrap();
        assert_eq!((d.hh.width, d.hh.height), (2, 3));
        assert!(haar_dwt_level1(&GrayImage::new(1, 8).unwrap()).is_err());
    }

    #[test]
    fn moment_examples() {
        assert_eq!(subband_moments(&[4.0; 6]).unwrap(), (4.0, 0.0, 0.0));
        assert_eq!(subband_moments(&[-1.0, 1.0]).unwrap(), (0.0, 1.0, 0.0));
        assert!(subband_moments(&[]).is_err());
    }

    #[test]
    fn vertical_stripes_favour_hl() {
        let img = GrayImage::from_fn(16, 8, |x, _| if x % 2 == 0 { 200 } else { 20 }).unwrap();
        let f = features_of_crop(&img).unwrap();
        let region = Region {
            label: 1,
            x: 0,
            y: 0,
            w: 16,
            h: 8,
            pixel_count: 128,
        };
        assert_eq!(extract_features(&img, &region).unwrap(), f);
        // HL carries all the detail; the mean is nonzero there, variance zero
        assert!(f.0[3].abs() > 100.0);
        assert_eq!(&f.0[0..3], &[0.0, 0.0, 0.0]);
    }
}
