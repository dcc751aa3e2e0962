//! Raster containers shared by every stage of the pipeline.

use crate::error::{invalid, Result};

/// 8-bit grayscale raster stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        Self::filled(width, height, 0)
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        if width == 0 || height == 0 {
            return invalid(format!("image dimensions must be positive, got {width}x{height}"));
        }
        Ok(Self {
            width,
            height,
            pixels: vec![value; width * height],
        })
    }

    pub fn from_vec(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return invalid(format!("image dimensions must be positive, got {width}x{height}"));
        }
        if pixels.len() != width * height {
            return invalid(format!(
                "pixel buffer holds {} values, expected {}x{}={}",
                pixels.len(),
                width,
                height,
                width * height
            ));
        }
        Ok(Self { width, height, pixels })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        let mut img = Self::new(width, height)?;
        for y in 0..height {
            for x in 0..width {
                img.pixels[y * width + x] = f(x, y);
            }
        }
        Ok(img)
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
    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.pixels
    }

    pub fn row(&self, y: usize) -> &[u8] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    /// Maps every intensity `v` to `255 - v`.
    pub fn invert(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&v| 255 - v).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        let sum: u64 = self.pixels.iter().map(|&v| v as u64).sum();
        sum as f64 / self.pixels.len() as f64
    }

    /// Copies the `w`x`h` window whose top-left corner is `(x, y)`.
    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Result<GrayImage> {
        if w == 0 || h == 0 || x + w > self.width || y + h > self.height {
            return invalid(format!(
                "crop {w}x{h}+{x}+{y} outside {}x{} image",
                self.width, self.height
            ));
        }
        let mut pixels = Vec::with_capacity(w * h);
        for row in y..y + h {
            let start = row * self.width + x;
            pixels.extend_from_slice(&self.pixels[start..start + w]);
        }
        Ok(GrayImage { width: w, height: h, pixels })
    }
}

/// Row-major boolean mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return invalid(format!(
                "mask holds {} bits, expected {}x{}",
                bits.len(),
                width,
                height
            ));
        }
        Ok(Self { width, height, bits })
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
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dimensions() {
        assert!(GrayImage::new(0, 3).is_err());
        assert!(GrayImage::from_vec(2, 2, vec![0; 3]).is_err());
        assert!(BinaryImage::from_vec(2, 2, vec![false; 5]).is_err());
    }

    #[test]
    fn crop_copies_window() {
        let img = GrayImage::from_fn(4, 3, |x, y| (10 * y + x) as u8).unwrap();
        let c = img.crop(1, 1, 2, 2).unwrap();
        assert_eq!(c.pixels(), &[11, 12, 21, 22]);
        assert!(img.crop(3, 0, 2, 1).is_err());
    }

    #[test]
    fn invert_is_involution() {
        let img = GrayImage::from_fn(5, 5, |x, y| (x * 37 + y * 11) as u8).unwrap();
        assert_eq!(img.invert().invert(), img);
    }
}
