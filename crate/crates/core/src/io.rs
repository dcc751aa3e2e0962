//! Image file I/O: binary PGM (P5) by hand, PNG through the `image` crate.
//!
//! Color inputs are reduced to intensity with BT.601 luma,
//! `round(0.299 R + 0.587 G + 0.114 B)`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::image::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImageFormat {
    #[default]
    Pgm,
    Png,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Pgm => "pgm",
            ImageFormat::Png => "png",
        }
    }

    pub fn from_path(path: &Path) -> Option<ImageFormat> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pgm" => Some(ImageFormat::Pgm),
            "png" => Some(ImageFormat::Png),
            _ => None,
        }
    }
}

impl std::str::FromStr for ImageFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pgm" => Ok(ImageFormat::Pgm),
            "png" => Ok(ImageFormat::Png),
            other => Err(format!("unsupported image format `{other}`")),
        }
    }
}

#[inline]
pub fn luma_bt601(r: u8, g: u8, b: u8) -> u8 {
    // Integer form of 0.299/0.587/0.114 scaled by 1000, rounded half up.
    let weighted = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((weighted + 500) / 1000) as u8
}

fn decode_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::ImageDecode {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

/// Parses the next whitespace-delimited header token, skipping `#` comments.
fn header_token(data: &[u8], pos: &mut usize) -> Option<usize> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && data[*pos].is_ascii_digit() {
        *pos += 1;
    }
    std::str::from_utf8(&data[start..*pos]).ok()?.parse().ok()
}

pub fn decode_pgm(data: &[u8], path: &Path) -> Result<GrayImage> {
    if data.len() < 2 || &data[..2] != b"P5" {
        return Err(decode_err(path, "not a binary PGM (missing P5 magic)"));
    }
    let mut pos = 2;
    let width = header_token(data, &mut pos).ok_or_else(|| decode_err(path, "bad width"))?;
    let height = header_token(data, &mut pos).ok_or_else(|| decode_err(path, "bad height"))?;
    let maxval = header_token(data, &mut pos).ok_or_else(|| decode_err(path, "bad maxval"))?;
    if !(1..=65535).contains(&maxval) {
        return Err(decode_err(path, format!("maxval {maxval} out of range")));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= data.len() || !data[pos].is_ascii_whitespace() {
        return Err(decode_err(path, "missing raster separator"));
    }
    pos += 1;
    let n = width
        .checked_mul(height)
        .ok_or_else(|| decode_err(path, "dimensions overflow"))?;
    let raster = &data[pos..];
    let pixels = if maxval < 256 {
        if raster.len() < n {
            return Err(decode_err(path, format!("raster truncated: {} of {n} bytes", raster.len())));
        }
        if maxval == 255 {
            raster[..n].to_vec()
        } else {
            raster[..n]
                .iter()
                .map(|&v| ((v.min(maxval as u8) as u32 * 255 + maxval as u32 / 2) / maxval as u32) as u8)
                .collect()
        }
    } else {
        if raster.len() < 2 * n {
            return Err(decode_err(path, "16-bit raster truncated"));
        }
        raster[..2 * n]
            .chunks_exact(2)
            .map(|c| {
                let v = (u16::from_be_bytes([c[0], c[1]]) as u32).min(maxval as u32);
                ((v * 255 + maxval as u32 / 2) / maxval as u32) as u8
            })
            .collect()
    };
    GrayImage::from_vec(width, height, pixels).map_err(|e| decode_err(path, e.to_string()))
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

fn decode_png(data: &[u8], path: &Path) -> Result<GrayImage> {
    use image::DynamicImage;
    let dynamic = image::load_from_memory_with_format(data, image::ImageFormat::Png)
        .map_err(|e| decode_err(path, e.to_string()))?;
    let (w, h) = (dynamic.width() as usize, dynamic.height() as usize);
    let pixels = match dynamic {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        other => other
            .to_rgb8()
            .pixels()
            .map(|p| luma_bt601(p.0[0], p.0[1], p.0[2]))
            .collect(),
    };
    GrayImage::from_vec(w, h, pixels).map_err(|e| decode_err(path, e.to_string()))
}

/// Loads a PGM or PNG file, sniffing the format from its magic bytes.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let data = std::fs::read(path)?;
    if data.starts_with(b"P5") {
        decode_pgm(&data, path)
    } else if data.starts_with(b"\x89PNG") {
        decode_png(&data, path)
    } else {
        Err(decode_err(path, "unrecognized image format (expected PGM P5 or PNG)"))
    }
}

pub fn save_image(img: &GrayImage, path: impl AsRef<Path>, format: ImageFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        ImageFormat::Pgm => std::fs::write(path, encode_pgm(img))?,
        ImageFormat::Png => {
            let buf = image::GrayImage::from_raw(img.width() as u32, img.height() as u32, img.pixels().to_vec())
                .expect("buffer matches dimensions");
            buf.save_with_format(path, image::ImageFormat::Png)
                .map_err(|e| decode_err(path, e.to_string()))?;
        }
    }
    Ok(())
}

/// Copy of `img` with one-pixel rectangle outlines burned in. Each outline
/// uses whichever of black or white contrasts more with the image mean.
pub fn annotate(img: &GrayImage, boxes: &[Rect]) -> GrayImage {
    let mut out = img.clone();
    let v = if img.mean() < 128.0 { 255 } else { 0 };
    for b in boxes {
        if b.w == 0 || b.h == 0 || !b.fits_within(img.width(), img.height()) {
            continue;
        }
        for x in b.x..b.right() {
            out.set(x, b.y, v);
            out.set(x, b.bottom() - 1, v);
        }
        for y in b.y..b.bottom() {
            out.set(b.x, y, v);
            out.set(b.right() - 1, y, v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luma_weights() {
        assert_eq!(luma_bt601(255, 255, 255), 255);
        assert_eq!(luma_bt601(0, 0, 0), 0);
        // 0.299 * 100 = 29.9 -> 30
        assert_eq!(luma_bt601(100, 0, 0), 30);
        // 0.587 * 10 + 0.114 * 10 = 7.01 -> 7
        assert_eq!(luma_bt601(0, 10, 10), 7);
    }

    #[test]
    fn pgm_header_with_comment() {
        let data = b"P5\n# made by hand\n3 2\n255\n\x01\x02\x03\x04\x05\x06";
        let img = decode_pgm(data, Path::new("t.pgm")).unwrap();
        assert_eq!(img.dimensions(), (3, 2));
        assert_eq!(img.pixels(), &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn pgm_rejects_truncation_and_bad_magic() {
        assert!(decode_pgm(b"P5\n3 2\n255\n\x01\x02", Path::new("t")).is_err());
        assert!(decode_pgm(b"P2\n1 1\n255\n0", Path::new("t")).is_err());
    }

    #[test]
    fn pgm_scales_low_maxval() {
        let img = decode_pgm(b"P5 2 1 15 \x00\x0f", Path::new("t")).unwrap();
        assert_eq!(img.pixels(), &[0, 255]);
    }

    #[test]
    fn pgm_round_trip() {
        let img = GrayImage::from_fn(7, 5, |x, y| (x * 31 + y * 7) as u8).unwrap();
        assert_eq!(decode_pgm(&encode_pgm(&img), Path::new("t")).unwrap(), img);
    }

    #[test]
    fn png_round_trip_and_color_conversion() {
        let dir = tempfile::tempdir().unwrap();
        let img = GrayImage::from_fn(9, 4, |x, y| (x * 20 + y) as u8).unwrap();
        let p = dir.path().join("a.png");
        save_image(&img, &p, ImageFormat::Png).unwrap();
        assert_eq!(load_image(&p).unwrap(), img);

        let rgb = image::RgbImage::from_fn(2, 1, |x, _| if x == 0 { image::Rgb([200, 100, 50]) } else { image::Rgb([0, 0, 255]) });
        let q = dir.path().join("c.png");
        rgb.save(&q).unwrap();
        let gray = load_image(&q).unwrap();
        // 59.8 + 58.7 + 5.7 = 124.2 -> 124 ; 0.114 * 255 = 29.07 -> 29
        assert_eq!(gray.pixels(), &[124, 29]);
    }

    #[test]
    fn annotate_draws_outline() {
        let img = GrayImage::filled(10, 10, 200).unwrap();
        let out = annotate(&img, &[Rect::new(2, 2, 4, 3)]);
        assert_eq!(out.get(2, 2), 0);
        assert_eq!(out.get(5, 4), 0);
        assert_eq!(out.get(3, 3), 200);
        assert_eq!(out.get(0, 0), 200);
    }
}
