//! Independent reference implementations used as test oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::VecDeque;

use rand::Rng;
use textloc::{BinaryImage, GrayImage, StructuringElement};

pub fn random_image(rng: &mut impl Rng, w: usize, h: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.gen()).unwrap()
}

/// Random flat element up to `max`x`max`, with a random mask whose origin
/// cell is always active.
pub fn random_flat_se(rng: &mut impl Rng, max: usize) -> StructuringElement {
    let w = rng.gen_range(1..=max);
    let h = rng.gen_range(1..=max);
    if rng.gen_bool(0.5) {
        return StructuringElement::rect(w, h).unwrap();
    }
    let mut mask: Vec<bool> = (0..w * h).map(|_| rng.gen_bool(0.6)).collect();
    mask[((h - 1) / 2) * w + (w - 1) / 2] = true;
    StructuringElement::from_mask(w, h, &mask).unwrap()
}

/// Direct evaluation of `max_{z in S, x - z in I} I(x - z) + S(z)`.
pub fn naive_dilate(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    let (w, h) = img.dimensions();
    let (ox, oy) = se.origin();
    GrayImage::from_fn(w, h, |x, y| {
        let mut best: Option<i32> = None;
        for cy in 0..se.height() {
            for cx in 0..se.width() {
                let Some(s) = se.cell(cx, cy) else { continue };
                let zx = cx as i64 - ox as i64;
                let zy = cy as i64 - oy as i64;
                let sx = x as i64 - zx;
                let sy = y as i64 - zy;
                if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                    continue;
                }
                let v = img.get(sx as usize, sy as usize) as i32 + s as i32;
                best = Some(best.map_or(v, |b| b.max(v)));
            }
        }
        best.unwrap_or(0).clamp(0, 255) as u8
    })
    .unwrap()
}

/// Direct evaluation of `min_{z in S} I(x + z) - S(z)` over in-bounds `x + z`.
pub fn naive_erode(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    let (w, h) = img.dimensions();
    let (ox, oy) = se.origin();
    GrayImage::from_fn(w, h, |x, y| {
        let mut best: Option<i32> = None;
        for cy in 0..se.height() {
            for cx in 0..se.width() {
                let Some(s) = se.cell(cx, cy) else { continue };
                let sx = x as i64 + cx as i64 - ox as i64;
                let sy = y as i64 + cy as i64 - oy as i64;
                if sx < 0 || sy < 0 || sx >= w as i64 || sy >= h as i64 {
                    continue;
                }
                let v = img.get(sx as usize, sy as usize) as i32 - s as i32;
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        best.unwrap_or(255).clamp(0, 255) as u8
    })
    .unwrap()
}

pub fn naive_open(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    naive_dilate(&naive_erode(img, se), se)
}

pub fn naive_close(img: &GrayImage, se: &StructuringElement) -> GrayImage {
    naive_erode(&naive_dilate(img, se), se)
}

pub fn naive_absdiff(a: &GrayImage, b: &GrayImage) -> GrayImage {
    GrayImage::from_fn(a.width(), a.height(), |x, y| {
        (a.get(x, y) as i32 - b.get(x, y) as i32).unsigned_abs() as u8
    })
    .unwrap()
}

/// BFS flood fill: `(min_x, min_y, w, h, count)` per component, in order of
/// each component's first raster pixel.
pub fn flood_fill_components(mask: &BinaryImage, eight: bool) -> Vec<(usize, usize, usize, usize, usize)> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            if !mask.get(sx, sy) || seen[sy * w + sx] {
                continue;
            }
            let (mut x0, mut y0, mut x1, mut y1, mut n) = (sx, sy, sx, sy, 0);
            let mut queue = VecDeque::from([(sx, sy)]);
            seen[sy * w + sx] = true;
            while let Some((x, y)) = queue.pop_front() {
                n += 1;
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if (dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0) {
                            continue;
                        }
                        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if mask.get(nx, ny) && !seen[ny * w + nx] {
                            seen[ny * w + nx] = true;
                            queue.push_back((nx, ny));
                        }
                    }
                }
            }
            out.push((x0, y0, x1 - x0 + 1, y1 - y0 + 1, n));
        }
    }
    out
}

/// Two-pass population moments over a 2-D grid given as rows.
pub fn two_pass_moments(grid: &[Vec<f64>]) -> (f64, f64, f64) {
    let m = grid.len();
    let n = grid[0].len();
    let count = (m * n) as f64;
    let mut sum = 0.0;
    for row in grid {
        for &v in row {
            sum += v;
        }
    }
    let mean = sum / count;
    let (mut s2, mut s3) = (0.0, 0.0);
    for row in grid {
        for &v in row {
            s2 += (v - mean).powi(2);
            s3 += (v - mean).powi(3);
        }
    }
    (mean, s2 / count, s3 / count)
}

/// Naive single-level Haar by explicit 2x2 butterflies.
pub fn naive_haar(img: &GrayImage) -> [Vec<Vec<f64>>; 4] {
    let (w, h) = (img.width() / 2, img.height() / 2);
    let mut bands: [Vec<Vec<f64>>; 4] = Default::default();
    for b in bands.iter_mut() {
        *b = vec![vec![0.0; w]; h];
    }
    for j in 0..h {
        for i in 0..w {
            let a = img.get(2 * i, 2 * j) as f64;
            let b = img.get(2 * i + 1, 2 * j) as f64;
            let c = img.get(2 * i, 2 * j + 1) as f64;
            let d = img.get(2 * i + 1, 2 * j + 1) as f64;
            bands[0][j][i] = (a + b + c + d) / 2.0; // LL
            bands[1][j][i] = (a + b - c - d) / 2.0; // LH
            bands[2][j][i] = (a - b + c - d) / 2.0; // HL
            bands[3][j][i] = (a - b - c + d) / 2.0; // HH
        }
    }
    bands
}

/// Primal soft-margin objective on raw (already normalized) vectors.
pub fn hinge_objective(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64], c: f64) -> f64 {
    let reg: f64 = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let loss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| {
            let f: f64 = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b;
            (1.0 - y * f).max(0.0)
        })
        .sum();
    reg + c * loss
}

/// Full-batch subgradient descent on the primal with diminishing steps,
/// returning the best objective seen.
pub fn subgradient_reference(xs: &[Vec<f64>], ys: &[f64], c: f64, iters: usize) -> f64 {
    let d = xs[0].len();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut best = hinge_objective(&w, b, xs, ys, c);
    let scale = 1.0 / (c * xs.len() as f64);
    for t in 1..=iters {
        let mut gw = w.clone();
        let mut gb = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let f: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + b;
            if y * f < 1.0 {
                for k in 0..d {
                    gw[k] -= c * y * x[k];
                }
                gb -= c * y;
            }
        }
        let step = scale / (t as f64).sqrt();
        for k in 0..d {
            w[k] -= step * gw[k];
        }
        b -= step * gb;
        best = best.min(hinge_objective(&w, b, xs, ys, c));
    }
    best
}
