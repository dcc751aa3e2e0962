mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use textloc::features::{extract_features, features_of_crop, haar_dwt_level1, subband_moments};
use textloc::{GrayImage, Region};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn dwt_matches_explicit_butterflies() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let (w, h) = (rng.gen_range(2..20), rng.gen_range(2..20));
        let img = random_image(&mut rng, w, h);
        let d = haar_dwt_level1(&img).unwrap();
        let oracle = naive_haar(&img);
        for (band, o) in [&d.ll, &d.lh, &d.hl, &d.hh].into_iter().zip(&oracle) {
            for (j, row) in o.iter().enumerate() {
                for (i, &v) in row.iter().enumerate() {
                    assert!((band.get(i, j) - v).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn energy_is_conserved_on_even_crops() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let (w, h) = (2 * rng.gen_range(1..16), 2 * rng.gen_range(1..16));
        let img = random_image(&mut rng, w, h);
        let d = haar_dwt_level1(&img).unwrap();
        let input: f64 = img.pixels().iter().map(|&v| (v as f64).powi(2)).sum();
        let bands = d.ll.energy() + d.lh.energy() + d.hl.energy() + d.hh.energy();
        assert!(rel_close(input, bands, 1e-9), "{input} vs {bands}");
    }
}

#[test]
fn moments_match_two_pass_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let grid: Vec<Vec<f64>> = (0..8).map(|_| (0..8).map(|_| rng.gen_range(-300.0..300.0)).collect()).collect();
        let flat: Vec<f64> = grid.iter().flatten().copied().collect();
        let (m, m2, m3) = subband_moments(&flat).unwrap();
        let (om, om2, om3) = two_pass_moments(&grid);
        assert!(rel_close(m, om, 1e-12) || (m - om).abs() < 1e-12);
        assert!(rel_close(m2, om2, 1e-12));
        assert!(rel_close(m3, om3, 1e-12) || (m3 - om3).abs() < 1e-12 * om2.powf(1.5));
    }
}

#[test]
fn constant_patch_features_vanish() {
    let img = GrayImage::filled(40, 30, 90).unwrap();
    let region = Region {
        label: 1,
        x: 5,
        y: 5,
        w: 20,
        h: 8,
        pixel_count: 100,
    };
    assert_eq!(extract_features(&img, &region).unwrap().0, [0.0; 9]);
}

#[test]
fn vertical_stripes_put_energy_in_hl() {
    // 3 px stripes so that the pair alignment varies across the crop
    let img = GrayImage::from_fn(30, 12, |x, _| if (x / 3) % 2 == 0 { 220 } else { 30 }).unwrap();
    let d = haar_dwt_level1(&img).unwrap();
    let oracle = naive_haar(&img);
    let energy = |b: &Vec<Vec<f64>>| b.iter().flatten().map(|v| v * v).sum::<f64>();
    assert!(energy(&oracle[2]) > 0.0);
    assert_eq!(energy(&oracle[1]), 0.0);
    assert!(d.hl.energy() > d.lh.energy());
    let f = features_of_crop(&img).unwrap();
    // mu2(HL) dominates mu2(LH)
    assert!(f.0[4] > f.0[1]);
}

#[test]
fn features_depend_only_on_crop_content() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let patch = random_image(&mut rng, 14, 9);
    let mut a = GrayImage::filled(60, 40, 0).unwrap();
    let mut b = GrayImage::filled(60, 40, 255).unwrap();
    for y in 0..9 {
        for x in 0..14 {
            a.set(3 + x, 4 + y, patch.get(x, y));
            b.set(40 + x, 25 + y, patch.get(x, y));
        }
    }
    let ra = Region { label: 1, x: 3, y: 4, w: 14, h: 9, pixel_count: 1 };
    let rb = Region { label: 1, x: 40, y: 25, w: 14, h: 9, pixel_count: 1 };
    assert_eq!(extract_features(&a, &ra).unwrap(), extract_features(&b, &rb).unwrap());
}

#[test]
fn tiny_crops_fail() {
    let img = GrayImage::filled(10, 10, 1).unwrap();
    let r = Region { label: 1, x: 0, y: 0, w: 5, h: 1, pixel_count: 5 };
    assert!(extract_features(&img, &r).is_err());
}

proptest! {
    #[test]
    fn constant_offset_leaves_features_unchanged(seed in any::<u64>(), offset in 0u8..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, h) = (rng.gen_range(2..24), rng.gen_range(2..24));
        let img = GrayImage::from_fn(w, h, |_, _| rng.gen_range(0..196)).unwrap();
        let lifted = GrayImage::from_fn(w, h, |x, y| img.get(x, y) + offset).unwrap();
        let (f, g) = (features_of_crop(&img).unwrap(), features_of_crop(&lifted).unwrap());
        // compare each moment on its natural scale sigma^order, since a
        // near-zero skew only agrees to roundoff of that size
        for band in 0..3 {
            let sigma = f.0[3 * band + 1].max(1.0).sqrt();
            for order in 0..3 {
                let k = 3 * band + order;
                let scale = f.0[k].abs().max(sigma.powi(order as i32 + 1));
                prop_assert!((f.0[k] - g.0[k]).abs() <= 1e-12 * scale, "feature {} {} vs {}", k, f.0[k], g.0[k]);
            }
        }
    }

    #[test]
    fn variances_are_non_negative(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (w, h) = (rng.gen_range(2..20), rng.gen_range(2..20));
        let img = random_image(&mut rng, w, h);
        let f = features_of_crop(&img).unwrap();
        prop_assert!(f.is_finite());
        for k in [1, 4, 7] {
            prop_assert!(f.0[k] >= 0.0);
        }
    }
}
