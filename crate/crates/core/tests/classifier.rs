mod common;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use textloc::classifier::{
    fit_normalizer, load_model, predict, predict_batch, save_model, train, train_detailed, Label, TrainConfig,
    TrainingSet,
};
use textloc::FeatureVector;

pub fn gaussian_blobs(n: usize, seed: u64, separation: f64) -> TrainingSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).unwrap();
    (0..n)
        .map(|i| {
            let label = if i % 2 == 0 { Label::Text } else { Label::NonText };
            let centre = label.sign() * separation / 2.0;
            let mut v = [0.0; 9];
            for (k, x) in v.iter_mut().enumerate() {
                // heterogeneous scales, as with raw moment features
                *x = (centre + noise.sample(&mut rng)) * 10f64.powi(k as i32 % 4);
            }
            (FeatureVector(v), label)
        })
        .collect()
}

fn xor_set(n: usize, seed: u64) -> TrainingSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            let mut v: [f64; 9] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            v[0] = a;
            v[1] = b;
            let label = if a * b > 0.0 { Label::Text } else { Label::NonText };
            (FeatureVector(v), label)
        })
        .collect()
}

fn normalized(ts: &TrainingSet) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = fit_normalizer(ts).unwrap();
    (
        ts.samples.iter().map(|(f, _)| n.apply(f).to_vec()).collect(),
        ts.samples.iter().map(|(_, l)| l.sign()).collect(),
    )
}

#[test]
fn normalizer_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let n = rng.gen_range(2..40);
        let ts: TrainingSet = (0..n)
            .map(|_| (FeatureVector(std::array::from_fn(|_| rng.gen_range(-1e3..1e3))), Label::Text))
            .collect();
        let norm = fit_normalizer(&ts).unwrap();
        for k in 0..9 {
            let mut sum = 0.0;
            for (f, _) in &ts.samples {
                sum += f.0[k];
            }
            let mean = sum / n as f64;
            let mut ss = 0.0;
            for (f, _) in &ts.samples {
                ss += (f.0[k] - mean) * (f.0[k] - mean);
            }
            let std = (ss / n as f64).sqrt();
            assert!((norm.mean[k] - mean).abs() <= 1e-12 * mean.abs().max(1.0));
            assert!((norm.std[k] - std).abs() <= 1e-12 * std);
        }
    }
}

#[test]
fn separable_blobs_are_learned() {
    let ts = gaussian_blobs(200, 42, 6.0);
    let out = train_detailed(&ts, &TrainConfig::default()).unwrap();
    assert!(out.converged);
    assert!(out.training_accuracy >= 0.99, "accuracy {}", out.training_accuracy);
}

#[test]
fn objective_matches_independent_reference() {
    let ts = gaussian_blobs(60, 3, 2.0);
    // tight stopping so the dual gap is far below the comparison tolerance
    let cfg = TrainConfig {
        tol: 1e-6,
        ..TrainConfig::default()
    };
    let out = train_detailed(&ts, &cfg).unwrap();
    let (xs, ys) = normalized(&ts);
    let reference = subgradient_reference(&xs, &ys, cfg.c, 20_000);
    let got = out.final_objective();
    // the reference only approaches the optimum from above
    assert!(got <= reference * (1.0 + 1e-3), "smo {got} vs reference {reference}");
    assert!(got >= reference * (1.0 - 1e-2), "smo {got} vs reference {reference}");
    let recomputed = hinge_objective(&out.model.weights, out.model.bias, &xs, &ys, cfg.c);
    assert!((recomputed - got).abs() <= 1e-9 * got);
}

#[test]
fn xor_objective_never_increases() {
    let ts = xor_set(400, 9);
    let cfg = TrainConfig {
        c: 10.0,
        max_epochs: 50,
        ..TrainConfig::default()
    };
    let out = train_detailed(&ts, &cfg).unwrap();
    let h = &out.objective_history;
    assert!(h.len() > 10, "only {} checkpoints", h.len());
    assert!(h.windows(2).all(|w| w[1] <= w[0]), "{h:?}");
    assert!(out.final_objective() <= h[0]);
    assert!(out.iterations <= cfg.max_epochs * ts.len());
}

#[test]
fn separable_margins_hold() {
    let ts = gaussian_blobs(100, 5, 8.0);
    let cfg = TrainConfig {
        c: 100.0,
        ..TrainConfig::default()
    };
    let model = train(&ts, &cfg).unwrap();
    for (fv, label) in &ts.samples {
        let (_, m) = predict(&model, fv).unwrap();
        assert!(label.sign() * m >= 1.0 - cfg.tol, "margin {m}");
    }
}

#[test]
fn labels_survive_feature_rescaling() {
    let ts = gaussian_blobs(120, 8, 2.5);
    let scaled: TrainingSet = ts
        .samples
        .iter()
        .map(|(f, l)| (FeatureVector(f.0.map(|v| v * 10.0)), *l))
        .collect();
    let a = train(&ts, &TrainConfig::default()).unwrap();
    let b = train(&scaled, &TrainConfig::default()).unwrap();
    let probes = gaussian_blobs(100, 77, 1.0);
    for (f, _) in &probes.samples {
        let g = FeatureVector(f.0.map(|v| v * 10.0));
        assert_eq!(predict(&a, f).unwrap().0, predict(&b, &g).unwrap().0);
    }
}

#[test]
fn training_is_deterministic_given_seed() {
    let ts = xor_set(150, 4);
    let cfg = TrainConfig {
        seed: 11,
        ..TrainConfig::default()
    };
    assert_eq!(train(&ts, &cfg).unwrap(), train(&ts, &cfg).unwrap());
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let model = train(&gaussian_blobs(80, 2, 3.0), &TrainConfig::default()).unwrap();
    let path = dir.path().join("m.svm");
    save_model(&model, &path).unwrap();
    assert_eq!(load_model(&path).unwrap(), model);

    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    assert!(load_model(&path).is_err());
    assert!(load_model(dir.path().join("missing")).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn batch_predict_equals_single(seed in any::<u64>()) {
        let model = train(&gaussian_blobs(40, seed, 2.0), &TrainConfig::default()).unwrap();
        let probes: Vec<FeatureVector> = gaussian_blobs(30, seed ^ 1, 1.0).samples.iter().map(|(f, _)| *f).collect();
        let batch = predict_batch(&model, &probes).unwrap();
        for (f, b) in probes.iter().zip(batch) {
            prop_assert_eq!(predict(&model, f).unwrap(), b);
        }
    }
}
