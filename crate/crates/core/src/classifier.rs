//! Linear soft-margin SVM over z-scored feature vectors.
//!
//! Training solves the dual
//!
//! ```text
//! min_a  1/2 a'Qa - e'a   s.t.  y'a = 0,  0 <= a_i <= C,   Q_ij = y_i y_j <x_i, x_j>
//! ```
//!
//! with pairwise SMO updates and second-order working-set selection. The
//! kernel is linear, so the primal weight vector is maintained explicitly and
//! every gradient is recomputed from it in `O(dim)` per sample.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::features::{FeatureVector, FEATURE_DIM};

pub const MODEL_HEADER: &str = "textloc-svm v1";
const MODEL_MAGIC: &str = "textloc-svm";

/// Smallest curvature used when two samples coincide.
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Text,
    NonText,
}

impl Label {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Text => 1.0,
            Label::NonText => -1.0,
        }
    }

    /// Non-negative margins map to text.
    #[inline]
    pub fn from_margin(margin: f64) -> Label {
        if margin >= 0.0 {
            Label::Text
        } else {
            Label::NonText
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingSet {
    pub samples: Vec<(FeatureVector, Label)>,
}

impl TrainingSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, fv: FeatureVector, label: Label) {
        self.samples.push((fv, label));
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(positives, negatives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.samples.iter().filter(|(_, l)| *l == Label::Text).count();
        (pos, self.samples.len() - pos)
    }
}

impl FromIterator<(FeatureVector, Label)> for TrainingSet {
    fn from_iter<I: IntoIterator<Item = (FeatureVector, Label)>>(iter: I) -> Self {
        TrainingSet {
            samples: iter.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Soft-margin penalty.
    pub c: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub tol: f64,
    /// One epoch is `n` pair updates.
    pub max_epochs: usize,
    /// Seeds the sample permutation.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return invalid(format!("C must be positive and finite, got {}", self.c));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return invalid(format!("tol must be positive and finite, got {}", self.tol));
        }
        if self.max_epochs == 0 {
            return invalid("max_epochs must be at least 1");
        }
        Ok(())
    }
}

/// Per-feature z-score statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    pub mean: [f64; FEATURE_DIM],
    pub std: [f64; FEATURE_DIM],
}

impl Normalizer {
    pub fn apply(&self, fv: &FeatureVector) -> [f64; FEATURE_DIM] {
        let mut out = [0.0; FEATURE_DIM];
        for (k, o) in out.iter_mut().enumerate() {
            *o = (fv.0[k] - self.mean[k]) / self.std[k];
        }
        out
    }
}

/// Per-feature mean and population standard deviation; zero-variance
/// features get a standard deviation of 1.
pub fn fit_normalizer(ts: &TrainingSet) -> Result<Normalizer> {
    if ts.is_empty() {
        return invalid("cannot fit a normalizer to an empty training set");
    }
    let n = ts.len() as f64;
    let mut mean = [0.0; FEATURE_DIM];
    for (fv, _) in &ts.samples {
        for (m, v) in mean.iter_mut().zip(fv.0) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = [0.0; FEATURE_DIM];
    for (fv, _) in &ts.samples {
        for k in 0..FEATURE_DIM {
            let d = fv.0[k] - mean[k];
            var[k] += d * d;
        }
    }
    let std = var.map(|v| {
        let s = (v / n).sqrt();
        if s > 0.0 && s.is_finite() {
            s
        } else {
            1.0
        }
    });
    Ok(Normalizer { mean, std })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub weights: [f64; FEATURE_DIM],
    pub bias: f64,
    pub norm_mean: [f64; FEATURE_DIM],
    pub norm_std: [f64; FEATURE_DIM],
    /// Echo of the configuration the model was trained with.
    pub train_config: Option<TrainConfig>,
}

impl SvmModel {
    pub fn normalizer(&self) -> Normalizer {
        Normalizer {
            mean: self.norm_mean,
            std: self.norm_std,
        }
    }

    /// Signed decision value of an already normalized vector.
    pub fn decision(&self, z: &[f64; FEATURE_DIM]) -> f64 {
        dot(&self.weights, z) + self.bias
    }

    pub fn validate(&self) -> Result<()> {
        let all = self
            .weights
            .iter()
            .chain(&self.norm_mean)
            .chain(&self.norm_std)
            .chain(std::iter::once(&self.bias));
        if all.into_iter().any(|v| !v.is_finite()) {
            return invalid("model contains non-finite values");
        }
        if self.norm_std.iter().any(|&s| s <= 0.0) {
            return invalid("model normalization std must be positive");
        }
        Ok(())
    }
}

#[inline]
fn dot(a: &[f64; FEATURE_DIM], b: &[f64; FEATURE_DIM]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(label, margin)` for one raw feature vector.
pub fn predict(model: &SvmModel, fv: &FeatureVector) -> Result<(Label, f64)> {
    if !fv.is_finite() {
        return invalid("feature vector contains non-finite values");
    }
    let margin = model.decision(&model.normalizer().apply(fv));
    Ok((Label::from_margin(margin), margin))
}

pub fn predict_batch(model: &SvmModel, fvs: &[FeatureVector]) -> Result<Vec<(Label, f64)>> {
    if fvs.iter().any(|f| !f.is_finite()) {
        return invalid("feature vector contains non-finite values");
    }
    let norm = model.normalizer();
    Ok(fvs
        .iter()
        .map(|fv| {
            let m = model.decision(&norm.apply(fv));
            (Label::from_margin(m), m)
        })
        .collect())
}

/// `1/2 |w|^2 + C * sum(max(0, 1 - y (w.x + b)))` over normalized samples.
pub fn primal_objective(weights: &[f64; FEATURE_DIM], bias: f64, xs: &[[f64; FEATURE_DIM]], ys: &[f64], c: f64) -> f64 {
    let hinge: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, &y)| (1.0 - y * (dot(weights, x) + bias)).max(0.0))
        .sum();
    0.5 * dot(weights, weights) + c * hinge
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: SvmModel,
    /// Primal objective of the retained model: at start, after each epoch,
    /// and at termination.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub training_accuracy: f64,
    pub positives: usize,
    pub negatives: usize,
}

impl TrainOutcome {
    pub fn final_objective(&self) -> f64 {
        *self.objective_history.last().expect("history starts non-empty")
    }
}

pub fn train(ts: &TrainingSet, cfg: &TrainConfig) -> Result<SvmModel> {
    train_detailed(ts, cfg).map(|o| o.model)
}

struct Smo<'a> {
    xs: &'a [[f64; FEATURE_DIM]],
    ys: &'a [f64],
    kdiag: Vec<f64>,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    w: [f64; FEATURE_DIM],
    c: f64,
}

impl<'a> Smo<'a> {
    fn new(xs: &'a [[f64; FEATURE_DIM]], ys: &'a [f64], c: f64) -> Self {
        let n = xs.len();
        Self {
            xs,
            ys,
            kdiag: xs.iter().map(|x| dot(x, x)).collect(),
            alpha: vec![0.0; n],
            grad: vec![-1.0; n],
            w: [0.0; FEATURE_DIM],
            c,
        }
    }

    #[inline]
    fn in_up(&self, t: usize) -> bool {
        if self.ys[t] > 0.0 {
            self.alpha[t] < self.c
        } else {
            self.alpha[t] > 0.0
        }
    }

    #[inline]
    fn in_low(&self, t: usize) -> bool {
        if self.ys[t] > 0.0 {
            self.alpha[t] > 0.0
        } else {
            self.alpha[t] < self.c
        }
    }

    /// Second-order working-set selection. `None` once the maximal violation
    /// is below `tol`.
    fn select(&self, tol: f64) -> Option<(usize, usize)> {
        let n = self.xs.len();
        let mut gmax = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if self.in_up(t) {
                let v = -self.ys[t] * self.grad[t];
                if v >= gmax {
                    gmax = v;
                    i = t;
                }
            }
        }
        if i == usize::MAX {
            return None;
        }
        let xi = &self.xs[i];
        let mut gmax2 = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !self.in_low(t) {
                continue;
            }
            let v = self.ys[t] * self.grad[t];
            gmax2 = gmax2.max(v);
            let diff = gmax + v;
            if diff > 0.0 {
                let mut quad = self.kdiag[i] + self.kdiag[t] - 2.0 * dot(xi, &self.xs[t]);
                if quad <= 0.0 {
                    quad = TAU;
                }
                let obj = -(diff * diff) / quad;
                if obj <= best {
                    best = obj;
                    j = t;
                }
            }
        }
        if gmax + gmax2 < tol || j == usize::MAX {
            None
        } else {
            Some((i, j))
        }
    }

    fn update(&mut self, i: usize, j: usize) {
        let c = self.c;
        let (yi, yj) = (self.ys[i], self.ys[j]);
        let kij = dot(&self.xs[i], &self.xs[j]);
        let (old_i, old_j) = (self.alpha[i], self.alpha[j]);
        let (mut ai, mut aj) = (old_i, old_j);
        let (gi, gj) = (self.grad[i], self.grad[j]);

        if yi != yj {
            let mut quad = self.kdiag[i] + self.kdiag[j] + 2.0 * (yi * yj * kij);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-gi - gj) / quad;
            let diff = ai - aj;
            ai += delta;
            aj += delta;
            if diff > 0.0 {
                if aj < 0.0 {
                    aj = 0.0;
                    ai = diff;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = -diff;
            }
            if diff > 0.0 {
                if ai > c {
                    ai = c;
                    aj = c - diff;
                }
            } else if aj > c {
                aj = c;
                ai = c + diff;
            }
        } else {
            let mut quad = self.kdiag[i] + self.kdiag[j] - 2.0 * (yi * yj * kij);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (gi - gj) / quad;
            let sum = ai + aj;
            ai -= delta;
            aj += delta;
            if sum > c {
                if ai > c {
                    ai = c;
                    aj = sum - c;
                }
            } else if aj < 0.0 {
                aj = 0.0;
                ai = sum;
            }
            if sum > c {
                if aj > c {
                    aj = c;
                    ai = sum - c;
                }
            } else if ai < 0.0 {
                ai = 0.0;
                aj = sum;
            }
        }

        self.alpha[i] = ai;
        self.alpha[j] = aj;
        let (di, dj) = ((ai - old_i) * yi, (aj - old_j) * yj);
        for k in 0..FEATURE_DIM {
            self.w[k] += di * self.xs[i][k] + dj * self.xs[j][k];
        }
        for t in 0..self.xs.len() {
            self.grad[t] = self.ys[t] * dot(&self.w, &self.xs[t]) - 1.0;
        }
    }

    /// Bias from free multipliers, or the midpoint of the feasible interval.
    fn bias(&self) -> f64 {
        let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut sum, mut free) = (0.0, 0usize);
        for t in 0..self.xs.len() {
            let yg = self.ys[t] * self.grad[t];
            let a = self.alpha[t];
            if a >= self.c {
                if self.ys[t] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if a <= 0.0 {
                if self.ys[t] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                free += 1;
                sum += yg;
            }
        }
        let rho = if free > 0 { sum / free as f64 } else { (ub + lb) / 2.0 };
        -rho
    }
}

/// Trains and reports the objective trajectory. The returned model is the
/// lowest-objective iterate seen at epoch boundaries and at termination.
pub fn train_detailed(ts: &TrainingSet, cfg: &TrainConfig) -> Result<TrainOutcome> {
    cfg.validate()?;
    if ts.samples.iter().any(|(fv, _)| !fv.is_finite()) {
        return invalid("training set contains non-finite features");
    }
    let (positives, negatives) = ts.class_counts();
    if positives == 0 || negatives == 0 {
        return Err(Error::InsufficientData { positives, negatives });
    }
    let norm = fit_normalizer(ts)?;

    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let xs: Vec<[f64; FEATURE_DIM]> = order.iter().map(|&i| norm.apply(&ts.samples[i].0)).collect();
    let ys: Vec<f64> = order.iter().map(|&i| ts.samples[i].1.sign()).collect();

    let n = xs.len();
    let mut smo = Smo::new(&xs, &ys, cfg.c);

    let mut best_w = smo.w;
    let mut best_b = smo.bias();
    let mut best_obj = primal_objective(&best_w, best_b, &xs, &ys, cfg.c);
    let mut history = vec![best_obj];

    let mut checkpoint = |w: [f64; FEATURE_DIM], b: f64, history: &mut Vec<f64>| {
        let obj = primal_objective(&w, b, &xs, &ys, cfg.c);
        if obj <= best_obj {
            best_obj = obj;
            best_w = w;
            best_b = b;
        }
        history.push(best_obj);
    };

    let max_iter = cfg.max_epochs.saturating_mul(n);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        match smo.select(cfg.tol) {
            None => {
                converged = true;
                break;
            }
            Some((i, j)) => smo.update(i, j),
        }
        iterations += 1;
        if iterations % n == 0 {
            checkpoint(smo.w, smo.bias(), &mut history);
        }
    }
    if iterations % n != 0 || iterations == 0 {
        checkpoint(smo.w, smo.bias(), &mut history);
    }

    let model = SvmModel {
        weights: best_w,
        bias: best_b,
        norm_mean: norm.mean,
        norm_std: norm.std,
        train_config: Some(*cfg),
    };
    let correct = xs
        .iter()
        .zip(&ys)
        .filter(|(x, &y)| Label::from_margin(model.decision(x)).sign() == y)
        .count();

    Ok(TrainOutcome {
        model,
        objective_history: history,
        iterations,
        converged,
        training_accuracy: correct as f64 / n as f64,
        positives,
        negatives,
    })
}

fn push_array(out: &mut String, key: &str, values: &[f64]) {
    out.push_str(key);
    out.push(':');
    for v in values {
        // Display for f64 is the shortest representation that round-trips.
        let _ = write!(out, " {v}");
    }
    out.push('\n');
}

pub fn model_to_string(model: &SvmModel) -> String {
    let mut out = String::new();
    out.push_str(MODEL_HEADER);
    out.push('\n');
    push_array(&mut out, "weights", &model.weights);
    push_array(&mut out, "bias", &[model.bias]);
    push_array(&mut out, "norm_mean", &model.norm_mean);
    push_array(&mut out, "norm_std", &model.norm_std);
    if let Some(tc) = &model.train_config {
        let _ = writeln!(
            out,
            "train: c={} tol={} max_epochs={} seed={}",
            tc.c, tc.tol, tc.max_epochs, tc.seed
        );
    }
    out
}

fn format_err(line: usize, msg: impl Into<String>) -> Error {
    Error::ModelFormat { line, msg: msg.into() }
}

fn parse_values<const N: usize>(line_no: usize, line: Option<&str>, key: &str) -> Result<[f64; N]> {
    let line = line.ok_or_else(|| format_err(line_no, format!("missing `{key}:` line")))?;
    let rest = line
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix(':'))
        .ok_or_else(|| format_err(line_no, format!("expected `{key}:`")))?;
    let vals: Vec<f64> = rest
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| format_err(line_no, format!("bad number `{tok}`")))
        })
        .collect::<Result<_>>()?;
    vals.try_into()
        .map_err(|v: Vec<f64>| format_err(line_no, format!("`{key}` needs {N} values, found {}", v.len())))
}

fn parse_train_line(line_no: usize, line: &str) -> Result<TrainConfig> {
    let rest = line
        .strip_prefix("train:")
        .ok_or_else(|| format_err(line_no, "expected `train:`"))?;
    let mut tc = TrainConfig::default();
    for tok in rest.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format_err(line_no, format!("bad entry `{tok}`")))?;
        let bad = || format_err(line_no, format!("bad value for `{k}`"));
        match k {
            "c" => tc.c = v.parse().map_err(|_| bad())?,
            "tol" => tc.tol = v.parse().map_err(|_| bad())?,
            "max_epochs" => tc.max_epochs = v.parse().map_err(|_| bad())?,
            "seed" => tc.seed = v.parse().map_err(|_| bad())?,
            _ => return Err(format_err(line_no, format!("unknown key `{k}`"))),
        }
    }
    Ok(tc)
}

pub fn model_from_str(text: &str) -> Result<SvmModel> {
    let mut lines = text.lines();
    let header = lines.next().map(str::trim_end).unwrap_or("");
    if header != MODEL_HEADER {
        if header.starts_with(MODEL_MAGIC) {
            return Err(Error::VersionMismatch {
                expected: MODEL_HEADER.to_string(),
                found: header.to_string(),
            });
        }
        return Err(format_err(1, format!("expected `{MODEL_HEADER}` header")));
    }
    let weights = parse_values::<FEATURE_DIM>(2, lines.next(), "weights")?;
    let [bias] = parse_values::<1>(3, lines.next(), "bias")?;
    let norm_mean = parse_values::<FEATURE_DIM>(4, lines.next(), "norm_mean")?;
    let norm_std = parse_values::<FEATURE_DIM>(5, lines.next(), "norm_std")?;
    let mut train_config = None;
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 6;
        if line.trim().is_empty() {
            continue;
        }
        if train_config.is_some() {
            return Err(format_err(line_no, "unexpected trailing content"));
        }
        train_config = Some(parse_train_line(line_no, line)?);
    }
    let model = SvmModel {
        weights,
        bias,
        norm_mean,
        norm_std,
        train_config,
    };
    model.validate().map_err(|e| format_err(0, e.to_string()))?;
    Ok(model)
}

pub fn save_model(model: &SvmModel, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, model_to_string(model))?;
    Ok(())
}

pub fn load_model(path: impl AsRef<Path>) -> Result<SvmModel> {
    model_from_str(&std::fs::read_to_string(path)?)
}
