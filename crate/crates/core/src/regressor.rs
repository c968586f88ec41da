//! A one-hidden-layer quality regressor trained with the Huber loss.
//!
//! Architecture: `d → h (tanh) → 1`. Trained by plain mini-batch gradient
//! descent with a fixed learning rate; batches are drawn from a seeded
//! shuffle so the whole parameter trajectory is reproducible.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::EmbeddingDataset;
use crate::error::{Error, Result};
use crate::labels::{LabelEntry, SCORE_MAX, SCORE_MIN};
use crate::seeding::{derive_seed, rng_from_seed};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Huber loss of residual `target - pred`: `r²/2` inside `|r| ≤ ζ`,
/// `ζ|r| - ζ²/2` outside.
pub fn huber_loss(pred: f64, target: f64, zeta: f64) -> f64 {
    let r = target - pred;
    if r.abs() <= zeta {
        0.5 * r * r
    } else {
        zeta * r.abs() - 0.5 * zeta * zeta
    }
}

/// d(huber)/d(pred).
pub fn huber_grad(pred: f64, target: f64, zeta: f64) -> f64 {
    let r = target - pred;
    if r.abs() <= zeta {
        -r
    } else {
        -zeta * r.signum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
        }
    }

    /// Derivative expressed through the activation output `y`.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
        }
    }
}

/// Fully connected layer; `weights` is `outputs × inputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.weights.chunks(self.inputs).zip(&self.bias).map(|(row, b)| {
            b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
        }));
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressorModel {
    /// Per-feature standardization applied before the hidden layer:
    /// `(x - input_mean) / input_std`. Fitted on the training rows, not
    /// trained.
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    pub hidden: Dense,
    pub output: Dense,
    pub activation: Activation,
}

/// Gradient laid out like [`RegressorModel::parameters`].
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient(pub Vec<f64>);

impl RegressorModel {
    pub fn zeros(dim: usize, hidden: usize) -> Self {
        Self {
            input_mean: vec![0.0; dim],
            input_std: vec![1.0; dim],
            hidden: Dense::zeros(dim, hidden),
            output: Dense::zeros(hidden, 1),
            activation: Activation::Tanh,
        }
    }

    /// Xavier-uniform weights, zero biases.
    pub fn init<R: Rng>(dim: usize, hidden: usize, rng: &mut R) -> Self {
        let mut model = Self::zeros(dim, hidden);
        let a1 = (6.0 / (dim + hidden) as f64).sqrt();
        model.hidden.weights.iter_mut().for_each(|w| *w = rng.random_range(-a1..a1));
        let a2 = (6.0 / (hidden + 1) as f64).sqrt();
        model.output.weights.iter_mut().for_each(|w| *w = rng.random_range(-a2..a2));
        model
    }

    pub fn dim(&self) -> usize {
        self.hidden.inputs
    }

    pub fn hidden_width(&self) -> usize {
        self.hidden.outputs
    }

    pub fn validate(&self) -> Result<()> {
        let shapes_ok = self.hidden.weights.len() == self.hidden.inputs * self.hidden.outputs
            && self.hidden.bias.len() == self.hidden.outputs
            && self.output.inputs == self.hidden.outputs
            && self.output.outputs == 1
            && self.output.weights.len() == self.output.inputs
            && self.output.bias.len() == 1
            && self.input_mean.len() == self.hidden.inputs
            && self.input_std.len() == self.hidden.inputs;
        if !shapes_ok {
            return Err(Error::Format("regressor layer shapes do not chain".into()));
        }
        if self.input_std.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::Validation("input standard deviations must be positive".into()));
        }
        if self.parameters().iter().chain(&self.input_mean).any(|p| !p.is_finite()) {
            return Err(Error::Validation("regressor has non-finite parameters".into()));
        }
        Ok(())
    }

    /// Flattened parameters: hidden weights, hidden bias, output weights,
    /// output bias.
    pub fn parameters(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.hidden.param_count() + self.output.param_count());
        p.extend(&self.hidden.weights);
        p.extend(&self.hidden.bias);
        p.extend(&self.output.weights);
        p.extend(&self.output.bias);
        p
    }

    pub fn set_parameters(&mut self, params: &[f64]) {
        let mut it = params.iter().copied();
        for slot in self
            .hidden
            .weights
            .iter_mut()
            .chain(self.hidden.bias.iter_mut())
            .chain(self.output.weights.iter_mut())
            .chain(self.output.bias.iter_mut())
        {
            *slot = it.next().expect("parameter vector too short");
        }
        assert!(it.next().is_none(), "parameter vector too long");
    }

    /// Sets the input standardization from the column statistics of `rows`.
    /// Constant columns keep unit scale.
    pub fn fit_input_scaling<'a>(&mut self, rows: impl IntoIterator<Item = &'a [f64]> + Clone) {
        let d = self.dim();
        let count = rows.clone().into_iter().count().max(1) as f64;
        let mut mean = vec![0.0; d];
        for row in rows.clone() {
            mean.iter_mut().zip(row).for_each(|(m, v)| *m += v / count);
        }
        let mut var = vec![0.0; d];
        for row in rows {
            var.iter_mut()
                .zip(row.iter().zip(&mean))
                .for_each(|(s, (v, m))| *s += (v - m) * (v - m) / count);
        }
        self.input_std = var.iter().map(|v| if *v > 1e-24 { v.sqrt() } else { 1.0 }).collect();
        self.input_mean = mean;
    }

    fn standardize(&self, x: &[f64], buf: &mut Vec<f64>) {
        buf.clear();
        buf.extend(x.iter().zip(&self.input_mean).zip(&self.input_std).map(|((v, m), s)| (v - m) / s));
    }

    fn hidden_activations(&self, x: &[f64], buf: &mut Vec<f64>) {
        let mut z = Vec::with_capacity(x.len());
        self.standardize(x, &mut z);
        self.hidden.apply(&z, buf);
        buf.iter_mut().for_each(|v| *v = self.activation.apply(*v));
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let mut h = Vec::with_capacity(self.hidden_width());
        self.hidden_activations(x, &mut h);
        Ok(self.output.bias[0] + self.output.weights.iter().zip(&h).map(|(w, v)| w * v).sum::<f64>())
    }

    pub fn save(&self, path: &Path, config: Option<&TrainConfig>) -> Result<()> {
        let file = ModelFile {
            format_version: MODEL_FORMAT_VERSION,
            d: self.dim(),
            h: self.hidden_width(),
            nonlinearity: self.activation,
            input_mean: self.input_mean.clone(),
            input_std: self.input_std.clone(),
            hidden_weights: self.hidden.weights.clone(),
            hidden_bias: self.hidden.bias.clone(),
            output_weights: self.output.weights.clone(),
            output_bias: self.output.bias[0],
            config: config.copied(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<(Self, Option<TrainConfig>)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ModelFile = serde_json::from_str(&text)?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported model format version {}", file.format_version)));
        }
        let model = Self {
            input_mean: file.input_mean,
            input_std: file.input_std,
            hidden: Dense {
                inputs: file.d,
                outputs: file.h,
                weights: file.hidden_weights,
                bias: file.hidden_bias,
            },
            output: Dense {
                inputs: file.h,
                outputs: 1,
                weights: file.output_weights,
                bias: vec![file.output_bias],
            },
            activation: file.nonlinearity,
        };
        model.validate()?;
        Ok((model, file.config))
    }
}

/// On-disk JSON layout of a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub d: usize,
    pub h: usize,
    pub nonlinearity: Activation,
    pub input_mean: Vec<f64>,
    pub input_std: Vec<f64>,
    pub hidden_weights: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
    pub config: Option<TrainConfig>,
}

/// Mean Huber loss over `batch` and its exact gradient.
pub fn loss_and_gradient(model: &RegressorModel, batch: &[(&[f64], f64)], zeta: f64) -> (f64, Gradient) {
    let (d, h) = (model.dim(), model.hidden_width());
    let off_hb = h * d;
    let off_ow = off_hb + h;
    let off_ob = off_ow + h;
    let mut grad = vec![0.0; off_ob + 1];
    let mut loss = 0.0;
    let mut act = Vec::with_capacity(h);
    let mut z = Vec::with_capacity(d);
    for &(x, target) in batch {
        model.standardize(x, &mut z);
        model.hidden.apply(&z, &mut act);
        act.iter_mut().for_each(|v| *v = model.activation.apply(*v));
        let pred = model.output.bias[0] + model.output.weights.iter().zip(&act).map(|(w, v)| w * v).sum::<f64>();
        loss += huber_loss(pred, target, zeta);
        let dpred = huber_grad(pred, target, zeta);
        grad[off_ob] += dpred;
        for k in 0..h {
            grad[off_ow + k] += dpred * act[k];
            let dz = dpred * model.output.weights[k] * model.activation.derivative_from_output(act[k]);
            grad[off_hb + k] += dz;
            for (g, xv) in grad[k * d..(k + 1) * d].iter_mut().zip(&z) {
                *g += dz * xv;
            }
        }
    }
    let scale = 1.0 / batch.len().max(1) as f64;
    grad.iter_mut().for_each(|g| *g *= scale);
    (loss * scale, Gradient(grad))
}

pub fn loss_gradient(model: &RegressorModel, batch: &[(&[f64], f64)], zeta: f64) -> Gradient {
    loss_and_gradient(model, batch, zeta).1
}

pub fn mean_loss(model: &RegressorModel, data: &[(&[f64], f64)], zeta: f64) -> f64 {
    let total: f64 = data
        .iter()
        .map(|&(x, t)| huber_loss(model.forward(x).expect("dimension checked"), t, zeta))
        .sum();
    total / data.len() as f64
}

/// One gradient-descent update on `batch`.
pub fn sgd_step(model: &mut RegressorModel, batch: &[(&[f64], f64)], learning_rate: f64, zeta: f64) {
    let Gradient(g) = loss_gradient(model, batch, zeta);
    let mut p = model.parameters();
    p.iter_mut().zip(&g).for_each(|(w, d)| *w -= learning_rate * d);
    model.set_parameters(&p);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub zeta: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub hidden_width: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            zeta: 1.0,
            learning_rate: 0.01,
            epochs: 300,
            batch_size: 32,
            seed: 0,
            hidden_width: 64,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.zeta > 0.0 && self.zeta.is_finite()) {
            return Err(Error::Config(format!("zeta must be positive, got {}", self.zeta)));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if self.epochs == 0 || self.batch_size == 0 || self.hidden_width == 0 {
            return Err(Error::Config("epochs, batch_size and hidden_width must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    /// Mean Huber loss over the full training set after each epoch.
    pub epoch_loss: Vec<f64>,
}

/// Fits a regressor mapping `ds` rows to the label scores of `labels`.
pub fn train(ds: &EmbeddingDataset, labels: &[LabelEntry], cfg: &TrainConfig) -> Result<(RegressorModel, TrainingLog)> {
    cfg.validate()?;
    if labels.len() < cfg.batch_size {
        return Err(Error::Config(format!(
            "{} labelled samples, fewer than batch size {}",
            labels.len(),
            cfg.batch_size
        )));
    }
    if let Some(e) = labels.iter().find(|e| e.index >= ds.len()) {
        return Err(Error::Validation(format!("label index {} outside dataset of {}", e.index, ds.len())));
    }
    let data: Vec<(&[f64], f64)> = labels.iter().map(|e| (ds.row(e.index), e.score)).collect();

    let mut init_rng = rng_from_seed(derive_seed(cfg.seed, u64::MAX, 0));
    let mut model = RegressorModel::init(ds.dim(), cfg.hidden_width, &mut init_rng);
    model.fit_input_scaling(data.iter().map(|&(x, _)| x));
    // start from the label mean so the output layer does not have to climb
    // the whole [0, 100] range one Huber-clipped step at a time
    model.output.bias[0] = data.iter().map(|&(_, t)| t).sum::<f64>() / data.len() as f64;

    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut log = TrainingLog { epoch_loss: Vec::with_capacity(cfg.epochs) };
    let mut batch: Vec<(&[f64], f64)> = Vec::with_capacity(cfg.batch_size);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng_from_seed(derive_seed(cfg.seed, epoch as u64, 1)));
        for chunk in order.chunks(cfg.batch_size) {
            batch.clear();
            batch.extend(chunk.iter().map(|&k| data[k]));
            sgd_step(&mut model, &batch, cfg.learning_rate, cfg.zeta);
        }
        let loss = mean_loss(&model, &data, cfg.zeta);
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        log.epoch_loss.push(loss);
    }
    Ok((model, log))
}

/// Forward pass per row, clamped to [0, 100].
pub fn predict<'a>(model: &RegressorModel, rows: impl IntoIterator<Item = &'a [f64]>) -> Result<Vec<f64>> {
    rows.into_iter()
        .map(|x| model.forward(x).map(|y| y.clamp(SCORE_MIN, SCORE_MAX)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huber_examples() {
        assert_eq!(huber_loss(3.0, 3.0, 1.0), 0.0);
        assert_eq!(huber_loss(0.0, 0.5, 1.0), 0.125);
        assert_eq!(huber_loss(0.0, 2.0, 1.0), 1.5);
        assert_eq!(huber_loss(2.0, 0.0, 1.0), 1.5);
    }

    #[test]
    fn huber_is_c1_at_kink() {
        for zeta in [0.5f64, 1.0, 3.0] {
            let inside = 0.5 * zeta * zeta;
            let outside = zeta * zeta - 0.5 * zeta * zeta;
            assert!((inside - outside).abs() < 1e-12);
            // both branch derivatives w.r.t. r equal ζ at r = ζ
            assert!((huber_grad(0.0, zeta, zeta) - huber_grad(0.0, zeta * (1.0 + 1e-12), zeta)).abs() < 1e-9);
            assert!((huber_loss(0.0, zeta, zeta) - inside).abs() < 1e-12);
            let eps = 1e-9;
            let left = huber_loss(0.0, zeta - eps, zeta);
            let right = huber_loss(0.0, zeta + eps, zeta);
            assert!(((right - left) / (2.0 * eps) - zeta).abs() < 1e-5);
        }
    }

    #[test]
    fn zero_network_outputs_zero() {
        let m = RegressorModel::zeros(4, 3);
        assert_eq!(m.forward(&[0.3, -1.0, 2.0, 0.5]).unwrap(), 0.0);
    }

    #[test]
    fn hand_evaluated_scalar_net() {
        let mut m = RegressorModel::zeros(1, 1);
        m.hidden.weights[0] = 1.0;
        m.output.weights[0] = 2.5;
        let x = 0.7f64;
        assert_eq!(m.forward(&[x]).unwrap(), 2.5 * x.tanh());
    }

    #[test]
    fn forward_dimension_mismatch() {
        let m = RegressorModel::zeros(3, 2);
        assert!(matches!(m.forward(&[1.0]), Err(Error::DimensionMismatch { expected: 3, actual: 1 })));
    }

    #[test]
    fn zero_gradient_at_exact_fit() {
        let mut rng = rng_from_seed(4);
        let m = RegressorModel::init(3, 4, &mut rng);
        let xs = [[0.1, 0.2, 0.3], [-0.5, 0.0, 0.9]];
        let batch: Vec<(&[f64], f64)> = xs.iter().map(|x| (&x[..], m.forward(x).unwrap())).collect();
        assert!(loss_gradient(&m, &batch, 1.0).0.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn duplicated_batch_has_same_mean_gradient() {
        let mut rng = rng_from_seed(8);
        let m = RegressorModel::init(3, 4, &mut rng);
        let xs = [[0.1, 0.2, 0.3], [-0.5, 0.0, 0.9], [0.4, 0.4, -0.2]];
        let targets = [0.3, 2.0, -1.5];
        let batch: Vec<(&[f64], f64)> = xs.iter().zip(targets).map(|(x, t)| (&x[..], t)).collect();
        let doubled: Vec<(&[f64], f64)> = batch.iter().chain(batch.iter()).copied().collect();
        let g1 = loss_gradient(&m, &batch, 1.0).0;
        let g2 = loss_gradient(&m, &doubled, 1.0).0;
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn predict_clamps() {
        let mut m = RegressorModel::zeros(2, 1);
        m.output.bias[0] = 120.0;
        assert_eq!(predict(&m, [&[0.0, 1.0][..]]).unwrap(), vec![100.0]);
        m.output.bias[0] = -3.0;
        assert_eq!(predict(&m, [&[0.0, 1.0][..]]).unwrap(), vec![0.0]);
        assert!(predict(&m, std::iter::empty()).unwrap().is_empty());
    }

    #[test]
    fn parameters_round_trip() {
        let mut rng = rng_from_seed(2);
        let m = RegressorModel::init(5, 3, &mut rng);
        let mut z = RegressorModel::zeros(5, 3);
        z.set_parameters(&m.parameters());
        assert_eq!(z, m);
    }

    #[test]
    fn bad_shapes_rejected() {
        let mut m = RegressorModel::zeros(3, 2);
        m.hidden.bias.push(0.0);
        assert!(m.validate().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        assert!(TrainConfig { zeta: 0.0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { learning_rate: -1.0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { batch_size: 0, ..Default::default() }.validate().is_err());
    }
}
