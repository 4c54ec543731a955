use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{loss_and_gradient, LinearModel};
use super::optim::{adam_step, AdamState};
use super::{BaselineError, Dataset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    /// The learning rate halves after every this many epochs.
    pub lr_halving_period: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 256,
            epochs: 250,
            lr_halving_period: 20,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn check(&self) -> Result<(), BaselineError> {
        let bad = |m: String| Err(BaselineError::Config(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            ));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return bad(format!("{name} must lie in [0, 1), got {b}"));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be > 0, got {}", self.epsilon));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.lr_halving_period == 0 {
            return bad("lr_halving_period must be at least 1".into());
        }
        Ok(())
    }

    /// Learning rate for 1-based `epoch`.
    pub fn lr_at(&self, epoch: usize) -> f64 {
        let halvings = epoch.saturating_sub(1) / self.lr_halving_period;
        self.learning_rate * 0.5f64.powi(halvings.min(i32::MAX as usize) as i32)
    }
}

/// Sample order for one epoch, a pure function of `(seed, epoch, n)`.
pub(crate) fn epoch_order(seed: u64, epoch: usize, n: usize) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(epoch as u64);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    order
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub model: LinearModel,
    /// Mean training loss of each epoch.
    pub loss_history: Vec<f64>,
    pub steps: u64,
}

/// Trains on the classes present in `data`.
pub fn train(data: &Dataset, cfg: &TrainConfig) -> Result<TrainOutcome, BaselineError> {
    train_with_classes(data, data.class_ids(), cfg)
}

/// Trains a model over `class_ids`, each of which must have at least one
/// sample in `data`.
pub fn train_with_classes(
    data: &Dataset,
    mut class_ids: Vec<u32>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, BaselineError> {
    cfg.check()?;
    if data.is_empty() {
        return Err(BaselineError::Config("no training samples".into()));
    }
    class_ids.sort_unstable();
    class_ids.dedup();
    let mut model = LinearModel::he_init(class_ids, data.input_dim, cfg.seed)?;

    let mut labels = Vec::with_capacity(data.len());
    let mut counts = vec![0usize; model.class_count()];
    for (id, label) in data.ids.iter().zip(&data.labels) {
        let k = model.class_index(*label).ok_or_else(|| {
            BaselineError::Data(format!(
                "sample {id} has label {label}, not among the classes"
            ))
        })?;
        counts[k] += 1;
        labels.push(k);
    }
    if let Some(k) = counts.iter().position(|c| *c == 0) {
        return Err(BaselineError::Config(format!(
            "class {} has no training samples",
            model.class_ids[k]
        )));
    }

    let mut state_w = AdamState::new(model.weights.len());
    let mut state_b = AdamState::new(model.biases.len());
    let mut history = Vec::with_capacity(cfg.epochs);
    for epoch in 1..=cfg.epochs {
        let lr = cfg.lr_at(epoch);
        let mut total = 0.0;
        for batch in epoch_order(cfg.seed, epoch, data.len()).chunks(cfg.batch_size) {
            let xs: Vec<&[f64]> = batch.iter().map(|&i| data.inputs[i].as_slice()).collect();
            let ys: Vec<usize> = batch.iter().map(|&i| labels[i]).collect();
            let (loss, grad) = loss_and_gradient(&model, &xs, &ys)?;
            if !loss.is_finite() {
                return Err(BaselineError::Training {
                    step: state_w.t + 1,
                    message: "non-finite loss".into(),
                });
            }
            total += loss * batch.len() as f64;
            adam_step(&mut model.weights, &grad.weights, &mut state_w, lr, cfg)?;
            adam_step(&mut model.biases, &grad.biases, &mut state_b, lr, cfg)?;
        }
        history.push(total / data.len() as f64);
    }
    Ok(TrainOutcome {
        model,
        loss_history: history,
        steps: state_w.t,
    })
}
