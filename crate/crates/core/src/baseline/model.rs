use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::BaselineError;

const PROB_FLOOR: f64 = 1e-12;

/// `C x D` weights (row-major, one row per class) and `C` biases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    /// Dataset label of each output row, ascending.
    pub class_ids: Vec<u32>,
    pub input_dim: usize,
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
    /// Seed used for initialization.
    pub seed: u64,
}

impl LinearModel {
    pub fn zeros(class_ids: Vec<u32>, input_dim: usize) -> Self {
        let c = class_ids.len();
        Self {
            class_ids,
            input_dim,
            weights: vec![0.0; c * input_dim],
            biases: vec![0.0; c],
            seed: 0,
        }
    }

    /// He initialization: weights drawn from `N(0, 2 / D)`, zero biases.
    pub fn he_init(
        class_ids: Vec<u32>,
        input_dim: usize,
        seed: u64,
    ) -> Result<Self, BaselineError> {
        if class_ids.is_empty() || input_dim == 0 {
            return Err(BaselineError::Argument(
                "model needs at least one class and one input".into(),
            ));
        }
        let mut m = Self::zeros(class_ids, input_dim);
        m.seed = seed;
        let normal = Normal::new(0.0, (2.0 / input_dim as f64).sqrt()).expect("valid sigma");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for w in &mut m.weights {
            *w = normal.sample(&mut rng);
        }
        Ok(m)
    }

    pub fn class_count(&self) -> usize {
        self.class_ids.len()
    }

    pub fn class_index(&self, label: u32) -> Option<usize> {
        self.class_ids.binary_search(&label).ok()
    }

    pub fn check(&self) -> Result<(), BaselineError> {
        let c = self.class_ids.len();
        if c == 0 || self.weights.len() != c * self.input_dim || self.biases.len() != c {
            return Err(BaselineError::Argument(format!(
                "inconsistent model shape: {c} classes, dim {}, {} weights, {} biases",
                self.input_dim,
                self.weights.len(),
                self.biases.len()
            )));
        }
        if !self.class_ids.windows(2).all(|w| w[0] < w[1]) {
            return Err(BaselineError::Argument(
                "class ids must be strictly ascending".into(),
            ));
        }
        if !self
            .weights
            .iter()
            .chain(&self.biases)
            .all(|v| v.is_finite())
        {
            return Err(BaselineError::Argument("non-finite model parameter".into()));
        }
        Ok(())
    }

    fn check_input(&self, x: &[f64]) -> Result<(), BaselineError> {
        if x.len() != self.input_dim {
            return Err(BaselineError::Argument(format!(
                "input has {} values, model expects {}",
                x.len(),
                self.input_dim
            )));
        }
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(BaselineError::Argument(format!("non-finite input at {i}")));
        }
        Ok(())
    }

    pub(crate) fn logits_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.input_dim)
            .zip(&self.biases)
            .map(|(row, b)| b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
            .collect()
    }

    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>, BaselineError> {
        self.check_input(x)?;
        Ok(self.logits_unchecked(x))
    }

    /// Class probabilities `softmax(Wx + b)`.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, BaselineError> {
        Ok(softmax(&self.logits(x)?))
    }

    /// Index of the most probable class; the lowest index wins ties.
    pub fn predict(&self, x: &[f64]) -> Result<usize, BaselineError> {
        Ok(argmax(&self.logits(x)?))
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// Softmax with max subtraction.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Mean cross-entropy `-(1/M) sum_i sum_j y_ij ln(max(p_ij, 1e-12))`.
pub fn cross_entropy(targets: &[Vec<f64>], probs: &[Vec<f64>]) -> Result<f64, BaselineError> {
    if targets.is_empty() || targets.len() != probs.len() {
        return Err(BaselineError::Argument(format!(
            "{} target rows for {} prediction rows",
            targets.len(),
            probs.len()
        )));
    }
    let mut total = 0.0;
    for (i, (y, p)) in targets.iter().zip(probs).enumerate() {
        if y.len() != p.len() {
            return Err(BaselineError::Argument(format!(
                "row {i}: {} targets for {} probabilities",
                y.len(),
                p.len()
            )));
        }
        total -= y
            .iter()
            .zip(p)
            .map(|(y, p)| y * p.max(PROB_FLOOR).ln())
            .sum::<f64>();
    }
    Ok(total / targets.len() as f64)
}

/// Gradient of the mean loss, shaped like the model's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Mean cross-entropy of a batch and its gradient with respect to the
/// weights and biases. `labels` are class indices.
pub fn loss_and_gradient(
    model: &LinearModel,
    inputs: &[&[f64]],
    labels: &[usize],
) -> Result<(f64, Gradient), BaselineError> {
    if inputs.is_empty() || inputs.len() != labels.len() {
        return Err(BaselineError::Argument(format!(
            "{} inputs for {} labels",
            inputs.len(),
            labels.len()
        )));
    }
    let c = model.class_count();
    let d = model.input_dim;
    let scale = 1.0 / inputs.len() as f64;
    let mut grad = Gradient {
        weights: vec![0.0; c * d],
        biases: vec![0.0; c],
    };
    let mut loss = 0.0;
    for (x, &label) in inputs.iter().zip(labels) {
        model.check_input(x)?;
        if label >= c {
            return Err(BaselineError::Argument(format!(
                "class index {label} out of range for {c} classes"
            )));
        }
        let p = softmax(&model.logits_unchecked(x));
        loss -= p[label].max(PROB_FLOOR).ln();
        for (k, pk) in p.iter().enumerate() {
            let delta = (pk - if k == label { 1.0 } else { 0.0 }) * scale;
            grad.biases[k] += delta;
            let row = &mut grad.weights[k * d..(k + 1) * d];
            for (g, v) in row.iter_mut().zip(x.iter()) {
                *g += delta * v;
            }
        }
    }
    Ok((loss * scale, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_is_uniform() {
        let m = LinearModel::zeros(vec![1, 2, 3, 4], 5);
        let p = m.forward(&[0.3; 5]).unwrap();
        assert_eq!(p, vec![0.25; 4]);
    }

    #[test]
    fn dominant_bias_wins() {
        let mut m = LinearModel::zeros(vec![7, 8, 9], 2);
        m.biases[0] = 10.0;
        assert_eq!(m.predict(&[1.0, 1.0]).unwrap(), 0);
    }

    #[test]
    fn softmax_shift_invariance_and_sum() {
        let z = [1.5, -2.0, 0.25, 7.0];
        let shifted: Vec<f64> = z.iter().map(|v| v + 1000.0).collect();
        let (a, b) = (softmax(&z), softmax(&shifted));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(argmax(&z), argmax(&shifted));
    }

    #[test]
    fn cross_entropy_examples() {
        let uniform = vec![vec![0.25; 4]];
        let y = vec![vec![0.0, 0.0, 1.0, 0.0]];
        assert!((cross_entropy(&y, &uniform).unwrap() - 4f64.ln()).abs() < 1e-12);
        assert!(cross_entropy(&y, &y).unwrap().abs() < 1e-12);

        let y2 = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let p2 = vec![vec![0.8, 0.2], vec![0.4, 0.6]];
        let l1 = -(0.8f64).ln();
        let l2 = -(0.6f64).ln();
        assert!((cross_entropy(&y2, &p2).unwrap() - (l1 + l2) / 2.0).abs() < 1e-12);
        assert!(cross_entropy(&y2, &uniform).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = LinearModel::zeros(vec![1, 2], 3);
        assert!(m.forward(&[0.0; 2]).is_err());
        assert!(m.forward(&[0.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn he_init_is_seeded() {
        let a = LinearModel::he_init(vec![1, 2], 64, 3).unwrap();
        let b = LinearModel::he_init(vec![1, 2], 64, 3).unwrap();
        let c = LinearModel::he_init(vec![1, 2], 64, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.weights, c.weights);
        assert!(a.biases.iter().all(|b| *b == 0.0));
    }
}
