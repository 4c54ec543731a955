use serde::{Deserialize, Serialize};
use std::fmt::Write;

use super::model::{argmax, LinearModel};
use super::{BaselineError, Dataset};

/// Classification results on one split. Row `i` of `confusion` counts the
/// samples of class `class_ids[i]` by predicted class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub class_ids: Vec<u32>,
    pub support: Vec<u64>,
    /// `None` for classes without samples in the split.
    pub per_class_accuracy: Vec<Option<f64>>,
    pub confusion: Vec<Vec<u64>>,
    /// Mean of the defined per-class accuracies.
    pub average_accuracy: f64,
    pub samples: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excluded_classes: Vec<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl EvalReport {
    /// Builds a report from class-index pairs.
    pub fn from_predictions(
        class_ids: Vec<u32>,
        truth: &[usize],
        predicted: &[usize],
    ) -> Result<Self, BaselineError> {
        let c = class_ids.len();
        if truth.is_empty() || truth.len() != predicted.len() {
            return Err(BaselineError::Data(format!(
                "{} labels for {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        let mut confusion = vec![vec![0u64; c]; c];
        for (&t, &p) in truth.iter().zip(predicted) {
            if t >= c || p >= c {
                return Err(BaselineError::Data(format!(
                    "class index out of range for {c} classes"
                )));
            }
            confusion[t][p] += 1;
        }
        let support: Vec<u64> = confusion.iter().map(|r| r.iter().sum()).collect();
        let per_class_accuracy: Vec<Option<f64>> = (0..c)
            .map(|k| (support[k] > 0).then(|| confusion[k][k] as f64 / support[k] as f64))
            .collect();
        let defined: Vec<f64> = per_class_accuracy.iter().flatten().copied().collect();
        let excluded_classes: Vec<u32> = (0..c)
            .filter(|&k| support[k] == 0)
            .map(|k| class_ids[k])
            .collect();
        let notes = if excluded_classes.is_empty() {
            Vec::new()
        } else {
            vec![format!(
                "classes {excluded_classes:?} have no samples in this split and are excluded from the average"
            )]
        };
        Ok(Self {
            class_ids,
            support,
            per_class_accuracy,
            confusion,
            average_accuracy: defined.iter().sum::<f64>() / defined.len() as f64,
            samples: truth.len() as u64,
            excluded_classes,
            notes,
        })
    }

    /// Fraction of all samples classified correctly.
    pub fn overall_accuracy(&self) -> f64 {
        let correct: u64 = (0..self.confusion.len())
            .map(|k| self.confusion[k][k])
            .sum();
        correct as f64 / self.samples as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, BaselineError> {
        serde_json::from_str(text).map_err(|e| BaselineError::Data(format!("invalid report: {e}")))
    }

    /// Confusion matrix and accuracies as an aligned text table.
    pub fn to_table(&self) -> String {
        let labels: Vec<String> = self.class_ids.iter().map(|c| c.to_string()).collect();
        let width = self
            .confusion
            .iter()
            .flatten()
            .map(|v| v.to_string().len())
            .chain(labels.iter().map(String::len))
            .max()
            .unwrap_or(1)
            .max(4);
        let mut s = String::new();
        let _ = write!(s, "{:>width$} |", "true");
        for l in &labels {
            let _ = write!(s, " {l:>width$}");
        }
        let _ = writeln!(s, " | accuracy");
        let _ = writeln!(s, "{}", "-".repeat(s.trim_end().len()));
        for (k, row) in self.confusion.iter().enumerate() {
            let _ = write!(s, "{:>width$} |", labels[k]);
            for v in row {
                let _ = write!(s, " {v:>width$}");
            }
            match self.per_class_accuracy[k] {
                Some(a) => {
                    let _ = writeln!(s, " | {:.4}", a);
                }
                None => {
                    let _ = writeln!(s, " | n/a");
                }
            }
        }
        let _ = writeln!(
            s,
            "average accuracy {:.4} over {} samples",
            self.average_accuracy, self.samples
        );
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

/// Argmax predictions of `model` on every sample of `data`.
pub fn evaluate(model: &LinearModel, data: &Dataset) -> Result<EvalReport, BaselineError> {
    model.check()?;
    if data.is_empty() {
        return Err(BaselineError::Data("evaluation split is empty".into()));
    }
    let mut truth = Vec::with_capacity(data.len());
    let mut predicted = Vec::with_capacity(data.len());
    for ((id, label), x) in data.ids.iter().zip(&data.labels).zip(&data.inputs) {
        let t = model.class_index(*label).ok_or_else(|| {
            BaselineError::Data(format!(
                "sample {id} has label {label}, unknown to the model"
            ))
        })?;
        truth.push(t);
        predicted.push(argmax(&model.logits(x)?));
    }
    EvalReport::from_predictions(model.class_ids.clone(), &truth, &predicted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let truth = [0, 1, 2, 2, 1];
        let r = EvalReport::from_predictions(vec![4, 5, 6], &truth, &truth).unwrap();
        assert_eq!(r.average_accuracy, 1.0);
        for (i, row) in r.confusion.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v > 0, i == j);
            }
        }
        assert!(r.excluded_classes.is_empty());
    }

    #[test]
    fn absent_class_is_excluded_and_noted() {
        let r = EvalReport::from_predictions(vec![1, 2, 3], &[0, 0, 2, 2], &[0, 1, 2, 2]).unwrap();
        assert_eq!(r.per_class_accuracy, vec![Some(0.5), None, Some(1.0)]);
        assert_eq!(r.average_accuracy, 0.75);
        assert_eq!(r.excluded_classes, vec![2]);
        assert_eq!(r.notes.len(), 1);
        assert_eq!(r.support, vec![2, 0, 2]);
        assert_eq!(r.overall_accuracy(), 0.75);
        let back = EvalReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.to_table().contains("n/a"));
    }

    #[test]
    fn unknown_label_is_a_data_error() {
        let model = LinearModel::zeros(vec![1, 2], 2);
        let mut d = Dataset::new(2);
        d.push("x", 9, vec![0.0, 0.0]).unwrap();
        assert!(matches!(evaluate(&model, &d), Err(BaselineError::Data(_))));
        assert!(evaluate(&model, &Dataset::new(2)).is_err());
    }
}
