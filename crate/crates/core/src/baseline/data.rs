use std::collections::BTreeSet;
use std::path::Path;

use super::BaselineError;
use crate::pipeline::{read_index, Split};
use crate::spmf::SpmfImage;

/// Channel bytes divided by 255, row-major RGB.
pub fn image_input(img: &SpmfImage) -> Vec<f64> {
    img.to_rgb_bytes()
        .into_iter()
        .map(|b| f64::from(b) / 255.0)
        .collect()
}

/// Labeled inputs of equal dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub input_dim: usize,
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<u32>,
    pub ids: Vec<String>,
}

impl Dataset {
    pub fn new(input_dim: usize) -> Self {
        Self {
            input_dim,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn push(
        &mut self,
        id: impl Into<String>,
        label: u32,
        input: Vec<f64>,
    ) -> Result<(), BaselineError> {
        if self.inputs.is_empty() && self.input_dim == 0 {
            self.input_dim = input.len();
        }
        if input.len() != self.input_dim {
            return Err(BaselineError::Data(format!(
                "input of {} values in a dataset of dimension {}",
                input.len(),
                self.input_dim
            )));
        }
        self.inputs.push(input);
        self.labels.push(label);
        self.ids.push(id.into());
        Ok(())
    }

    pub fn push_image(
        &mut self,
        id: impl Into<String>,
        label: u32,
        img: &SpmfImage,
    ) -> Result<(), BaselineError> {
        self.push(id, label, image_input(img))
    }

    /// Distinct labels, ascending.
    pub fn class_ids(&self) -> Vec<u32> {
        self.labels
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Loads the images of one split listed in a corpus index. Rows that
    /// carry an encoding error are skipped; their count is returned.
    pub fn from_index(index: &Path, split: Split) -> Result<(Self, usize), BaselineError> {
        let rows = read_index(index).map_err(|e| BaselineError::Data(e.to_string()))?;
        let base = index.parent().unwrap_or_else(|| Path::new("."));
        let mut data = Self::new(0);
        let mut skipped = 0;
        for row in rows.iter().filter(|r| r.split == split) {
            let Some(rel) = row.path.as_deref().filter(|_| row.error.is_none()) else {
                skipped += 1;
                continue;
            };
            let img = SpmfImage::read_png(&base.join(rel))
                .map_err(|e| BaselineError::Data(format!("sample {}: {e}", row.sample_id)))?;
            data.push_image(row.sample_id.clone(), row.label, &img)
                .map_err(|e| BaselineError::Data(format!("sample {}: {e}", row.sample_id)))?;
        }
        Ok((data, skipped))
    }
}
