use serde::{Deserialize, Serialize};
use std::path::Path;

use super::EncodeError;

/// Distance range used to normalize joint distances to `[0, 1]`.
///
/// The lower bound is always 0; `d_max` is the largest within-frame joint
/// distance seen over the corpus the stats were computed on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub d_min: f64,
    pub d_max: f64,
    /// Corpus identifier.
    pub source: String,
    /// Which samples contributed, e.g. `corpus` or `train`.
    #[serde(default)]
    pub scope: String,
    /// Number of sequences scanned.
    #[serde(default)]
    pub sequences: usize,
}

impl DistanceStats {
    pub fn new(d_max: f64, source: impl Into<String>) -> Result<Self, EncodeError> {
        let stats = Self {
            d_min: 0.0,
            d_max,
            source: source.into(),
            scope: String::new(),
            sequences: 0,
        };
        stats.check()?;
        Ok(stats)
    }

    pub fn check(&self) -> Result<(), EncodeError> {
        if self.d_min != 0.0 {
            return Err(EncodeError::InvalidStats(format!(
                "d_min must be 0, got {}",
                self.d_min
            )));
        }
        if !(self.d_max > 0.0 && self.d_max.is_finite()) {
            return Err(EncodeError::InvalidStats(format!(
                "d_max must be finite and > 0, got {}",
                self.d_max
            )));
        }
        Ok(())
    }

    pub fn to_record(&self) -> String {
        let mut out = String::from("# joint distance normalization range\n");
        out.push_str(&toml::to_string(self).expect("stats serialize to toml"));
        out
    }

    pub fn from_record(text: &str) -> Result<Self, EncodeError> {
        let stats: Self = toml::from_str(text)
            .map_err(|e| EncodeError::InvalidStats(format!("malformed stats record: {e}")))?;
        stats.check()?;
        Ok(stats)
    }

    pub fn save(&self, path: &Path) -> Result<(), EncodeError> {
        std::fs::write(path, self.to_record())
            .map_err(|e| EncodeError::Io(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, EncodeError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EncodeError::Io(format!("{}: {e}", path.display())))?;
        Self::from_record(&text)
    }
}

/// `d / d_max` clamped to `[0, 1]`. Distances above `d_max` occur when the
/// stats were computed on a different split and saturate at 1.
pub fn normalize_distance(d: f64, stats: &DistanceStats) -> Result<f64, EncodeError> {
    stats.check()?;
    if !d.is_finite() || d < 0.0 {
        return Err(EncodeError::Argument(format!(
            "distance must be finite and >= 0, got {d}"
        )));
    }
    Ok((d / stats.d_max).min(1.0))
}
