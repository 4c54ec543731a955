use serde::Deserialize;
use std::path::Path;

use spmf_core::augment::AugmentConfig;
use spmf_core::baseline::TrainConfig;
use spmf_core::pipeline::StatsScope;

/// Settings read from `--config`. Every field is optional; command-line
/// flags take precedence over anything set here.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub encode: EncodeSection,
    pub augment: AugmentSection,
    pub train: TrainSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodeSection {
    pub width: Option<usize>,
    pub height: Option<usize>,
    pub replicas: Option<u32>,
    pub scope: Option<StatsScope>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub crop_fraction: Option<f64>,
    pub flip_probability: Option<f64>,
    pub gaussian_sigma: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub epsilon: Option<f64>,
    pub batch_size: Option<usize>,
    pub epochs: Option<usize>,
    pub lr_halving_period: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Augmentation flags as given on the command line.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct AugmentFlags {
    /// Crop side relative to the image, in (0, 1]
    #[arg(long)]
    pub crop_fraction: Option<f64>,
    /// Probability of a horizontal flip
    #[arg(long)]
    pub flip_probability: Option<f64>,
    /// Gaussian blur sigma in pixels (0 disables)
    #[arg(long)]
    pub gaussian_sigma: Option<f64>,
}

impl AugmentFlags {
    pub fn resolve(&self, file: &AugmentSection, seed: u64) -> AugmentConfig {
        let d = AugmentConfig::default();
        AugmentConfig {
            crop_fraction: self
                .crop_fraction
                .or(file.crop_fraction)
                .unwrap_or(d.crop_fraction),
            flip_probability: self
                .flip_probability
                .or(file.flip_probability)
                .unwrap_or(d.flip_probability),
            gaussian_sigma: self
                .gaussian_sigma
                .or(file.gaussian_sigma)
                .unwrap_or(d.gaussian_sigma),
            seed,
        }
    }
}

/// Optimizer flags as given on the command line.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct TrainFlags {
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Halve the learning rate after every this many epochs
    #[arg(long)]
    pub lr_halving_period: Option<usize>,
}

impl TrainFlags {
    pub fn resolve(&self, file: &TrainSection, seed: u64) -> TrainConfig {
        let d = TrainConfig::default();
        TrainConfig {
            learning_rate: self
                .learning_rate
                .or(file.learning_rate)
                .unwrap_or(d.learning_rate),
            beta1: self.beta1.or(file.beta1).unwrap_or(d.beta1),
            beta2: self.beta2.or(file.beta2).unwrap_or(d.beta2),
            epsilon: self.epsilon.or(file.epsilon).unwrap_or(d.epsilon),
            batch_size: self.batch_size.or(file.batch_size).unwrap_or(d.batch_size),
            epochs: self.epochs.or(file.epochs).unwrap_or(d.epochs),
            lr_halving_period: self
                .lr_halving_period
                .or(file.lr_halving_period)
                .unwrap_or(d.lr_halving_period),
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str(
            "seed = 3\n[train]\nepochs = 7\nbatch_size = 16\n[augment]\ngaussian_sigma = 0.0\n",
        )
        .unwrap();
        let flags = TrainFlags {
            epochs: Some(2),
            ..TrainFlags::default()
        };
        let cfg = flags.resolve(&file.train, 9);
        assert_eq!((cfg.epochs, cfg.batch_size, cfg.seed), (2, 16, 9));
        let aug = AugmentFlags::default().resolve(&file.augment, 1);
        assert_eq!(aug.gaussian_sigma, 0.0);
        assert_eq!(aug.crop_fraction, AugmentConfig::default().crop_fraction);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("sede = 3\n").is_err());
    }
}
