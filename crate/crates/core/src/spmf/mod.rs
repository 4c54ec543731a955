//! Skeleton pose-motion feature (SPMF) encoding.
//!
//! A sequence of `N` frames with `J` joints becomes a `(2N - 1) x 2J^2` RGB
//! image whose columns alternate pose features (all joint pairs of one frame)
//! and motion features (all joint pairs across two consecutive frames). Each
//! column holds JET-coded pair distances above color-coded pair orientations.
//!
//! ```
//! use spmf_core::ingest::{synth_sequence, SynthTemplate};
//! use spmf_core::spmf::{build_spmf, resize_image, DistanceStats};
//!
//! let template = &SynthTemplate::action_family(1, 20, 0.01, 7)[0];
//! let seq = synth_sequence(template, 8, 1)?;
//! let stats = DistanceStats::new(2.5, "demo")?;
//! let raw = build_spmf(&seq, &stats)?;
//! assert_eq!((raw.width, raw.height), (15, 800));
//! let small = resize_image(&raw, 32, 32)?;
//! assert_eq!(small.pixels.len(), 32 * 32);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

mod color;
mod features;
mod geometry;
mod image;
mod stats;

pub use color::{
    jet_color, jet_level, orient_color, round_half_up, RgbPixel, JET, JET_LEVELS,
    NEUTRAL_ORIENTATION, UNIT_TOLERANCE,
};
pub use features::{build_spmf, motion_feature, pose_feature, FeatureColumn, FeatureKind};
pub use geometry::{cross_jjd, cross_jjo, jjd, jjo};
pub use image::{resize_image, Provenance, SpmfImage, DEFAULT_SIZE};
pub use stats::{normalize_distance, DistanceStats};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid distance stats: {0}")]
    InvalidStats(String),
    #[error("png: {0}")]
    Png(String),
    #[error("io: {0}")]
    Io(String),
}

/// Output file name for an encoded sample.
pub fn image_file_name(dataset: &str, sample_id: &str) -> String {
    format!("{dataset}_{sample_id}_spmf.png")
}
