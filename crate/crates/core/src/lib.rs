//! Encoding of 3D skeleton sequences as skeleton pose-motion feature (SPMF)
//! color images, together with the data machinery around it.
//!
//! - [`skeleton`] – joint, frame and sequence types plus validation.
//! - [`ingest`] – MSR Action3D and NTU RGB+D text parsers, synthetic sequences.
//! - [`spmf`] – pair distances/orientations, JET coding, image assembly, resize.
//! - [`augment`] – crop, flip and Gaussian blur on encoded images.
//! - [`pipeline`] – manifests, protocol splits, corpus statistics, bulk encoding.
//! - [`baseline`] – a linear softmax classifier trained with Adam.

pub mod augment;
pub mod baseline;
pub mod ingest;
pub mod pipeline;
pub mod skeleton;
pub mod spmf;

pub use skeleton::{validate_sequence, Joint3, SkeletonFrame, SkeletonSequence};
pub use spmf::{build_spmf, resize_image, DistanceStats, RgbPixel, SpmfImage};

/// Crate version.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
