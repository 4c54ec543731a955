//! Linear softmax classifier over encoded images.
//!
//! Inputs are the image's RGB bytes scaled to `[0, 1]`, flattened row-major.
//! Training minimizes mean cross-entropy with Adam and a step-halving
//! learning rate; evaluation reports per-class and average accuracy.

mod checkpoint;
mod data;
mod model;
mod optim;
mod report;
mod train;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, sidecar_path,
    CheckpointMeta, CHECKPOINT_VERSION,
};
pub use data::{image_input, Dataset};
pub use model::{cross_entropy, loss_and_gradient, softmax, Gradient, LinearModel};
pub use optim::{adam_step, AdamState};
pub use report::{evaluate, EvalReport};
pub use train::{train, train_with_classes, TrainConfig, TrainOutcome};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("training failed at step {step}: {message}")]
    Training { step: u64, message: String },
    #[error("data error: {0}")]
    Data(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl BaselineError {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        BaselineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
