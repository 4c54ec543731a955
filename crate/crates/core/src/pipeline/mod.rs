//! Dataset manifests, protocol splits and corpus encoding.

mod corpus;
mod manifest;
mod split;

pub use corpus::{
    compute_stats, corpus_stats, encode_corpus, encode_sequence, load_entry, read_index,
    write_index, EncodeConfig, EncodeSummary, IndexRow, SampleError, StatsScope, INDEX_FILE,
    STATS_FILE,
};
pub use manifest::{
    scan_directory, DatasetManifest, ManifestEntry, MsrSubset, Protocol, TEMPLATE_NOTE,
};
pub use split::{split_dataset, Split, SplitAssignment};

use std::path::{Path, PathBuf};

use crate::ingest::IngestError;
use crate::spmf::EncodeError;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("no usable sequences to compute statistics from")]
    EmptyCorpus,
}

impl PipelineError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        PipelineError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
