//! Readers for the MSR Action3D and NTU RGB+D skeleton text layouts, plus a
//! seeded synthetic generator used by tests and benchmarks.
//!
//! Both layouts are described by config structs rather than constants since
//! dataset mirrors disagree on details (extra columns, interleaved rows).

mod msr;
mod ntu;
mod synth;

pub use msr::{parse_msr, parse_msr_named, write_msr, MsrFormatConfig, MsrSampleName};
pub use ntu::{parse_ntu, write_ntu, NtuFormatConfig, NtuSampleName};
pub use synth::{synth_sequence, JointMotion, SynthTemplate};

use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::skeleton::SkeletonSequence;

/// Where in a source file a problem was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Line(usize),
    Byte(usize),
    Unknown,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Line(l) => write!(f, "line {l}"),
            Position::Byte(b) => write!(f, "byte {b}"),
            Position::Unknown => f.write_str("?"),
        }
    }
}

fn describe(path: &Option<PathBuf>, position: &Position) -> String {
    match path {
        Some(p) => format!("{}:{position}", p.display()),
        None => position.to_string(),
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {message}", describe(.path, .position))]
    Format {
        path: Option<PathBuf>,
        position: Position,
        message: String,
    },
    #[error("failed to read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
}

impl IngestError {
    pub(crate) fn format(position: Position, message: impl Into<String>) -> Self {
        IngestError::Format {
            path: None,
            position,
            message: message.into(),
        }
    }

    /// Attaches the source path to a format error.
    pub fn with_path(self, p: &Path) -> Self {
        match self {
            IngestError::Format {
                position, message, ..
            } => IngestError::Format {
                path: Some(p.to_path_buf()),
                position,
                message,
            },
            other => other,
        }
    }
}

/// Source layout of a skeleton file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    Msr,
    Ntu,
}

/// Reads and parses one file. MSR files yield a single sequence; NTU files one
/// per tracked body. Label, subject and camera come from the file name when it
/// follows the dataset's naming convention.
pub fn read_file(
    path: &Path,
    format: SourceFormat,
    msr: &MsrFormatConfig,
    ntu: &NtuFormatConfig,
) -> Result<Vec<SkeletonSequence>, IngestError> {
    let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = decode_utf8(&bytes).map_err(|e| e.with_path(path))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let stem = path
        .file_stem()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut seqs = match format {
        SourceFormat::Msr => parse_msr_named(text, &name, msr)
            .map(|s| vec![s])
            .map_err(|e| e.with_path(path))?,
        SourceFormat::Ntu => {
            let mut seqs = parse_ntu(text, ntu).map_err(|e| e.with_path(path))?;
            if let Some(n) = NtuSampleName::parse(&name) {
                for s in &mut seqs {
                    s.label = n.action;
                    s.subject_id = n.performer;
                    s.camera_id = n.camera;
                }
            }
            seqs
        }
    };
    for s in &mut seqs {
        s.id.clone_from(&stem);
    }
    Ok(seqs)
}

/// UTF-8 check that reports the offending byte offset.
pub fn decode_utf8(bytes: &[u8]) -> Result<&str, IngestError> {
    std::str::from_utf8(bytes).map_err(|e| {
        IngestError::format(Position::Byte(e.valid_up_to()), "input is not valid UTF-8")
    })
}

/// Parses one numeric token, rejecting NaN and infinities.
pub(crate) fn parse_real(tok: &str, position: Position) -> Result<f64, IngestError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| IngestError::format(position, format!("non-numeric token {tok:?}")))?;
    if !v.is_finite() {
        return Err(IngestError::format(
            position,
            format!("non-finite value {tok:?}"),
        ));
    }
    Ok(v)
}
