use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::{parse_real, IngestError, Position};
use crate::skeleton::{Joint3, SkeletonFrame, SkeletonSequence};

/// Layout of an MSR Action3D skeleton text file: `joints_per_frame` rows per
/// frame, each row `values_per_row` reals whose first three are x, y, z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MsrFormatConfig {
    pub joints_per_frame: usize,
    pub values_per_row: usize,
}

impl Default for MsrFormatConfig {
    fn default() -> Self {
        Self {
            joints_per_frame: 20,
            values_per_row: 4,
        }
    }
}

impl MsrFormatConfig {
    fn check(&self) -> Result<(), IngestError> {
        if self.joints_per_frame < 2 {
            return Err(IngestError::Argument(format!(
                "joints_per_frame must be >= 2, got {}",
                self.joints_per_frame
            )));
        }
        if self.values_per_row < 3 {
            return Err(IngestError::Argument(format!(
                "values_per_row must be >= 3, got {}",
                self.values_per_row
            )));
        }
        Ok(())
    }
}

/// Fields of an MSR file name such as `a01_s03_e02_skeleton3D.txt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MsrSampleName {
    pub action: u32,
    pub subject: u32,
    pub episode: u32,
}

impl MsrSampleName {
    pub fn parse(name: &str) -> Option<Self> {
        let mut parts = name.split(['_', '.']);
        let mut field = |prefix: char| -> Option<u32> {
            let p = parts.next()?;
            let digits = p.strip_prefix(prefix)?;
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            digits.parse().ok()
        };
        Some(Self {
            action: field('a')?,
            subject: field('s')?,
            episode: field('e')?,
        })
    }
}

/// Parses an MSR skeleton file body.
pub fn parse_msr(text: &str, cfg: &MsrFormatConfig) -> Result<SkeletonSequence, IngestError> {
    cfg.check()?;
    let mut rows: Vec<(Joint3, Vec<f64>)> = Vec::new();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        last_line = lineno;
        let pos = Position::Line(lineno);
        let mut values = Vec::with_capacity(cfg.values_per_row);
        for tok in line.split_whitespace() {
            if values.len() == cfg.values_per_row {
                return Err(IngestError::format(
                    pos,
                    format!("more than {} values in row", cfg.values_per_row),
                ));
            }
            values.push(parse_real(tok, pos)?);
        }
        if values.len() != cfg.values_per_row {
            return Err(IngestError::format(
                pos,
                format!(
                    "expected {} values in row, found {}",
                    cfg.values_per_row,
                    values.len()
                ),
            ));
        }
        let joint = Joint3::new(values[0], values[1], values[2]);
        values.drain(..3);
        rows.push((joint, values));
    }

    if rows.is_empty() {
        return Err(IngestError::format(Position::Line(1), "no skeleton rows"));
    }
    if !rows.len().is_multiple_of(cfg.joints_per_frame) {
        return Err(IngestError::format(
            Position::Line(last_line),
            format!(
                "row count {} not divisible by {}",
                rows.len(),
                cfg.joints_per_frame
            ),
        ));
    }

    let keep_extras = cfg.values_per_row > 3;
    let frames = rows
        .chunks(cfg.joints_per_frame)
        .enumerate()
        .map(|(t, chunk)| SkeletonFrame {
            index: t + 1,
            joints: chunk.iter().map(|(j, _)| *j).collect(),
            extras: if keep_extras {
                chunk.iter().map(|(_, e)| e.clone()).collect()
            } else {
                Vec::new()
            },
        })
        .collect();

    Ok(SkeletonSequence {
        frames,
        joint_count: cfg.joints_per_frame,
        ..Default::default()
    })
}

/// [`parse_msr`] plus label and subject from an `aAA_sSS_eEE` name.
pub fn parse_msr_named(
    text: &str,
    name: &str,
    cfg: &MsrFormatConfig,
) -> Result<SkeletonSequence, IngestError> {
    let mut seq = parse_msr(text, cfg)?;
    if let Some(n) = MsrSampleName::parse(name) {
        seq.label = n.action;
        seq.subject_id = n.subject;
    }
    Ok(seq)
}

/// Writes a sequence back in the MSR row layout. Missing extras are written
/// as zeros so every row has `values_per_row` values.
pub fn write_msr(seq: &SkeletonSequence, cfg: &MsrFormatConfig) -> String {
    let pad = cfg.values_per_row.saturating_sub(3);
    let mut out = String::new();
    for frame in &seq.frames {
        for (k, j) in frame.joints.iter().enumerate() {
            let _ = write!(out, "{} {} {}", j.x, j.y, j.z);
            match frame.extras.get(k) {
                Some(extra) => extra.iter().for_each(|v| {
                    let _ = write!(out, " {v}");
                }),
                None => (0..pad).for_each(|_| out.push_str(" 0")),
            }
            out.push('\n');
        }
    }
    out
}
