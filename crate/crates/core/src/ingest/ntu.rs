use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::{parse_real, IngestError, Position};
use crate::skeleton::{Joint3, SkeletonFrame, SkeletonSequence};

/// Layout of an NTU RGB+D `.skeleton` file.
///
/// ```text
/// <frame count>
/// per frame:  <body count>
///   per body: <body id> <9 body-level values>
///             <joint count>
///             <joint count> rows of <values_per_joint_row> reals
/// ```
///
/// The default joint row is x y z, depth u v, color u v, orientation w x y z,
/// tracking state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NtuFormatConfig {
    pub joints_per_body: usize,
    pub values_per_joint_row: usize,
}

impl Default for NtuFormatConfig {
    fn default() -> Self {
        Self {
            joints_per_body: 25,
            values_per_joint_row: 12,
        }
    }
}

/// Fields of an NTU file name such as `S001C002P003R002A013.skeleton`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NtuSampleName {
    pub setup: u32,
    pub camera: u32,
    pub performer: u32,
    pub replication: u32,
    pub action: u32,
}

impl NtuSampleName {
    pub fn parse(name: &str) -> Option<Self> {
        let stem = name.split('.').next()?;
        let b = stem.as_bytes();
        if b.len() != 20 || !b.is_ascii() {
            return None;
        }
        let field = |at: usize, tag: u8| -> Option<u32> {
            if b[at] != tag {
                return None;
            }
            let digits = &stem[at + 1..at + 4];
            digits
                .bytes()
                .all(|c| c.is_ascii_digit())
                .then(|| digits.parse().ok())?
        };
        Some(Self {
            setup: field(0, b'S')?,
            camera: field(4, b'C')?,
            performer: field(8, b'P')?,
            replication: field(12, b'R')?,
            action: field(16, b'A')?,
        })
    }
}

struct Lines<'a> {
    text: &'a str,
    offset: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with its starting byte offset.
    fn next(&mut self) -> Result<(usize, &'a str), IngestError> {
        loop {
            if self.offset >= self.text.len() {
                return Err(IngestError::format(
                    Position::Byte(self.text.len()),
                    "unexpected end of file",
                ));
            }
            let start = self.offset;
            let rest = &self.text[start..];
            let end = rest.find('\n').map_or(rest.len(), |i| i + 1);
            self.offset += end;
            let line = rest[..end].trim();
            if !line.is_empty() {
                return Ok((start, line));
            }
        }
    }

    fn count(&mut self, what: &str) -> Result<(usize, usize), IngestError> {
        let (at, line) = self.next()?;
        let mut toks = line.split_whitespace();
        let n = toks
            .next()
            .and_then(|t| t.parse::<usize>().ok())
            .filter(|_| toks.next().is_none())
            .ok_or_else(|| {
                IngestError::format(
                    Position::Byte(at),
                    format!("expected {what}, found {line:?}"),
                )
            })?;
        Ok((at, n))
    }
}

/// Parses an NTU skeleton file into one sequence per distinct body id, in
/// order of first appearance. Frames where a body is not tracked are skipped
/// for that body and the remaining frames are renumbered 1..=N.
pub fn parse_ntu(text: &str, cfg: &NtuFormatConfig) -> Result<Vec<SkeletonSequence>, IngestError> {
    if cfg.joints_per_body < 2 {
        return Err(IngestError::Argument(format!(
            "joints_per_body must be >= 2, got {}",
            cfg.joints_per_body
        )));
    }
    if cfg.values_per_joint_row < 3 {
        return Err(IngestError::Argument(format!(
            "values_per_joint_row must be >= 3, got {}",
            cfg.values_per_joint_row
        )));
    }

    let mut lines = Lines { text, offset: 0 };
    let (_, frame_count) = lines.count("frame count")?;
    let mut bodies: Vec<(u64, Vec<SkeletonFrame>)> = Vec::new();

    for _ in 0..frame_count {
        let (_, body_count) = lines.count("body count")?;
        let mut seen_this_frame: Vec<u64> = Vec::new();
        for _ in 0..body_count {
            let (at, header) = lines.next()?;
            let id_tok = header.split_whitespace().next().unwrap_or_default();
            let body_id: u64 = id_tok.parse().map_err(|_| {
                IngestError::format(Position::Byte(at), format!("invalid body id {id_tok:?}"))
            })?;
            if seen_this_frame.contains(&body_id) {
                return Err(IngestError::format(
                    Position::Byte(at),
                    format!("body {body_id} appears twice in one frame"),
                ));
            }
            seen_this_frame.push(body_id);

            let (at, joint_count) = lines.count("joint count")?;
            if joint_count != cfg.joints_per_body {
                return Err(IngestError::format(
                    Position::Byte(at),
                    format!(
                        "declared joint count {joint_count} does not match expected {}",
                        cfg.joints_per_body
                    ),
                ));
            }

            let mut joints = Vec::with_capacity(joint_count);
            let mut extras = Vec::with_capacity(joint_count);
            for _ in 0..joint_count {
                let (at, row) = lines.next()?;
                let pos = Position::Byte(at);
                let mut values = Vec::with_capacity(cfg.values_per_joint_row);
                for tok in row.split_whitespace() {
                    if values.len() == cfg.values_per_joint_row {
                        return Err(IngestError::format(
                            pos,
                            format!("more than {} values in joint row", cfg.values_per_joint_row),
                        ));
                    }
                    values.push(parse_real(tok, pos)?);
                }
                if values.len() != cfg.values_per_joint_row {
                    return Err(IngestError::format(
                        pos,
                        format!(
                            "expected {} values in joint row, found {}",
                            cfg.values_per_joint_row,
                            values.len()
                        ),
                    ));
                }
                joints.push(Joint3::new(values[0], values[1], values[2]));
                values.drain(..3);
                extras.push(values);
            }
            if cfg.values_per_joint_row == 3 {
                extras.clear();
            }

            let slot = match bodies.iter().position(|(id, _)| *id == body_id) {
                Some(i) => i,
                None => {
                    bodies.push((body_id, Vec::new()));
                    bodies.len() - 1
                }
            };
            let frames = &mut bodies[slot].1;
            frames.push(SkeletonFrame {
                index: frames.len() + 1,
                joints,
                extras,
            });
        }
    }

    Ok(bodies
        .into_iter()
        .map(|(id, frames)| SkeletonSequence {
            frames,
            joint_count: cfg.joints_per_body,
            body_id: Some(id),
            ..Default::default()
        })
        .collect())
}

/// Writes sequences in the NTU layout, frame `t` holding every sequence with
/// at least `t` frames. Body-level values other than the id are written as 0.
pub fn write_ntu(seqs: &[SkeletonSequence], cfg: &NtuFormatConfig) -> String {
    let pad = cfg.values_per_joint_row.saturating_sub(3);
    let frame_count = seqs.iter().map(SkeletonSequence::len).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{frame_count}");
    for t in 0..frame_count {
        let present: Vec<_> = seqs.iter().filter(|s| s.len() > t).collect();
        let _ = writeln!(out, "{}", present.len());
        for seq in present {
            let _ = writeln!(out, "{} 0 0 0 0 0 0 0 0 0", seq.body_id.unwrap_or(0));
            let frame = &seq.frames[t];
            let _ = writeln!(out, "{}", frame.joints.len());
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
    }
    out
}
