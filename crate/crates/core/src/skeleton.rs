//! Skeleton domain types shared by every stage of the pipeline.
//!
//! Coordinates are kept as `f64` from parsing through feature computation;
//! the only quantization to 8 bits happens in the color encoders.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A 3D joint position in sensor space.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Joint3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Joint3 {
    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    #[inline]
    pub fn dot(&self, other: &Joint3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Joint3 {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl Add for Joint3 {
    type Output = Joint3;
    fn add(self, o: Joint3) -> Joint3 {
        Joint3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Joint3 {
    type Output = Joint3;
    fn sub(self, o: Joint3) -> Joint3 {
        Joint3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Joint3 {
    type Output = Joint3;
    fn mul(self, s: f64) -> Joint3 {
        Joint3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Joint3 {
    type Output = Joint3;
    fn neg(self) -> Joint3 {
        Joint3::new(-self.x, -self.y, -self.z)
    }
}

/// One tracked skeleton at a single timestamp.
///
/// `extras` holds the trailing per-joint values of the source row (MSR
/// confidence, NTU depth/color/orientation/tracking columns). It is either
/// empty or has one entry per joint. The encoder never reads it; it exists so
/// a parsed file can be written back out unchanged.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SkeletonFrame {
    /// 1-based position of the frame in its sequence.
    pub index: usize,
    pub joints: Vec<Joint3>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extras: Vec<Vec<f64>>,
}

impl SkeletonFrame {
    pub fn new(index: usize, joints: Vec<Joint3>) -> Self {
        Self {
            index,
            joints,
            extras: Vec::new(),
        }
    }

    /// True when every joint sits at the origin (a Kinect tracking dropout).
    pub fn is_dropout(&self) -> bool {
        !self.joints.is_empty() && self.joints.iter().all(Joint3::is_zero)
    }
}

/// An ordered sequence of skeleton frames with its sample metadata.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SkeletonSequence {
    /// Sample identifier, usually the source file stem.
    #[serde(default)]
    pub id: String,
    pub frames: Vec<SkeletonFrame>,
    pub label: u32,
    pub subject_id: u32,
    pub camera_id: u32,
    pub joint_count: usize,
    /// Source body id for multi-body formats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_id: Option<u64>,
}

impl SkeletonSequence {
    /// Builds a sequence from raw joint lists, numbering frames 1..=N.
    pub fn from_joints(frames: Vec<Vec<Joint3>>, label: u32) -> Self {
        let joint_count = frames.first().map_or(0, Vec::len);
        let frames = frames
            .into_iter()
            .enumerate()
            .map(|(i, joints)| SkeletonFrame::new(i + 1, joints))
            .collect();
        Self {
            frames,
            label,
            joint_count,
            ..Default::default()
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Applies `f` to every joint of every frame.
    pub fn map_joints(&self, mut f: impl FnMut(Joint3) -> Joint3) -> Self {
        let mut out = self.clone();
        for frame in &mut out.frames {
            for j in &mut frame.joints {
                *j = f(*j);
            }
        }
        out
    }
}

/// Which invariant a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    EmptySequence,
    JointCountMismatch,
    NonFiniteCoordinate,
    NonContiguousIndex,
    ExtrasLengthMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// 1-based frame position, `None` for sequence-level rules.
    pub frame: Option<usize>,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Result of [`validate_sequence`]. `violations` break type invariants;
/// `dropout_frames` are informational and do not make a sequence invalid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub dropout_frames: Vec<usize>,
}

impl ValidationReport {
    #[inline]
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every invariant of [`SkeletonSequence`] and lists what fails.
pub fn validate_sequence(seq: &SkeletonSequence) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut push = |frame: Option<usize>, rule: Rule, message: String| {
        report.violations.push(Violation {
            frame,
            rule,
            message,
        })
    };

    if seq.frames.is_empty() {
        push(None, Rule::EmptySequence, "sequence has no frames".into());
    }

    for (pos, frame) in seq.frames.iter().enumerate() {
        let t = pos + 1;
        if frame.index != t {
            push(
                Some(t),
                Rule::NonContiguousIndex,
                format!("frame index {} at position {t}, expected {t}", frame.index),
            );
        }
        if frame.joints.len() != seq.joint_count {
            push(
                Some(t),
                Rule::JointCountMismatch,
                format!(
                    "joint count mismatch at frame {t}: {} joints, expected {}",
                    frame.joints.len(),
                    seq.joint_count
                ),
            );
        }
        if !frame.extras.is_empty() && frame.extras.len() != frame.joints.len() {
            push(
                Some(t),
                Rule::ExtrasLengthMismatch,
                format!(
                    "extras rows at frame {t}: {} for {} joints",
                    frame.extras.len(),
                    frame.joints.len()
                ),
            );
        }
        if let Some(j) = frame.joints.iter().position(|j| !j.is_finite()) {
            push(
                Some(t),
                Rule::NonFiniteCoordinate,
                format!("non-finite coordinate at frame {t}, joint {}", j + 1),
            );
        }
    }

    report.dropout_frames = seq
        .frames
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_dropout())
        .map(|(i, _)| i + 1)
        .collect();
    report
}
