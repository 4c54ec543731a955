//! Pose and motion feature columns and their assembly into an SPMF image.

use serde::{Deserialize, Serialize};

use super::color::{orient_color_unchecked, RgbPixel, JET, NEUTRAL_ORIENTATION};
use super::geometry::{cross_jjd, cross_jjo, jjd, jjo};
use super::image::{Provenance, SpmfImage};
use super::stats::DistanceStats;
use super::{jet_level, EncodeError};
use crate::skeleton::{validate_sequence, SkeletonFrame, SkeletonSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    /// Pose of frame `t`.
    Pose { t: usize },
    /// Motion from frame `t` to frame `t + 1`.
    Motion { t: usize },
}

/// One vertical strip of the image: the distance pixels of every joint pair
/// followed by the orientation pixels of the same pairs, in the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureColumn {
    pub pixels: Vec<RgbPixel>,
    pub kind: FeatureKind,
    /// Pairs whose orientation was undefined and got a neighbor's color.
    pub degenerate: usize,
}

#[inline]
fn distance_pixel(d: f64, d_max: f64) -> RgbPixel {
    JET[jet_level((d / d_max).min(1.0))]
}

/// Replaces each undefined orientation with the nearest defined one in the
/// same segment, preferring the earlier pixel on a tie. A segment with no
/// defined orientation is filled with [`NEUTRAL_ORIENTATION`].
fn fill_from_neighbors(segment: &[Option<RgbPixel>]) -> Vec<RgbPixel> {
    let n = segment.len();
    let mut prev: Vec<Option<usize>> = vec![None; n];
    let mut last = None;
    for (i, p) in segment.iter().enumerate() {
        if p.is_some() {
            last = Some(i);
        }
        prev[i] = last;
    }
    let mut out = vec![NEUTRAL_ORIENTATION; n];
    let mut next = None;
    for i in (0..n).rev() {
        if segment[i].is_some() {
            next = Some(i);
        }
        let pick = match (prev[i], next) {
            (Some(p), Some(q)) => Some(if i - p <= q - i { p } else { q }),
            (Some(p), None) => Some(p),
            (None, Some(q)) => Some(q),
            (None, None) => None,
        };
        if let Some(k) = pick {
            out[i] = segment[k].expect("picked index holds a color");
        }
    }
    out
}

fn assemble(
    distances: Vec<RgbPixel>,
    orientations: Vec<Option<RgbPixel>>,
    kind: FeatureKind,
) -> FeatureColumn {
    let degenerate = orientations.iter().filter(|o| o.is_none()).count();
    let mut pixels = distances;
    pixels.extend(fill_from_neighbors(&orientations));
    FeatureColumn {
        pixels,
        kind,
        degenerate,
    }
}

/// Pose column of one frame: the `J(J-1)/2` unordered pairs `j < k` in
/// lexicographic order, first as JET-coded distances then as orientation
/// colors.
pub fn pose_feature(
    frame: &SkeletonFrame,
    stats: &DistanceStats,
) -> Result<FeatureColumn, EncodeError> {
    stats.check()?;
    let joints = &frame.joints;
    let j = joints.len();
    if j < 2 {
        return Err(EncodeError::Argument(format!(
            "pose feature needs at least 2 joints, got {j}"
        )));
    }
    if joints.iter().any(|p| !p.is_finite()) {
        return Err(EncodeError::Argument(format!(
            "non-finite coordinate in frame {}",
            frame.index
        )));
    }
    let pairs = j * (j - 1) / 2;
    let mut distances = Vec::with_capacity(2 * pairs);
    let mut orientations = Vec::with_capacity(pairs);
    for a in 0..j {
        for b in a + 1..j {
            distances.push(distance_pixel(jjd(joints[a], joints[b]), stats.d_max));
            orientations.push(jjo(joints[a], joints[b]).map(orient_color_unchecked));
        }
    }
    Ok(assemble(
        distances,
        orientations,
        FeatureKind::Pose { t: frame.index },
    ))
}

/// Motion column between two consecutive frames: all `J * J` ordered pairs
/// `(j, k)` row-major, `j` read from `f_t` and `k` from `f_t1`, first as
/// JET-coded distances then as orientation colors.
pub fn motion_feature(
    f_t: &SkeletonFrame,
    f_t1: &SkeletonFrame,
    stats: &DistanceStats,
) -> Result<FeatureColumn, EncodeError> {
    stats.check()?;
    let j = f_t.joints.len();
    if f_t1.joints.len() != j {
        return Err(EncodeError::Argument(format!(
            "joint count mismatch between frames {} and {}: {} vs {}",
            f_t.index,
            f_t1.index,
            j,
            f_t1.joints.len()
        )));
    }
    if j == 0 {
        return Err(EncodeError::Argument("frames have no joints".into()));
    }
    if f_t
        .joints
        .iter()
        .chain(&f_t1.joints)
        .any(|p| !p.is_finite())
    {
        return Err(EncodeError::Argument(format!(
            "non-finite coordinate in frames {}..{}",
            f_t.index, f_t1.index
        )));
    }
    let mut distances = Vec::with_capacity(2 * j * j);
    let mut orientations = Vec::with_capacity(j * j);
    for a in &f_t.joints {
        for b in &f_t1.joints {
            distances.push(distance_pixel(cross_jjd(*a, *b), stats.d_max));
            orientations.push(cross_jjo(*a, *b).map(orient_color_unchecked));
        }
    }
    Ok(assemble(
        distances,
        orientations,
        FeatureKind::Motion { t: f_t.index },
    ))
}

/// Encodes a sequence of `N >= 2` frames as a `(2N - 1) x 2J^2` image with
/// columns `PF1, MF1->2, PF2, ..., MF(N-1)->N, PFN`. Pose columns are shorter
/// than motion columns and are padded by repeating their last pixel.
pub fn build_spmf(seq: &SkeletonSequence, stats: &DistanceStats) -> Result<SpmfImage, EncodeError> {
    stats.check()?;
    let n = seq.frames.len();
    if n < 2 {
        return Err(EncodeError::Argument(format!(
            "an SPMF needs at least 2 frames, got {n}"
        )));
    }
    let report = validate_sequence(seq);
    if let Some(v) = report.violations.first() {
        return Err(EncodeError::Argument(format!("invalid sequence: {v}")));
    }
    let j = seq.joint_count;
    if j < 2 {
        return Err(EncodeError::Argument(format!(
            "an SPMF needs at least 2 joints, got {j}"
        )));
    }

    let width = 2 * n - 1;
    let height = 2 * j * j;
    let mut img = SpmfImage::filled(width, height, RgbPixel::default());

    let mut put = |x: usize, col: &FeatureColumn| {
        let last = *col.pixels.last().expect("columns are non-empty");
        for y in 0..height {
            img.set(x, y, col.pixels.get(y).copied().unwrap_or(last));
        }
    };

    for (t, frame) in seq.frames.iter().enumerate() {
        put(2 * t, &pose_feature(frame, stats)?);
        if let Some(next) = seq.frames.get(t + 1) {
            put(2 * t + 1, &motion_feature(frame, next, stats)?);
        }
    }

    img.provenance = Some(Provenance {
        sequence_id: seq.id.clone(),
        stats: stats.clone(),
    });
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::Joint3;

    fn stats(d_max: f64) -> DistanceStats {
        DistanceStats::new(d_max, "test").unwrap()
    }

    fn line_frame(j: usize) -> SkeletonFrame {
        SkeletonFrame::new(
            1,
            (0..j)
                .map(|k| Joint3::new(0.1 * k as f64, 0.0, 0.0))
                .collect(),
        )
    }

    #[test]
    fn column_heights() {
        let s = stats(10.0);
        assert_eq!(pose_feature(&line_frame(20), &s).unwrap().pixels.len(), 380);
        assert_eq!(pose_feature(&line_frame(25), &s).unwrap().pixels.len(), 600);
        let f = line_frame(20);
        assert_eq!(motion_feature(&f, &f, &s).unwrap().pixels.len(), 800);
    }

    #[test]
    fn pose_rejects_single_joint() {
        assert!(pose_feature(&line_frame(1), &stats(1.0)).is_err());
    }

    #[test]
    fn static_motion_has_zero_distance_diagonal() {
        let f = line_frame(20);
        let col = motion_feature(&f, &f, &stats(10.0)).unwrap();
        assert_eq!(col.degenerate, 20);
        for j in 0..20 {
            assert_eq!(col.pixels[j * 20 + j], RgbPixel::new(0, 0, 128));
        }
        // degenerate diagonal orientations take a neighbor's color
        let orient = &col.pixels[400..];
        assert_eq!(orient[0], orient[1]);
        assert_eq!(orient[21], orient[20]);
    }

    #[test]
    fn single_joint_translation_saturates() {
        let f = line_frame(20);
        let mut g = f.clone();
        g.index = 2;
        g.joints[3] = g.joints[3] + Joint3::new(0.0, 0.0, 2.0);
        let col = motion_feature(&f, &g, &stats(2.0)).unwrap();
        assert_eq!(col.pixels[3 * 20 + 3], RgbPixel::new(128, 0, 0));
        assert!(motion_feature(&f, &line_frame(19), &stats(2.0)).is_err());
    }

    #[test]
    fn neighbor_fill_prefers_nearest_then_earlier() {
        let a = Some(RgbPixel::new(1, 1, 1));
        let b = Some(RgbPixel::new(2, 2, 2));
        let filled = fill_from_neighbors(&[None, a, None, None, None, b, None]);
        let px = |v: u8| RgbPixel::new(v, v, v);
        assert_eq!(
            filled,
            vec![px(1), px(1), px(1), px(1), px(2), px(2), px(2)]
        );
        assert_eq!(
            fill_from_neighbors(&[None, None]),
            vec![NEUTRAL_ORIENTATION; 2]
        );
    }

    #[test]
    fn spmf_shape_and_interleaving() {
        let frames: Vec<Vec<Joint3>> = (0..3)
            .map(|t| {
                (0..4)
                    .map(|k| Joint3::new(k as f64, t as f64 * 0.1, 0.0))
                    .collect()
            })
            .collect();
        let seq = SkeletonSequence::from_joints(frames, 0);
        let s = stats(4.0);
        let img = build_spmf(&seq, &s).unwrap();
        assert_eq!((img.width, img.height), (5, 32));

        let pf2 = pose_feature(&seq.frames[1], &s).unwrap();
        let mf23 = motion_feature(&seq.frames[1], &seq.frames[2], &s).unwrap();
        assert_eq!(&img.column(2)[..12], &pf2.pixels[..]);
        assert!(img.column(2)[12..].iter().all(|p| *p == pf2.pixels[11]));
        assert_eq!(img.column(3), mf23.pixels);
    }

    #[test]
    fn spmf_two_frames_twenty_joints() {
        let f = line_frame(20).joints;
        let seq = SkeletonSequence::from_joints(vec![f.clone(), f], 0);
        let img = build_spmf(&seq, &stats(3.0)).unwrap();
        assert_eq!((img.width, img.height), (3, 800));
    }

    #[test]
    fn spmf_needs_two_frames() {
        let seq = SkeletonSequence::from_joints(vec![line_frame(5).joints], 0);
        assert!(matches!(
            build_spmf(&seq, &stats(1.0)),
            Err(EncodeError::Argument(_))
        ));
    }
}
