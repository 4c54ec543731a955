use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::IngestError;
use crate::skeleton::{Joint3, SkeletonFrame, SkeletonSequence};

/// Sinusoidal displacement of one joint:
/// `amplitude * sin(TAU * frequency * s + phase)` with `s` running 0..=1
/// over the sequence.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct JointMotion {
    pub amplitude: [f64; 3],
    pub frequency: f64,
    pub phase: f64,
}

/// Trajectory template for one synthetic action class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthTemplate {
    pub class_id: u32,
    pub base_pose: Vec<Joint3>,
    /// One entry per joint of `base_pose`.
    pub motions: Vec<JointMotion>,
    pub noise_sigma: f64,
}

impl SynthTemplate {
    /// A template with no motion: every frame equals `base_pose` up to noise.
    pub fn still(class_id: u32, base_pose: Vec<Joint3>, noise_sigma: f64) -> Self {
        let motions = vec![JointMotion::default(); base_pose.len()];
        Self {
            class_id,
            base_pose,
            motions,
            noise_sigma,
        }
    }

    /// A standing body of `joint_count` joints, spread over roughly
    /// 0.6 m x 1.8 m at 3 m from the sensor. Deterministic in `seed`.
    pub fn body_pose(joint_count: usize, seed: u64) -> Vec<Joint3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..joint_count)
            .map(|k| {
                let height = 1.8 * k as f64 / joint_count.max(2).saturating_sub(1) as f64;
                Joint3::new(
                    rng.random_range(-0.3..0.3),
                    height,
                    3.0 + rng.random_range(-0.1..0.1),
                )
            })
            .collect()
    }

    /// `n_classes` templates sharing one body pose, each moving a different
    /// random subset of joints along different directions and frequencies.
    pub fn action_family(
        n_classes: u32,
        joint_count: usize,
        noise_sigma: f64,
        seed: u64,
    ) -> Vec<SynthTemplate> {
        let base = Self::body_pose(joint_count, seed);
        (0..n_classes)
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(u64::from(c) + 1);
                let motions = (0..joint_count)
                    .map(|_| {
                        if rng.random_bool(0.5) {
                            JointMotion {
                                amplitude: [
                                    rng.random_range(0.0..0.4),
                                    rng.random_range(0.0..0.4),
                                    rng.random_range(0.0..0.4),
                                ],
                                frequency: rng.random_range(0.5..2.0),
                                phase: rng.random_range(0.0..TAU),
                            }
                        } else {
                            JointMotion::default()
                        }
                    })
                    .collect();
                SynthTemplate {
                    class_id: c,
                    base_pose: base.clone(),
                    motions,
                    noise_sigma,
                }
            })
            .collect()
    }

    fn check(&self) -> Result<(), IngestError> {
        if self.base_pose.len() != self.motions.len() {
            return Err(IngestError::Argument(format!(
                "template has {} joints but {} motions",
                self.base_pose.len(),
                self.motions.len()
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(IngestError::Argument(format!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        let bad_amp = self
            .motions
            .iter()
            .flat_map(|m| m.amplitude)
            .any(|a| !(a >= 0.0 && a.is_finite()));
        if bad_amp {
            return Err(IngestError::Argument(
                "motion amplitudes must be finite and >= 0".into(),
            ));
        }
        if self.base_pose.iter().any(|j| !j.is_finite()) {
            return Err(IngestError::Argument("base pose is not finite".into()));
        }
        Ok(())
    }
}

/// Samples one sequence from `template`. Deterministic in
/// `(template, n_frames, seed)`.
pub fn synth_sequence(
    template: &SynthTemplate,
    n_frames: usize,
    seed: u64,
) -> Result<SkeletonSequence, IngestError> {
    if n_frames < 2 {
        return Err(IngestError::Argument(format!(
            "n_frames must be >= 2, got {n_frames}"
        )));
    }
    template.check()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // checked above: sigma finite and non-negative
    let noise = Normal::new(0.0, template.noise_sigma).expect("valid sigma");
    let span = (n_frames - 1) as f64;

    let frames = (0..n_frames)
        .map(|t| {
            let s = t as f64 / span;
            let joints = template
                .base_pose
                .iter()
                .zip(&template.motions)
                .map(|(base, m)| {
                    let wave = (TAU * m.frequency * s + m.phase).sin();
                    let mut p = *base + Joint3::from(m.amplitude) * wave;
                    if template.noise_sigma > 0.0 {
                        p = p + Joint3::new(
                            noise.sample(&mut rng),
                            noise.sample(&mut rng),
                            noise.sample(&mut rng),
                        );
                    }
                    p
                })
                .collect();
            SkeletonFrame::new(t + 1, joints)
        })
        .collect();

    Ok(SkeletonSequence {
        frames,
        label: template.class_id,
        joint_count: template.base_pose.len(),
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::validate_sequence;

    #[test]
    fn still_template_without_noise_repeats_frames() {
        let t = SynthTemplate::still(0, SynthTemplate::body_pose(20, 1), 0.0);
        let seq = synth_sequence(&t, 6, 3).unwrap();
        assert!(seq.frames.windows(2).all(|w| w[0].joints == w[1].joints));
        assert_eq!(seq.frames[0].joints, t.base_pose);
    }

    #[test]
    fn deterministic_in_seed() {
        let t = &SynthTemplate::action_family(3, 20, 0.02, 11)[1];
        assert_eq!(
            synth_sequence(t, 10, 7).unwrap(),
            synth_sequence(t, 10, 7).unwrap()
        );
        assert_ne!(
            synth_sequence(t, 10, 7).unwrap(),
            synth_sequence(t, 10, 8).unwrap()
        );
    }

    #[test]
    fn rejects_short_and_bad_templates() {
        let t = SynthTemplate::still(0, SynthTemplate::body_pose(5, 1), 0.0);
        assert!(matches!(
            synth_sequence(&t, 1, 0),
            Err(IngestError::Argument(_))
        ));
        let mut bad = t.clone();
        bad.noise_sigma = -1.0;
        assert!(synth_sequence(&bad, 4, 0).is_err());
        let mut bad = t;
        bad.motions[0].amplitude[1] = -0.5;
        assert!(synth_sequence(&bad, 4, 0).is_err());
    }

    #[test]
    fn output_is_valid() {
        for t in SynthTemplate::action_family(4, 25, 0.05, 2) {
            let seq = synth_sequence(&t, 12, 99).unwrap();
            assert!(validate_sequence(&seq).is_valid());
            assert_eq!(seq.label, t.class_id);
        }
    }
}
