use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use spmf_core::ingest::{synth_sequence, write_msr, MsrFormatConfig, SourceFormat, SynthTemplate};
use spmf_core::pipeline::{DatasetManifest, ManifestEntry, Protocol};
use spmf_core::{Joint3, SkeletonSequence};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` frames of `j` joints, uniform in a cube of side `2 * scale`.
pub fn random_frames(rng: &mut ChaCha8Rng, j: usize, n: usize, scale: f64) -> Vec<Vec<[f64; 3]>> {
    (0..n)
        .map(|_| {
            (0..j)
                .map(|_| {
                    [
                        rng.random_range(-scale..scale),
                        rng.random_range(-scale..scale),
                        rng.random_range(-scale..scale),
                    ]
                })
                .collect()
        })
        .collect()
}

pub fn to_sequence(frames: &[Vec<[f64; 3]>]) -> SkeletonSequence {
    SkeletonSequence::from_joints(
        frames
            .iter()
            .map(|f| f.iter().map(|p| Joint3::from(*p)).collect())
            .collect(),
        1,
    )
}

/// Layout of a generated synthetic dataset.
pub struct SynthSpec {
    pub classes: u32,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub joints: usize,
    pub noise_sigma: f64,
    pub min_frames: usize,
    pub max_frames: usize,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            classes: 6,
            train_per_class: 60,
            test_per_class: 30,
            joints: 20,
            noise_sigma: 0.03,
            min_frames: 20,
            max_frames: 40,
            seed: 2024,
        }
    }
}

/// Writes one MSR-style text file per sequence into `dir` plus
/// `dir/manifest.json` with an explicit train/test split, and returns the
/// manifest path. Labels are 1-based.
pub fn write_synth_dataset(dir: &Path, spec: &SynthSpec) -> PathBuf {
    let templates =
        SynthTemplate::action_family(spec.classes, spec.joints, spec.noise_sigma, spec.seed);
    let mut r = rng(spec.seed ^ 0x5eed);
    let cfg = MsrFormatConfig {
        joints_per_frame: spec.joints,
        values_per_row: 4,
    };
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut entries = Vec::new();
    for (c, t) in templates.iter().enumerate() {
        let label = c as u32 + 1;
        for e in 0..spec.train_per_class + spec.test_per_class {
            let subject = if e < spec.train_per_class { 1 } else { 2 };
            let id = format!("a{label:02}_s{subject:02}_e{e:03}");
            let n = r.random_range(spec.min_frames..=spec.max_frames);
            let seq = synth_sequence(t, n, r.random()).unwrap();
            let file = format!("{id}_skeleton3D.txt");
            std::fs::write(dir.join(&file), write_msr(&seq, &cfg)).unwrap();
            entries.push(ManifestEntry {
                id: id.clone(),
                path: file.into(),
                label,
                subject_id: subject,
                camera_id: 0,
            });
            if subject == 1 {
                train.push(id);
            } else {
                test.push(id);
            }
        }
    }
    let mut m = DatasetManifest::new("synth", SourceFormat::Msr, Protocol::Custom { train, test });
    m.msr_format = cfg;
    m.entries = entries;
    let path = dir.join("manifest.json");
    m.save(&path).unwrap();
    path
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            collect_files(root, &p, out);
        } else {
            out.push(p.strip_prefix(root).unwrap().to_path_buf());
        }
    }
}

/// SHA-256 over every file's relative path and contents, in sorted order.
pub fn tree_hash(root: &Path) -> (String, usize) {
    let mut files = Vec::new();
    collect_files(root, root, &mut files);
    let mut h = Sha256::new();
    for f in &files {
        h.update(f.to_string_lossy().as_bytes());
        h.update([0]);
        h.update(std::fs::read(root.join(f)).unwrap());
    }
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    (hex, files.len())
}
