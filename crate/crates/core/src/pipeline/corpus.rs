use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use super::manifest::{DatasetManifest, ManifestEntry};
use super::split::{split_dataset, Split};
use super::PipelineError;
use crate::augment::{augment, replica_rng, AugmentConfig};
use crate::ingest::{read_file, IngestError, SourceFormat};
use crate::skeleton::SkeletonSequence;
use crate::spmf::{
    build_spmf, image_file_name, jjd, resize_image, DistanceStats, EncodeError, SpmfImage,
};

/// Which samples contribute to the distance statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatsScope {
    /// Every manifest entry.
    #[default]
    Corpus,
    /// Training-split entries only; avoids leaking test distances into the
    /// normalization at the cost of clamping larger unseen distances.
    Train,
}

impl std::str::FromStr for StatsScope {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "corpus" => Ok(StatsScope::Corpus),
            "train" => Ok(StatsScope::Train),
            other => Err(format!(
                "unknown stats scope {other:?}, expected corpus or train"
            )),
        }
    }
}

impl StatsScope {
    pub fn as_str(self) -> &'static str {
        match self {
            StatsScope::Corpus => "corpus",
            StatsScope::Train => "train",
        }
    }
}

/// Largest within-frame joint distance over all sequences.
pub fn compute_stats<'a>(
    sequences: impl IntoIterator<Item = &'a SkeletonSequence>,
    source: &str,
) -> Result<DistanceStats, PipelineError> {
    let mut d_max = 0.0f64;
    let mut counted = 0usize;
    for seq in sequences {
        let mut usable = false;
        for frame in &seq.frames {
            let joints = &frame.joints;
            if joints.len() < 2 {
                continue;
            }
            usable = true;
            for a in 0..joints.len() {
                for b in a + 1..joints.len() {
                    d_max = d_max.max(jjd(joints[a], joints[b]));
                }
            }
        }
        counted += usize::from(usable);
    }
    if counted == 0 {
        return Err(PipelineError::EmptyCorpus);
    }
    let mut stats = DistanceStats::new(d_max, source)?;
    stats.sequences = counted;
    Ok(stats)
}

/// A sample that could not be read or encoded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleError {
    pub id: String,
    pub message: String,
}

/// Parses one manifest entry. The manifest's label, subject and camera
/// override whatever the file name implies.
pub fn load_entry(
    manifest: &DatasetManifest,
    entry: &ManifestEntry,
) -> Result<Vec<SkeletonSequence>, IngestError> {
    let path = manifest.resolve(entry);
    let mut seqs = read_file(
        &path,
        manifest.format,
        &manifest.msr_format,
        &manifest.ntu_format,
    )?;
    for s in &mut seqs {
        s.id.clone_from(&entry.id);
        s.label = entry.label;
        s.subject_id = entry.subject_id;
        s.camera_id = entry.camera_id;
    }
    Ok(seqs)
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| PipelineError::Manifest(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Loads the entries selected by `scope` and computes their statistics.
/// Unreadable samples are skipped and returned alongside.
pub fn corpus_stats(
    manifest: &DatasetManifest,
    scope: StatsScope,
    jobs: usize,
) -> Result<(DistanceStats, Vec<SampleError>), PipelineError> {
    let entries: Vec<&ManifestEntry> = match scope {
        StatsScope::Corpus => manifest.entries.iter().collect(),
        StatsScope::Train => {
            let split = split_dataset(manifest)?;
            manifest
                .entries
                .iter()
                .filter(|e| split.split_of(&e.id) == Some(Split::Train))
                .collect()
        }
    };
    let loaded: Vec<Result<Vec<SkeletonSequence>, SampleError>> = with_pool(jobs, || {
        entries
            .par_iter()
            .map(|e| {
                load_entry(manifest, e).map_err(|err| SampleError {
                    id: e.id.clone(),
                    message: err.to_string(),
                })
            })
            .collect()
    })?;
    let mut seqs = Vec::new();
    let mut errors = Vec::new();
    for r in loaded {
        match r {
            Ok(s) => seqs.extend(s),
            Err(e) => errors.push(e),
        }
    }
    let mut stats = compute_stats(&seqs, &manifest.dataset)?;
    stats.scope = scope.as_str().to_string();
    Ok((stats, errors))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EncodeConfig {
    pub width: usize,
    pub height: usize,
    /// Augmented copies per training sample (MSR manifests only).
    pub replicas: u32,
    pub augment: AugmentConfig,
    /// Worker threads; 0 picks one per core.
    pub jobs: usize,
}

impl Default for EncodeConfig {
    fn default() -> Self {
        Self {
            width: crate::spmf::DEFAULT_SIZE,
            height: crate::spmf::DEFAULT_SIZE,
            replicas: 0,
            augment: AugmentConfig::default(),
            jobs: 0,
        }
    }
}

/// One line of the corpus index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub sample_id: String,
    /// Manifest entry the sample came from.
    pub source_id: String,
    /// Image path relative to the index file, absent when encoding failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub label: u32,
    pub split: Split,
    /// 0 for the plain encoding, 1.. for augmented copies.
    pub replica: u32,
    pub subject_id: u32,
    pub camera_id: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IndexRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none() && self.path.is_some()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EncodeSummary {
    pub rows: usize,
    pub images: usize,
    pub errors: usize,
    pub train_samples: usize,
    pub test_samples: usize,
    /// Replicas were requested for a dataset that is not augmented.
    pub augmentation_skipped: bool,
    pub index_path: PathBuf,
}

pub const INDEX_FILE: &str = "index.jsonl";
pub const STATS_FILE: &str = "stats.toml";

/// Parse, encode and resize one sequence.
pub fn encode_sequence(
    seq: &SkeletonSequence,
    stats: &DistanceStats,
    width: usize,
    height: usize,
) -> Result<SpmfImage, EncodeError> {
    resize_image(&build_spmf(seq, stats)?, width, height)
}

fn write_image(out_dir: &Path, rel: &str, img: &SpmfImage) -> Result<(), String> {
    let path = out_dir.join(rel);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| format!("{}: {e}", parent.display()))?;
    }
    img.write_png(&path).map_err(|e| e.to_string())
}

fn encode_entry(
    manifest: &DatasetManifest,
    entry: &ManifestEntry,
    split: Split,
    stats: &DistanceStats,
    cfg: &EncodeConfig,
    replicas: u32,
    out_dir: &Path,
) -> Vec<IndexRow> {
    let row = |sample_id: &str, replica: u32| IndexRow {
        sample_id: sample_id.to_string(),
        source_id: entry.id.clone(),
        path: None,
        label: entry.label,
        split,
        replica,
        subject_id: entry.subject_id,
        camera_id: entry.camera_id,
        caveat: None,
        error: None,
    };
    let failed = |message: String| {
        let mut r = row(&entry.id, 0);
        r.error = Some(message);
        vec![r]
    };

    let seqs = match load_entry(manifest, entry) {
        Ok(s) if s.is_empty() => return failed("no tracked bodies in source".into()),
        Ok(s) => s,
        Err(e) => return failed(e.to_string()),
    };

    let bodies = seqs.len();
    let mut rows = Vec::new();
    for (k, seq) in seqs.iter().enumerate() {
        let sample_id = if bodies == 1 {
            entry.id.clone()
        } else {
            format!("{}_b{}", entry.id, k + 1)
        };
        let caveat = (bodies > 1).then(|| {
            format!(
                "multi-body sample: body {} of {bodies} encoded as its own sequence",
                k + 1
            )
        });
        let dir = format!("{}/{}", split.as_str(), entry.label);

        let base = match encode_sequence(seq, stats, cfg.width, cfg.height) {
            Ok(img) => img,
            Err(e) => {
                let mut r = row(&sample_id, 0);
                r.caveat = caveat;
                r.error = Some(e.to_string());
                rows.push(r);
                continue;
            }
        };

        let mut emit = |replica: u32, img: Result<SpmfImage, EncodeError>| {
            let id = if replica == 0 {
                sample_id.clone()
            } else {
                format!("{sample_id}_aug{replica}")
            };
            let rel = format!("{dir}/{}", image_file_name(&manifest.dataset, &id));
            let mut r = row(&id, replica);
            r.caveat.clone_from(&caveat);
            match img
                .map_err(|e| e.to_string())
                .and_then(|img| write_image(out_dir, &rel, &img))
            {
                Ok(()) => r.path = Some(rel),
                Err(e) => r.error = Some(e),
            }
            rows.push(r);
        };

        emit(0, Ok(base.clone()));
        if split == Split::Train {
            for rep in 1..=replicas {
                let mut rng = replica_rng(cfg.augment.seed, &sample_id, rep);
                emit(rep, augment(&base, &cfg.augment, &mut rng));
            }
        }
    }
    rows
}

/// Encodes every protocol-eligible sample of `manifest` into
/// `out_dir/<split>/<label>/<dataset>_<sample>_spmf.png` and writes
/// `out_dir/index.jsonl` in manifest order. Training samples of MSR datasets
/// additionally get `cfg.replicas` augmented copies.
///
/// A sample that fails to load or encode becomes an index row carrying the
/// error; the run continues. Re-running with the same inputs rewrites
/// byte-identical files.
pub fn encode_corpus(
    manifest: &DatasetManifest,
    stats: &DistanceStats,
    cfg: &EncodeConfig,
    out_dir: &Path,
) -> Result<EncodeSummary, PipelineError> {
    stats.check()?;
    cfg.augment.check()?;
    if cfg.width == 0 || cfg.height == 0 {
        return Err(PipelineError::Encode(EncodeError::Argument(
            "output size must be at least 1x1".into(),
        )));
    }
    let split = split_dataset(manifest)?;
    let replicas = if manifest.format == SourceFormat::Msr {
        cfg.replicas
    } else {
        0
    };

    let work: Vec<(&ManifestEntry, Split)> = manifest
        .entries
        .iter()
        .filter_map(|e| split.split_of(&e.id).map(|s| (e, s)))
        .collect();

    std::fs::create_dir_all(out_dir).map_err(|e| PipelineError::io(out_dir, e))?;
    let per_entry: Vec<Vec<IndexRow>> = with_pool(cfg.jobs, || {
        work.par_iter()
            .map(|(e, s)| encode_entry(manifest, e, *s, stats, cfg, replicas, out_dir))
            .collect()
    })?;
    let rows: Vec<IndexRow> = per_entry.into_iter().flatten().collect();

    let index_path = out_dir.join(INDEX_FILE);
    write_index(&index_path, &rows)?;
    stats.save(&out_dir.join(STATS_FILE))?;

    Ok(EncodeSummary {
        rows: rows.len(),
        images: rows.iter().filter(|r| r.is_ok()).count(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        train_samples: split.train.len(),
        test_samples: split.test.len(),
        augmentation_skipped: replicas != cfg.replicas,
        index_path,
    })
}

pub fn write_index(path: &Path, rows: &[IndexRow]) -> Result<(), PipelineError> {
    let mut f = std::io::BufWriter::new(
        std::fs::File::create(path).map_err(|e| PipelineError::io(path, e))?,
    );
    for r in rows {
        let line = serde_json::to_string(r).expect("index rows serialize");
        writeln!(f, "{line}").map_err(|e| PipelineError::io(path, e))?;
    }
    f.flush().map_err(|e| PipelineError::io(path, e))
}

pub fn read_index(path: &Path) -> Result<Vec<IndexRow>, PipelineError> {
    let f = std::fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| PipelineError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: IndexRow = serde_json::from_str(&line).map_err(|e| {
            PipelineError::Manifest(format!("{}:{}: bad index row: {e}", path.display(), i + 1))
        })?;
        rows.push(row);
    }
    Ok(rows)
}
