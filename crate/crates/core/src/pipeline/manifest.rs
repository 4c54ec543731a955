use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::PipelineError;
use crate::ingest::{MsrFormatConfig, MsrSampleName, NtuFormatConfig, NtuSampleName, SourceFormat};

/// One sample of a dataset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// Source file; relative paths are resolved against the manifest's directory.
    pub path: PathBuf,
    pub label: u32,
    #[serde(default)]
    pub subject_id: u32,
    #[serde(default)]
    pub camera_id: u32,
}

/// Class subset and subject halves of one MSR Action3D action set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsrSubset {
    pub classes: Vec<u32>,
    pub train_subjects: Vec<u32>,
    pub test_subjects: Vec<u32>,
}

/// Evaluation protocol and its split parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Protocol {
    MsrAs1(MsrSubset),
    MsrAs2(MsrSubset),
    MsrAs3(MsrSubset),
    NtuCrossSubject {
        train_subjects: Vec<u32>,
        test_subjects: Vec<u32>,
    },
    NtuCrossView {
        train_cameras: Vec<u32>,
        test_cameras: Vec<u32>,
    },
    Custom {
        train: Vec<String>,
        test: Vec<String>,
    },
}

/// Caveat attached to the built-in protocol templates.
pub const TEMPLATE_NOTE: &str = "commonly used split, \
not verified against the original dataset release";

const MSR_ODD_SUBJECTS: [u32; 5] = [1, 3, 5, 7, 9];
const MSR_EVEN_SUBJECTS: [u32; 5] = [2, 4, 6, 8, 10];
const NTU_TRAIN_SUBJECTS: [u32; 20] = [
    1, 2, 4, 5, 8, 9, 13, 14, 15, 16, 17, 18, 19, 25, 27, 28, 31, 34, 35, 38,
];

impl Protocol {
    fn msr(classes: &[u32]) -> MsrSubset {
        MsrSubset {
            classes: classes.to_vec(),
            train_subjects: MSR_ODD_SUBJECTS.to_vec(),
            test_subjects: MSR_EVEN_SUBJECTS.to_vec(),
        }
    }

    /// Action set 1 with the odd/even subject split.
    pub fn msr_as1() -> Self {
        Protocol::MsrAs1(Self::msr(&[2, 3, 5, 6, 10, 13, 18, 20]))
    }

    pub fn msr_as2() -> Self {
        Protocol::MsrAs2(Self::msr(&[1, 4, 7, 8, 9, 11, 12, 14]))
    }

    pub fn msr_as3() -> Self {
        Protocol::MsrAs3(Self::msr(&[6, 14, 15, 16, 17, 18, 19, 20]))
    }

    /// 20 training performers, the remaining 20 of 1..=40 for testing.
    pub fn ntu_cross_subject() -> Self {
        Protocol::NtuCrossSubject {
            train_subjects: NTU_TRAIN_SUBJECTS.to_vec(),
            test_subjects: (1..=40)
                .filter(|s| !NTU_TRAIN_SUBJECTS.contains(s))
                .collect(),
        }
    }

    /// Cameras 2 and 3 for training, camera 1 for testing.
    pub fn ntu_cross_view() -> Self {
        Protocol::NtuCrossView {
            train_cameras: vec![2, 3],
            test_cameras: vec![1],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Protocol::MsrAs1(_) => "msr_as1",
            Protocol::MsrAs2(_) => "msr_as2",
            Protocol::MsrAs3(_) => "msr_as3",
            Protocol::NtuCrossSubject { .. } => "ntu_cross_subject",
            Protocol::NtuCrossView { .. } => "ntu_cross_view",
            Protocol::Custom { .. } => "custom",
        }
    }

    /// Built-in template by protocol name.
    pub fn template(name: &str) -> Option<Self> {
        Some(match name {
            "msr_as1" => Self::msr_as1(),
            "msr_as2" => Self::msr_as2(),
            "msr_as3" => Self::msr_as3(),
            "ntu_cross_subject" => Self::ntu_cross_subject(),
            "ntu_cross_view" => Self::ntu_cross_view(),
            _ => return None,
        })
    }
}

/// A dataset's samples together with the protocol used to split them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    /// Short dataset name used in output file names.
    pub dataset: String,
    pub format: SourceFormat,
    #[serde(default)]
    pub msr_format: MsrFormatConfig,
    #[serde(default)]
    pub ntu_format: NtuFormatConfig,
    pub protocol: Protocol,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub entries: Vec<ManifestEntry>,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl DatasetManifest {
    pub fn new(dataset: impl Into<String>, format: SourceFormat, protocol: Protocol) -> Self {
        Self {
            dataset: dataset.into(),
            format,
            msr_format: MsrFormatConfig::default(),
            ntu_format: NtuFormatConfig::default(),
            protocol,
            notes: Vec::new(),
            entries: Vec::new(),
            base_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let m: Self = serde_json::from_str(text)
            .map_err(|e| PipelineError::Manifest(format!("invalid manifest json: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let mut m = Self::from_json(&text)
            .map_err(|e| PipelineError::Manifest(format!("{}: {e}", path.display())))?;
        m.base_dir = path.parent().map(Path::to_path_buf);
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn save(&self, path: &Path) -> Result<(), PipelineError> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| PipelineError::io(path, e))
    }

    /// Checks that sample ids are unique and non-empty.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if e.id.is_empty() {
                return Err(PipelineError::Manifest("entry with empty id".into()));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(PipelineError::Manifest(format!(
                    "duplicate sample id {:?}",
                    e.id
                )));
            }
        }
        Ok(())
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        match &self.base_dir {
            Some(base) if entry.path.is_relative() => base.join(&entry.path),
            _ => entry.path.clone(),
        }
    }

    pub fn entry(&self, id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

/// Lists dataset files in `dir` (non-recursive) whose names follow the
/// dataset naming convention, sorted by file name. Labels, subjects and
/// cameras come from the names.
pub fn scan_directory(
    dir: &Path,
    format: SourceFormat,
) -> Result<Vec<ManifestEntry>, PipelineError> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| PipelineError::io(dir, e))?
        .filter_map(Result::ok)
        .filter(|d| d.path().is_file())
        .map(|d| d.file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();

    let mut entries = Vec::new();
    for name in names {
        let stem = name.split('.').next().unwrap_or_default().to_string();
        let entry = match format {
            SourceFormat::Msr => MsrSampleName::parse(&name).map(|n| ManifestEntry {
                id: stem,
                path: dir.join(&name),
                label: n.action,
                subject_id: n.subject,
                camera_id: 0,
            }),
            SourceFormat::Ntu => NtuSampleName::parse(&name)
                .filter(|_| name.ends_with(".skeleton"))
                .map(|n| ManifestEntry {
                    id: stem,
                    path: dir.join(&name),
                    label: n.action,
                    subject_id: n.performer,
                    camera_id: n.camera,
                }),
        };
        entries.extend(entry);
    }
    Ok(entries)
}
