use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

use super::manifest::{DatasetManifest, ManifestEntry, Protocol};
use super::PipelineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?}, expected train or test")),
        }
    }
}

/// Train and test sample ids, each in manifest order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl SplitAssignment {
    pub fn split_of(&self, id: &str) -> Option<Split> {
        if self.train.iter().any(|t| t == id) {
            Some(Split::Train)
        } else if self.test.iter().any(|t| t == id) {
            Some(Split::Test)
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty() && self.test.is_empty()
    }
}

fn by_key(
    entries: &[ManifestEntry],
    key: impl Fn(&ManifestEntry) -> u32,
    what: &str,
    train: &[u32],
    test: &[u32],
) -> Result<SplitAssignment, PipelineError> {
    if let Some(v) = train.iter().find(|v| test.contains(v)) {
        return Err(PipelineError::Manifest(format!(
            "{what} {v} is listed for both train and test"
        )));
    }
    let mut out = SplitAssignment::default();
    for e in entries {
        let k = key(e);
        if train.contains(&k) {
            out.train.push(e.id.clone());
        } else if test.contains(&k) {
            out.test.push(e.id.clone());
        } else {
            return Err(PipelineError::Manifest(format!(
                "sample {:?} has {what} {k}, which is in neither the train nor the test list",
                e.id
            )));
        }
    }
    Ok(out)
}

/// Assigns every protocol-eligible sample to train or test.
///
/// MSR action sets first drop samples whose label is outside the set's
/// classes, then split by subject. NTU protocols split by performer or by
/// camera. Custom manifests echo their explicit lists after checking them.
pub fn split_dataset(manifest: &DatasetManifest) -> Result<SplitAssignment, PipelineError> {
    manifest.validate()?;
    match &manifest.protocol {
        Protocol::MsrAs1(s) | Protocol::MsrAs2(s) | Protocol::MsrAs3(s) => {
            let eligible: Vec<ManifestEntry> = manifest
                .entries
                .iter()
                .filter(|e| s.classes.contains(&e.label))
                .cloned()
                .collect();
            by_key(
                &eligible,
                |e| e.subject_id,
                "subject",
                &s.train_subjects,
                &s.test_subjects,
            )
        }
        Protocol::NtuCrossSubject {
            train_subjects,
            test_subjects,
        } => by_key(
            &manifest.entries,
            |e| e.subject_id,
            "subject",
            train_subjects,
            test_subjects,
        ),
        Protocol::NtuCrossView {
            train_cameras,
            test_cameras,
        } => by_key(
            &manifest.entries,
            |e| e.camera_id,
            "camera",
            train_cameras,
            test_cameras,
        ),
        Protocol::Custom { train, test } => {
            let known: HashSet<&str> = manifest.entries.iter().map(|e| e.id.as_str()).collect();
            let mut seen = HashSet::new();
            for id in train.iter().chain(test) {
                if !known.contains(id.as_str()) {
                    return Err(PipelineError::Manifest(format!(
                        "split lists unknown sample {id:?}"
                    )));
                }
                if !seen.insert(id.as_str()) {
                    return Err(PipelineError::Manifest(format!(
                        "sample {id:?} listed more than once"
                    )));
                }
            }
            Ok(SplitAssignment {
                train: train.clone(),
                test: test.clone(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::SourceFormat;

    fn entry(id: &str, label: u32, subject: u32, camera: u32) -> ManifestEntry {
        ManifestEntry {
            id: id.into(),
            path: format!("{id}.txt").into(),
            label,
            subject_id: subject,
            camera_id: camera,
        }
    }

    #[test]
    fn cross_view_puts_camera_one_in_test() {
        let mut m = DatasetManifest::new("ntu", SourceFormat::Ntu, Protocol::ntu_cross_view());
        m.entries = (0..9)
            .map(|i| entry(&format!("s{i}"), 1, 1, i % 3 + 1))
            .collect();
        let split = split_dataset(&m).unwrap();
        assert_eq!(split.test, vec!["s0", "s3", "s6"]);
        assert_eq!(split.train.len(), 6);
        for id in &split.test {
            assert_eq!(m.entry(id).unwrap().camera_id, 1);
        }
    }

    #[test]
    fn custom_lists_echo() {
        let mut m = DatasetManifest::new(
            "x",
            SourceFormat::Msr,
            Protocol::Custom {
                train: vec!["b".into(), "a".into()],
                test: vec!["c".into()],
            },
        );
        m.entries = vec![
            entry("a", 1, 1, 0),
            entry("b", 1, 2, 0),
            entry("c", 2, 3, 0),
        ];
        let split = split_dataset(&m).unwrap();
        assert_eq!(split.train, vec!["b", "a"]);
        assert_eq!(split.test, vec!["c"]);

        m.protocol = Protocol::Custom {
            train: vec!["a".into()],
            test: vec!["a".into()],
        };
        assert!(split_dataset(&m).is_err());
        m.protocol = Protocol::Custom {
            train: vec!["zzz".into()],
            test: vec![],
        };
        assert!(split_dataset(&m).is_err());
    }

    #[test]
    fn msr_subset_filters_classes() {
        let mut m = DatasetManifest::new("msr", SourceFormat::Msr, Protocol::msr_as1());
        m.entries = vec![
            entry("a02_s01_e01", 2, 1, 0),
            entry("a02_s02_e01", 2, 2, 0),
            entry("a01_s01_e01", 1, 1, 0),
        ];
        let split = split_dataset(&m).unwrap();
        assert_eq!(split.train, vec!["a02_s01_e01"]);
        assert_eq!(split.test, vec!["a02_s02_e01"]);
        assert_eq!(split.split_of("a01_s01_e01"), None);
    }

    #[test]
    fn unknown_subject_is_a_manifest_error() {
        let mut m = DatasetManifest::new("ntu", SourceFormat::Ntu, Protocol::ntu_cross_subject());
        m.entries = vec![entry("x", 1, 41, 1)];
        assert!(matches!(split_dataset(&m), Err(PipelineError::Manifest(_))));
    }
}
