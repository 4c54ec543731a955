//! Binary model record plus a JSON sidecar describing how it was trained.
//!
//! Layout, little-endian throughout:
//!
//! | field        | type            |
//! |--------------|-----------------|
//! | magic        | `b"SPMFLIN\0"`  |
//! | version      | u32             |
//! | class count  | u32             |
//! | input dim    | u64             |
//! | seed         | u64             |
//! | class ids    | u32 x C         |
//! | weights      | f64 x C*D       |
//! | biases       | f64 x C         |

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use super::model::LinearModel;
use super::{BaselineError, TrainConfig};

const MAGIC: &[u8; 8] = b"SPMFLIN\0";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub format_version: u32,
    pub class_ids: Vec<u32>,
    pub input_dim: usize,
    pub seed: u64,
    pub parameter_count: usize,
    pub train_config: TrainConfig,
    pub loss_history: Vec<f64>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn encode_checkpoint(model: &LinearModel) -> Result<Vec<u8>, BaselineError> {
    model.check()?;
    let c = u32::try_from(model.class_count())
        .map_err(|_| BaselineError::Checkpoint("too many classes".into()))?;
    let mut out = Vec::with_capacity(32 + 8 * (model.weights.len() + model.biases.len()));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&c.to_le_bytes());
    out.extend_from_slice(&(model.input_dim as u64).to_le_bytes());
    out.extend_from_slice(&model.seed.to_le_bytes());
    for id in &model.class_ids {
        out.extend_from_slice(&id.to_le_bytes());
    }
    for v in model.weights.iter().chain(&model.biases) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N], BaselineError> {
        let end = self
            .pos
            .checked_add(N)
            .filter(|e| *e <= self.bytes.len())
            .ok_or_else(|| {
                BaselineError::Checkpoint(format!("truncated record at byte {}", self.pos))
            })?;
        let out = self.bytes[self.pos..end].try_into().expect("slice length");
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, BaselineError> {
        self.take().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, BaselineError> {
        self.take().map(u64::from_le_bytes)
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, BaselineError> {
        let need = n.saturating_mul(8);
        if self.bytes.len() - self.pos < need {
            return Err(BaselineError::Checkpoint(format!(
                "record too short for {n} parameters"
            )));
        }
        (0..n)
            .map(|_| self.take().map(f64::from_le_bytes))
            .collect()
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<LinearModel, BaselineError> {
    let mut r = Reader { bytes, pos: 0 };
    if &r.take::<8>()? != MAGIC {
        return Err(BaselineError::Checkpoint("not a model checkpoint".into()));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(BaselineError::Checkpoint(format!(
            "unsupported checkpoint version {version}"
        )));
    }
    let c = r.u32()? as usize;
    let d = usize::try_from(r.u64()?)
        .map_err(|_| BaselineError::Checkpoint("input dimension too large".into()))?;
    let seed = r.u64()?;
    if bytes.len() / 4 < c {
        return Err(BaselineError::Checkpoint(
            "record too short for class ids".into(),
        ));
    }
    let class_ids = (0..c).map(|_| r.u32()).collect::<Result<Vec<_>, _>>()?;
    let n_weights = c
        .checked_mul(d)
        .ok_or_else(|| BaselineError::Checkpoint("parameter count overflows".into()))?;
    let weights = r.f64s(n_weights)?;
    let biases = r.f64s(c)?;
    if r.pos != bytes.len() {
        return Err(BaselineError::Checkpoint(format!(
            "{} trailing bytes",
            bytes.len() - r.pos
        )));
    }
    let model = LinearModel {
        class_ids,
        input_dim: d,
        weights,
        biases,
        seed,
    };
    model
        .check()
        .map_err(|e| BaselineError::Checkpoint(e.to_string()))?;
    Ok(model)
}

/// Writes the model to `path` and its metadata to the `.json` sidecar.
pub fn save_checkpoint(
    path: &Path,
    model: &LinearModel,
    cfg: &TrainConfig,
    loss_history: &[f64],
) -> Result<(), BaselineError> {
    let bytes = encode_checkpoint(model)?;
    std::fs::write(path, bytes).map_err(|e| BaselineError::io(path, e))?;
    let meta = CheckpointMeta {
        format_version: CHECKPOINT_VERSION,
        class_ids: model.class_ids.clone(),
        input_dim: model.input_dim,
        seed: model.seed,
        parameter_count: model.weights.len() + model.biases.len(),
        train_config: cfg.clone(),
        loss_history: loss_history.to_vec(),
    };
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(&side, json + "\n").map_err(|e| BaselineError::io(&side, e))
}

pub fn load_checkpoint(path: &Path) -> Result<LinearModel, BaselineError> {
    let bytes = std::fs::read(path).map_err(|e| BaselineError::io(path, e))?;
    decode_checkpoint(&bytes)
        .map_err(|e| BaselineError::Checkpoint(format!("{}: {e}", path.display())))
}

impl CheckpointMeta {
    pub fn load(path: &Path) -> Result<Self, BaselineError> {
        let text = std::fs::read_to_string(path).map_err(|e| BaselineError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| BaselineError::Checkpoint(format!("{}: {e}", path.display())))
    }
}
