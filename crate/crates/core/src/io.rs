//! Tensor JSON format.
//!
//! ```json
//! {"order": 3, "dim": 2, "entries": {"dense": [..8 values, row-major..]}}
//! {"order": 3, "dim": 2, "entries": {"orbits": [{"index": [1, 1, 2], "value": 0.5}]}}
//! ```
//!
//! Orbit indices are one-based; unlisted orbits are zero. Dense input must be
//! symmetric within a relative tolerance and is symmetrized on load.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::builtin;
use crate::tensor::{SymTensor, INGEST_SYMMETRY_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorFile {
    pub order: usize,
    pub dim: usize,
    pub entries: Entries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entries {
    Dense(Vec<f64>),
    Orbits(Vec<OrbitEntry>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub index: Vec<usize>,
    pub value: f64,
}

impl TensorFile {
    pub fn into_tensor(self) -> Result<SymTensor> {
        if self.order == 0 || self.dim == 0 {
            return Err(Error::Shape("order and dim must be positive".into()));
        }
        match self.entries {
            Entries::Dense(raw) => {
                SymTensor::from_dense_checked(&raw, self.order, self.dim, INGEST_SYMMETRY_TOL).map_err(one_based_orbit)
            }
            Entries::Orbits(list) => {
                let mut seen: HashMap<Vec<usize>, f64> = HashMap::new();
                let mut t = SymTensor::zeros(self.order, self.dim);
                for entry in list {
                    if entry.index.iter().any(|&i| i == 0 || i > self.dim) {
                        return Err(Error::Parse(format!(
                            "orbit index {:?} outside 1..={}",
                            entry.index, self.dim
                        )));
                    }
                    let zero: Vec<usize> = entry.index.iter().map(|i| i - 1).collect();
                    let mut key = entry.index.clone();
                    key.sort_unstable();
                    if let Some(&prev) = seen.get(&key) {
                        let scale = prev.abs().max(entry.value.abs()).max(f64::MIN_POSITIVE);
                        let deviation = (prev - entry.value).abs();
                        if deviation > INGEST_SYMMETRY_TOL * scale {
                            return Err(Error::NotSymmetric {
                                orbit: key,
                                deviation,
                                tolerance: INGEST_SYMMETRY_TOL * scale,
                            });
                        }
                    }
                    t.set_orbit(&zero, entry.value)?;
                    seen.insert(key, entry.value);
                }
                Ok(t)
            }
        }
    }

    pub fn dense(t: &SymTensor) -> Self {
        Self {
            order: t.order(),
            dim: t.dim(),
            entries: Entries::Dense(t.data().to_vec()),
        }
    }
}

fn one_based_orbit(e: Error) -> Error {
    match e {
        Error::NotSymmetric {
            orbit,
            deviation,
            tolerance,
        } => Error::NotSymmetric {
            orbit: orbit.into_iter().map(|i| i + 1).collect(),
            deviation,
            tolerance,
        },
        other => other,
    }
}

pub fn tensor_from_json(text: &str) -> Result<SymTensor> {
    let file: TensorFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_tensor()
}

pub fn tensor_to_json(t: &SymTensor) -> Result<String> {
    Ok(serde_json::to_string(&TensorFile::dense(t))?)
}

/// Loads a tensor from a path, or a built-in fixture when `source` is `@name`.
pub fn load_tensor(source: &str) -> Result<SymTensor> {
    if let Some(name) = source.strip_prefix('@') {
        return builtin(name).ok_or_else(|| Error::Parse(format!("unknown built-in tensor {name:?}")));
    }
    let text = std::fs::read_to_string(Path::new(source))
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{source}: {e}"))))?;
    tensor_from_json(&text)
}
