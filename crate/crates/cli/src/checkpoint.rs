//! The MLQC model-checkpoint file format.
//!
//! Layout (little-endian):
//!
//! ```text
//! magic "MLQC" | version u32 | manifest_len u64 | manifest (TOML, UTF-8)
//! | payload: f64 × total weight count, tensors in manifest order,
//!   each in row-major order
//! ```
//!
//! The manifest records the tensor names and shapes actually serialized, so a
//! reader can verify them against the architecture it was compiled with, plus
//! enough training metadata to trace where the weights came from.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use mlqoc_model::{tensor_shapes, ModelParams, TENSOR_NAMES};
use ndarray::ArrayD;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

const MAGIC: &[u8; 4] = b"MLQC";
const VERSION: u32 = 1;

/// Training provenance stored alongside the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    /// Hash of the effective run configuration.
    pub config_hash: String,
    /// Seed the trainer ran with.
    pub seed: u64,
    /// Epoch whose weights these are.
    pub best_epoch: usize,
    /// Validation loss at that epoch.
    pub best_val_loss: f64,
    /// Validation loss over the full validation split.
    pub full_val_loss: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    tensor_names: Vec<String>,
    tensor_shapes: Vec<Vec<usize>>,
    meta: CheckpointMeta,
}

/// Writes `params` and `meta` to `path`.
pub fn write_checkpoint(
    path: &Path,
    params: &ModelParams,
    meta: &CheckpointMeta,
) -> Result<(), CliError> {
    let manifest = Manifest {
        tensor_names: TENSOR_NAMES.iter().map(|s| s.to_string()).collect(),
        tensor_shapes: tensor_shapes().iter().map(|s| s.to_vec()).collect(),
        meta: meta.clone(),
    };
    let manifest_toml = toml::to_string(&manifest)
        .map_err(|e| CliError::Data(format!("checkpoint manifest: {e}")))?;

    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e: std::io::Error| CliError::io(path, e);

    w.write_all(MAGIC).map_err(io)?;
    w.write_u32::<LittleEndian>(VERSION).map_err(io)?;
    w.write_u64::<LittleEndian>(manifest_toml.len() as u64).map_err(io)?;
    w.write_all(manifest_toml.as_bytes()).map_err(io)?;
    for t in params.tensors() {
        for &x in t.iter() {
            w.write_f64::<LittleEndian>(x).map_err(io)?;
        }
    }
    w.flush().map_err(io)
}

/// Reads the checkpoint at `path`, verifying it matches this build's
/// architecture.
pub fn read_checkpoint(path: &Path) -> Result<(ModelParams, CheckpointMeta), CliError> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut r = BufReader::new(file);
    let corrupt = |msg: &str| CliError::Data(format!("{}: {msg}", path.display()));
    let io = |e: std::io::Error| {
        CliError::Data(format!("{}: truncated or unreadable ({e})", path.display()))
    };

    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(corrupt("not a checkpoint file (bad magic)"));
    }
    let version = r.read_u32::<LittleEndian>().map_err(io)?;
    if version != VERSION {
        return Err(corrupt(&format!("unsupported version {version} (expected {VERSION})")));
    }
    let manifest_len = r.read_u64::<LittleEndian>().map_err(io)?;
    if manifest_len > 1_000_000 {
        return Err(corrupt("implausible manifest length"));
    }
    let mut manifest_bytes = vec![0u8; manifest_len as usize];
    r.read_exact(&mut manifest_bytes).map_err(io)?;
    let manifest_toml = String::from_utf8(manifest_bytes)
        .map_err(|_| corrupt("manifest is not valid UTF-8"))?;
    let manifest: Manifest = toml::from_str(&manifest_toml)
        .map_err(|e| corrupt(&format!("bad manifest: {e}")))?;

    let expected_names: Vec<String> = TENSOR_NAMES.iter().map(|s| s.to_string()).collect();
    let expected_shapes: Vec<Vec<usize>> =
        tensor_shapes().iter().map(|s| s.to_vec()).collect();
    if manifest.tensor_names != expected_names || manifest.tensor_shapes != expected_shapes {
        return Err(corrupt("tensor layout does not match this build's architecture"));
    }

    let mut tensors = Vec::with_capacity(expected_shapes.len());
    for shape in &expected_shapes {
        let len: usize = shape.iter().product();
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(r.read_f64::<LittleEndian>().map_err(io)?);
        }
        let arr = ArrayD::from_shape_vec(shape.clone(), data)
            .map_err(|e| corrupt(&format!("bad tensor shape: {e}")))?;
        tensors.push(arr);
    }
    let mut trailing = [0u8; 1];
    match r.read(&mut trailing) {
        Ok(0) => {}
        Ok(_) => return Err(corrupt("trailing bytes after the weight payload")),
        Err(e) => return Err(io(e)),
    }
    let params = ModelParams::from_tensors(tensors)
        .map_err(|e| corrupt(&format!("invalid weights: {e}")))?;
    Ok((params, manifest.meta))
}
