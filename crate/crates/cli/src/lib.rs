//! Library behind the `mlqoc` binary: run configuration, the dataset and
//! checkpoint file formats, CSV reports, and the command implementations.
//!
//! Everything lives here rather than in `main.rs` so integration tests can
//! exercise file formats and commands directly.

pub mod checkpoint;
pub mod config;
pub mod dataset;
pub mod error;
pub mod report;
pub mod run;

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointMeta};
pub use config::{load_config, sha256_hex, LoadedConfig, StudyConfig};
pub use dataset::{merge_shards, read_dataset, write_dataset, Dataset};
pub use error::CliError;
