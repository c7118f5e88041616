//! Supervised training of the pulse-characterization model on simulated
//! measurement records.
//!
//! The pieces: a deterministic train/validation/test [`split_dataset`], the
//! published Adam recipe with its batch-doubling schedule ([`TrainConfig`],
//! [`train`]), validation-based model selection with early stopping, the
//! shot-[`noise_floor`] that lower-bounds achievable prediction loss, and the
//! duration-resolved accuracy table [`mse_vs_duration`] for evaluating a
//! trained model against exact simulated probabilities.
//!
//! Everything is seed-deterministic: a rerun with the same records, seed, and
//! configuration reproduces the loss history bitwise (the whole loop is
//! single-threaded; record batches are vectorized, not thread-parallel).

mod config;
mod error;
mod metrics;
mod run;
mod split;

pub use config::TrainConfig;
pub use error::TrainError;
pub use metrics::{mse_table, mse_vs_duration, noise_floor, MseCell, MseTable};
pub use run::{
    dataset_loss, history_csv, record_view, train, train_with_progress, EpochStats, TrainOutcome,
};
pub use split::split_dataset;
