use mlqoc_model::ModelError;
use thiserror::Error;

/// Failure modes of dataset splitting, metric evaluation, and training.
#[derive(Debug, Error)]
pub enum TrainError {
    /// A configuration field is out of range.
    #[error("bad training configuration: {0}")]
    BadConfig(&'static str),

    /// The requested split leaves some partition empty.
    #[error("degenerate split of {n} records: train {train}, val {val}, test {test} (all must be non-empty)")]
    DegenerateSplit {
        n: usize,
        train: usize,
        val: usize,
        test: usize,
    },

    /// An operation got an empty record set.
    #[error("empty record set for {0}")]
    EmptyRecords(&'static str),

    /// A truth-dependent metric found a record without a usable truth value.
    #[error("record {index} has no finite ground truth")]
    MissingTruth { index: usize },

    /// The loss or a gradient became non-finite; training cannot continue.
    #[error("training diverged at epoch {epoch}, batch {batch}: {detail}")]
    Diverged {
        epoch: usize,
        batch: usize,
        detail: String,
    },

    /// Forward/backward evaluation failed.
    #[error(transparent)]
    Model(#[from] ModelError),
}
