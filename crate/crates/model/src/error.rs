//! Error type for model construction, inference, and loss evaluation.

use thiserror::Error;

/// Everything that can go wrong in the model layer.
#[derive(Debug, Error)]
pub enum ModelError {
    /// Preparation index outside `0..6`.
    #[error("preparation index {0} is out of range (expected 0..6)")]
    BadPrep(u8),

    /// Measurement-axis index outside `0..3`.
    #[error("axis index {0} is out of range (expected 0..3)")]
    BadAxis(u8),

    /// A record's label must be a probability.
    #[error("label {0} is not a probability in [0, 1]")]
    BadLabel(f64),

    /// Quadrature arrays must be non-empty and equally long.
    #[error("pixel channels disagree: {i_len} in-phase vs {q_len} quadrature samples")]
    ChannelMismatch { i_len: usize, q_len: usize },

    /// A pulse must contain at least one pixel.
    #[error("pulse has no pixels")]
    EmptyPulse,

    /// Loss of an empty batch is undefined.
    #[error("cannot evaluate the loss of an empty batch")]
    EmptyBatch,

    /// A parameter tensor has the wrong shape.
    #[error("parameter `{name}` has shape {got:?}, expected {want:?}")]
    BadParamShape {
        name: &'static str,
        got: Vec<usize>,
        want: Vec<usize>,
    },

    /// Wrong number of parameter tensors supplied to a graph builder.
    #[error("expected {want} parameter tensors, got {got}")]
    BadParamCount { want: usize, got: usize },

    /// Bubbled up from the differentiation layer.
    #[error(transparent)]
    Autodiff(#[from] mlqoc_autodiff::AutodiffError),
}
