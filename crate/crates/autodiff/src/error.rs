//! Error type for tape construction and backward passes.

use thiserror::Error;

/// Everything that can go wrong while building a graph or differentiating it.
#[derive(Debug, Error)]
pub enum AutodiffError {
    /// Operand shapes are incompatible for the requested operation.
    #[error("shape mismatch in `{op}`: lhs {lhs:?} vs rhs {rhs:?}")]
    ShapeMismatch {
        op: &'static str,
        lhs: Vec<usize>,
        rhs: Vec<usize>,
    },

    /// An operation expected a matrix (2-D tensor) but got something else.
    #[error("`{op}` expects a 2-D operand, got shape {shape:?}")]
    NotAMatrix { op: &'static str, shape: Vec<usize> },

    /// A column range was empty or ran past the end of the operand.
    #[error("column range {start}..{end} is invalid for {cols} columns")]
    BadColumnRange {
        start: usize,
        end: usize,
        cols: usize,
    },

    /// Two operands were recorded on different tapes.
    #[error("operands were recorded on different tapes")]
    MixedTapes,

    /// `backward` was called on a tensor with more than one element.
    #[error("backward requires a scalar root, got {len} elements")]
    NonScalarRoot { len: usize },

    /// `backward` was already called on this tape.
    #[error("backward was already called on this tape")]
    BackwardTwice,

    /// The backward root does not depend on any gradient-requiring leaf.
    #[error("backward root is detached from every gradient-requiring leaf")]
    DetachedGraph,

    /// Tensors must contain at least one element.
    #[error("empty tensors are not supported")]
    EmptyTensor,
}
