//! Recurrent estimator of qubit measurement statistics driven by control
//! pulses.
//!
//! The model maps a preparation class and a two-quadrature pixel sequence to
//! per-axis excited-state probabilities after every pixel:
//!
//! * a two-layer sigmoid encoder turns the one-hot preparation into the
//!   initial LSTM hidden and cell states;
//! * one LSTM step per pulse pixel consumes the `(S_I, S_Q)` pair, scaled by
//!   100 MHz;
//! * a sigmoid readout decodes each hidden state into the three
//!   probabilities `Π = (1 − v)/2` for the Bloch vector `v`.
//!
//! [`predict`] gives forward-only inference; [`batch_loss_and_grads`] builds
//! the training objective — prediction error plus Bloch-ball and
//! preparation-consistency penalties — and differentiates it with
//! [`mlqoc_autodiff`]. The crate knows nothing about how pulses are
//! generated or simulated; it consumes plain pixel slices.

mod error;
mod graph;
mod loss;
mod params;
mod predict;

pub use error::ModelError;
pub use graph::{onehot_preps, pixel_input, TapeModel};
pub use loss::{
    batch_loss, batch_loss_and_grads, batch_loss_graph, LossBreakdown, LossVars, LossWeights,
    RecordView,
};
pub use params::{
    tensor_shapes, ModelParams, ENCODER_HIDDEN, GATE_ROWS, HIDDEN_SIZE, INPUT_DIM, N_AXES,
    N_PREPS, PIXEL_SCALE_MHZ, PREP_BLOCH, TENSOR_NAMES,
};
pub use predict::{predict, Prediction};
