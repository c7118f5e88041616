//! Model parameters: shapes, initialization, and the canonical tensor order
//! used by optimizers and checkpoints.

use ndarray::{ArrayD, IxDyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::ModelError;

/// LSTM hidden width.
pub const HIDDEN_SIZE: usize = 48;
/// Hidden width of the two-layer preparation encoder.
pub const ENCODER_HIDDEN: usize = 96;
/// Number of preparation states (±Z, ±X, ±Y as one-hot classes).
pub const N_PREPS: usize = 6;
/// Number of measurement axes (X, Y, Z).
pub const N_AXES: usize = 3;
/// Per-pixel input dimension: the two quadrature amplitudes.
pub const INPUT_DIM: usize = 2;
/// Rows of the gate-stacked LSTM weights: `[i, f, g, o] × HIDDEN_SIZE`.
pub const GATE_ROWS: usize = 4 * HIDDEN_SIZE;
/// Pixel amplitudes are divided by this (in MHz) before entering the LSTM,
/// keeping inputs O(1) for the saturating activations.
pub const PIXEL_SCALE_MHZ: f64 = 100.0;

/// Bloch vectors of the six preparation states, indexed by prep class:
/// +Z, −Z, +X, −X, +Y, −Y.
pub const PREP_BLOCH: [[f64; 3]; 6] = [
    [0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0],
    [1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, -1.0, 0.0],
];

/// Canonical tensor order for optimizers, checkpoints, and graph builders.
pub const TENSOR_NAMES: [&str; 9] = [
    "enc_w1", "enc_b1", "enc_w2", "enc_b2", "lstm_w_ih", "lstm_w_hh", "lstm_b", "dec_w", "dec_b",
];

/// Expected shape of each tensor, in [`TENSOR_NAMES`] order. Biases are
/// stored as explicit row vectors so they can be broadcast-added directly.
pub fn tensor_shapes() -> [Vec<usize>; 9] {
    [
        vec![ENCODER_HIDDEN, N_PREPS],
        vec![1, ENCODER_HIDDEN],
        vec![ENCODER_HIDDEN, ENCODER_HIDDEN],
        vec![1, ENCODER_HIDDEN],
        vec![GATE_ROWS, INPUT_DIM],
        vec![GATE_ROWS, HIDDEN_SIZE],
        vec![1, GATE_ROWS],
        vec![N_AXES, HIDDEN_SIZE],
        vec![1, N_AXES],
    ]
}

/// All weights of the characterization model.
///
/// The encoder maps a one-hot preparation to the initial recurrent state
/// pair, the LSTM consumes one scaled pixel (two quadratures) per step, and
/// the decoder emits three Pauli probabilities per time point.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// First encoder layer, `(96, 6)`.
    pub enc_w1: ArrayD<f64>,
    /// First encoder bias, `(1, 96)`.
    pub enc_b1: ArrayD<f64>,
    /// Second encoder layer, `(96, 96)`; its 96 sigmoid outputs split into
    /// the initial hidden and cell states.
    pub enc_w2: ArrayD<f64>,
    /// Second encoder bias, `(1, 96)`.
    pub enc_b2: ArrayD<f64>,
    /// Input-to-gates LSTM weights, `(192, 2)`, gate-stacked `[i, f, g, o]`.
    pub lstm_w_ih: ArrayD<f64>,
    /// Hidden-to-gates LSTM weights, `(192, 48)`.
    pub lstm_w_hh: ArrayD<f64>,
    /// Gate bias, `(1, 192)`.
    pub lstm_b: ArrayD<f64>,
    /// Decoder weights, `(3, 48)`.
    pub dec_w: ArrayD<f64>,
    /// Decoder bias, `(1, 3)`.
    pub dec_b: ArrayD<f64>,
}

impl ModelParams {
    /// All-zero parameters (useful as a deterministic fixture; every
    /// prediction is exactly (0.5, 0.5, 0.5)).
    pub fn zeros() -> Self {
        let shapes = tensor_shapes();
        let mut it = shapes.iter().map(|s| ArrayD::zeros(IxDyn(s)));
        Self {
            enc_w1: it.next().expect("nine shapes"),
            enc_b1: it.next().expect("nine shapes"),
            enc_w2: it.next().expect("nine shapes"),
            enc_b2: it.next().expect("nine shapes"),
            lstm_w_ih: it.next().expect("nine shapes"),
            lstm_w_hh: it.next().expect("nine shapes"),
            lstm_b: it.next().expect("nine shapes"),
            dec_w: it.next().expect("nine shapes"),
            dec_b: it.next().expect("nine shapes"),
        }
    }

    /// Random initialization: every layer uniform in ±1/√fan_in (the LSTM
    /// uses the hidden size as fan-in for all of its tensors, as is
    /// conventional), then the forget-gate bias block is set to +1 so early
    /// training does not erase the cell state.
    pub fn init(seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut params = Self::zeros();
        let fan_in = [
            N_PREPS,        // enc_w1
            N_PREPS,        // enc_b1
            ENCODER_HIDDEN, // enc_w2
            ENCODER_HIDDEN, // enc_b2
            HIDDEN_SIZE,    // lstm_w_ih
            HIDDEN_SIZE,    // lstm_w_hh
            HIDDEN_SIZE,    // lstm_b
            HIDDEN_SIZE,    // dec_w
            HIDDEN_SIZE,    // dec_b
        ];
        for (tensor, fan) in params.tensors_mut().into_iter().zip(fan_in) {
            let bound = 1.0 / (fan as f64).sqrt();
            for w in tensor.iter_mut() {
                *w = rng.random_range(-bound..bound);
            }
        }
        for b in params
            .lstm_b
            .iter_mut()
            .skip(HIDDEN_SIZE)
            .take(HIDDEN_SIZE)
        {
            *b = 1.0;
        }
        params
    }

    /// Tensors in canonical order.
    pub fn tensors(&self) -> [&ArrayD<f64>; 9] {
        [
            &self.enc_w1,
            &self.enc_b1,
            &self.enc_w2,
            &self.enc_b2,
            &self.lstm_w_ih,
            &self.lstm_w_hh,
            &self.lstm_b,
            &self.dec_w,
            &self.dec_b,
        ]
    }

    /// Mutable tensors in canonical order.
    pub fn tensors_mut(&mut self) -> [&mut ArrayD<f64>; 9] {
        [
            &mut self.enc_w1,
            &mut self.enc_b1,
            &mut self.enc_w2,
            &mut self.enc_b2,
            &mut self.lstm_w_ih,
            &mut self.lstm_w_hh,
            &mut self.lstm_b,
            &mut self.dec_w,
            &mut self.dec_b,
        ]
    }

    /// Rebuilds parameters from tensors in canonical order, validating
    /// shapes.
    pub fn from_tensors(tensors: Vec<ArrayD<f64>>) -> Result<Self, ModelError> {
        if tensors.len() != TENSOR_NAMES.len() {
            return Err(ModelError::BadParamCount {
                want: TENSOR_NAMES.len(),
                got: tensors.len(),
            });
        }
        let mut it = tensors.into_iter();
        let params = Self {
            enc_w1: it.next().expect("count checked"),
            enc_b1: it.next().expect("count checked"),
            enc_w2: it.next().expect("count checked"),
            enc_b2: it.next().expect("count checked"),
            lstm_w_ih: it.next().expect("count checked"),
            lstm_w_hh: it.next().expect("count checked"),
            lstm_b: it.next().expect("count checked"),
            dec_w: it.next().expect("count checked"),
            dec_b: it.next().expect("count checked"),
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks every tensor against its expected shape and for finiteness.
    pub fn validate(&self) -> Result<(), ModelError> {
        let shapes = tensor_shapes();
        for ((tensor, name), want) in self.tensors().iter().zip(TENSOR_NAMES).zip(&shapes) {
            if tensor.shape() != want.as_slice() {
                return Err(ModelError::BadParamShape {
                    name,
                    got: tensor.shape().to_vec(),
                    want: want.clone(),
                });
            }
            if tensor.iter().any(|w| !w.is_finite()) {
                return Err(ModelError::BadParamShape {
                    name,
                    got: tensor.shape().to_vec(),
                    want: want.clone(),
                });
            }
        }
        Ok(())
    }

    /// Total number of scalar weights.
    pub fn n_weights(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }
}
