//! Plain inference: one record in, one probability trajectory out.

use mlqoc_autodiff::Tape;
use ndarray::Array2;

use crate::error::ModelError;
use crate::graph::{onehot_preps, pixel_input, TapeModel};
use crate::params::{ModelParams, N_AXES};

/// Predicted Pauli-probability trajectory, one row per time point
/// including `t = 0`.
#[derive(Debug, Clone)]
pub struct Prediction {
    probs: Array2<f64>,
}

impl Prediction {
    /// Number of time points (pixel count + 1).
    pub fn n_times(&self) -> usize {
        self.probs.nrows()
    }

    /// All probability rows, `(n_times, 3)` with columns (X, Y, Z).
    pub fn probs(&self) -> &Array2<f64> {
        &self.probs
    }

    /// Probability triple at time index `t`.
    pub fn probs_at(&self, t: usize) -> [f64; 3] {
        [self.probs[(t, 0)], self.probs[(t, 1)], self.probs[(t, 2)]]
    }

    /// Bloch vector `v = 1 − 2Π` at time index `t`.
    pub fn bloch_at(&self, t: usize) -> [f64; 3] {
        let p = self.probs_at(t);
        [1.0 - 2.0 * p[0], 1.0 - 2.0 * p[1], 1.0 - 2.0 * p[2]]
    }

    /// Probability triple at the last time point.
    pub fn final_probs(&self) -> [f64; 3] {
        self.probs_at(self.n_times() - 1)
    }
}

/// Runs the model over one pulse: decode the encoded preparation for the
/// `t = 0` row, then one LSTM step plus decode per pixel. Deterministic.
///
/// The quadrature arrays are raw pixel amplitudes in MHz; scaling to model
/// units happens internally.
pub fn predict(
    params: &ModelParams,
    prep: u8,
    s_i: &[f64],
    s_q: &[f64],
) -> Result<Prediction, ModelError> {
    if s_i.is_empty() {
        return Err(ModelError::EmptyPulse);
    }
    if s_i.len() != s_q.len() {
        return Err(ModelError::ChannelMismatch {
            i_len: s_i.len(),
            q_len: s_q.len(),
        });
    }

    let tape = Tape::new();
    let model = TapeModel::load(&tape, params, false)?;
    let onehot = onehot_preps(&tape, &[prep])?;
    let (mut h, mut c) = model.encode(onehot)?;

    let mut probs = Array2::<f64>::zeros((s_i.len() + 1, N_AXES));
    let write_row = |probs: &mut Array2<f64>, row: usize, p: &ndarray::ArrayD<f64>| {
        for axis in 0..N_AXES {
            probs[(row, axis)] = p[[0, axis]];
        }
    };
    write_row(&mut probs, 0, &model.decode(h)?.value());

    for (t, (&si, &sq)) in s_i.iter().zip(s_q).enumerate() {
        let x = pixel_input(&tape, &[(si, sq)])?;
        let (h2, c2) = model.lstm_step(x, h, c)?;
        h = h2;
        c = c2;
        write_row(&mut probs, t + 1, &model.decode(h)?.value());
    }
    Ok(Prediction { probs })
}
