//! Differentiable building blocks of the model on an autodiff tape.
//!
//! [`TapeModel`] holds the nine parameter tensors as tape variables and
//! exposes the three stages — preparation encoder, per-pixel LSTM step,
//! probability decoder — over row-major batches. Training loads the
//! parameters as differentiable inputs; inference and pulse optimization
//! load them as constants and differentiate other things through the same
//! graph code.

use mlqoc_autodiff::{Tape, Var};
use ndarray::{Array2, ArrayD};

use crate::error::ModelError;
use crate::params::{
    ModelParams, ENCODER_HIDDEN, GATE_ROWS, HIDDEN_SIZE, INPUT_DIM, N_PREPS, TENSOR_NAMES,
};

/// The model's parameters as variables on one tape.
#[derive(Debug, Clone, Copy)]
pub struct TapeModel<'t> {
    enc_w1: Var<'t>,
    enc_b1: Var<'t>,
    enc_w2: Var<'t>,
    enc_b2: Var<'t>,
    lstm_w_ih: Var<'t>,
    lstm_w_hh: Var<'t>,
    lstm_b: Var<'t>,
    dec_w: Var<'t>,
    dec_b: Var<'t>,
}

impl<'t> TapeModel<'t> {
    /// Records the parameters on `tape`; `trainable` decides whether the
    /// backward pass accumulates gradients for them.
    pub fn load(
        tape: &'t Tape,
        params: &ModelParams,
        trainable: bool,
    ) -> Result<Self, ModelError> {
        params.validate()?;
        let mut vars = Vec::with_capacity(TENSOR_NAMES.len());
        for tensor in params.tensors() {
            let value = tensor.clone();
            let var = if trainable {
                tape.param(value)?
            } else {
                tape.leaf(value)?
            };
            vars.push(var);
        }
        Self::from_vars(&vars)
    }

    /// Assembles the model from already-recorded variables in canonical
    /// tensor order (see [`TENSOR_NAMES`]).
    pub fn from_vars(vars: &[Var<'t>]) -> Result<Self, ModelError> {
        if vars.len() != TENSOR_NAMES.len() {
            return Err(ModelError::BadParamCount {
                want: TENSOR_NAMES.len(),
                got: vars.len(),
            });
        }
        Ok(Self {
            enc_w1: vars[0],
            enc_b1: vars[1],
            enc_w2: vars[2],
            enc_b2: vars[3],
            lstm_w_ih: vars[4],
            lstm_w_hh: vars[5],
            lstm_b: vars[6],
            dec_w: vars[7],
            dec_b: vars[8],
        })
    }

    /// The parameter variables in canonical order.
    pub fn param_vars(&self) -> [Var<'t>; 9] {
        [
            self.enc_w1,
            self.enc_b1,
            self.enc_w2,
            self.enc_b2,
            self.lstm_w_ih,
            self.lstm_w_hh,
            self.lstm_b,
            self.dec_w,
            self.dec_b,
        ]
    }

    /// Maps one-hot preparation rows `(g, 6)` to the initial recurrent state
    /// pair `(h0, c0)`, each `(g, 48)`: two affine-sigmoid layers whose 96
    /// outputs split in half.
    pub fn encode(&self, onehot: Var<'t>) -> Result<(Var<'t>, Var<'t>), ModelError> {
        check_one_hot(&onehot.value())?;
        let z1 = onehot
            .matmul_nt(self.enc_w1)?
            .add_row(self.enc_b1)?
            .sigmoid();
        let z2 = z1.matmul_nt(self.enc_w2)?.add_row(self.enc_b2)?.sigmoid();
        let h0 = z2.slice_cols(0, HIDDEN_SIZE)?;
        let c0 = z2.slice_cols(HIDDEN_SIZE, ENCODER_HIDDEN)?;
        Ok((h0, c0))
    }

    /// One vanilla LSTM step on a batch: `x` is `(g, 2)` (scaled pixel
    /// quadratures), `h`/`c` are `(g, 48)`. Gates are stacked `[i, f, g, o]`;
    /// `i`, `f`, `o` pass through sigmoid, the candidate through tanh;
    /// `c' = f⊙c + i⊙g` and `h' = o⊙tanh(c')`.
    pub fn lstm_step(
        &self,
        x: Var<'t>,
        h: Var<'t>,
        c: Var<'t>,
    ) -> Result<(Var<'t>, Var<'t>), ModelError> {
        let gates = x
            .matmul_nt(self.lstm_w_ih)?
            .add(h.matmul_nt(self.lstm_w_hh)?)?
            .add_row(self.lstm_b)?;
        let i = gates.slice_cols(0, HIDDEN_SIZE)?.sigmoid();
        let f = gates.slice_cols(HIDDEN_SIZE, 2 * HIDDEN_SIZE)?.sigmoid();
        let g = gates.slice_cols(2 * HIDDEN_SIZE, 3 * HIDDEN_SIZE)?.tanh();
        let o = gates.slice_cols(3 * HIDDEN_SIZE, GATE_ROWS)?.sigmoid();
        let c_next = f.mul(c)?.add(i.mul(g)?)?;
        let h_next = o.mul(c_next.tanh())?;
        Ok((h_next, c_next))
    }

    /// Maps hidden rows `(g, 48)` to probability rows `(g, 3)` through an
    /// affine layer and a sigmoid, so every output sits strictly in (0, 1).
    pub fn decode(&self, h: Var<'t>) -> Result<Var<'t>, ModelError> {
        Ok(h.matmul_nt(self.dec_w)?.add_row(self.dec_b)?.sigmoid())
    }
}

/// One-hot rows for a batch of preparation indices, as a `(g, 6)` constant.
pub fn onehot_preps<'t>(tape: &'t Tape, preps: &[u8]) -> Result<Var<'t>, ModelError> {
    let mut m = Array2::<f64>::zeros((preps.len(), N_PREPS));
    for (row, &p) in preps.iter().enumerate() {
        if usize::from(p) >= N_PREPS {
            return Err(ModelError::BadPrep(p));
        }
        m[(row, usize::from(p))] = 1.0;
    }
    Ok(tape.leaf(m.into_dyn())?)
}

/// Scaled pixel-input rows `(g, 2)` for one time step of a same-length
/// group: column 0 is the in-phase amplitude, column 1 the quadrature, both
/// divided by [`crate::params::PIXEL_SCALE_MHZ`].
pub fn pixel_input<'t>(
    tape: &'t Tape,
    rows: &[(f64, f64)],
) -> Result<Var<'t>, ModelError> {
    let mut m = Array2::<f64>::zeros((rows.len(), INPUT_DIM));
    for (r, &(si, sq)) in rows.iter().enumerate() {
        m[(r, 0)] = si / crate::params::PIXEL_SCALE_MHZ;
        m[(r, 1)] = sq / crate::params::PIXEL_SCALE_MHZ;
    }
    Ok(tape.leaf(m.into_dyn())?)
}

/// Validates that every row of `m` is exactly one-hot over the six
/// preparation classes.
fn check_one_hot(m: &ArrayD<f64>) -> Result<(), ModelError> {
    let shape = m.shape();
    let ok_shape = shape.len() == 2 && shape[1] == N_PREPS;
    if !ok_shape {
        return Err(ModelError::BadParamShape {
            name: "prep_onehot",
            got: shape.to_vec(),
            want: vec![shape.first().copied().unwrap_or(0), N_PREPS],
        });
    }
    for row in m.rows() {
        let ones = row.iter().filter(|&&v| v == 1.0).count();
        let zeros = row.iter().filter(|&&v| v == 0.0).count();
        if ones != 1 || zeros != N_PREPS - 1 {
            return Err(ModelError::BadPrep(u8::MAX));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::N_AXES;
    use approx::assert_relative_eq;
    use mlqoc_autodiff::Tape;
    use ndarray::IxDyn;

    #[test]
    fn zero_parameters_encode_every_prep_to_one_half() {
        let tape = Tape::new();
        let model = TapeModel::load(&tape, &ModelParams::zeros(), false).unwrap();
        let onehot = onehot_preps(&tape, &[0, 1, 2, 3, 4, 5]).unwrap();
        let (h0, c0) = model.encode(onehot).unwrap();
        assert!(h0.value().iter().all(|&v| v == 0.5));
        assert!(c0.value().iter().all(|&v| v == 0.5));
        assert_eq!(h0.shape(), vec![6, HIDDEN_SIZE]);
    }

    #[test]
    fn identical_preps_encode_identically_and_bad_preps_are_rejected() {
        let tape = Tape::new();
        let model = TapeModel::load(&tape, &ModelParams::init(3), false).unwrap();
        let onehot = onehot_preps(&tape, &[4, 4]).unwrap();
        let (h0, _) = model.encode(onehot).unwrap();
        let h = h0.value();
        for col in 0..HIDDEN_SIZE {
            assert_eq!(h[[0, col]], h[[1, col]]);
        }
        assert!(onehot_preps(&tape, &[6]).is_err());
        let not_onehot = tape
            .leaf(ndarray::Array2::from_elem((1, N_PREPS), 0.5).into_dyn())
            .unwrap();
        assert!(model.encode(not_onehot).is_err());
    }

    #[test]
    fn zero_parameter_lstm_step_halves_the_cell_state() {
        let tape = Tape::new();
        let model = TapeModel::load(&tape, &ModelParams::zeros(), false).unwrap();
        let x = pixel_input(&tape, &[(30.0, -10.0)]).unwrap();
        let c0_value = 0.8;
        let h = tape.leaf(ArrayD::zeros(IxDyn(&[1, HIDDEN_SIZE]))).unwrap();
        let c = tape
            .leaf(ArrayD::from_elem(IxDyn(&[1, HIDDEN_SIZE]), c0_value))
            .unwrap();
        let (h1, c1) = model.lstm_step(x, h, c).unwrap();
        // All gates sit at sigmoid(0) = 1/2 and the candidate at tanh(0) = 0.
        for &v in c1.value().iter() {
            assert_relative_eq!(v, 0.5 * c0_value, max_relative = 1e-15);
        }
        for &v in h1.value().iter() {
            assert_relative_eq!(v, 0.5 * (0.5 * c0_value).tanh(), max_relative = 1e-15);
        }
    }

    #[test]
    fn hidden_state_is_bounded_by_one_for_arbitrary_inputs() {
        let tape = Tape::new();
        let model = TapeModel::load(&tape, &ModelParams::init(11), false).unwrap();
        let x = pixel_input(&tape, &[(1e4, -1e4)]).unwrap();
        let h = tape
            .leaf(ArrayD::from_elem(IxDyn(&[1, HIDDEN_SIZE]), 0.9))
            .unwrap();
        let c = tape
            .leaf(ArrayD::from_elem(IxDyn(&[1, HIDDEN_SIZE]), -5.0))
            .unwrap();
        let (h1, _) = model.lstm_step(x, h, c).unwrap();
        assert!(h1.value().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn zero_parameters_decode_to_the_fully_mixed_state() {
        let tape = Tape::new();
        let model = TapeModel::load(&tape, &ModelParams::zeros(), false).unwrap();
        let h = tape
            .leaf(ArrayD::from_elem(IxDyn(&[2, HIDDEN_SIZE]), 0.3))
            .unwrap();
        let p = model.decode(h).unwrap();
        assert!(p.value().iter().all(|&v| v == 0.5));
        assert_eq!(p.shape(), vec![2, N_AXES]);
    }

    #[test]
    fn decoded_probabilities_stay_strictly_inside_the_unit_interval() {
        // Reachable hidden states satisfy |h| < 1 (output gate times tanh),
        // so the decoder's sigmoid can never saturate to exactly 0 or 1, even
        // under absurdly strong drives.
        let tape = Tape::new();
        let model = TapeModel::load(&tape, &ModelParams::init(17), false).unwrap();
        let onehot = onehot_preps(&tape, &[0, 3]).unwrap();
        let (mut h, mut c) = model.encode(onehot).unwrap();
        for step in 0..40 {
            let drive = if step % 2 == 0 { 1e6 } else { -1e6 };
            let x = pixel_input(&tape, &[(drive, -drive), (drive, drive)]).unwrap();
            let (h2, c2) = model.lstm_step(x, h, c).unwrap();
            h = h2;
            c = c2;
            let p = model.decode(h).unwrap();
            assert!(p.value().iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }
}
