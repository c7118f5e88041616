//! The composite training loss over a mini-batch of measurement records.
//!
//! `L = L_pred + w_posit · L_posit + w_prep · L_prep`, where
//!
//! * `L_pred` — mean over records of the squared error between the label and
//!   the predicted probability at the final pixel on the measured axis (each
//!   record carries exactly one label);
//! * `L_posit` — mean over all (record, time) pairs, `t = 0` included, of
//!   `relu(‖v‖² − 1)`, penalizing predictions outside the Bloch ball;
//! * `L_prep` — mean over records of the squared Euclidean distance between
//!   the predicted `t = 0` Bloch vector and the prepared state's.
//!
//! Records of different lengths are grouped by pixel count; each group runs
//! as a batched subgraph on a shared tape, with group sums scaled by the
//! batch-wide totals so the combined gradient equals the whole-batch
//! definition exactly, independent of grouping.

use std::collections::BTreeMap;

use mlqoc_autodiff::{Tape, Var};
use ndarray::{Array2, ArrayD};

use crate::error::ModelError;
use crate::graph::{onehot_preps, pixel_input, TapeModel};
use crate::params::{ModelParams, N_AXES, N_PREPS, PREP_BLOCH};

/// Borrowed view of one training record.
#[derive(Debug, Clone, Copy)]
pub struct RecordView<'a> {
    /// In-phase pixel amplitudes in MHz (padding included).
    pub s_i: &'a [f64],
    /// Quadrature pixel amplitudes in MHz.
    pub s_q: &'a [f64],
    /// Preparation class, `0..6`.
    pub prep: u8,
    /// Measured axis, `0..3` for X, Y, Z.
    pub axis: u8,
    /// Excited-population estimate in `[0, 1]` at the final pixel.
    pub label: f64,
}

impl RecordView<'_> {
    fn validate(&self) -> Result<(), ModelError> {
        if self.s_i.is_empty() {
            return Err(ModelError::EmptyPulse);
        }
        if self.s_i.len() != self.s_q.len() {
            return Err(ModelError::ChannelMismatch {
                i_len: self.s_i.len(),
                q_len: self.s_q.len(),
            });
        }
        if usize::from(self.prep) >= N_PREPS {
            return Err(ModelError::BadPrep(self.prep));
        }
        if usize::from(self.axis) >= N_AXES {
            return Err(ModelError::BadAxis(self.axis));
        }
        if !(0.0..=1.0).contains(&self.label) {
            return Err(ModelError::BadLabel(self.label));
        }
        Ok(())
    }
}

/// Weights of the auxiliary loss terms.
#[derive(Debug, Clone, Copy)]
pub struct LossWeights {
    /// Weight of the Bloch-ball positivity penalty.
    pub w_posit: f64,
    /// Weight of the preparation-consistency penalty.
    pub w_prep: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            w_posit: 1.0,
            w_prep: 1.0,
        }
    }
}

/// Scalar loss values of one batch; the components are unweighted means.
#[derive(Debug, Clone, Copy)]
pub struct LossBreakdown {
    /// `l_pred + w_posit·l_posit + w_prep·l_prep`.
    pub total: f64,
    /// Label-prediction mean squared error.
    pub l_pred: f64,
    /// Mean Bloch-ball violation.
    pub l_posit: f64,
    /// Mean preparation mismatch.
    pub l_prep: f64,
}

/// The loss subexpressions of one batch, kept as variables so callers can
/// both read the values and differentiate the total.
pub struct LossVars<'t> {
    /// Weighted total (the backward root).
    pub total: Var<'t>,
    /// Unweighted `L_pred`.
    pub l_pred: Var<'t>,
    /// Unweighted `L_posit`.
    pub l_posit: Var<'t>,
    /// Unweighted `L_prep`.
    pub l_prep: Var<'t>,
}

impl LossVars<'_> {
    /// Reads the scalar values.
    pub fn breakdown(&self) -> LossBreakdown {
        LossBreakdown {
            total: self.total.scalar(),
            l_pred: self.l_pred.scalar(),
            l_posit: self.l_posit.scalar(),
            l_prep: self.l_prep.scalar(),
        }
    }
}

/// Builds the full batch-loss graph on `tape` using an already-loaded model.
///
/// This is the single source of truth for the loss; training, forward-only
/// evaluation, and gradient checking all route through it.
pub fn batch_loss_graph<'t>(
    tape: &'t Tape,
    model: &TapeModel<'t>,
    records: &[RecordView<'_>],
    weights: LossWeights,
) -> Result<LossVars<'t>, ModelError> {
    if records.is_empty() {
        return Err(ModelError::EmptyBatch);
    }
    for r in records {
        r.validate()?;
    }

    // Group records by pixel count; every group is one batched subgraph.
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        groups.entry(r.s_i.len()).or_default().push(i);
    }

    let n_records = records.len() as f64;
    let n_time_points: f64 = records.iter().map(|r| (r.s_i.len() + 1) as f64).sum();

    // Column-summing helper: (g, 3) · (3, 1) → per-row ‖·‖² terms.
    let ones3 = tape.leaf(ArrayD::ones(ndarray::IxDyn(&[N_AXES, 1])))?;
    let posit_excess = |p: Var<'t>| -> Result<Var<'t>, ModelError> {
        let v = p.scale_shift(-2.0, 1.0);
        let norm2 = v.square().matmul(ones3)?;
        Ok(norm2.scale_shift(1.0, -1.0).relu().sum())
    };

    let mut s_pred: Option<Var<'t>> = None;
    let mut s_posit: Option<Var<'t>> = None;
    let mut s_prep: Option<Var<'t>> = None;
    let join = |acc: &mut Option<Var<'t>>, term: Var<'t>| -> Result<(), ModelError> {
        *acc = Some(match acc.take() {
            Some(a) => a.add(term)?,
            None => term,
        });
        Ok(())
    };

    for (&n_pixels, idxs) in &groups {
        let g = idxs.len();

        let preps: Vec<u8> = idxs.iter().map(|&i| records[i].prep).collect();
        let onehot = onehot_preps(tape, &preps)?;

        let mut prep_targets = Array2::<f64>::zeros((g, N_AXES));
        let mut mask = Array2::<f64>::zeros((g, N_AXES));
        let mut labels = Array2::<f64>::zeros((g, N_AXES));
        for (row, &i) in idxs.iter().enumerate() {
            let r = &records[i];
            for axis in 0..N_AXES {
                prep_targets[(row, axis)] = PREP_BLOCH[usize::from(r.prep)][axis];
            }
            mask[(row, usize::from(r.axis))] = 1.0;
            labels[(row, usize::from(r.axis))] = r.label;
        }
        let prep_targets = tape.leaf(prep_targets.into_dyn())?;
        let mask = tape.leaf(mask.into_dyn())?;
        let labels = tape.leaf(labels.into_dyn())?;

        let (mut h, mut c) = model.encode(onehot)?;
        let p0 = model.decode(h)?;
        join(&mut s_posit, posit_excess(p0)?)?;

        let v0 = p0.scale_shift(-2.0, 1.0);
        join(&mut s_prep, v0.sub(prep_targets)?.square().sum())?;

        let mut p_final = p0;
        for t in 0..n_pixels {
            let rows: Vec<(f64, f64)> = idxs
                .iter()
                .map(|&i| (records[i].s_i[t], records[i].s_q[t]))
                .collect();
            let x = pixel_input(tape, &rows)?;
            let (h2, c2) = model.lstm_step(x, h, c)?;
            h = h2;
            c = c2;
            let p = model.decode(h)?;
            join(&mut s_posit, posit_excess(p)?)?;
            p_final = p;
        }

        join(
            &mut s_pred,
            p_final.sub(labels)?.mul(mask)?.square().sum(),
        )?;
    }

    let l_pred = s_pred.expect("non-empty batch").scale_shift(1.0 / n_records, 0.0);
    let l_posit = s_posit
        .expect("non-empty batch")
        .scale_shift(1.0 / n_time_points, 0.0);
    let l_prep = s_prep.expect("non-empty batch").scale_shift(1.0 / n_records, 0.0);
    let total = l_pred
        .add(l_posit.scale_shift(weights.w_posit, 0.0))?
        .add(l_prep.scale_shift(weights.w_prep, 0.0))?;

    Ok(LossVars {
        total,
        l_pred,
        l_posit,
        l_prep,
    })
}

/// Forward-only batch loss.
pub fn batch_loss(
    params: &ModelParams,
    records: &[RecordView<'_>],
    weights: LossWeights,
) -> Result<LossBreakdown, ModelError> {
    let tape = Tape::new();
    let model = TapeModel::load(&tape, params, false)?;
    let vars = batch_loss_graph(&tape, &model, records, weights)?;
    Ok(vars.breakdown())
}

/// Batch loss plus parameter gradients in canonical tensor order.
pub fn batch_loss_and_grads(
    params: &ModelParams,
    records: &[RecordView<'_>],
    weights: LossWeights,
) -> Result<(LossBreakdown, Vec<ArrayD<f64>>), ModelError> {
    let tape = Tape::new();
    let model = TapeModel::load(&tape, params, true)?;
    let vars = batch_loss_graph(&tape, &model, records, weights)?;
    let breakdown = vars.breakdown();
    vars.total.backward()?;
    let grads = model
        .param_vars()
        .iter()
        .map(|v| {
            v.grad()
                .unwrap_or_else(|| ArrayD::zeros(ndarray::IxDyn(&v.shape())))
        })
        .collect();
    Ok((breakdown, grads))
}
