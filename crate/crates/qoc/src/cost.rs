//! The pulse-optimization cost graph.
//!
//! A candidate pulse is parametrized by its content pixels (both
//! quadratures) in angular units of rad/ns; the first and last two pixels of
//! each quadrature are frozen at zero. The cost combines the model-predicted
//! average gate infidelity with amplitude and smoothness regularizers:
//!
//! ```text
//! C = (1 − AGF_model)
//!   + w_clamp · mean relu(|Ω| − Ω_max)
//!   + w_mean  · mean Ω²
//!   + w_first · mean (Ω_t − Ω_{t−1})²
//!   + w_second· mean (second difference)²
//! ```
//!
//! with each mean pooled over both quadrature pixel arrays. The regularizers
//! matter beyond hardware limits: they confine the search to smooth pulses,
//! where the learned model's predictions track the true dynamics.

use mlqoc_autodiff::{Tape, Var};
use mlqoc_model::{onehot_preps, ModelParams, TapeModel, PIXEL_SCALE_MHZ};
use mlqoc_pulse::{PixelPulse, ZERO_PAD_PIXELS};
use ndarray::{Array2, ArrayD};

use crate::agf::{agf_from_outputs, UNITARITY_TOL};
use crate::error::QocError;
use crate::target::{target_bloch_rows, unitarity_defect, Matrix2};

/// Angular rad/ns per MHz of drive amplitude: Ω = 2π · f.
pub const MHZ_TO_RAD_NS: f64 = std::f64::consts::TAU * 1e-3;

/// Pixels a gate must at least have: the four frozen padding pixels plus one
/// free pixel of content.
pub const MIN_GATE_PIXELS: usize = 2 * ZERO_PAD_PIXELS + 1;

/// Regularizer weights of the optimization cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostWeights {
    /// Amplitude-ceiling penalty weight.
    pub w_clamp: f64,
    /// Mean-square-amplitude penalty weight.
    pub w_mean: f64,
    /// First-difference smoothness weight.
    pub w_first: f64,
    /// Second-difference smoothness weight.
    pub w_second: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self { w_clamp: 10.0, w_mean: 0.1, w_first: 0.01, w_second: 0.01 }
    }
}

/// One gate-optimization problem.
#[derive(Debug, Clone)]
pub struct GateTask {
    /// Target unitary.
    pub u_target: Matrix2,
    /// Gate duration in pixels (1 ns each), padding included.
    pub duration_pixels: usize,
    /// Regularizer weights.
    pub weights: CostWeights,
    /// Drive-amplitude ceiling in MHz (the clamp threshold).
    pub omega_max_mhz: f64,
    /// Random restarts.
    pub n_restarts: usize,
    /// Optimizer iterations per restart.
    pub iters: usize,
    /// Seed for restart initializations.
    pub seed: u64,
}

impl GateTask {
    /// A task with the standard weights, restart count, and iteration budget
    /// for the given target and duration.
    pub fn new(u_target: Matrix2, duration_pixels: usize, seed: u64) -> Self {
        Self {
            u_target,
            duration_pixels,
            weights: CostWeights::default(),
            omega_max_mhz: 100.0,
            n_restarts: 30,
            iters: 2000,
            seed,
        }
    }

    /// Checks the task contract.
    pub fn validate(&self) -> Result<(), QocError> {
        if self.u_target.shape() != [2, 2] {
            return Err(QocError::BadTask("target must be 2×2".into()));
        }
        let defect = unitarity_defect(&self.u_target);
        if defect > UNITARITY_TOL {
            return Err(QocError::BadTask(format!(
                "target is not unitary (defect {defect:.2e})"
            )));
        }
        if self.duration_pixels < MIN_GATE_PIXELS {
            return Err(QocError::BadTask(format!(
                "duration {} pixels leaves no free content (minimum {MIN_GATE_PIXELS})",
                self.duration_pixels
            )));
        }
        let w = &self.weights;
        if [w.w_clamp, w.w_mean, w.w_first, w.w_second]
            .iter()
            .any(|&x| !(x >= 0.0) || !x.is_finite())
        {
            return Err(QocError::BadTask("weights must be finite and ≥ 0".into()));
        }
        if !(self.omega_max_mhz > 0.0) {
            return Err(QocError::BadTask("amplitude ceiling must be positive".into()));
        }
        if self.n_restarts == 0 || self.iters == 0 {
            return Err(QocError::BadTask("restarts and iterations must be ≥ 1".into()));
        }
        Ok(())
    }

    /// Free parameters per quadrature (content pixels).
    pub fn content_pixels(&self) -> usize {
        self.duration_pixels - 2 * ZERO_PAD_PIXELS
    }
}

/// The cost graph's heads, kept separate so tests and reports can inspect
/// each term.
#[derive(Clone, Copy)]
pub struct CostVars<'t> {
    /// Full weighted cost.
    pub total: Var<'t>,
    /// Model-predicted AGF (not the infidelity).
    pub agf_model: Var<'t>,
    /// Amplitude-ceiling term, unweighted.
    pub clamp: Var<'t>,
    /// Mean-square-amplitude term, unweighted.
    pub mean_sq: Var<'t>,
    /// First-difference term, unweighted.
    pub first: Var<'t>,
    /// Second-difference term, unweighted.
    pub second: Var<'t>,
}

/// Numeric values of the cost terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub total: f64,
    pub agf_model: f64,
    pub clamp: f64,
    pub mean_sq: f64,
    pub first: f64,
    pub second: f64,
}

impl CostVars<'_> {
    /// Reads the scalar values out of the graph.
    pub fn breakdown(&self) -> CostBreakdown {
        CostBreakdown {
            total: self.total.scalar(),
            agf_model: self.agf_model.scalar(),
            clamp: self.clamp.scalar(),
            mean_sq: self.mean_sq.scalar(),
            first: self.first.scalar(),
            second: self.second.scalar(),
        }
    }
}

/// Builds the cost graph over content-pixel rows `content_i`/`content_q`
/// (each `(1, task.content_pixels())`, rad/ns). The padding is appended as
/// constants, so gradients exist exactly for the free parameters.
pub fn qoc_cost_graph<'t>(
    tape: &'t Tape,
    model: &TapeModel<'t>,
    content_i: Var<'t>,
    content_q: Var<'t>,
    task: &GateTask,
) -> Result<CostVars<'t>, QocError> {
    let n = task.duration_pixels;
    let pad = tape.leaf(ArrayD::zeros(vec![1, ZERO_PAD_PIXELS]))?;
    let full_i = pad.concat_cols(content_i)?.concat_cols(pad)?;
    let full_q = pad.concat_cols(content_q)?.concat_cols(pad)?;

    // Model forward pass over all six preparations at once. Model inputs are
    // pixel amplitudes over 100 MHz, i.e. Ω/Ω_max for the standard ceiling.
    let input_scale = 1.0 / (MHZ_TO_RAD_NS * PIXEL_SCALE_MHZ);
    let ones6 = tape.leaf(ArrayD::from_elem(vec![6, 1], 1.0))?;
    let preps = onehot_preps(tape, &[0, 1, 2, 3, 4, 5])?;
    let (mut h, mut c) = model.encode(preps)?;
    for t in 0..n {
        let xi = full_i.slice_cols(t, t + 1)?;
        let xq = full_q.slice_cols(t, t + 1)?;
        let x_row = xi.concat_cols(xq)?.scale_shift(input_scale, 0.0);
        let x = ones6.matmul(x_row)?;
        let (h_next, c_next) = model.lstm_step(x, h, c)?;
        h = h_next;
        c = c_next;
    }
    // Bloch predictions v = 1 − 2·P(−1) dotted against the target rows.
    let v = model.decode(h)?.scale_shift(-2.0, 1.0);
    let target_rows = target_bloch_rows(&task.u_target);
    let mut t_arr = Array2::<f64>::zeros((6, 3));
    for (j, row) in target_rows.iter().enumerate() {
        for a in 0..3 {
            t_arr[(j, a)] = row[a];
        }
    }
    let targets = tape.leaf(t_arr.into_dyn())?;
    // Each model output has unit block trace, so the fidelity term per
    // preparation is (1 + t_j·v_j)/2 and the mean is 1/2 + Σ t·v / 12.
    let agf_model = v.mul(targets)?.sum().scale_shift(1.0 / 12.0, 0.5);

    let omega_max = task.omega_max_mhz * MHZ_TO_RAD_NS;
    let both = full_i.concat_cols(full_q)?;
    let clamp = both.abs().scale_shift(1.0, -omega_max).relu().mean();
    let mean_sq = both.square().mean();

    let d_i = full_i.slice_cols(1, n)?.sub(full_i.slice_cols(0, n - 1)?)?;
    let d_q = full_q.slice_cols(1, n)?.sub(full_q.slice_cols(0, n - 1)?)?;
    let first = d_i.concat_cols(d_q)?.square().mean();

    let dd_i = d_i.slice_cols(1, n - 1)?.sub(d_i.slice_cols(0, n - 2)?)?;
    let dd_q = d_q.slice_cols(1, n - 1)?.sub(d_q.slice_cols(0, n - 2)?)?;
    let second = dd_i.concat_cols(dd_q)?.square().mean();

    let w = &task.weights;
    let total = agf_model
        .scale_shift(-1.0, 1.0)
        .add(clamp.scale_shift(w.w_clamp, 0.0))?
        .add(mean_sq.scale_shift(w.w_mean, 0.0))?
        .add(first.scale_shift(w.w_first, 0.0))?
        .add(second.scale_shift(w.w_second, 0.0))?;

    Ok(CostVars { total, agf_model, clamp, mean_sq, first, second })
}

/// The model's AGF prediction for a concrete pulse (no graph): six forward
/// passes, Bloch conversion, and the 2-design mean.
pub fn model_agf(
    params: &ModelParams,
    pulse: &PixelPulse,
    u_target: &Matrix2,
) -> Result<f64, QocError> {
    let mut outputs = [(1.0, [0.0; 3]); 6];
    for (prep, out) in outputs.iter_mut().enumerate() {
        let pred = mlqoc_model::predict(params, prep as u8, &pulse.s_i, &pulse.s_q)?;
        let p = pred.final_probs();
        out.1 = [1.0 - 2.0 * p[0], 1.0 - 2.0 * p[1], 1.0 - 2.0 * p[2]];
    }
    Ok(agf_from_outputs(&outputs, u_target))
}

/// Converts content-pixel arrays (rad/ns) into the padded MHz pixel pulse
/// they parametrize.
pub fn content_to_pulse(
    content_i: &[f64],
    content_q: &[f64],
    dt_ns: f64,
) -> Result<PixelPulse, QocError> {
    let pad = vec![0.0; ZERO_PAD_PIXELS];
    let to_mhz = |content: &[f64]| -> Vec<f64> {
        pad.iter()
            .copied()
            .chain(content.iter().map(|&x| x / MHZ_TO_RAD_NS))
            .chain(pad.iter().copied())
            .collect()
    };
    Ok(PixelPulse::new(dt_ns, to_mhz(content_i), to_mhz(content_q))?)
}
