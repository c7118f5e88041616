//! The epoch loop: shuffled mini-batches, Adam with the batch-doubling
//! schedule, validation-based model selection, and early stopping.

use mlqoc_autodiff::Adam;
use mlqoc_device::PulseRecord;
use mlqoc_model::{
    batch_loss, batch_loss_and_grads, LossBreakdown, LossWeights, ModelParams, RecordView,
    TENSOR_NAMES,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::config::TrainConfig;
use crate::error::TrainError;

/// Largest record count evaluated as one graph; bigger sets are split and
/// aggregated exactly, keeping peak memory bounded.
const EVAL_CHUNK: usize = 2048;

/// Borrow a training record in the form the model consumes.
pub fn record_view(r: &PulseRecord) -> RecordView<'_> {
    RecordView {
        s_i: &r.pulse.s_i,
        s_q: &r.pulse.s_q,
        prep: r.prep,
        axis: r.axis,
        label: r.label,
    }
}

/// Per-epoch loss summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    /// 1-based epoch index.
    pub epoch: usize,
    /// Total training loss, aggregated exactly over the epoch's batches.
    pub train_loss: f64,
    /// Prediction component of the training loss.
    pub train_l_pred: f64,
    /// Bloch-ball penalty component.
    pub train_l_posit: f64,
    /// Preparation-consistency component.
    pub train_l_prep: f64,
    /// Total loss on the fixed validation subsample.
    pub val_loss: f64,
    /// Mini-batch size in force this epoch.
    pub batch_size: usize,
}

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Parameters with the lowest validation loss seen during the run.
    pub params: ModelParams,
    /// Epoch at which `params` was recorded.
    pub best_epoch: usize,
    /// Validation loss of `params` on the epoch-level subsample.
    pub best_val_loss: f64,
    /// Validation loss of `params` on the complete validation set.
    pub full_val_loss: f64,
    /// One entry per completed epoch.
    pub history: Vec<EpochStats>,
    /// Whether the patience rule ended the run before `max_epochs`.
    pub stopped_early: bool,
}

/// Exact streaming aggregation of per-batch loss breakdowns: prediction and
/// preparation terms are means over records, the positivity term a mean over
/// (record, time) pairs, so the partial sums recombine without error.
struct LossAccum {
    pred_sum: f64,
    posit_sum: f64,
    prep_sum: f64,
    n_records: f64,
    n_time_points: f64,
}

impl LossAccum {
    fn new() -> Self {
        Self {
            pred_sum: 0.0,
            posit_sum: 0.0,
            prep_sum: 0.0,
            n_records: 0.0,
            n_time_points: 0.0,
        }
    }

    fn add(&mut self, b: &LossBreakdown, views: &[RecordView<'_>]) {
        let n = views.len() as f64;
        let m: f64 = views.iter().map(|v| (v.s_i.len() + 1) as f64).sum();
        self.pred_sum += b.l_pred * n;
        self.posit_sum += b.l_posit * m;
        self.prep_sum += b.l_prep * n;
        self.n_records += n;
        self.n_time_points += m;
    }

    fn finish(&self, w: LossWeights) -> LossBreakdown {
        let l_pred = self.pred_sum / self.n_records;
        let l_posit = self.posit_sum / self.n_time_points;
        let l_prep = self.prep_sum / self.n_records;
        LossBreakdown {
            total: l_pred + w.w_posit * l_posit + w.w_prep * l_prep,
            l_pred,
            l_posit,
            l_prep,
        }
    }
}

/// Loss of `params` over an arbitrarily large record set, evaluated in
/// bounded-memory chunks with exact aggregation.
pub fn dataset_loss(
    params: &ModelParams,
    records: &[PulseRecord],
    weights: LossWeights,
) -> Result<LossBreakdown, TrainError> {
    if records.is_empty() {
        return Err(TrainError::EmptyRecords("loss evaluation"));
    }
    let mut acc = LossAccum::new();
    for chunk in records.chunks(EVAL_CHUNK) {
        let views: Vec<RecordView<'_>> = chunk.iter().map(record_view).collect();
        let b = batch_loss(params, &views, weights)?;
        acc.add(&b, &views);
    }
    Ok(acc.finish(weights))
}

/// Trains `init` on `train_records`, tracking validation loss on
/// `val_records` and returning the best parameters by validation loss.
///
/// Deterministic: batch order, the validation subsample, and every update
/// derive from `cfg.seed`, so a rerun reproduces the loss history bitwise.
pub fn train(
    train_records: &[PulseRecord],
    val_records: &[PulseRecord],
    init: ModelParams,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    train_with_progress(train_records, val_records, init, cfg, &mut |_| {})
}

/// [`train`] with an observer invoked after every epoch — long runs can
/// stream their loss history without changing any numerical behavior.
pub fn train_with_progress(
    train_records: &[PulseRecord],
    val_records: &[PulseRecord],
    init: ModelParams,
    cfg: &TrainConfig,
    on_epoch: &mut dyn FnMut(&EpochStats),
) -> Result<TrainOutcome, TrainError> {
    cfg.validate()?;
    if train_records.is_empty() {
        return Err(TrainError::EmptyRecords("training set"));
    }
    if val_records.is_empty() {
        return Err(TrainError::EmptyRecords("validation set"));
    }
    init.validate()?;

    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);

    // Fixed validation subsample for epoch-level metrics.
    let val_subset: Vec<&PulseRecord> = if val_records.len() > cfg.val_subsample {
        let mut idx: Vec<usize> = (0..val_records.len()).collect();
        idx.shuffle(&mut rng);
        idx.truncate(cfg.val_subsample);
        idx.sort_unstable();
        idx.into_iter().map(|i| &val_records[i]).collect()
    } else {
        val_records.iter().collect()
    };

    let mut params = init;
    let mut adam = Adam::with_hyperparams(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps_adam);
    let mut order: Vec<usize> = (0..train_records.len()).collect();

    let mut best_params = params.clone();
    let mut best_epoch = 0usize;
    let mut best_val_loss = f64::INFINITY;
    let mut epochs_since_best = 0usize;
    let mut history = Vec::new();
    let mut stopped_early = false;

    for epoch in 1..=cfg.max_epochs {
        let batch_size = cfg.batch_size_at(epoch);
        order.shuffle(&mut rng);

        let mut acc = LossAccum::new();
        for (batch_idx, chunk) in order.chunks(batch_size).enumerate() {
            let views: Vec<RecordView<'_>> =
                chunk.iter().map(|&i| record_view(&train_records[i])).collect();
            let (breakdown, grads) =
                batch_loss_and_grads(&params, &views, cfg.loss_weights)?;

            if !breakdown.total.is_finite() {
                return Err(TrainError::Diverged {
                    epoch,
                    batch: batch_idx,
                    detail: format!(
                        "loss became non-finite (pred {:.3e}, posit {:.3e}, prep {:.3e})",
                        breakdown.l_pred, breakdown.l_posit, breakdown.l_prep
                    ),
                });
            }
            for (g, name) in grads.iter().zip(TENSOR_NAMES) {
                if g.iter().any(|x| !x.is_finite()) {
                    return Err(TrainError::Diverged {
                        epoch,
                        batch: batch_idx,
                        detail: format!("gradient of {name} became non-finite"),
                    });
                }
            }

            acc.add(&breakdown, &views);
            let mut tensors = params.tensors_mut();
            adam.step(&mut tensors, &grads);
        }

        let train_b = acc.finish(cfg.loss_weights);
        let mut val_acc = LossAccum::new();
        for chunk in val_subset.chunks(EVAL_CHUNK) {
            let views: Vec<RecordView<'_>> =
                chunk.iter().map(|r| record_view(r)).collect();
            let b = batch_loss(&params, &views, cfg.loss_weights)?;
            val_acc.add(&b, &views);
        }
        let val_b = val_acc.finish(cfg.loss_weights);

        let stats = EpochStats {
            epoch,
            train_loss: train_b.total,
            train_l_pred: train_b.l_pred,
            train_l_posit: train_b.l_posit,
            train_l_prep: train_b.l_prep,
            val_loss: val_b.total,
            batch_size,
        };
        on_epoch(&stats);
        history.push(stats);

        if val_b.total < best_val_loss {
            best_val_loss = val_b.total;
            best_epoch = epoch;
            best_params = params.clone();
            epochs_since_best = 0;
        } else {
            epochs_since_best += 1;
            if epochs_since_best >= cfg.patience {
                stopped_early = true;
                break;
            }
        }
    }

    let full_val_loss = dataset_loss(&best_params, val_records, cfg.loss_weights)?.total;
    Ok(TrainOutcome {
        params: best_params,
        best_epoch,
        best_val_loss,
        full_val_loss,
        history,
        stopped_early,
    })
}

/// Renders the loss history as CSV.
pub fn history_csv(history: &[EpochStats]) -> String {
    let mut out =
        String::from("epoch,train_loss,val_loss,l_pred,l_posit,l_prep,batch_size\n");
    for h in history {
        out.push_str(&format!(
            "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}\n",
            h.epoch,
            h.train_loss,
            h.val_loss,
            h.train_l_pred,
            h.train_l_posit,
            h.train_l_prep,
            h.batch_size
        ));
    }
    out
}
