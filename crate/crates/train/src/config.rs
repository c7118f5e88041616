use mlqoc_model::LossWeights;

use crate::error::TrainError;

/// Hyperparameters of one training run.
///
/// The defaults are the published recipe: Adam at learning rate 0.001, an
/// initial mini-batch of 256 doubled at epochs 100, 200, 500 and 800, and a
/// 75/15/10 train/validation/test split. Early stopping (no validation
/// improvement for `patience` epochs) and the 1000-epoch cap are this
/// project's additions; none of the hyperparameters are tuned beyond that.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// Adam learning rate.
    pub lr: f64,
    /// Adam first-moment decay.
    pub beta1: f64,
    /// Adam second-moment decay.
    pub beta2: f64,
    /// Adam denominator offset.
    pub eps_adam: f64,
    /// Mini-batch size at epoch 1.
    pub initial_batch: usize,
    /// Epochs (1-based) at whose start the batch size doubles.
    pub doubling_epochs: Vec<usize>,
    /// Hard cap on the number of epochs.
    pub max_epochs: usize,
    /// Early-stop after this many epochs without validation improvement.
    pub patience: usize,
    /// Train / validation / test fractions; must sum to 1.
    pub split: (f64, f64, f64),
    /// Seed for the split shuffle, batch order, and validation subsample.
    pub seed: u64,
    /// Weights of the auxiliary loss terms.
    pub loss_weights: LossWeights,
    /// Epoch-level validation runs on a fixed subsample of at most this many
    /// records; the full validation set is used for the final evaluation.
    pub val_subsample: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps_adam: 1e-8,
            initial_batch: 256,
            doubling_epochs: vec![100, 200, 500, 800],
            max_epochs: 1000,
            patience: 100,
            split: (0.75, 0.15, 0.10),
            seed: 0,
            loss_weights: LossWeights::default(),
            val_subsample: 10_000,
        }
    }
}

impl TrainConfig {
    /// Checks every invariant the loop relies on.
    pub fn validate(&self) -> Result<(), TrainError> {
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(TrainError::BadConfig("learning rate must be positive"));
        }
        for (b, name) in [
            (self.beta1, "beta1 must lie in [0, 1)"),
            (self.beta2, "beta2 must lie in [0, 1)"),
        ] {
            if !(0.0..1.0).contains(&b) {
                return Err(TrainError::BadConfig(name));
            }
        }
        if !(self.eps_adam.is_finite() && self.eps_adam > 0.0) {
            return Err(TrainError::BadConfig("eps_adam must be positive"));
        }
        if self.initial_batch == 0 {
            return Err(TrainError::BadConfig("batch size must be at least 1"));
        }
        if self.max_epochs == 0 {
            return Err(TrainError::BadConfig("max_epochs must be at least 1"));
        }
        if self.patience == 0 {
            return Err(TrainError::BadConfig("patience must be at least 1"));
        }
        if self.val_subsample == 0 {
            return Err(TrainError::BadConfig("val_subsample must be at least 1"));
        }
        check_split(self.split)?;
        Ok(())
    }

    /// Mini-batch size in force during `epoch` (1-based): the initial size
    /// doubled once per scheduled epoch already reached.
    pub fn batch_size_at(&self, epoch: usize) -> usize {
        let doublings = self.doubling_epochs.iter().filter(|&&e| e <= epoch).count();
        self.initial_batch << doublings
    }
}

/// Shared split validation: positive fractions summing to one.
pub(crate) fn check_split(split: (f64, f64, f64)) -> Result<(), TrainError> {
    let (a, b, c) = split;
    if !(a > 0.0 && b > 0.0 && c > 0.0) {
        return Err(TrainError::BadConfig("split fractions must be positive"));
    }
    if (a + b + c - 1.0).abs() > 1e-9 {
        return Err(TrainError::BadConfig("split fractions must sum to 1"));
    }
    Ok(())
}
