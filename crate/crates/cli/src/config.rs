//! Structured run configuration: a TOML file with per-command sections, a
//! dotted-path override mechanism for the command line, and a content hash
//! that ties every artifact to the exact configuration that produced it.

use std::path::Path;

use mlqoc_device::{make_distortion, DeviceConfig};
use mlqoc_pulse::{PulseSetConfig, ZERO_PAD_PIXELS};
use mlqoc_train::TrainConfig;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Device-simulation settings; everything has the standard-device default.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSection {
    /// Relaxation rate 1/T1 in kHz.
    pub gamma_khz: f64,
    /// Pure dephasing rate in kHz.
    pub gamma_phi_khz: f64,
    /// Integrator step in picoseconds.
    pub integrator_dt_ps: f64,
    /// Line-distortion strength λ; 0 disables distortion.
    pub distortion_lambda: f64,
    /// Seed of the random distortion draw.
    pub distortion_seed: u64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        Self {
            gamma_khz: 10.0 / 3.0,
            gamma_phi_khz: 5.0 / 3.0,
            integrator_dt_ps: 2.0,
            distortion_lambda: 0.0,
            distortion_seed: 0,
        }
    }
}

impl DeviceSection {
    /// Builds the simulated device this section describes. A nonzero λ draws
    /// a random line distortion covering pulses up to `max_pixels` long;
    /// its leading-block causality makes shorter pulses see the same line.
    pub fn build(&self, max_pixels: usize) -> Result<DeviceConfig, CliError> {
        let mut cfg = DeviceConfig::standard()?;
        cfg.gamma_khz = self.gamma_khz;
        cfg.gamma_phi_khz = self.gamma_phi_khz;
        cfg.integrator_dt_ps = self.integrator_dt_ps;
        if self.distortion_lambda != 0.0 {
            cfg.distortion = Some(make_distortion(
                self.distortion_lambda,
                max_pixels,
                1.0,
                self.distortion_seed,
            )?);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Dataset-generation settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSection {
    /// Number of pulses (= records) to generate.
    pub n_pulses: usize,
    /// Shots per record; 0 stores the exact probability.
    pub n_shots: u32,
    /// Master seed for pulse shapes and measurement draws.
    pub seed: u64,
    /// Inclusive total-duration range in pixels, padding included.
    pub duration_pixels: [usize; 2],
    /// Envelope-family proportions (flat, flat-top, random, DRAG, sinusoid).
    pub proportions: [f64; 5],
    /// Mean of the per-pulse intermediate-frequency draw, MHz.
    pub if_mean_mhz: f64,
    /// Standard deviation of the IF draw, MHz.
    pub if_std_mhz: f64,
}

impl Default for DataSection {
    fn default() -> Self {
        let p = PulseSetConfig::default();
        Self {
            n_pulses: 200_000,
            n_shots: 32,
            seed: 1,
            duration_pixels: [2 * ZERO_PAD_PIXELS + 1, 30],
            proportions: p.proportions,
            if_mean_mhz: p.if_mean_mhz,
            if_std_mhz: p.if_std_mhz,
        }
    }
}

impl DataSection {
    /// The pulse-set draw this section describes.
    pub fn pulse_set(&self) -> PulseSetConfig {
        PulseSetConfig {
            n_pulses: self.n_pulses,
            proportions: self.proportions,
            duration_pixels: (self.duration_pixels[0], self.duration_pixels[1]),
            seed: self.seed,
            if_mean_mhz: self.if_mean_mhz,
            if_std_mhz: self.if_std_mhz,
            ..PulseSetConfig::default()
        }
    }
}

/// Training settings; mirrors [`TrainConfig`] field by field.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
    pub initial_batch: usize,
    pub doubling_epochs: Vec<usize>,
    pub max_epochs: usize,
    pub patience: usize,
    pub split: [f64; 3],
    pub seed: u64,
    pub w_posit: f64,
    pub w_prep: f64,
    pub val_subsample: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            lr: t.lr,
            beta1: t.beta1,
            beta2: t.beta2,
            eps_adam: t.eps_adam,
            initial_batch: t.initial_batch,
            doubling_epochs: t.doubling_epochs,
            max_epochs: t.max_epochs,
            patience: t.patience,
            split: [t.split.0, t.split.1, t.split.2],
            seed: t.seed,
            w_posit: t.loss_weights.w_posit,
            w_prep: t.loss_weights.w_prep,
            val_subsample: t.val_subsample,
        }
    }
}

impl TrainSection {
    /// The loop configuration this section describes.
    pub fn build(&self) -> TrainConfig {
        TrainConfig {
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            eps_adam: self.eps_adam,
            initial_batch: self.initial_batch,
            doubling_epochs: self.doubling_epochs.clone(),
            max_epochs: self.max_epochs,
            patience: self.patience,
            split: (self.split[0], self.split[1], self.split[2]),
            seed: self.seed,
            loss_weights: mlqoc_model::LossWeights {
                w_posit: self.w_posit,
                w_prep: self.w_prep,
            },
            val_subsample: self.val_subsample,
        }
    }
}

/// Pulse-optimization settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QocSection {
    /// Gates optimized when no `--gate` flag is given.
    pub gates: Vec<String>,
    /// Gate duration in ns (total pixels = duration / 1 ns).
    pub duration_ns: f64,
    /// Random restarts per gate.
    pub n_restarts: usize,
    /// Adam iterations per restart.
    pub max_iters: usize,
    /// Adam learning rate, MHz units of the pixel amplitudes.
    pub lr: f64,
    /// Seed for restart initializations and Haar targets.
    pub seed: u64,
}

impl Default for QocSection {
    fn default() -> Self {
        Self {
            gates: vec!["rx:pi".into()],
            duration_ns: 20.0,
            n_restarts: 30,
            max_iters: 2000,
            lr: 0.001,
            seed: 7,
        }
    }
}

/// Distortion-study settings (the λ sweep).
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistortionSection {
    /// Distortion strengths to study.
    pub lambdas: Vec<f64>,
    /// Records per λ dataset.
    pub n_pulses: usize,
    /// Shots per record.
    pub n_shots: u32,
    /// Base seed; λ index offsets derive per-λ seeds.
    pub base_seed: u64,
}

impl Default for DistortionSection {
    fn default() -> Self {
        Self {
            lambdas: vec![0.0, 0.1, 0.2, 0.3, 0.4],
            n_pulses: 200_000,
            n_shots: 32,
            base_seed: 100,
        }
    }
}

/// Data-requirement sweep settings.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Dataset sizes of the sweep.
    pub n_pulses_grid: Vec<usize>,
    /// Shot counts of the sweep.
    pub n_shots_grid: Vec<u32>,
    /// Base seed; cell index offsets derive per-cell seeds.
    pub base_seed: u64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            n_pulses_grid: vec![25_000, 50_000, 100_000, 200_000],
            n_shots_grid: vec![32],
            base_seed: 200,
        }
    }
}

/// The complete configuration of one pipeline run.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub device: DeviceSection,
    pub data: DataSection,
    pub train: TrainSection,
    pub qoc: QocSection,
    pub distortion: DistortionSection,
    pub sweep: SweepSection,
}

impl StudyConfig {
    /// Builds the simulated device all commands of this run share.
    ///
    /// The distortion span covers both the longest dataset pulse and the
    /// optimization gate duration, so training data and gate evaluation see
    /// one and the same line.
    pub fn device(&self) -> Result<DeviceConfig, CliError> {
        let qoc_pixels = (self.qoc.duration_ns / 1.0).ceil() as usize;
        self.device.build(self.data.duration_pixels[1].max(qoc_pixels))
    }
}

/// A configuration plus the SHA-256 hash of its effective TOML content
/// (file plus overrides), quoted in every artifact the run emits.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub study: StudyConfig,
    pub hash: String,
}

/// Loads `path` (or pure defaults when `None`), applies `--set` overrides in
/// order, and hashes the effective configuration.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<LoadedConfig, CliError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        None => String::new(),
    };
    let mut table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("config file: {e}")))?;

    for spec in overrides {
        apply_override(&mut table, spec)?;
    }

    let effective =
        toml::to_string(&table).map_err(|e| CliError::Config(format!("reserialize: {e}")))?;
    let hash = format!("{:x}", Sha256::digest(effective.as_bytes()));

    let study: StudyConfig = table
        .try_into()
        .map_err(|e| CliError::Config(format!("config structure: {e}")))?;
    study.train.build().validate()?;
    Ok(LoadedConfig { study, hash })
}

/// Applies one `section.key=value` override; the value is parsed as TOML, so
/// strings, numbers, booleans, and arrays all work.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{spec}' is not key=value")))?;
    let value: toml::Value = format!("v = {raw}")
        .parse::<toml::Table>()
        .map_err(|e| CliError::Config(format!("override value '{raw}': {e}")))?
        .remove("v")
        .expect("just inserted");

    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!("override path '{path}' is malformed")));
    }
    let mut node = table;
    for k in &keys[..keys.len() - 1] {
        node = node
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| {
                CliError::Config(format!("override path '{path}' crosses a non-table"))
            })?;
    }
    node.insert(keys[keys.len() - 1].to_string(), value);
    Ok(())
}

/// Hash of an arbitrary artifact's bytes, for manifests.
pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}
