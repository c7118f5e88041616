//! Batch generation of training-dataset pulses.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::{
    convolve_if, sample_envelope, EnvelopeKind, EnvelopeRanges, PixelPulse, PulseError,
    ZERO_PAD_PIXELS,
};

/// Dataset mix over [`EnvelopeKind::ALL`]: a quarter each of flat, flat-top
/// Gaussian, and uniform-random pulses, an eighth each of DRAG and
/// sinusoidal pulses.
pub const DATASET_PROPORTIONS: [f64; 5] = [0.25, 0.25, 0.25, 0.125, 0.125];

/// Configuration of one pulse-set draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSetConfig {
    /// Number of pulses to generate.
    pub n_pulses: usize,
    /// Family proportions over [`EnvelopeKind::ALL`]; must sum to 1.
    pub proportions: [f64; 5],
    /// Inclusive range of total pixel counts, padding included.
    pub duration_pixels: (usize, usize),
    /// Pixel duration in ns.
    pub dt_ns: f64,
    /// Mean of the per-pulse intermediate-frequency draw, MHz.
    pub if_mean_mhz: f64,
    /// Standard deviation of the per-pulse IF draw, MHz.
    pub if_std_mhz: f64,
    /// Carrier phase applied during IF convolution, rad.
    pub phase_rad: f64,
    /// Envelope parameter ranges.
    pub ranges: EnvelopeRanges,
    /// Master seed; all randomness derives from it.
    pub seed: u64,
}

impl Default for PulseSetConfig {
    fn default() -> Self {
        Self {
            n_pulses: 0,
            proportions: DATASET_PROPORTIONS,
            duration_pixels: (2 * ZERO_PAD_PIXELS + 1, 30),
            dt_ns: 1.0,
            if_mean_mhz: 100.0,
            if_std_mhz: 1.0,
            phase_rad: 0.0,
            ranges: EnvelopeRanges::default(),
            seed: 0,
        }
    }
}

/// One generated pulse with the metadata of its draw.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPulse {
    /// The AWG waveform after IF convolution.
    pub pulse: PixelPulse,
    /// Envelope family the pulse was drawn from.
    pub family: EnvelopeKind,
    /// Intermediate frequency used for this pulse, MHz.
    pub if_mhz: f64,
}

/// Exact family counts for `n` pulses by largest-remainder apportionment:
/// floor each share, then hand out the remaining pulses by descending
/// fractional part (ties to the earlier family).
pub fn family_counts(n: usize, proportions: &[f64; 5]) -> Result<[usize; 5], PulseError> {
    let sum: f64 = proportions.iter().sum();
    if proportions.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(PulseError::BadProportions { sum });
    }
    let mut counts = [0usize; 5];
    let mut fractions = [(0.0f64, 0usize); 5];
    let mut assigned = 0;
    for (i, &p) in proportions.iter().enumerate() {
        let share = p * n as f64;
        counts[i] = share.floor() as usize;
        assigned += counts[i];
        fractions[i] = (share - share.floor(), i);
    }
    // Descending fractional part, ascending index on ties.
    fractions.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for &(_, i) in fractions.iter().take(n - assigned) {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Generate `cfg.n_pulses` dataset pulses with per-pulse metadata.
///
/// Determinism contract: the family assignment comes from one shuffle stream
/// and each pulse draws from its own `(seed, index)` stream, so the output
/// is identical across runs and machines for a fixed config. The per-pulse
/// draw order is duration, intermediate frequency, then envelope parameters.
pub fn build_dataset_pulses_with_meta(
    cfg: &PulseSetConfig,
) -> Result<Vec<DatasetPulse>, PulseError> {
    let counts = family_counts(cfg.n_pulses, &cfg.proportions)?;
    let (lo, hi) = cfg.duration_pixels;
    if lo < 2 * ZERO_PAD_PIXELS + 1 || hi < lo {
        return Err(PulseError::TooFewPixels { min: 2 * ZERO_PAD_PIXELS + 1, got: lo });
    }
    let if_dist = Normal::new(cfg.if_mean_mhz, cfg.if_std_mhz)
        .map_err(|_| PulseError::BadSettings("IF std must be non-negative and finite"))?;

    let mut families = Vec::with_capacity(cfg.n_pulses);
    for (kind, &count) in EnvelopeKind::ALL.iter().zip(&counts) {
        families.extend(std::iter::repeat_n(*kind, count));
    }
    families.shuffle(&mut crate::rng_for(cfg.seed, streams::FAMILY_SHUFFLE, 0));

    families
        .into_iter()
        .enumerate()
        .map(|(index, family)| {
            let mut rng = crate::rng_for(cfg.seed, streams::PULSE, index as u64);
            let n_pixels = rng.random_range(lo..=hi);
            let if_mhz = if_dist.sample(&mut rng);
            let (i_env, q_env) = sample_envelope(family, &cfg.ranges, n_pixels, cfg.dt_ns, &mut rng)?;
            let pulse = convolve_if(&i_env, &q_env, cfg.dt_ns, if_mhz, cfg.phase_rad)?;
            Ok(DatasetPulse { pulse, family, if_mhz })
        })
        .collect()
}

/// Generate dataset pulses, discarding the metadata.
pub fn build_dataset_pulses(cfg: &PulseSetConfig) -> Result<Vec<PixelPulse>, PulseError> {
    Ok(build_dataset_pulses_with_meta(cfg)?.into_iter().map(|d| d.pulse).collect())
}

/// Stream ids used by dataset generation (part of the determinism contract).
mod streams {
    pub const FAMILY_SHUFFLE: u64 = 0x50;
    pub const PULSE: u64 = 0x51;
}
