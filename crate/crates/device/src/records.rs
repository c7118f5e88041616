//! Measurement records: shot-averaged projective labels from evolved states.
//!
//! Each record captures one experiment: prepare a cardinal state, play a
//! pulse, measure along one Bloch axis, and record the fraction of `-1`
//! outcomes over a finite number of shots. The exact probability (available
//! only in simulation) rides along as ground truth for evaluating learned
//! models against the shot-noise floor.

use mlqoc_pulse::{rng_for, PixelPulse};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::state::{MEAS_AXES, PREP_STATES};
use crate::{cardinal_state, evolve, qubit_bloch, DensityMatrix, DeviceConfig, DeviceError};

/// Seed stream for per-record draws (disjoint from pulse-synthesis streams).
const RECORD_STREAM: u64 = 0x60;

/// Probabilities may leave [0, 1] by at most this much before the record is
/// considered corrupt rather than merely rounded.
const PROB_TOLERANCE: f64 = 1e-9;

/// One simulated experiment: pulse, preparation, measurement axis, label.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseRecord {
    /// The undistorted AWG waveform (what the control stack knows).
    pub pulse: PixelPulse,
    /// Cardinal preparation index, `0..6` in the order `+Z -Z +X -X +Y -Y`.
    pub prep: u8,
    /// Measurement axis, `0..3` in the order `X Y Z`.
    pub axis: u8,
    /// Shots averaged into the label; 0 means the exact probability.
    pub n_shots: u32,
    /// Observed fraction of `-1` outcomes.
    pub label: f64,
    /// Exact `-1` probability from the density matrix.
    pub truth: f64,
}

/// Exact probability of the `-1` outcome along `axis` for a lab-frame state
/// at time `t_ns`: `(1 - <σ_axis>) / 2` in the rotating frame.
pub fn exact_minus_probability(
    rho_lab: &DensityMatrix,
    t_ns: f64,
    axis: usize,
    cfg: &DeviceConfig,
) -> f64 {
    let b = qubit_bloch(rho_lab, t_ns, cfg.frame_freq_ghz);
    0.5 * (1.0 - b[axis])
}

/// Average `n_shots` Bernoulli outcomes of probability `prob`; `n_shots = 0`
/// returns the probability itself (the infinite-shot limit). Probabilities
/// a rounding error outside [0, 1] are clamped; anything worse is rejected.
pub fn sample_label(prob: f64, n_shots: u32, rng: &mut impl Rng) -> Result<f64, DeviceError> {
    if !prob.is_finite() || prob < -PROB_TOLERANCE || prob > 1.0 + PROB_TOLERANCE {
        return Err(DeviceError::BadProbability { value: prob });
    }
    let p = prob.clamp(0.0, 1.0);
    if n_shots == 0 {
        return Ok(p);
    }
    let bin = Binomial::new(n_shots as u64, p)
        .map_err(|_| DeviceError::BadProbability { value: p })?;
    Ok(bin.sample(rng) as f64 / n_shots as f64)
}

/// Simulate one record per pulse: preparation and axis drawn uniformly, the
/// label sampled from the exact final-time probability.
///
/// Per-record randomness comes from `(master_seed, record index)`, with the
/// fixed draw order preparation, axis, shots, so outputs are reproducible
/// and independent of thread count (records are simulated in parallel).
pub fn generate_records(
    pulses: &[PixelPulse],
    n_shots: u32,
    cfg: &DeviceConfig,
    master_seed: u64,
) -> Result<Vec<PulseRecord>, DeviceError> {
    generate_records_from(pulses, 0, n_shots, cfg, master_seed)
}

/// Like [`generate_records`], but numbering records from `first_index`.
///
/// Per-record randomness keys on the global index, so simulating a slice of a
/// pulse set with its global offset yields exactly the records the full run
/// would have produced — the basis for splitting dataset generation into
/// shards that merge back bit-identically.
pub fn generate_records_from(
    pulses: &[PixelPulse],
    first_index: u64,
    n_shots: u32,
    cfg: &DeviceConfig,
    master_seed: u64,
) -> Result<Vec<PulseRecord>, DeviceError> {
    cfg.validate()?;
    let n_levels = cfg.eigensystem.n_levels();
    pulses
        .par_iter()
        .enumerate()
        .map(|(idx, pulse)| {
            let mut rng = rng_for(master_seed, RECORD_STREAM, first_index + idx as u64);
            let prep: u8 = rng.random_range(0..PREP_STATES as u8);
            let axis: u8 = rng.random_range(0..MEAS_AXES as u8);
            let rho0 = cardinal_state(prep as usize, n_levels)?;
            let states = evolve(&rho0, pulse, cfg)?;
            let truth = exact_minus_probability(
                states.last().expect("at least the initial state"),
                pulse.duration_ns(),
                axis as usize,
                cfg,
            );
            let label = sample_label(truth, n_shots, &mut rng)?;
            Ok(PulseRecord { pulse: pulse.clone(), prep, axis, n_shots, label, truth })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shots_passes_probabilities_through() {
        let mut rng = rng_for(1, RECORD_STREAM, 0);
        assert_eq!(sample_label(0.37, 0, &mut rng).unwrap(), 0.37);
        assert_eq!(sample_label(-1e-12, 0, &mut rng).unwrap(), 0.0);
        assert!(sample_label(1.1, 32, &mut rng).is_err());
        assert!(sample_label(f64::NAN, 32, &mut rng).is_err());
    }

    #[test]
    fn shot_labels_are_multiples_of_one_over_n() {
        let mut rng = rng_for(2, RECORD_STREAM, 0);
        for _ in 0..50 {
            let label = sample_label(0.3, 32, &mut rng).unwrap();
            let scaled = label * 32.0;
            assert!((scaled - scaled.round()).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&label));
        }
    }

    #[test]
    fn shot_sampling_matches_binomial_statistics() {
        let mut rng = rng_for(3, RECORD_STREAM, 0);
        let (p, n, reps) = (0.25, 32, 4000);
        let labels: Vec<f64> =
            (0..reps).map(|_| sample_label(p, n, &mut rng).unwrap()).collect();
        let mean = labels.iter().sum::<f64>() / reps as f64;
        let var = labels.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / reps as f64;
        let expected_var = p * (1.0 - p) / n as f64;
        assert!((mean - p).abs() < 0.005, "mean {mean}");
        assert!((var / expected_var - 1.0).abs() < 0.1, "var {var} vs {expected_var}");
    }
}
