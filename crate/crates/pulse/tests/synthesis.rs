//! Statistical and determinism checks on dataset pulse generation.

use mlqoc_pulse::{
    build_dataset_pulses_with_meta, rng_for, sample_envelope, EnvelopeKind, EnvelopeRanges,
    PulseSetConfig,
};

fn config(n: usize, seed: u64) -> PulseSetConfig {
    PulseSetConfig { n_pulses: n, seed, ..Default::default() }
}

#[test]
fn generation_is_deterministic() {
    let a = build_dataset_pulses_with_meta(&config(64, 9)).unwrap();
    let b = build_dataset_pulses_with_meta(&config(64, 9)).unwrap();
    assert_eq!(a, b);
    let c = build_dataset_pulses_with_meta(&config(64, 10)).unwrap();
    assert_ne!(a, c);
}

#[test]
fn pulses_respect_padding_bounds_and_durations() {
    let set = build_dataset_pulses_with_meta(&config(500, 3)).unwrap();
    for d in &set {
        assert!(d.pulse.has_zero_padding());
        assert!(d.pulse.max_abs_mhz() <= 100.0 + 1e-9);
        let n = d.pulse.n_pixels();
        assert!((5..=30).contains(&n), "duration {n}");
    }
}

#[test]
fn family_mix_matches_proportions_exactly() {
    let set = build_dataset_pulses_with_meta(&config(1000, 5)).unwrap();
    let mut counts = [0usize; 5];
    for d in &set {
        let idx = EnvelopeKind::ALL.iter().position(|&k| k == d.family).unwrap();
        counts[idx] += 1;
    }
    assert_eq!(counts, [250, 250, 250, 125, 125]);
}

/// The per-pulse intermediate frequency is drawn from N(100 MHz, 1 MHz).
#[test]
fn intermediate_frequency_statistics() {
    let set = build_dataset_pulses_with_meta(&config(10_000, 21)).unwrap();
    let n = set.len() as f64;
    let mean = set.iter().map(|d| d.if_mhz).sum::<f64>() / n;
    let var = set.iter().map(|d| (d.if_mhz - mean).powi(2)).sum::<f64>() / (n - 1.0);
    assert!((mean - 100.0).abs() < 0.05, "mean {mean}");
    assert!((var.sqrt() - 1.0).abs() < 0.05, "std {}", var.sqrt());
}

/// Live pixels of the uniform-random family follow U(-50, 50):
/// Kolmogorov-Smirnov statistic against the exact CDF stays small.
#[test]
fn uniform_random_family_passes_ks_test() {
    let ranges = EnvelopeRanges::default();
    let mut samples = Vec::with_capacity(100_000);
    let mut index = 0;
    while samples.len() < 100_000 {
        let mut rng = rng_for(77, 0xAA, index);
        let (i_env, q_env) =
            sample_envelope(EnvelopeKind::UniformRandom, &ranges, 30, 1.0, &mut rng).unwrap();
        samples.extend_from_slice(&i_env[2..28]);
        samples.extend_from_slice(&q_env[2..28]);
        index += 1;
    }
    samples.truncate(100_000);
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &x) in samples.iter().enumerate() {
        let cdf = ((x + 50.0) / 100.0).clamp(0.0, 1.0);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        ks = ks.max((cdf - lo).abs()).max((hi - cdf).abs());
    }
    assert!(ks < 0.01, "KS statistic {ks}");
}

/// Sinusoidal pulses carry drive on both quadratures (independent draws).
#[test]
fn sinusoidal_family_populates_both_channels() {
    let ranges = EnvelopeRanges::default();
    let mut rng = rng_for(4, 0xBB, 0);
    let (i_env, q_env) =
        sample_envelope(EnvelopeKind::Sinusoidal, &ranges, 30, 1.0, &mut rng).unwrap();
    assert!(i_env.iter().any(|&x| x.abs() > 1e-6));
    assert!(q_env.iter().any(|&x| x.abs() > 1e-6));
}
