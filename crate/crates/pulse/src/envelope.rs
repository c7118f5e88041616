//! Envelope families for training datasets.
//!
//! Envelopes are generated *before* any oscillating component: they are the
//! smooth (or deliberately rough) shapes later convolved with the
//! intermediate frequency. Each family leaves the first and last
//! [`ZERO_PAD_PIXELS`](crate::ZERO_PAD_PIXELS) pixels at exactly zero.

use rand::Rng;

use crate::{PulseError, ZERO_PAD_PIXELS};

/// The five envelope shapes mixed into the datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvelopeKind {
    /// Constant amplitude over the live region, Q = 0.
    Flat,
    /// Gaussian rise, flat plateau, Gaussian fall; Q = 0.
    FlatTopGaussian,
    /// Every live pixel of both channels drawn independently.
    UniformRandom,
    /// Gaussian on I with a derivative-shaped orthogonal component on Q.
    GaussianDrag,
    /// A small sum of sinusoidal modes on each channel independently.
    Sinusoidal,
}

impl EnvelopeKind {
    /// All families, in the order used for dataset proportions.
    pub const ALL: [EnvelopeKind; 5] = [
        EnvelopeKind::Flat,
        EnvelopeKind::FlatTopGaussian,
        EnvelopeKind::UniformRandom,
        EnvelopeKind::GaussianDrag,
        EnvelopeKind::Sinusoidal,
    ];
}

/// Parameter ranges for the random envelope draws.
///
/// All bounds are symmetric: an entry `x` means the value is drawn from
/// `U(-x, x)`. Defaults span the drive strengths needed for sub-30 ns gates
/// (a 20 ns π pulse needs roughly 31 MHz) with headroom below the 100 MHz
/// clamp used during pulse optimization.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeRanges {
    /// Flat-family amplitude bound, MHz.
    pub flat_amp_mhz: f64,
    /// Flat-top plateau and DRAG peak bound, MHz.
    pub peak_amp_mhz: f64,
    /// Gaussian width draw `U(lo, hi)` in ns (flat-top edges and DRAG body).
    pub gauss_std_ns: (f64, f64),
    /// Uniform-random per-pixel bound on both channels, MHz.
    pub random_amp_mhz: f64,
    /// Relative DRAG weight bound; the quadrature is `w·σ·dI/dt`.
    pub drag_weight: f64,
    /// Sinusoidal mode count range, inclusive.
    pub sine_modes: (usize, usize),
    /// Sinusoidal period draw `U(lo, hi)` in ns.
    pub sine_period_ns: (f64, f64),
    /// Per-channel sinusoidal amplitude budget, MHz; each of the `m` modes
    /// draws from `U(-x, x)/m` so the channel stays within the budget.
    pub sine_amp_mhz: f64,
}

impl Default for EnvelopeRanges {
    fn default() -> Self {
        Self {
            flat_amp_mhz: 50.0,
            peak_amp_mhz: 100.0,
            gauss_std_ns: (1.0, 5.0),
            random_amp_mhz: 50.0,
            drag_weight: 0.5,
            sine_modes: (1, 3),
            sine_period_ns: (4.0, 30.0),
            sine_amp_mhz: 50.0,
        }
    }
}

/// Draw one envelope pair `(I, Q)` of `n_pixels` pixels, in MHz.
///
/// The first and last two pixels are left at zero; the live region covers
/// the rest, with continuous shapes evaluated at pixel centers
/// `(k + 0.5)·dt_ns`. The random draw order within each family is fixed and
/// part of the determinism contract: identical RNG state yields identical
/// envelopes.
pub fn sample_envelope(
    kind: EnvelopeKind,
    ranges: &EnvelopeRanges,
    n_pixels: usize,
    dt_ns: f64,
    rng: &mut impl Rng,
) -> Result<(Vec<f64>, Vec<f64>), PulseError> {
    let min = 2 * ZERO_PAD_PIXELS + 1;
    if n_pixels < min {
        return Err(PulseError::TooFewPixels { min, got: n_pixels });
    }
    let mut i_env = vec![0.0; n_pixels];
    let mut q_env = vec![0.0; n_pixels];
    let live = ZERO_PAD_PIXELS..n_pixels - ZERO_PAD_PIXELS;
    // Live-region boundaries in time (edges of the first/last live pixel).
    let t_lo = ZERO_PAD_PIXELS as f64 * dt_ns;
    let t_hi = (n_pixels - ZERO_PAD_PIXELS) as f64 * dt_ns;
    let center = |k: usize| (k as f64 + 0.5) * dt_ns;

    match kind {
        EnvelopeKind::Flat => {
            let a = rng.random_range(-ranges.flat_amp_mhz..=ranges.flat_amp_mhz);
            for k in live {
                i_env[k] = a;
            }
        }
        EnvelopeKind::FlatTopGaussian => {
            let peak = rng.random_range(-ranges.peak_amp_mhz..=ranges.peak_amp_mhz);
            let std = rng.random_range(ranges.gauss_std_ns.0..=ranges.gauss_std_ns.1);
            // Plateau between the ramp centers, two edge-stds inside the
            // live region; short pulses degenerate to a single bump.
            let mid = 0.5 * (t_lo + t_hi);
            let ta = (t_lo + 2.0 * std).min(mid);
            let tb = (t_hi - 2.0 * std).max(mid);
            for k in live {
                let t = center(k);
                let arg = if t < ta {
                    (t - ta) / std
                } else if t > tb {
                    (t - tb) / std
                } else {
                    0.0
                };
                i_env[k] = peak * (-0.5 * arg * arg).exp();
            }
        }
        EnvelopeKind::UniformRandom => {
            let r = ranges.random_amp_mhz;
            for k in live {
                i_env[k] = rng.random_range(-r..=r);
                q_env[k] = rng.random_range(-r..=r);
            }
        }
        EnvelopeKind::GaussianDrag => {
            let peak = rng.random_range(-ranges.peak_amp_mhz..=ranges.peak_amp_mhz);
            let std = rng.random_range(ranges.gauss_std_ns.0..=ranges.gauss_std_ns.1);
            let weight = rng.random_range(-ranges.drag_weight..=ranges.drag_weight);
            let tc = 0.5 * (t_lo + t_hi);
            for k in live {
                let t = center(k);
                let g = peak * (-0.5 * ((t - tc) / std).powi(2)).exp();
                i_env[k] = g;
                // Q = w·σ·dI/dt, the scaled-derivative orthogonal component.
                q_env[k] = -weight * (t - tc) / std * g;
            }
        }
        EnvelopeKind::Sinusoidal => {
            for env in [&mut i_env, &mut q_env] {
                let modes = rng.random_range(ranges.sine_modes.0..=ranges.sine_modes.1);
                for _ in 0..modes {
                    let amp =
                        rng.random_range(-ranges.sine_amp_mhz..=ranges.sine_amp_mhz) / modes as f64;
                    let period =
                        rng.random_range(ranges.sine_period_ns.0..=ranges.sine_period_ns.1);
                    let phase = rng.random_range(0.0..std::f64::consts::TAU);
                    #[allow(clippy::needless_range_loop)]
                    for k in ZERO_PAD_PIXELS..n_pixels - ZERO_PAD_PIXELS {
                        let t = center(k);
                        env[k] += amp * (std::f64::consts::TAU * t / period + phase).sin();
                    }
                }
            }
        }
    }
    Ok((i_env, q_env))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn rng() -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(42)
    }

    #[test]
    fn flat_is_constant_on_live_region() {
        let (i, q) =
            sample_envelope(EnvelopeKind::Flat, &EnvelopeRanges::default(), 12, 1.0, &mut rng())
                .unwrap();
        let a = i[2];
        assert!(a.abs() <= 50.0);
        assert!(i[2..10].iter().all(|&x| x == a));
        assert!(i[..2].iter().chain(&i[10..]).all(|&x| x == 0.0));
        assert!(q.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_drag_weight_kills_quadrature() {
        let ranges = EnvelopeRanges { drag_weight: 0.0, ..Default::default() };
        let (i, q) =
            sample_envelope(EnvelopeKind::GaussianDrag, &ranges, 20, 1.0, &mut rng()).unwrap();
        assert!(q.iter().all(|&x| x == 0.0));
        assert!(i[2..18].iter().any(|&x| x != 0.0));
    }

    #[test]
    fn drag_quadrature_is_odd_around_center() {
        let (_, q) = sample_envelope(
            EnvelopeKind::GaussianDrag,
            &EnvelopeRanges::default(),
            24,
            1.0,
            &mut rng(),
        )
        .unwrap();
        // Live region 2..22 is symmetric around t = 12; the derivative shape
        // must be antisymmetric: q(center + d) = -q(center - d).
        for d in 0..10 {
            assert!((q[12 + d] + q[11 - d]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_pulses_too_short_for_padding() {
        let err =
            sample_envelope(EnvelopeKind::Flat, &EnvelopeRanges::default(), 4, 1.0, &mut rng());
        assert!(err.is_err());
    }

    #[test]
    fn all_families_respect_padding_and_bounds() {
        let ranges = EnvelopeRanges::default();
        for kind in EnvelopeKind::ALL {
            let (i, q) = sample_envelope(kind, &ranges, 30, 1.0, &mut rng()).unwrap();
            for ch in [&i, &q] {
                assert!(ch[..2].iter().all(|&x| x == 0.0));
                assert!(ch[28..].iter().all(|&x| x == 0.0));
                assert!(ch.iter().all(|&x| x.abs() <= 100.0));
            }
        }
    }
}
