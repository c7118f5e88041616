//! IQ sideband mixing of the filtered AWG channels with the local oscillator.

use crate::{FilteredPulse, GaussianFilter, PixelPulse};

/// Mix one sample: `Ω = S_I·cos(2π·f_LO·t) + S_Q·sin(2π·f_LO·t)`.
///
/// With `S_I = A·cos(ω_IF t + φ)` and `S_Q = −A·sin(ω_IF t + φ)` this is
/// exactly `A·cos((ω_LO + ω_IF)·t + φ)`: a single tone at the upper
/// sideband.
#[inline]
pub fn mix_sample(s_i: f64, s_q: f64, omega_lo_ghz: f64, t_ns: f64) -> f64 {
    let theta = std::f64::consts::TAU * omega_lo_ghz * t_ns;
    s_i * theta.cos() + s_q * theta.sin()
}

/// Mix filtered channels into the drive Ω(t) on their grid, MHz.
pub fn mix_to_carrier(filtered: &FilteredPulse, omega_lo_ghz: f64) -> Vec<f64> {
    filtered
        .t_ns
        .iter()
        .zip(filtered.s_i.iter().zip(&filtered.s_q))
        .map(|(&t, (&si, &sq))| mix_sample(si, sq, omega_lo_ghz, t))
        .collect()
}

/// Full-chain drive at one instant: filter both pixel channels at `t`, then
/// mix with the local oscillator. This is the integrator's entry point.
pub fn drive_at(filter: &GaussianFilter, pulse: &PixelPulse, omega_lo_ghz: f64, t_ns: f64) -> f64 {
    let (si, sq) = filter.pulse_at(pulse, t_ns);
    mix_sample(si, sq, omega_lo_ghz, t_ns)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_in_phase_gives_cosine() {
        for t in [0.0, 0.123, 7.7] {
            let expected = (std::f64::consts::TAU * 6.198 * t).cos();
            assert!((mix_sample(1.0, 0.0, 6.198, t) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_channels_give_zero_drive() {
        assert_eq!(mix_sample(0.0, 0.0, 6.198, 3.21), 0.0);
    }
}
