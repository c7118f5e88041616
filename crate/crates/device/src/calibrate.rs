//! Reference gate construction and amplitude calibration.

use mlqoc_pulse::{convolve_if, PixelPulse, ZERO_PAD_PIXELS};

use crate::{cardinal_state, evolve, DeviceConfig, DeviceError};

/// A calibrated π pulse together with its calibration summary.
#[derive(Debug, Clone)]
pub struct PiCalibration {
    /// The IF-modulated pixel waveform, ready for the device.
    pub pulse: PixelPulse,
    /// Peak AWG envelope amplitude, MHz.
    pub peak_mhz: f64,
    /// Excited-state population the pulse reaches from the ground state.
    pub p1: f64,
}

/// Half-sine envelope spanning `sine_ns` on both quadratures, with the
/// standard zero padding added on each side, convolved with the device IF.
///
/// The envelope is `peak·sin(π·(t - t0)/sine_ns)` sampled at pixel centers,
/// so a "20 ns sinusoidal gate" is 20 ns of sine lobe inside a 24-pixel
/// waveform.
pub fn half_sine_pulse(
    peak_mhz: f64,
    sine_ns: f64,
    dt_ns: f64,
    if_mhz: f64,
    phase_rad: f64,
) -> Result<PixelPulse, DeviceError> {
    if !(sine_ns > 0.0 && dt_ns > 0.0) {
        return Err(DeviceError::BadConfig("half-sine pulse needs positive durations"));
    }
    let live = (sine_ns / dt_ns).round() as usize;
    if live < 1 || (sine_ns - live as f64 * dt_ns).abs() > 1e-9 {
        return Err(DeviceError::BadConfig("sine span must be a whole number of pixels"));
    }
    let n = live + 2 * ZERO_PAD_PIXELS;
    let t0 = ZERO_PAD_PIXELS as f64 * dt_ns;
    let env: Vec<f64> = (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) * dt_ns;
            if t < t0 || t > t0 + sine_ns {
                0.0
            } else {
                peak_mhz * (std::f64::consts::PI * (t - t0) / sine_ns).sin()
            }
        })
        .collect();
    Ok(convolve_if(&env, &env, dt_ns, if_mhz, phase_rad)?)
}

/// Calibrate the half-sine π pulse: search the peak amplitude that maximizes
/// the excited-state population reached from `|0>` on the configured device
/// (golden-section search; the population is unimodal across the bracket).
pub fn calibrated_pi_pulse(cfg: &DeviceConfig, sine_ns: f64) -> Result<PiCalibration, DeviceError> {
    cfg.validate()?;
    let n_levels = cfg.eigensystem.n_levels();
    let ground = cardinal_state(0, n_levels)?;

    let p1_at = |peak: f64| -> Result<f64, DeviceError> {
        let pulse =
            half_sine_pulse(peak, sine_ns, 1.0, cfg.mix.omega_if_mhz, cfg.mix.phase_rad)?;
        let states = evolve(&ground, &pulse, cfg)?;
        Ok(states.last().expect("final state").population(1))
    };

    // Golden-section maximization over a bracket comfortably containing the
    // π amplitude for 10-30 ns sine spans.
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (15.0, 60.0);
    let mut a = hi - phi * (hi - lo);
    let mut b = lo + phi * (hi - lo);
    let mut fa = p1_at(a)?;
    let mut fb = p1_at(b)?;
    for _ in 0..30 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = p1_at(b)?;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = p1_at(a)?;
        }
    }
    let peak = 0.5 * (lo + hi);
    let p1 = p1_at(peak)?;
    let pulse = half_sine_pulse(peak, sine_ns, 1.0, cfg.mix.omega_if_mhz, cfg.mix.phase_rad)?;
    Ok(PiCalibration { pulse, peak_mhz: peak, p1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_sine_has_padding_and_peak_at_center() {
        let p = half_sine_pulse(30.0, 20.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(p.n_pixels(), 24);
        assert!(p.has_zero_padding());
        // With zero IF the I channel is the bare envelope; its maximum sits
        // at the sine midpoint and stays below the nominal peak only by the
        // half-pixel sampling offset.
        let max = p.s_i.iter().cloned().fold(0.0f64, f64::max);
        assert!(max > 29.9 && max <= 30.0, "max = {max}");
        assert!(p.s_i[12] >= p.s_i[6]);
    }

    #[test]
    fn rejects_fractional_sine_spans() {
        assert!(half_sine_pulse(30.0, 20.3, 1.0, 100.0, 0.0).is_err());
        assert!(half_sine_pulse(30.0, -2.0, 1.0, 100.0, 0.0).is_err());
    }
}
