use crate::PulseError;

/// Number of zero pixels enforced at each end of every generated pulse.
///
/// The padding keeps gates from bleeding outside their nominal window and
/// gives the bandwidth filter room to settle before and after the drive.
pub const ZERO_PAD_PIXELS: usize = 2;

/// A discretized AWG waveform: one real amplitude per pixel per quadrature.
///
/// Amplitudes are in MHz (ordinary frequency). Pixel `k` represents the
/// interval `[k·dt, (k+1)·dt)` and is sampled at its center
/// `(k + 0.5)·dt_ns`; downstream filtering and tests rely on that placement.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelPulse {
    /// Pixel duration in ns (1.0 for all datasets in this project).
    pub dt_ns: f64,
    /// In-phase channel, one value per pixel, MHz.
    pub s_i: Vec<f64>,
    /// Quadrature channel, one value per pixel, MHz.
    pub s_q: Vec<f64>,
}

impl PixelPulse {
    /// Build a pulse, checking that the channels line up and stay finite.
    pub fn new(dt_ns: f64, s_i: Vec<f64>, s_q: Vec<f64>) -> Result<Self, PulseError> {
        if s_i.len() != s_q.len() {
            return Err(PulseError::ChannelMismatch { i_len: s_i.len(), q_len: s_q.len() });
        }
        if !dt_ns.is_finite() || dt_ns <= 0.0 {
            return Err(PulseError::BadSettings("pixel duration must be positive"));
        }
        if s_i.iter().chain(&s_q).any(|a| !a.is_finite()) {
            return Err(PulseError::NonFinite { context: "pixel amplitudes" });
        }
        Ok(Self { dt_ns, s_i, s_q })
    }

    /// An all-zero pulse of `n_pixels` pixels.
    pub fn zeros(n_pixels: usize, dt_ns: f64) -> Self {
        Self { dt_ns, s_i: vec![0.0; n_pixels], s_q: vec![0.0; n_pixels] }
    }

    /// Number of pixels (identical for both channels).
    pub fn n_pixels(&self) -> usize {
        self.s_i.len()
    }

    /// Total duration in ns.
    pub fn duration_ns(&self) -> f64 {
        self.n_pixels() as f64 * self.dt_ns
    }

    /// Center time of pixel `k` in ns.
    pub fn pixel_center_ns(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.dt_ns
    }

    /// True when the first and last [`ZERO_PAD_PIXELS`] pixels of both
    /// channels are exactly zero.
    pub fn has_zero_padding(&self) -> bool {
        let n = self.n_pixels();
        if n < 2 * ZERO_PAD_PIXELS {
            return false;
        }
        let pad = |ch: &[f64]| {
            ch[..ZERO_PAD_PIXELS].iter().all(|&a| a == 0.0)
                && ch[n - ZERO_PAD_PIXELS..].iter().all(|&a| a == 0.0)
        };
        pad(&self.s_i) && pad(&self.s_q)
    }

    /// Largest absolute amplitude over both channels, MHz.
    pub fn max_abs_mhz(&self) -> f64 {
        self.s_i.iter().chain(&self.s_q).fold(0.0, |m, &a| m.max(a.abs()))
    }
}

/// Settings of the mixing chain between the AWG pixels and the qubit drive.
#[derive(Debug, Clone, PartialEq)]
pub struct MixSettings {
    /// Local-oscillator frequency in GHz.
    pub omega_lo_ghz: f64,
    /// Nominal intermediate frequency in MHz; the drive reaches the qubit at
    /// the upper sideband `omega_lo_ghz + omega_if_mhz·1e-3`.
    pub omega_if_mhz: f64,
    /// Carrier phase φ in radians applied during IF convolution.
    pub phase_rad: f64,
    /// Gaussian bandwidth-filter standard deviation in MHz (frequency
    /// domain); the time-domain kernel std is `1/(2π·σ_f)`.
    pub filter_sigma_mhz: f64,
    /// Fine-grid points per pixel when materializing continuous signals;
    /// must resolve the ~GHz carrier for spectral checks.
    pub oversample: usize,
}

impl Default for MixSettings {
    fn default() -> Self {
        Self {
            omega_lo_ghz: 6.198,
            omega_if_mhz: 100.0,
            phase_rad: 0.0,
            filter_sigma_mhz: 250.0,
            oversample: 128,
        }
    }
}

impl MixSettings {
    /// Check the invariants the synthesis chain relies on.
    pub fn validate(&self) -> Result<(), PulseError> {
        if !(self.filter_sigma_mhz > 0.0) {
            return Err(PulseError::BadSettings("filter sigma must be positive"));
        }
        if self.oversample < 100 {
            return Err(PulseError::BadSettings("oversample must be at least 100"));
        }
        if !(self.omega_lo_ghz > 0.0) {
            return Err(PulseError::BadSettings("LO frequency must be positive"));
        }
        if !self.omega_if_mhz.is_finite() || !self.phase_rad.is_finite() {
            return Err(PulseError::BadSettings("IF and phase must be finite"));
        }
        Ok(())
    }

    /// Time-domain standard deviation of the bandwidth filter in ns.
    pub fn sigma_t_ns(&self) -> f64 {
        1e3 / (2.0 * std::f64::consts::PI * self.filter_sigma_mhz)
    }

    /// Frequency the drive is meant to reach, GHz.
    pub fn upper_sideband_ghz(&self) -> f64 {
        self.omega_lo_ghz + self.omega_if_mhz * 1e-3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_conversion_matches_definition() {
        let s = MixSettings::default();
        assert!((s.sigma_t_ns() - 0.636_619_772_367_581_3).abs() < 1e-12);
        assert!((s.upper_sideband_ghz() - 6.298).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_channels() {
        assert!(PixelPulse::new(1.0, vec![0.0; 3], vec![0.0; 4]).is_err());
        assert!(PixelPulse::new(1.0, vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn padding_detection() {
        let mut p = PixelPulse::zeros(8, 1.0);
        p.s_i[3] = 5.0;
        assert!(p.has_zero_padding());
        p.s_q[7] = 1.0;
        assert!(!p.has_zero_padding());
    }

    #[test]
    fn rejects_low_oversample() {
        let s = MixSettings { oversample: 64, ..Default::default() };
        assert!(s.validate().is_err());
        assert!(MixSettings::default().validate().is_ok());
    }
}
