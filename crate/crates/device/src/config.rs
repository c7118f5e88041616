use mlqoc_pulse::MixSettings;
use mlqoc_transmon::{calibrate_ec, TransmonEigensystem, TransmonParams};

use crate::{DeviceError, DistortionSpec};

/// Everything needed to evolve a pulse on the simulated device.
///
/// Decoherence rates are ordinary rates in kHz: `gamma_khz = 1e-3 / T1[ms]`.
/// The defaults (10/3 kHz relaxation, 5/3 kHz pure dephasing) give
/// `T1 = T2 = 300 µs` through `1/T2 = gamma/2 + gamma_phi`.
#[derive(Debug, Clone)]
pub struct DeviceConfig {
    /// Level energies and charge operator of the driven transmon.
    pub eigensystem: TransmonEigensystem,
    /// Relaxation rate `gamma = 1/T1`, kHz.
    pub gamma_khz: f64,
    /// Pure dephasing rate `gamma_phi`, kHz.
    pub gamma_phi_khz: f64,
    /// Upconversion chain between AWG pixels and the drive.
    pub mix: MixSettings,
    /// Runge-Kutta step in picoseconds. Must resolve the drive carrier:
    /// steps on which the carrier advances more than 0.1 rad are rejected.
    pub integrator_dt_ps: f64,
    /// Rotating-frame frequency for Bloch readout, GHz; the qubit frequency
    /// for all standard configurations.
    pub frame_freq_ghz: f64,
    /// Optional classical line distortion applied to pixels before filtering.
    pub distortion: Option<DistortionSpec>,
}

impl DeviceConfig {
    /// Device with explicit eigensystem and mixing chain; decoherence and
    /// integration defaults, readout frame locked to the qubit frequency.
    pub fn new(eigensystem: TransmonEigensystem, mix: MixSettings) -> Self {
        let frame_freq_ghz = eigensystem.omega_q_ghz();
        Self {
            eigensystem,
            gamma_khz: 10.0 / 3.0,
            gamma_phi_khz: 5.0 / 3.0,
            mix,
            integrator_dt_ps: 2.0,
            frame_freq_ghz,
            distortion: None,
        }
    }

    /// The standard device used throughout this project: transmon calibrated
    /// to a 6.298 GHz qubit at `E_J/E_C = 110`, five levels, driven at the
    /// upper sideband of a 6.198 GHz LO with a 100 MHz IF.
    pub fn standard() -> Result<Self, DeviceError> {
        let template = TransmonParams::with_ratio(0.22, 110.0);
        let (_, sys) = calibrate_ec(6.298, 110.0, &template)?;
        Ok(Self::new(sys, MixSettings::default()))
    }

    /// Integrator step in ns.
    pub fn dt_ns(&self) -> f64 {
        self.integrator_dt_ps * 1e-3
    }

    /// Relaxation rate in 1/ns.
    pub fn gamma_per_ns(&self) -> f64 {
        self.gamma_khz * 1e-6
    }

    /// Pure dephasing rate in 1/ns.
    pub fn gamma_phi_per_ns(&self) -> f64 {
        self.gamma_phi_khz * 1e-6
    }

    /// Total transverse decay rate `1/T2 = gamma/2 + gamma_phi`, 1/ns.
    pub fn gamma_2_per_ns(&self) -> f64 {
        0.5 * self.gamma_per_ns() + self.gamma_phi_per_ns()
    }

    /// Check ranges and that the step resolves the carrier.
    pub fn validate(&self) -> Result<(), DeviceError> {
        if self.eigensystem.n_levels() < 2 {
            return Err(DeviceError::BadConfig("eigensystem needs at least two levels"));
        }
        if !(self.gamma_khz >= 0.0 && self.gamma_khz.is_finite()) {
            return Err(DeviceError::BadConfig("gamma_khz must be finite and non-negative"));
        }
        if !(self.gamma_phi_khz >= 0.0 && self.gamma_phi_khz.is_finite()) {
            return Err(DeviceError::BadConfig("gamma_phi_khz must be finite and non-negative"));
        }
        if !(self.integrator_dt_ps > 0.0 && self.integrator_dt_ps <= 5.0) {
            return Err(DeviceError::BadConfig("integrator_dt_ps must be in (0, 5]"));
        }
        if !(self.frame_freq_ghz.is_finite() && self.frame_freq_ghz >= 0.0) {
            return Err(DeviceError::BadConfig("frame_freq_ghz must be finite and non-negative"));
        }
        self.mix.validate()?;
        let phase_rad =
            std::f64::consts::TAU * self.mix.upper_sideband_ghz() * self.dt_ns();
        if phase_rad > 0.1 {
            return Err(DeviceError::StepTooCoarse { phase_rad });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_device_is_resonant_and_valid() {
        let cfg = DeviceConfig::standard().unwrap();
        cfg.validate().unwrap();
        assert!((cfg.frame_freq_ghz - 6.298).abs() < 1e-6);
        assert!((cfg.mix.upper_sideband_ghz() - cfg.frame_freq_ghz).abs() < 1e-6);
        assert_eq!(cfg.eigensystem.n_levels(), 5);
    }

    #[test]
    fn default_rates_give_300us_coherences() {
        let cfg = DeviceConfig::standard().unwrap();
        let t1_us = 1e-3 / cfg.gamma_per_ns();
        let t2_us = 1e-3 / cfg.gamma_2_per_ns();
        assert!((t1_us - 300.0).abs() < 1e-9);
        assert!((t2_us - 300.0).abs() < 1e-9);
    }

    #[test]
    fn coarse_steps_are_rejected() {
        let mut cfg = DeviceConfig::standard().unwrap();
        cfg.integrator_dt_ps = 3.0; // 2π·6.298 GHz·3 ps ≈ 0.119 rad per step
        assert!(matches!(cfg.validate(), Err(DeviceError::StepTooCoarse { .. })));
        cfg.integrator_dt_ps = 0.0;
        assert!(cfg.validate().is_err());
        cfg.integrator_dt_ps = 2.0;
        cfg.gamma_khz = -1.0;
        assert!(cfg.validate().is_err());
    }
}
