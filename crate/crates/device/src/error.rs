use mlqoc_pulse::PulseError;
use mlqoc_transmon::TransmonError;

/// Errors surfaced by device evolution, sampling, and distortion synthesis.
#[derive(Debug, thiserror::Error)]
pub enum DeviceError {
    /// Integrator step so coarse that the drive carrier advances by more than
    /// 0.1 rad per step; results would be silently inaccurate.
    #[error(
        "integrator step too coarse: carrier phase advances {phase_rad:.3} rad per step \
         (limit 0.1); reduce integrator_dt_ps"
    )]
    StepTooCoarse { phase_rad: f64 },

    /// A configuration field is out of its documented range.
    #[error("invalid device configuration: {0}")]
    BadConfig(&'static str),

    /// Dimension mismatch between a pulse and a precomputed distortion.
    #[error("distortion transfer matrix covers {have} pixels but the pulse has {need}")]
    DistortionTooSmall { have: usize, need: usize },

    /// State dimension does not match the configured eigensystem.
    #[error("density matrix has {got} levels but the device is configured for {expected}")]
    LevelMismatch { expected: usize, got: usize },

    /// A probability left [0, 1] by more than numerical jitter.
    #[error("probability {value} outside [0, 1] beyond tolerance")]
    BadProbability { value: f64 },

    #[error(transparent)]
    Pulse(#[from] PulseError),

    #[error(transparent)]
    Transmon(#[from] TransmonError),
}
