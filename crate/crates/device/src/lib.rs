//! Ground-truth device simulator for a driven multi-level transmon.
//!
//! This crate closes the loop between synthesized control pulses
//! ([`mlqoc_pulse`]) and the transmon eigensystem ([`mlqoc_transmon`]): it
//! integrates the Lindblad master equation for the driven qubit, reads out
//! Bloch components in the rotating frame, samples projective measurement
//! records with finite shot counts, and optionally warps pulses through a
//! causal linear distortion before they reach the device.
//!
//! The Hamiltonian is `H(t)/h = diag(eps) + drive(t) * n_op`, with level
//! energies `eps` in GHz and the drive in GHz (the `2*pi` lives in the
//! integrator). Relaxation enters through the lowering operator at rate
//! `gamma` and pure dephasing through the number operator at rate
//! `gamma_phi`, with `1/T2 = gamma/2 + gamma_phi`.
//!
//! Internally the state is propagated in the interaction picture of the bare
//! energies, where the fast level precession is absorbed into analytically
//! exact phase factors and the classic fourth-order Runge-Kutta stepper only
//! has to resolve the drive carrier. All returned density matrices are in the
//! lab frame; [`qubit_bloch`] applies the measurement frame rotation.

mod calibrate;
mod config;
mod distortion;
mod error;
mod integrator;
mod records;
mod state;

pub use calibrate::{calibrated_pi_pulse, half_sine_pulse, PiCalibration};
pub use config::DeviceConfig;
pub use distortion::{apply_distortion, make_distortion, DistortionSpec};
pub use error::DeviceError;
pub use integrator::{evolve, evolve_drive, evolve_set};
pub use records::{
    exact_minus_probability, generate_records, generate_records_from, sample_label, PulseRecord,
};
pub use state::{cardinal_state, qubit_bloch, DensityMatrix, MEAS_AXES, PREP_STATES};
