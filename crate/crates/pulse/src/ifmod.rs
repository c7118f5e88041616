//! Intermediate-frequency convolution of baseband envelopes.

use crate::{PixelPulse, PulseError};

/// Convolve an envelope pair with the intermediate-frequency oscillation:
///
/// ```text
/// S_I[k] =  I(t_k) · cos(2π·f_IF·t_k + φ)
/// S_Q[k] = -Q(t_k) · sin(2π·f_IF·t_k + φ)
/// ```
///
/// with `t_k` at pixel centers. The sign conventions put the resulting drive
/// on the *upper* sideband after mixing: for `I = Q`, the mixed signal is a
/// pure tone at `ω_LO + ω_IF` with phase φ.
pub fn convolve_if(
    i_env: &[f64],
    q_env: &[f64],
    dt_ns: f64,
    omega_if_mhz: f64,
    phase_rad: f64,
) -> Result<PixelPulse, PulseError> {
    if i_env.len() != q_env.len() {
        return Err(PulseError::ChannelMismatch { i_len: i_env.len(), q_len: q_env.len() });
    }
    let f_ghz = omega_if_mhz * 1e-3;
    let mut s_i = Vec::with_capacity(i_env.len());
    let mut s_q = Vec::with_capacity(q_env.len());
    for k in 0..i_env.len() {
        let t = (k as f64 + 0.5) * dt_ns;
        let theta = std::f64::consts::TAU * f_ghz * t + phase_rad;
        s_i.push(i_env[k] * theta.cos());
        s_q.push(-q_env[k] * theta.sin());
    }
    PixelPulse::new(dt_ns, s_i, s_q)
}
