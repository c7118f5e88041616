//! Classical distortion of the AWG waveform on its way to the device.
//!
//! The transmission line is modeled by a random smooth transfer function
//! `F(ω)`: independent deviations `1 + U(-λ, λ)` are drawn at 11 control
//! frequencies spanning 0–600 MHz, then kernel-smoothed onto a dense
//! symmetric grid (`F` is even in ω, as the response of a real line must
//! be). Band-limiting `F` to the stored grid and integrating
//!
//! ```text
//! T_jk = ∫ F(ω)·sin(ωΔt/2)·cos(ω(j-k)Δt) / (πω) dω
//! ```
//!
//! gives a pixel-domain transfer matrix (an ideal line, `F ≡ 1` with
//! unbounded band, gives exactly the identity). The matrix is then made
//! causal by zeroing the upper triangle and row-renormalized to unit sums so
//! a constant drive passes through unchanged.
//!
//! The matrix depends on `j - k` only before the causal cut, and each
//! renormalized row only involves entries with `k ≤ j`, so the matrix for a
//! short pulse is exactly the leading block of the matrix for a longer one;
//! one spec per study covers all gate durations.

use mlqoc_pulse::{rng_for, PixelPulse};
use rand::Rng;

use crate::DeviceError;

/// Number of random control points of the transfer function.
const N_CONTROL: usize = 11;

/// Control points span 0..=CONTROL_MAX_GHZ.
const CONTROL_MAX_GHZ: f64 = 0.6;

/// Dense grid size for the stored transfer function (odd; symmetric in ω).
const GRID_POINTS: usize = 1001;

/// The stored band spans [-GRID_MAX_GHZ, GRID_MAX_GHZ].
const GRID_MAX_GHZ: f64 = 1.5;

/// Gaussian smoothing width applied to the control points, GHz. Chosen so a
/// λ = 0.2 line perturbs standard gate pulses by about 3% on average while
/// keeping `F` slowly varying across the pulse band.
const SMOOTHING_SIGMA_GHZ: f64 = 0.09;

/// Seed stream for distortion draws (disjoint from pulse-synthesis streams).
const DISTORTION_STREAM: u64 = 0x70;

/// A frozen random line distortion: transfer function plus the causal
/// pixel-domain matrix it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSpec {
    /// Deviation scale the control points were drawn with.
    pub lambda: f64,
    /// Pixel duration the transfer matrix was built for, ns.
    pub dt_ns: f64,
    /// Number of pixels the matrix covers (its dimension).
    pub n_pixels: usize,
    /// Transfer function on the symmetric frequency grid; even in ω.
    pub f_omega: Vec<f64>,
    /// Causal, row-renormalized transfer matrix, row-major `n_pixels²`.
    pub transfer: Vec<f64>,
}

impl DistortionSpec {
    /// Frequency grid the transfer function is stored on, GHz.
    pub fn freq_grid_ghz(&self) -> Vec<f64> {
        let half = (GRID_POINTS - 1) / 2;
        (0..GRID_POINTS)
            .map(|i| (i as f64 - half as f64) / half as f64 * GRID_MAX_GHZ)
            .collect()
    }

    /// Largest absolute deviation of the transfer matrix from the identity.
    pub fn max_identity_deviation(&self) -> f64 {
        let n = self.n_pixels;
        let mut worst = 0.0f64;
        for j in 0..n {
            for k in 0..n {
                let id = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((self.transfer[j * n + k] - id).abs());
            }
        }
        worst
    }
}

/// Draw a random line distortion covering pulses of up to `n_pixels` pixels.
pub fn make_distortion(
    lambda: f64,
    n_pixels: usize,
    dt_ns: f64,
    seed: u64,
) -> Result<DistortionSpec, DeviceError> {
    if !(lambda >= 0.0 && lambda < 1.0) {
        return Err(DeviceError::BadConfig("lambda must be in [0, 1)"));
    }
    if n_pixels == 0 || !(dt_ns > 0.0) {
        return Err(DeviceError::BadConfig("distortion needs pixels of positive duration"));
    }

    // Control values 1 + U(-λ, λ) at equally spaced frequencies.
    let mut rng = rng_for(seed, DISTORTION_STREAM, 0);
    let controls: Vec<f64> = (0..N_CONTROL)
        .map(|_| if lambda > 0.0 { 1.0 + rng.random_range(-lambda..lambda) } else { 1.0 })
        .collect();
    let control_step = CONTROL_MAX_GHZ / (N_CONTROL - 1) as f64;

    // Kernel-smoothed, even extension onto the dense grid: a Gaussian-
    // weighted average of the control values, evaluated at |f|. Beyond the
    // control band the nearest control dominates, so F levels off smoothly.
    let half = (GRID_POINTS - 1) / 2;
    let f_omega: Vec<f64> = (0..GRID_POINTS)
        .map(|i| {
            let f = ((i as f64 - half as f64) / half as f64 * GRID_MAX_GHZ).abs();
            let mut num = 0.0;
            let mut den = 0.0;
            for (c, &val) in controls.iter().enumerate() {
                let d = (f - c as f64 * control_step) / SMOOTHING_SIGMA_GHZ;
                let w = (-0.5 * d * d).exp();
                num += w * val;
                den += w;
            }
            num / den
        })
        .collect();

    // Band-limited sinc integrals t_m = (2/π)·∫₀^W F·sin(ωΔt/2)·cos(ωmΔt)/ω dω
    // by the trapezoid rule on the stored grid (ω angular, rad/ns).
    let dw = std::f64::consts::TAU * GRID_MAX_GHZ / half as f64;
    let mut t_of_m = vec![0.0; n_pixels];
    for (m, t_m) in t_of_m.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..=half {
            let w = i as f64 * dw;
            let f_val = f_omega[half + i];
            let integrand = if i == 0 {
                f_val * 0.5 * dt_ns
            } else {
                f_val * (w * 0.5 * dt_ns).sin() * (w * m as f64 * dt_ns).cos() / w
            };
            let trap = if i == 0 || i == half { 0.5 } else { 1.0 };
            acc += trap * integrand;
        }
        *t_m = 2.0 / std::f64::consts::PI * acc * dw;
    }

    // Causal matrix with unit row sums.
    let mut transfer = vec![0.0; n_pixels * n_pixels];
    let mut row_sum = 0.0;
    let mut row_sums = Vec::with_capacity(n_pixels);
    for &t_m in &t_of_m {
        row_sum += t_m;
        if row_sum.abs() < 1e-6 {
            return Err(DeviceError::BadConfig("degenerate distortion: zero row sum"));
        }
        row_sums.push(row_sum);
    }
    for j in 0..n_pixels {
        for k in 0..=j {
            transfer[j * n_pixels + k] = t_of_m[j - k] / row_sums[j];
        }
    }

    Ok(DistortionSpec { lambda, dt_ns, n_pixels, f_omega, transfer })
}

/// Send a pulse through the distorted line: both quadrature pixel arrays are
/// multiplied by the (leading block of the) causal transfer matrix.
pub fn apply_distortion(
    spec: &DistortionSpec,
    pulse: &PixelPulse,
) -> Result<PixelPulse, DeviceError> {
    let n = pulse.n_pixels();
    if spec.n_pixels < n {
        return Err(DeviceError::DistortionTooSmall { have: spec.n_pixels, need: n });
    }
    if (spec.dt_ns - pulse.dt_ns).abs() > 1e-9 * spec.dt_ns {
        return Err(DeviceError::BadConfig("distortion and pulse pixel durations differ"));
    }
    let apply = |ch: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| (0..=j).map(|k| spec.transfer[j * spec.n_pixels + k] * ch[k]).sum())
            .collect()
    };
    Ok(PixelPulse::new(pulse.dt_ns, apply(&pulse.s_i), apply(&pulse.s_q))?)
}
