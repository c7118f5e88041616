//! Gaussian bandwidth filter turning discrete pixels into continuous signals.
//!
//! The AWG output is modeled as a train of pixel impulses smoothed by a
//! Gaussian kernel whose *frequency-domain* standard deviation is
//! `filter_sigma_mhz`, i.e. time-domain std `σ_t = 1/(2π·σ_f)`. The filtered
//! value at an arbitrary time `t` is the kernel-weighted average
//!
//! ```text
//! S(t) = Σ_k w_k(t)·s[k],   w_k(t) = g(t − t_k) / Σ_m g(t − t_m)
//! ```
//!
//! where `g` is the Gaussian truncated at ±5σ_t, `t_k = (k + 0.5)·dt` are
//! pixel centers, and the normalizing sum runs over *all* comb positions in
//! the window — including virtual pixels beyond the array, which carry zero
//! signal. This makes the filter linear and shift-invariant, gives exact
//! unit DC gain (a constant pixel train maps to the same constant away from
//! the edges), and lets pulses decay smoothly to zero outside their span.

use crate::{MixSettings, PixelPulse, PulseError};

/// Truncation radius of the kernel in units of σ_t.
const TRUNCATION_SIGMAS: f64 = 5.0;

/// A Gaussian interpolation filter bound to a pixel grid.
#[derive(Debug, Clone)]
pub struct GaussianFilter {
    sigma_t_ns: f64,
    dt_ns: f64,
}

/// Continuous-time channels materialized on a fine uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredPulse {
    /// Sample times in ns, from 0 to the pulse duration inclusive.
    pub t_ns: Vec<f64>,
    /// Filtered in-phase channel, MHz.
    pub s_i: Vec<f64>,
    /// Filtered quadrature channel, MHz.
    pub s_q: Vec<f64>,
}

impl GaussianFilter {
    /// Filter with an explicit time-domain std, bound to pixels of `dt_ns`.
    pub fn new(sigma_t_ns: f64, dt_ns: f64) -> Result<Self, PulseError> {
        if !(sigma_t_ns > 0.0) || !(dt_ns > 0.0) {
            return Err(PulseError::BadSettings("filter widths must be positive"));
        }
        Ok(Self { sigma_t_ns, dt_ns })
    }

    /// Filter configured from mix settings (frequency-domain σ).
    pub fn from_settings(settings: &MixSettings, dt_ns: f64) -> Result<Self, PulseError> {
        settings.validate()?;
        Self::new(settings.sigma_t_ns(), dt_ns)
    }

    /// Time-domain kernel standard deviation in ns.
    pub fn sigma_t_ns(&self) -> f64 {
        self.sigma_t_ns
    }

    /// Kernel support radius in ns.
    pub fn window_ns(&self) -> f64 {
        TRUNCATION_SIGMAS * self.sigma_t_ns
    }

    /// Evaluate the filtered channel at an arbitrary time.
    ///
    /// Pixels outside `channel` contribute zero signal but still count in
    /// the kernel normalization (the AWG is silent, not absent).
    pub fn filtered_at(&self, channel: &[f64], t_ns: f64) -> f64 {
        let (dt, s) = (self.dt_ns, self.sigma_t_ns);
        let w = self.window_ns();
        // Pixel centers with |t - (k + 0.5)·dt| <= w.
        let k_lo = ((t_ns - w) / dt - 0.5).ceil() as i64;
        let k_hi = ((t_ns + w) / dt - 0.5).floor() as i64;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in k_lo..=k_hi {
            let d = t_ns - (k as f64 + 0.5) * dt;
            let g = (-0.5 * (d / s) * (d / s)).exp();
            den += g;
            if k >= 0 && (k as usize) < channel.len() {
                num += g * channel[k as usize];
            }
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// Evaluate both channels of a pulse at an arbitrary time.
    pub fn pulse_at(&self, pulse: &PixelPulse, t_ns: f64) -> (f64, f64) {
        (self.filtered_at(&pulse.s_i, t_ns), self.filtered_at(&pulse.s_q, t_ns))
    }

    /// Materialize both channels on a fine grid of `oversample` points per
    /// pixel, spanning `[0, duration]` inclusive.
    pub fn fine_grid(&self, pulse: &PixelPulse, oversample: usize) -> FilteredPulse {
        let n = pulse.n_pixels() * oversample;
        let step = pulse.dt_ns / oversample as f64;
        let mut t_ns = Vec::with_capacity(n + 1);
        let mut s_i = Vec::with_capacity(n + 1);
        let mut s_q = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let t = j as f64 * step;
            t_ns.push(t);
            s_i.push(self.filtered_at(&pulse.s_i, t));
            s_q.push(self.filtered_at(&pulse.s_q, t));
        }
        FilteredPulse { t_ns, s_i, s_q }
    }
}
