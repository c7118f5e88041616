//! AWG pulse synthesis for a driven transmon.
//!
//! The drive chain modeled here is the standard sideband-mixing setup:
//!
//! 1. a smooth *envelope* (I(t), Q(t)) is sampled from one of several
//!    families ([`sample_envelope`]),
//! 2. the envelope is convolved with an intermediate-frequency oscillation
//!    to form the discrete AWG channels `S_I`, `S_Q` ([`convolve_if`]),
//! 3. a Gaussian bandwidth filter interpolates the 1 ns pixels into
//!    continuous signals ([`GaussianFilter`]),
//! 4. the filtered channels are mixed with a local oscillator to produce the
//!    microwave drive Ω(t) = S_I(t)·cos(ω_LO t) + S_Q(t)·sin(ω_LO t)
//!    reaching the qubit at the upper sideband ω_LO + ω_IF ([`mix_sample`]).
//!
//! All amplitudes are ordinary frequencies in MHz, times in ns, and carrier
//! frequencies in GHz; angular factors of 2π are applied internally where
//! trigonometry requires them.

mod dataset;
mod envelope;
mod error;
mod filter;
mod ifmod;
mod mix;
mod seeds;
mod types;

pub use dataset::{
    build_dataset_pulses, build_dataset_pulses_with_meta, family_counts, DatasetPulse,
    PulseSetConfig, DATASET_PROPORTIONS,
};
pub use envelope::{sample_envelope, EnvelopeKind, EnvelopeRanges};
pub use error::PulseError;
pub use filter::{FilteredPulse, GaussianFilter};
pub use ifmod::convolve_if;
pub use mix::{drive_at, mix_sample, mix_to_carrier};
pub use seeds::{derive_seed, rng_for};
pub use types::{MixSettings, PixelPulse, ZERO_PAD_PIXELS};
