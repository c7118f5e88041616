use thiserror::Error;

/// Errors produced while synthesizing or transforming pulses.
#[derive(Debug, Error)]
pub enum PulseError {
    /// A pulse must hold the zero padding plus at least one live pixel.
    #[error("pulse needs at least {min} pixels to hold the zero padding, got {got}")]
    TooFewPixels { min: usize, got: usize },

    /// The two quadrature channels must have the same pixel count.
    #[error("channel lengths differ: I has {i_len} pixels, Q has {q_len}")]
    ChannelMismatch { i_len: usize, q_len: usize },

    /// Family proportions must be a probability vector.
    #[error("family proportions must be non-negative and sum to 1, got sum {sum}")]
    BadProportions { sum: f64 },

    /// A mix/filter setting is outside its valid range.
    #[error("invalid mix settings: {0}")]
    BadSettings(&'static str),

    /// A non-finite amplitude slipped into a pulse.
    #[error("non-finite sample encountered in {context}")]
    NonFinite { context: &'static str },
}
