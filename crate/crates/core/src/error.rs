//! Error type shared by all modules.

/// Everything that can go wrong when building codes or running the chain.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Zero has no multiplicative inverse in any field.
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    /// A slice had the wrong length for the operation.
    #[error("{what}: expected length {expected}, got {got}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    /// A parameter failed validation.
    #[error("invalid parameter `{name}`: {why}")]
    Param { name: &'static str, why: String },

    /// Tried to normalize a distribution with no probability mass.
    #[error("degenerate distribution: all log-probabilities are -inf")]
    AllNegInfinity,

    /// A bisection bracket does not straddle the target rate.
    #[error("rate {rate} unreachable in bracket [{lo}, {hi}] dB")]
    Unreachable { rate: f64, lo: f64, hi: f64 },
}

impl Error {
    /// Shorthand for parameter errors.
    pub fn param(name: &'static str, why: impl Into<String>) -> Self {
        Error::Param {
            name,
            why: why.into(),
        }
    }
}
