use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The argument of a rational stability function sits on (or next to) a pole.
    #[error("stability function evaluated at its pole (z = {z})")]
    Pole { z: Complex64 },

    #[error("singular value iteration did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    /// The propagator annihilated the mode, so its logarithm is undefined.
    #[error("zero amplitude (|R| = {modulus:e}), frequency undefined")]
    ZeroAmplitude { modulus: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
