use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A probability or other scalar lies outside its admissible domain.
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// The wiretap channel is no worse than the main channel.
    #[error("zero secret-key capacity: p_w = {p_w} does not exceed p_m = {p_m}")]
    ZeroCapacity { p_m: f64, p_w: f64 },

    /// A binary string or key had the wrong length.
    #[error("length mismatch: expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// No parameter choice satisfies the constraints; the string names the binding one.
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}
