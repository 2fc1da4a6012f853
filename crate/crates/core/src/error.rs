use num_complex::Complex64 as C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("`{name}` = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("`{name}` must be at least {min}, got {got}")]
    GridTooSmall { name: &'static str, got: usize, min: usize },

    /// g = 0 and δ = 0 at the same Bloch point: the hybrid basis is not unique.
    #[error("hybrid basis undefined at kd = {kd} (g = 0 and δ = 0)")]
    DegenerateBasis { kd: f64 },

    #[error("singular parameters: {0}")]
    Singular(&'static str),

    #[error(
        "mean-field iteration did not converge after {iterations} iterations \
         (residual {residual:e}); possible bistability"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        alpha: C64,
        beta: C64,
    },

    #[error("phase {theta} is not commensurate with a ring of {n_sites} sites (needs 2πm/N)")]
    Incommensurate { theta: f64, n_sites: usize },
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        })
    }
}

pub(crate) fn at_least(name: &'static str, got: usize, min: usize) -> Result<()> {
    if got < min {
        Err(Error::GridTooSmall { name, got, min })
    } else {
        Ok(())
    }
}
