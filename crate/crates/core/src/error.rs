use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the synthesis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A denominator vanished (to within the degree-scaled threshold) at `s`.
    #[error("pole hit at s = {s}")]
    PoleHit { s: Complex64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("plant zeros are not distinct")]
    RepeatedZeros,

    #[error("M(z) is numerically zero at interpolation point z = {z}")]
    DegenerateM { z: Complex64 },

    #[error("Y - N Q vanishes at s = {s}")]
    DegenerateDenominator { s: Complex64 },

    #[error("gamma = {gamma} lies outside the admissible interval ({lower}, {upper})")]
    OutOfInterval { gamma: f64, lower: f64, upper: f64 },

    #[error("no singular gamma found in ({lower}, {upper}); best ratio {best_ratio:e}")]
    NoSingularGamma {
        lower: f64,
        upper: f64,
        best_ratio: f64,
    },

    #[error("null vector gives an identically zero K1 (l20 = l21 = 0)")]
    DegenerateL,

    #[error("denominator roots {0} and {1} are not simple")]
    RepeatedDenominatorRoots(Complex64, Complex64),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
