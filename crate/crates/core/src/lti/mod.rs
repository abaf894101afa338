//! Rational and single-delay transfer functions evaluated exactly at complex
//! points, plus grid-based H∞ norms.

mod grid;
mod poly;
mod tf;

pub use grid::{
    hinf_norm_on_grid, hinf_norm_stacked, magnitude_profile, refined_profile, stacked_profile,
    FrequencyGrid, DEFAULT_BASE_POINTS, DEFAULT_OMEGA_MAX, DEFAULT_OMEGA_MIN, REFINE_FACTOR,
};
pub use poly::Polynomial;
pub(crate) use tf::removable_limit;
pub use tf::{guard_pole, DelayRationalTF, Evaluate, FromFn, RationalTF};
