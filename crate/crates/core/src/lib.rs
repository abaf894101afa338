//! Optimal H∞ mixed-sensitivity synthesis for plants with delayed internal
//! feedback,
//!
//! ```text
//! P(s) = R(s) / (1 + e^{-hs} R(s)),   R(s) = k (s - a) / (s + b),
//! ```
//!
//! which have infinitely many unstable poles but a single right-half-plane
//! zero. The pipeline is
//!
//! 1. [`plant::factor_plant`]: inner-outer factorization `P = (N_i / M) N_o`;
//! 2. [`stabilization::solve_bezout`]: `N X + M Y = 1` and the Youla-type
//!    parameterization of stabilizing controllers;
//! 3. [`synthesis::find_gamma_opt`]: largest γ making the interpolation
//!    matrix singular, and its null vector;
//! 4. [`controller::synthesize`]: the closed-form controller
//!    `(k_f + A + B e^{-hs}) / K1`;
//! 5. [`fir`]: impulse response of the finite-memory block;
//! 6. [`verification::verify`]: the achieved norm from the raw closed loop.

pub mod controller;
pub mod error;
pub mod fir;
pub mod linalg;
pub mod lti;
pub mod plant;
pub mod report;
pub mod stabilization;
pub mod synthesis;
pub mod verification;

pub use controller::{synthesize, Controller, ControllerFile};
pub use error::{Error, Result};
pub use plant::{factor_plant, PlantFactorization, PlantParams};
pub use stabilization::{solve_bezout, BezoutPair};
pub use synthesis::{find_gamma_opt, GammaSearchResult, WeightConfig};
pub use verification::{verify, ClosedLoopReport};

/// Everything a single synthesis run produces.
#[derive(Clone, Debug)]
pub struct Design {
    pub factorization: PlantFactorization,
    pub weights: WeightConfig,
    pub search: GammaSearchResult,
    pub controller: Controller,
}

/// Factor the plant, search γ, and assemble the controller.
///
/// The controller is returned in the gauge `l21 = 1`, where the leading
/// coefficient of the `K1` numerator is `k`. The closed loop does not depend
/// on the gauge, but the split into `k_f`, `A`, `B` and the impulse
/// response of the FIR block do.
pub fn design(params: PlantParams, weights: WeightConfig) -> Result<Design> {
    weights.validate()?;
    let factorization = factor_plant(params)?;
    let search = find_gamma_opt(&factorization, &weights)?;
    let controller = synthesize(&factorization, &weights, &search)?.with_k1_leading(params.k);
    Ok(Design {
        factorization,
        weights,
        search,
        controller,
    })
}
