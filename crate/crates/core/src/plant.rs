//! Inner-outer factorization of the delayed internal feedback plant
//!
//! ```text
//! P(s) = R(s) / (1 + e^{-hs} R(s)),   R(s) = k (s - a) / (s + b)
//! ```
//!
//! written as `P = (N_i / M) N_o` with
//!
//! ```text
//! N_i(s) = (s - a) / (s + a)
//! N_o(s) = k (s + a) / (k (s + a) + (s - b) e^{-hs})
//! M(s)   = ((s + b) + k (s - a) e^{-hs}) / ((s - b) e^{-hs} + k (s + a))
//! ```
//!
//! `N_i` and `M` are inner; `N_o` is outer and invertible in H∞ because
//! `|(jω - b) / (k (jω + a))| < 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::{DelayRationalTF, Evaluate, FrequencyGrid, Polynomial, RationalTF};

/// Plant parameters; valid when `k > 1`, `a > b > 0`, `h > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantParams {
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub h: f64,
}

impl PlantParams {
    pub fn new(k: f64, a: f64, b: f64, h: f64) -> Result<Self> {
        let p = Self { k, a, b, h };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { k, a, b, h } = *self;
        if [k, a, b, h].iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(
                "plant parameters must be finite".into(),
            ));
        }
        if k <= 1.0 {
            return Err(Error::InvalidParams(format!(
                "gain k = {k} must satisfy k > 1"
            )));
        }
        if b <= 0.0 {
            return Err(Error::InvalidParams(format!("b = {b} must satisfy b > 0")));
        }
        if a <= b {
            return Err(Error::InvalidParams(format!(
                "a = {a} must satisfy a > b = {b}"
            )));
        }
        if h <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "delay h = {h} must satisfy h > 0"
            )));
        }
        Ok(())
    }

    /// Asymptotic real part `ln(k) / h` of the unstable pole chain.
    pub fn pole_asymptote(&self) -> f64 {
        self.k.ln() / self.h
    }
}

/// `(N_i, N_o, M)` for one parameter set.
#[derive(Clone, Debug)]
pub struct PlantFactorization {
    pub params: PlantParams,
    pub n_i: RationalTF,
    pub n_o: DelayRationalTF,
    pub m: DelayRationalTF,
}

pub fn factor_plant(params: PlantParams) -> Result<PlantFactorization> {
    params.validate()?;
    let PlantParams { k, a, b, h } = params;
    let n_i = RationalTF::new(
        Polynomial::new(vec![-a, 1.0]),
        Polynomial::new(vec![a, 1.0]),
    )?;
    let k_s_plus_a = Polynomial::new(vec![k * a, k]);
    let s_minus_b = Polynomial::new(vec![-b, 1.0]);
    let n_o = DelayRationalTF::new(
        k_s_plus_a.clone(),
        Polynomial::zero(),
        k_s_plus_a.clone(),
        s_minus_b.clone(),
        h,
    )?;
    let m = DelayRationalTF::new(
        Polynomial::new(vec![b, 1.0]),
        Polynomial::new(vec![-k * a, k]),
        k_s_plus_a,
        s_minus_b,
        h,
    )?;
    Ok(PlantFactorization {
        params,
        n_i,
        n_o,
        m,
    })
}

impl PlantFactorization {
    /// The plant `R / (1 + e^{-hs} R)` in its raw form
    /// `k (s - a) / ((s + b) + k (s - a) e^{-hs})`.
    pub fn plant(&self) -> DelayRationalTF {
        let PlantParams { k, a, b, h } = self.params;
        DelayRationalTF::new(
            Polynomial::new(vec![-k * a, k]),
            Polynomial::zero(),
            Polynomial::new(vec![b, 1.0]),
            Polynomial::new(vec![-k * a, k]),
            h,
        )
        .expect("plant denominator is nonzero")
    }

    /// `N = N_i N_o` at `s`.
    pub fn n_at(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.n_i.eval(s)? * self.n_o.eval(s)?)
    }

    /// `(N_i / M) N_o` at `s`.
    pub fn reconstructed_plant_at(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.n_i.eval(s)? / self.m.eval(s)? * self.n_o.eval(s)?)
    }

    /// The perturbation term `(s - b) / (k (s + a))` whose H∞ norm must be
    /// below one for `N_o` to be invertible.
    pub fn outer_perturbation(&self) -> RationalTF {
        let PlantParams { k, a, b, .. } = self.params;
        RationalTF::new(
            Polynomial::new(vec![-b, 1.0]),
            Polynomial::new(vec![k * a, k]),
        )
        .expect("nonzero denominator")
    }

    /// Right-half-plane zeros of `N_i`.
    pub fn rhp_zeros(&self) -> Vec<Complex64> {
        vec![Complex64::new(self.params.a, 0.0)]
    }

    /// Refine the `n`-th unstable pole of `P` (a zero of
    /// `(s + b) + k (s - a) e^{-hs}`) by 20 Newton steps from the asymptotic
    /// guess `ln(k)/h + j (2n + 1) π / h`.
    pub fn locate_pole(&self, n: usize) -> Complex64 {
        let quasi = self.m.inverse().expect("M numerator is nonzero");
        let PlantParams { h, .. } = self.params;
        let mut s = Complex64::new(
            self.params.pole_asymptote(),
            (2 * n + 1) as f64 * std::f64::consts::PI / h,
        );
        for _ in 0..20 {
            let f = quasi.denominator_at(s);
            let df = quasi.denominator_derivative_at(s);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            if !step.is_finite() {
                break;
            }
            s -= step;
        }
        s
    }
}

/// Inner-ness test: `||f(jω)| - 1| <= tol` on the grid, and
/// `f(s) f(-s) = 1` within `tol` at 20 deterministic points with `|Re s| <= 1`.
pub fn check_inner<F: Evaluate + ?Sized>(f: &F, grid: &FrequencyGrid, tol: f64) -> Result<bool> {
    for &w in grid.points() {
        let v = f.eval(Complex64::new(0.0, w))?;
        if (v.norm() - 1.0).abs() > tol {
            return Ok(false);
        }
    }
    // Low-discrepancy points in [-1, 1] x [0.1, 20].
    let golden = 0.618_033_988_749_894_9_f64;
    for i in 0..20 {
        let u = (0.5 + i as f64 * golden).fract();
        let v = (0.25 + i as f64 * golden * golden).fract();
        let s = Complex64::new(2.0 * u - 1.0, 0.1 + 19.9 * v);
        let prod = f.eval(s)? * f.eval(-s)?;
        if (prod - 1.0).norm() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}
