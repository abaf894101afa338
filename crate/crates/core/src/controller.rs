//! Closed-form optimal controller
//!
//! ```text
//! C_opt(s) = (k_f + A(s) + B(s) e^{-hs}) / K1(s)
//! ```
//!
//! assembled from γ_opt and the null vector `l = [l10, l11, l20, l21]`.
//! Every coefficient is linear in `l`, so the controller is invariant under
//! rescaling of the null vector.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::{removable_limit, Evaluate, Polynomial, RationalTF};
use crate::plant::PlantFactorization;
use crate::report::to_json;
use crate::synthesis::{gamma_scalars, GammaSearchResult, WeightConfig};

const REMOVABLE_OFFSET: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct Controller {
    pub gamma_opt: f64,
    pub k_f: f64,
    pub k1: RationalTF,
    pub a: RationalTF,
    pub b: RationalTF,
    pub h: f64,
    /// Roots of the shared `A`/`B` denominator; removable for `K_{2,FIR}`.
    singular_points: Vec<Complex64>,
}

/// On-disk controller schema, coefficients in ascending degree.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ControllerFile {
    pub gamma_opt: f64,
    pub k_f: f64,
    pub h: f64,
    pub k1_num: Vec<f64>,
    pub k1_den: Vec<f64>,
    pub a_num: Vec<f64>,
    pub a_den: Vec<f64>,
    pub b_num: Vec<f64>,
    pub b_den: Vec<f64>,
}

impl Controller {
    pub fn new(
        gamma_opt: f64,
        k_f: f64,
        k1: RationalTF,
        a: RationalTF,
        b: RationalTF,
        h: f64,
    ) -> Result<Self> {
        if a.den() != b.den() {
            return Err(Error::Format("A and B must share a denominator".into()));
        }
        if k1.num().is_zero() {
            return Err(Error::DegenerateL);
        }
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::Format(format!(
                "delay h = {h} must be finite and >= 0"
            )));
        }
        let singular_points = a.den().roots();
        Ok(Self {
            gamma_opt,
            k_f,
            k1,
            a,
            b,
            h,
            singular_points,
        })
    }

    /// Shared denominator of `k_f + A` and `B`.
    pub fn shared_den(&self) -> &Polynomial {
        self.a.den()
    }

    pub fn singular_points(&self) -> &[Complex64] {
        &self.singular_points
    }

    /// Multiply every `l`-linear coefficient by `c`.
    pub fn rescaled(&self, c: f64) -> Self {
        Self {
            k_f: self.k_f * c,
            k1: self.k1.scale(c),
            a: self.a.scale(c),
            b: self.b.scale(c),
            ..self.clone()
        }
    }

    /// Rescale so that the leading coefficient of the `K1` numerator equals
    /// `target` (equivalently `l21 = target / k`).
    pub fn with_k1_leading(&self, target: f64) -> Self {
        self.rescaled(target / self.k1.num().leading())
    }

    fn k2_direct(&self, s: Complex64) -> Result<Complex64> {
        let den = self.shared_den().eval(s);
        crate::lti::guard_pole(den, s, self.shared_den().degree())?;
        let e = (-self.h * s).exp();
        Ok((self.a.num().eval(s) + self.b.num().eval(s) * e) / den)
    }

    /// `K_{2,FIR}(s) = A(s) + B(s) e^{-hs}`, continued through the removable
    /// singularities at the denominator roots.
    pub fn k2_fir_at(&self, s: Complex64) -> Result<Complex64> {
        let near = self
            .singular_points
            .iter()
            .copied()
            .find(|r| (s - r).norm() < REMOVABLE_OFFSET);
        match near {
            Some(r) => removable_limit(|p| self.k2_direct(p), r, s, REMOVABLE_OFFSET),
            None => self.k2_direct(s),
        }
    }

    pub fn eval_controller(&self, s: Complex64) -> Result<Complex64> {
        let k1 = self.k1.eval(s)?;
        if k1.norm() < 1e-300 {
            return Err(Error::PoleHit { s });
        }
        Ok((self.k_f + self.k2_fir_at(s)?) / k1)
    }

    pub fn to_file(&self) -> ControllerFile {
        ControllerFile {
            gamma_opt: self.gamma_opt,
            k_f: self.k_f,
            h: self.h,
            k1_num: self.k1.num().coeffs().to_vec(),
            k1_den: self.k1.den().coeffs().to_vec(),
            a_num: self.a.num().coeffs().to_vec(),
            a_den: self.a.den().coeffs().to_vec(),
            b_num: self.b.num().coeffs().to_vec(),
            b_den: self.b.den().coeffs().to_vec(),
        }
    }

    pub fn from_file(f: ControllerFile) -> Result<Self> {
        let tf = |n: Vec<f64>, d: Vec<f64>| RationalTF::new(Polynomial::new(n), Polynomial::new(d));
        Self::new(
            f.gamma_opt,
            f.k_f,
            tf(f.k1_num, f.k1_den)?,
            tf(f.a_num, f.a_den)?,
            tf(f.b_num, f.b_den)?,
            f.h,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(&self.to_file())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl Evaluate for Controller {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        self.eval_controller(s)
    }
}

fn poly(c: &[f64]) -> Polynomial {
    Polynomial::new(c.to_vec())
}

/// Assemble the controller from the γ-search result.
pub fn synthesize(
    fact: &PlantFactorization,
    w: &WeightConfig,
    result: &GammaSearchResult,
) -> Result<Controller> {
    synthesize_with_l(fact, w, result.gamma_opt, result.l)
}

/// Assemble the controller for an explicit γ and null vector.
pub fn synthesize_with_l(
    fact: &PlantFactorization,
    w: &WeightConfig,
    gamma: f64,
    l: [f64; 4],
) -> Result<Controller> {
    let [l10, l11, l20, l21] = l;
    let scale = l.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || (l20.abs() <= 1e-14 * scale && l21.abs() <= 1e-14 * scale) {
        return Err(Error::DegenerateL);
    }
    let g = gamma_scalars(w, gamma)?;
    let (k, a, b, h) = (fact.params.k, fact.params.a, fact.params.b, fact.params.h);
    let WeightConfig { alpha, beta, .. } = *w;
    let (ag, bg) = (g.a_gamma, g.b_gamma);

    let k1 = RationalTF::new(poly(&[k * l20, k * l21]), poly(&[gamma * beta, gamma]))?;
    let k_f = (k * bg * l11 - gamma * l21) / (gamma * gamma - alpha * alpha);

    let den = &poly(&[
        1.0 - gamma * gamma * beta * beta,
        0.0,
        gamma * gamma - alpha * alpha,
    ]) * &Polynomial::linear_root(a);
    let spectral = poly(&[ag, bg]);
    let l1 = poly(&[l10, l11]);
    let l2 = poly(&[l20, l21]);
    let beta_minus_s = poly(&[beta, -1.0]);

    let kf_plus_a = &(&(&poly(&[k * a, k]) * &spectral) * &l1)
        + &(&(&beta_minus_s.scale(gamma) * &l2) * &poly(&[b, 1.0]));
    // k_f is exactly the ratio of the cubic coefficients, so the cubic term
    // of the difference vanishes.
    let a_num = (&kf_plus_a - &den.scale(k_f)).truncated(2);
    let b_num = &(&(&poly(&[-b, 1.0]) * &spectral) * &l1)
        + &(&(&beta_minus_s.scale(k * gamma) * &l2) * &Polynomial::linear_root(a));

    Controller::new(
        gamma,
        k_f,
        k1,
        RationalTF::new(a_num, den.clone())?,
        RationalTF::new(b_num, den)?,
        h,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plant::{factor_plant, PlantParams};
    use crate::synthesis::find_gamma_opt;

    fn example() -> (PlantFactorization, WeightConfig, Controller) {
        let f = factor_plant(PlantParams::new(2.0, 3.0, 1.0, 0.5).unwrap()).unwrap();
        let w = WeightConfig::new(0.5, 0.1, 0.4).unwrap();
        let r = find_gamma_opt(&f, &w).unwrap();
        let c = synthesize(&f, &w, &r).unwrap();
        (f, w, c)
    }

    #[test]
    fn degree_structure() {
        let (_, _, c) = example();
        assert_eq!(c.k1.num().degree(), 1);
        assert_eq!(c.k1.den().degree(), 1);
        assert_eq!(c.a.num().degree(), 2);
        assert_eq!(c.b.num().degree(), 3);
        assert_eq!(c.shared_den().degree(), 3);
        assert_eq!(c.singular_points().len(), 3);
    }

    #[test]
    fn degenerate_null_vector() {
        let (f, w, c) = example();
        let err = synthesize_with_l(&f, &w, c.gamma_opt, [1.0, 0.5, 0.0, 0.0]);
        assert!(matches!(err, Err(Error::DegenerateL)));
    }

    #[test]
    fn removable_singularities_are_finite() {
        let (_, w, c) = example();
        let omega = gamma_scalars(&w, c.gamma_opt).unwrap().omega_gamma;
        for r in [
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, omega),
            Complex64::new(0.0, -omega),
        ] {
            let at = c.eval_controller(r).unwrap();
            assert!(at.is_finite());
            let plus = c.k2_direct(r + 1e-4).unwrap();
            let minus = c.k2_direct(r - 1e-4).unwrap();
            assert!((plus - minus).norm() < 1e-2 * plus.norm().max(1.0));
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let (_, _, c) = example();
        let text = c.to_json().unwrap();
        let back = Controller::from_json(&text).unwrap();
        assert_eq!(back.to_file().k1_num, c.to_file().k1_num);
        assert_eq!(back.k_f, c.k_f);
        assert_eq!(back.to_json().unwrap(), text);
        for key in [
            "gamma_opt",
            "k_f",
            "h",
            "k1_num",
            "k1_den",
            "a_num",
            "a_den",
            "b_num",
            "b_den",
        ] {
            assert!(text.contains(&format!("\"{key}\"")), "{key}");
        }
    }

    #[test]
    fn rejects_mismatched_denominators() {
        let (_, _, c) = example();
        let mut file = c.to_file();
        file.b_den.push(1.0);
        assert!(matches!(Controller::from_file(file), Err(Error::Format(_))));
    }
}
