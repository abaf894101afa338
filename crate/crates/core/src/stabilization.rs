//! Bezout identity `N X + M Y = 1` and the parameterization of all
//! stabilizing controllers
//!
//! ```text
//! C = (X + M Q) / (Y - N Q),   Q ∈ H∞,
//! ```
//!
//! written here in terms of `Q1 = N_o Q`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lti::{removable_limit, Evaluate, Polynomial, RationalTF};
use crate::plant::PlantFactorization;

/// Offset used to step around removable singularities at the plant zeros.
pub const REMOVABLE_OFFSET: f64 = 1e-4;

/// Finite-dimensional `Y` with the pointwise-evaluated `X` it pairs with.
#[derive(Clone, Debug)]
pub struct BezoutPair {
    fact: PlantFactorization,
    y: RationalTF,
    zeros: Vec<Complex64>,
}

/// Solve `N X + M Y = 1` by interpolating `Y(z_i) = 1 / M(z_i)` at the
/// right-half-plane zeros of `N_i`.
pub fn solve_bezout(fact: &PlantFactorization) -> Result<BezoutPair> {
    let zeros = fact.rhp_zeros();
    let y = interpolate_inverse(&zeros, &fact.m)?;
    Ok(BezoutPair {
        fact: fact.clone(),
        y,
        zeros,
    })
}

/// Stable proper `Y = p(s) / (s + 1)^{n-1}` with `Y(z_i) M(z_i) = 1`.
///
/// For a single zero this is the constant `1 / M(z_1)`. The zeros must be
/// distinct and closed under conjugation so that `p` has real coefficients.
pub fn interpolate_inverse<F: Evaluate + ?Sized>(zeros: &[Complex64], m: &F) -> Result<RationalTF> {
    let n = zeros.len();
    if n == 0 {
        return Err(Error::InvalidParams("no interpolation points".into()));
    }
    let scale = zeros.iter().map(|z| z.norm()).fold(1.0, f64::max);
    for i in 0..n {
        for j in (i + 1)..n {
            if (zeros[i] - zeros[j]).norm() < 1e-12 * scale {
                return Err(Error::RepeatedZeros);
            }
        }
    }
    let mut targets = Vec::with_capacity(n);
    for &z in zeros {
        let mz = m.eval(z)?;
        if mz.norm() < 1e-12 {
            return Err(Error::DegenerateM { z });
        }
        targets.push((z + 1.0).powi(n as i32 - 1) / mz);
    }

    // Lagrange basis in complex coefficients, ascending degree.
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut basis = vec![Complex64::new(1.0, 0.0)];
        let mut denom = Complex64::new(1.0, 0.0);
        for j in (0..n).filter(|&j| j != i) {
            let mut next = vec![Complex64::new(0.0, 0.0); basis.len() + 1];
            for (k, &c) in basis.iter().enumerate() {
                next[k] -= c * zeros[j];
                next[k + 1] += c;
            }
            basis = next;
            denom *= zeros[i] - zeros[j];
        }
        let w = targets[i] / denom;
        for (acc, c) in coeffs.iter_mut().zip(&basis) {
            *acc += w * c;
        }
    }
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if coeffs.iter().any(|c| c.im.abs() > 1e-9 * cmax.max(1.0)) {
        return Err(Error::InvalidParams(
            "interpolation zeros are not closed under conjugation".into(),
        ));
    }
    let num = Polynomial::new(coeffs.iter().map(|c| c.re).collect());
    let den = (1..n).fold(Polynomial::constant(1.0), |acc, _| {
        &acc * &Polynomial::new(vec![1.0, 1.0])
    });
    RationalTF::new(num, den)
}

impl BezoutPair {
    pub fn factorization(&self) -> &PlantFactorization {
        &self.fact
    }

    pub fn y(&self) -> &RationalTF {
        &self.y
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    fn near_zero(&self, s: Complex64) -> Option<Complex64> {
        self.zeros
            .iter()
            .copied()
            .find(|z| (s - z).norm() < REMOVABLE_OFFSET)
    }

    fn x_direct(&self, s: Complex64) -> Result<Complex64> {
        let f = &self.fact;
        let num = 1.0 - f.m.eval(s)? * self.y.eval(s)?;
        let n_i = f.n_i.eval(s)?;
        if n_i.norm() == 0.0 {
            return Err(Error::PoleHit { s });
        }
        Ok(num / n_i / f.n_o.eval(s)?)
    }

    /// `X(s) = (1 - M Y) / N_i · N_o^{-1}`, continued through the zeros of `N_i`.
    pub fn x_at(&self, s: Complex64) -> Result<Complex64> {
        match self.near_zero(s) {
            Some(z) => removable_limit(|p| self.x_direct(p), z, s, REMOVABLE_OFFSET),
            None => self.x_direct(s),
        }
    }

    /// `|N X + M Y - 1|` at `s`.
    pub fn residual_at(&self, s: Complex64) -> Result<f64> {
        let f = &self.fact;
        Ok((f.n_at(s)? * self.x_at(s)? + f.m.eval(s)? * self.y.eval(s)? - 1.0).norm())
    }

    /// `X / Y`, the controller obtained with `Q = 0`.
    pub fn central_controller(&self) -> ParameterizedController<'_, RationalTF> {
        ParameterizedController {
            bez: self,
            q1: RationalTF::constant(0.0),
        }
    }
}

/// `C = (X + M N_o^{-1} Q1) / (Y - N_i Q1)` for a given free parameter `Q1`.
pub struct ParameterizedController<'a, Q> {
    bez: &'a BezoutPair,
    q1: Q,
}

pub fn controller_from_q<Q: Evaluate>(bez: &BezoutPair, q1: Q) -> ParameterizedController<'_, Q> {
    ParameterizedController { bez, q1 }
}

impl<Q: Evaluate> ParameterizedController<'_, Q> {
    pub fn q1(&self) -> &Q {
        &self.q1
    }

    /// `Y - N_i Q1`, which equals `S / M`.
    pub fn denominator_at(&self, s: Complex64) -> Result<Complex64> {
        let f = &self.bez.fact;
        let d = self.bez.y.eval(s)? - f.n_i.eval(s)? * self.q1.eval(s)?;
        if d.norm() < 1e-12 {
            return Err(Error::DegenerateDenominator { s });
        }
        Ok(d)
    }
}

impl<Q: Evaluate> Evaluate for ParameterizedController<'_, Q> {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        let f = &self.bez.fact;
        let den = self.denominator_at(s)?;
        let num = self.bez.x_at(s)? + f.m.eval(s)? / f.n_o.eval(s)? * self.q1.eval(s)?;
        Ok(num / den)
    }
}

/// Free parameter recovered from a controller:
/// `Q1 = (Y - S / M) / N_i` with `S = (1 + P C)^{-1}`.
pub struct RecoveredQ1<'a, C> {
    bez: &'a BezoutPair,
    controller: C,
}

pub fn recover_q1<C: Evaluate>(bez: &BezoutPair, controller: C) -> RecoveredQ1<'_, C> {
    RecoveredQ1 { bez, controller }
}

impl<C: Evaluate> RecoveredQ1<'_, C> {
    /// Numerator `Y - S / M`, which vanishes at the plant zeros for a
    /// stabilizing controller.
    pub fn numerator_at(&self, s: Complex64) -> Result<Complex64> {
        let f = &self.bez.fact;
        let loop_gain = f.plant().eval(s)? * self.controller.eval(s)?;
        let one_plus = 1.0 + loop_gain;
        if one_plus.norm() < 1e-12 {
            return Err(Error::PoleHit { s });
        }
        let sens = 1.0 / one_plus;
        Ok(self.bez.y.eval(s)? - sens / f.m.eval(s)?)
    }

    fn direct(&self, s: Complex64) -> Result<Complex64> {
        let n_i = self.bez.fact.n_i.eval(s)?;
        if n_i.norm() == 0.0 {
            return Err(Error::PoleHit { s });
        }
        Ok(self.numerator_at(s)? / n_i)
    }
}

impl<C: Evaluate> Evaluate for RecoveredQ1<'_, C> {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        match self.bez.near_zero(s) {
            Some(z) => removable_limit(|p| self.direct(p), z, s, REMOVABLE_OFFSET),
            None => self.direct(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::FromFn;
    use crate::plant::{factor_plant, PlantParams};

    fn example() -> PlantFactorization {
        factor_plant(PlantParams::new(2.0, 3.0, 1.0, 0.5).unwrap()).unwrap()
    }

    #[test]
    fn example_y_is_inverse_of_m_at_zero() {
        let f = example();
        let bez = solve_bezout(&f).unwrap();
        let want = (2.0 * (-1.5f64).exp() + 12.0) / 4.0;
        assert_eq!(bez.y().num().degree(), 0);
        assert!((bez.y().eval(Complex64::new(0.0, 0.0)).unwrap().re - want).abs() < 1e-12);
        assert!((want - 3.1116).abs() < 1e-4);
        let a = Complex64::new(3.0, 0.0);
        let cond = 1.0 - f.m.eval(a).unwrap() * bez.y().eval(a).unwrap();
        assert!(cond.norm() < 1e-12);
    }

    #[test]
    fn x_is_continuous_through_the_zero() {
        let bez = solve_bezout(&example()).unwrap();
        let at = bez.x_at(Complex64::new(3.0, 0.0)).unwrap();
        let near = bez.x_at(Complex64::new(3.0 + 3e-4, 0.0)).unwrap();
        assert!(at.is_finite());
        assert!((at - near).norm() < 1e-3 * near.norm());
        assert!(bez.residual_at(Complex64::new(3.0, 0.0)).unwrap() < 1e-9);
    }

    #[test]
    fn two_point_interpolation() {
        let f = example();
        let zeros = [Complex64::new(1.5, 0.0), Complex64::new(3.0, 0.0)];
        let y = interpolate_inverse(&zeros, &f.m).unwrap();
        assert_eq!(y.den().coeffs(), &[1.0, 1.0]);
        for z in zeros {
            let prod = y.eval(z).unwrap() * f.m.eval(z).unwrap();
            assert!((prod - 1.0).norm() < 1e-12);
        }
        let pair = [Complex64::new(2.0, 1.0), Complex64::new(2.0, -1.0)];
        let y = interpolate_inverse(&pair, &f.m).unwrap();
        for z in pair {
            assert!((y.eval(z).unwrap() * f.m.eval(z).unwrap() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_errors() {
        let f = example();
        let z = Complex64::new(3.0, 0.0);
        assert!(matches!(
            interpolate_inverse(&[z, z], &f.m),
            Err(Error::RepeatedZeros)
        ));
        let zero_fn = FromFn(|_s: Complex64| Ok(Complex64::new(0.0, 0.0)));
        assert!(matches!(
            interpolate_inverse(&[z], &zero_fn),
            Err(Error::DegenerateM { .. })
        ));
    }

    #[test]
    fn central_controller_sensitivity() {
        let f = example();
        let bez = solve_bezout(&f).unwrap();
        let c = bez.central_controller();
        let s = Complex64::new(0.0, 1.0);
        let sens = 1.0 / (1.0 + f.plant().eval(s).unwrap() * c.eval(s).unwrap());
        let want = f.m.eval(s).unwrap() * bez.y().eval(s).unwrap();
        assert!((sens - want).norm() < 1e-10);
    }

    #[test]
    fn degenerate_denominator() {
        let f = example();
        let bez = solve_bezout(&f).unwrap();
        // Q1 = Y / N_i makes Y - N_i Q1 vanish identically.
        let y0 = bez.y().eval(Complex64::new(0.0, 0.0)).unwrap();
        let q1 = FromFn(move |s: Complex64| Ok(y0 * (s + 3.0) / (s - 3.0)));
        let c = controller_from_q(&bez, q1);
        assert!(matches!(
            c.eval(Complex64::new(0.0, 2.0)),
            Err(Error::DegenerateDenominator { .. })
        ));
    }

    #[test]
    fn central_controller_recovers_zero_q1() {
        let bez = solve_bezout(&example()).unwrap();
        let q1 = recover_q1(&bez, bez.central_controller());
        for w in [0.01, 0.5, 1.0, 3.0, 10.0, 100.0] {
            assert!(q1.eval(Complex64::new(0.0, w)).unwrap().norm() < 1e-9);
        }
    }
}
