use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use crate::error::{Error, Result};

/// Anything that can be evaluated pointwise in the complex plane.
pub trait Evaluate {
    fn eval(&self, s: Complex64) -> Result<Complex64>;
}

impl<T: Evaluate + ?Sized> Evaluate for &T {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        (**self).eval(s)
    }
}

impl<T: Evaluate + ?Sized> Evaluate for Box<T> {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        (**self).eval(s)
    }
}

/// Adapter turning a closure into an [`Evaluate`].
pub struct FromFn<F>(pub F);

impl<F> Evaluate for FromFn<F>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        (self.0)(s)
    }
}

/// Degree-scaled test for a vanishing denominator: `|den| < 1e-12 (1 + |s|^deg)`.
pub fn guard_pole(den: Complex64, s: Complex64, deg: usize) -> Result<()> {
    let threshold = 1e-12 * (1.0 + s.norm().powi(deg as i32));
    if den.norm() < threshold || !den.is_finite() {
        Err(Error::PoleHit { s })
    } else {
        Ok(())
    }
}

/// Ratio of two real polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalTF {
    num: Polynomial,
    den: Polynomial,
}

impl RationalTF {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidParams("zero denominator polynomial".into()));
        }
        Ok(Self { num, den })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            num: Polynomial::constant(c),
            den: Polynomial::constant(1.0),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn eval_rational(&self, s: Complex64) -> Result<Complex64> {
        let d = self.den.eval(s);
        guard_pole(d, s, self.den.degree())?;
        Ok(self.num.eval(s) / d)
    }

    /// Value at infinity; requires a proper transfer function.
    pub fn direct_term(&self) -> f64 {
        if self.num.degree() < self.den.degree() || self.num.is_zero() {
            0.0
        } else {
            self.num.coeff(self.den.degree()) / self.den.leading()
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }
}

impl Evaluate for RationalTF {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        self.eval_rational(s)
    }
}

/// `(num0(s) + num1(s) e^{-hs}) / (den0(s) + den1(s) e^{-hs})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayRationalTF {
    num0: Polynomial,
    num1: Polynomial,
    den0: Polynomial,
    den1: Polynomial,
    h: f64,
}

impl DelayRationalTF {
    pub fn new(
        num0: Polynomial,
        num1: Polynomial,
        den0: Polynomial,
        den1: Polynomial,
        h: f64,
    ) -> Result<Self> {
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "delay h = {h} must be finite and >= 0"
            )));
        }
        if den0.is_zero() && den1.is_zero() {
            return Err(Error::InvalidParams(
                "zero denominator quasi-polynomial".into(),
            ));
        }
        Ok(Self {
            num0,
            num1,
            den0,
            den1,
            h,
        })
    }

    pub fn from_rational(f: &RationalTF) -> Self {
        Self {
            num0: f.num().clone(),
            num1: Polynomial::zero(),
            den0: f.den().clone(),
            den1: Polynomial::zero(),
            h: 0.0,
        }
    }

    pub fn num0(&self) -> &Polynomial {
        &self.num0
    }
    pub fn num1(&self) -> &Polynomial {
        &self.num1
    }
    pub fn den0(&self) -> &Polynomial {
        &self.den0
    }
    pub fn den1(&self) -> &Polynomial {
        &self.den1
    }
    pub fn delay(&self) -> f64 {
        self.h
    }

    /// Reciprocal, formed by swapping numerator and denominator.
    pub fn inverse(&self) -> Result<Self> {
        Self::new(
            self.den0.clone(),
            self.den1.clone(),
            self.num0.clone(),
            self.num1.clone(),
            self.h,
        )
    }

    /// Numerator quasi-polynomial at `s`.
    pub fn numerator_at(&self, s: Complex64) -> Complex64 {
        let e = (-self.h * s).exp();
        self.num0.eval(s) + self.num1.eval(s) * e
    }

    /// Denominator quasi-polynomial at `s`.
    pub fn denominator_at(&self, s: Complex64) -> Complex64 {
        let e = (-self.h * s).exp();
        self.den0.eval(s) + self.den1.eval(s) * e
    }

    /// Derivative of the denominator quasi-polynomial at `s`.
    pub fn denominator_derivative_at(&self, s: Complex64) -> Complex64 {
        let e = (-self.h * s).exp();
        self.den0.derivative().eval(s)
            + (self.den1.derivative().eval(s) - self.den1.eval(s) * self.h) * e
    }

    pub fn eval_delay(&self, s: Complex64) -> Result<Complex64> {
        let d = self.denominator_at(s);
        let deg = self.den0.degree().max(self.den1.degree());
        guard_pole(d, s, deg)?;
        Ok(self.numerator_at(s) / d)
    }
}

impl Evaluate for DelayRationalTF {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        self.eval_delay(s)
    }
}

/// Evaluate `f` near a removable singularity `r` by linear interpolation
/// between `r - d` and `r + d`, `d` real.
pub(crate) fn removable_limit<F>(f: F, r: Complex64, s: Complex64, d: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let plus = f(r + d)?;
    let minus = f(r - d)?;
    let mid = 0.5 * (plus + minus);
    let slope = (plus - minus) / (2.0 * d);
    Ok(mid + slope * (s - r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn n_i(a: f64) -> RationalTF {
        RationalTF::new(
            Polynomial::new(vec![-a, 1.0]),
            Polynomial::new(vec![a, 1.0]),
        )
        .unwrap()
    }

    fn example_m() -> DelayRationalTF {
        let (k, a, b, h) = (2.0, 3.0, 1.0, 0.5);
        DelayRationalTF::new(
            Polynomial::new(vec![b, 1.0]),
            Polynomial::new(vec![-k * a, k]),
            Polynomial::new(vec![k * a, k]),
            Polynomial::new(vec![-b, 1.0]),
            h,
        )
        .unwrap()
    }

    #[test]
    fn rational_examples() {
        assert_eq!(n_i(3.0).eval(c(3.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!((n_i(3.0).eval(c(0.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        let w2 = RationalTF::new(
            Polynomial::new(vec![1.0, 0.1]),
            Polynomial::new(vec![0.4, 1.0]),
        )
        .unwrap();
        assert!((w2.eval(c(0.0, 0.0)).unwrap() - c(2.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pole_hit() {
        assert!(matches!(
            n_i(3.0).eval(c(-3.0, 0.0)),
            Err(Error::PoleHit { .. })
        ));
        assert!(RationalTF::new(Polynomial::constant(1.0), Polynomial::zero()).is_err());
    }

    #[test]
    fn delay_examples() {
        let m = example_m();
        assert!((m.eval(c(0.0, 0.0)).unwrap() - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((m.eval(c(0.0, 10.0)).unwrap().norm() - 1.0).abs() < 1e-10);
        let want = 4.0 / (2.0 * (-1.5f64).exp() + 12.0);
        let got = m.eval(c(3.0, 0.0)).unwrap();
        assert!((got.re - want).abs() < 1e-14 && got.im == 0.0);
        assert!((want - 0.32138).abs() < 1e-5);
    }

    #[test]
    fn inverse_swaps() {
        let m = example_m();
        let s = c(0.3, 1.7);
        let prod = m.eval(s).unwrap() * m.inverse().unwrap().eval(s).unwrap();
        assert!((prod - 1.0).norm() < 1e-14);
    }

    #[test]
    fn denominator_derivative_matches_difference() {
        let m = example_m();
        let s = c(0.7, 2.0);
        let d = 1e-6;
        let fd = (m.denominator_at(s + d) - m.denominator_at(s - d)) / (2.0 * d);
        assert!((fd - m.denominator_derivative_at(s)).norm() < 1e-7);
    }
}
