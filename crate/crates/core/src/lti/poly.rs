use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Real polynomial, coefficients in ascending degree.
///
/// Trailing exact zeros are trimmed on construction so `degree()` is always
/// the index of the last stored coefficient. The zero polynomial is stored
/// as an empty coefficient list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `s - root`
    pub fn linear_root(root: f64) -> Self {
        Self::new(vec![-root, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    /// Coefficient of `s^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|&x| x * c).collect())
    }

    /// Keep only the terms up to `s^max_degree`; used where higher terms are
    /// known to cancel analytically.
    pub(crate) fn truncated(&self, max_degree: usize) -> Self {
        Self::new(self.coeffs.iter().copied().take(max_degree + 1).collect())
    }

    /// All complex roots (Aberth–Ehrlich iteration followed by Newton polish).
    ///
    /// Roots of a real polynomial come back closed under conjugation: nearly
    /// real roots are snapped to the real axis and complex roots are paired
    /// with exact conjugates. Sorted by real part, then imaginary part.
    pub fn roots(&self) -> Vec<Complex64> {
        let n = self.degree();
        if self.is_zero() || n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let monic: Vec<Complex64> = self
            .coeffs
            .iter()
            .map(|&c| Complex64::new(c / lead, 0.0))
            .collect();
        match n {
            1 => return vec![Complex64::new(-self.coeffs[0] / lead, 0.0)],
            2 => return self.quadratic_roots(),
            _ => {}
        }

        let cauchy = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0_f64, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * (i as f64 + 0.25) / n as f64 + 0.4;
                Complex64::from_polar(0.5 * cauchy, theta)
            })
            .collect();

        let p = |x: Complex64| {
            monic
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |a, &c| a * x + c)
        };
        let dmonic: Vec<Complex64> = monic
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        let dp = |x: Complex64| {
            dmonic
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |a, &c| a * x + c)
        };

        for _ in 0..500 {
            let mut max_step = 0.0_f64;
            for i in 0..n {
                let pv = p(z[i]);
                let dv = dp(z[i]);
                if pv.norm() == 0.0 {
                    continue;
                }
                let ratio = pv / dv;
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| 1.0 / (z[i] - z[j]))
                    .sum();
                let step = ratio / (1.0 - ratio * repulsion);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let dv = dp(*zi);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = p(*zi) / dv;
                if !step.is_finite() {
                    break;
                }
                *zi -= step;
            }
        }
        conjugate_close(&mut z);
        z
    }

    fn quadratic_roots(&self) -> Vec<Complex64> {
        let (c, b, a) = (self.coeffs[0], self.coeffs[1], self.coeffs[2]);
        let disc = b * b - 4.0 * a * c;
        let mut roots = if disc >= 0.0 {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            if q == 0.0 {
                vec![Complex64::new(0.0, 0.0); 2]
            } else {
                vec![Complex64::new(q / a, 0.0), Complex64::new(c / q, 0.0)]
            }
        } else {
            let re = -b / (2.0 * a);
            let im = (-disc).sqrt() / (2.0 * a.abs());
            vec![Complex64::new(re, -im), Complex64::new(re, im)]
        };
        sort_roots(&mut roots);
        roots
    }
}

fn sort_roots(z: &mut [Complex64]) {
    z.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
}

fn conjugate_close(z: &mut Vec<Complex64>) {
    let scale = z.iter().map(|r| r.norm()).fold(1.0_f64, f64::max);
    let mut used = vec![false; z.len()];
    let mut out = Vec::with_capacity(z.len());
    for i in 0..z.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        if z[i].im.abs() <= 1e-10 * scale {
            out.push(Complex64::new(z[i].re, 0.0));
            continue;
        }
        let target = z[i].conj();
        let partner = (0..z.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (z[a] - target).norm().total_cmp(&(z[b] - target).norm()));
        match partner {
            Some(j) => {
                used[j] = true;
                let re = 0.5 * (z[i].re + z[j].re);
                let im = 0.5 * (z[i].im.abs() + z[j].im.abs());
                out.push(Complex64::new(re, -im));
                out.push(Complex64::new(re, im));
            }
            None => out.push(z[i]),
        }
    }
    sort_roots(&mut out);
    *z = out;
}

impl From<Vec<f64>> for Polynomial {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coeffs
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{:.4}", c.abs())?,
                1 => write!(f, "{:.4}s", c.abs())?,
                _ => write!(f, "{:.4}s^{i}", c.abs())?,
            }
        }
        Ok(())
    }
}
