//! Impulse response of `K_{2,FIR}(s) = A(s) + B(s) e^{-hs}` by residues at
//! the simple roots of the shared denominator.
//!
//! With residues `r_A(p)`, `r_B(p)` and `B(∞) = d_B`,
//!
//! ```text
//! k(t) = Σ r_A(p) e^{pt}                              0 <= t < h
//!      + d_B δ(t - h)
//!      + Σ (r_A(p) + r_B(p) e^{-ph}) e^{pt}           t >= h
//! ```
//!
//! The tail vanishes exactly when every pole cancels, which is what makes
//! the block FIR.

use std::io::Write;

use num_complex::Complex64;

use crate::controller::Controller;
use crate::error::{Error, Result};
use crate::lti::Polynomial;

pub const ROOT_SEPARATION: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct ImpulseExpansion {
    pub poles: Vec<Complex64>,
    pub residues_a: Vec<Complex64>,
    pub residues_b: Vec<Complex64>,
    /// Weight of the `δ(t - h)` atom.
    pub direct_b: f64,
    pub h: f64,
}

pub fn expand(c: &Controller) -> Result<ImpulseExpansion> {
    expand_parts(c.a.num(), c.b.num(), c.shared_den(), c.h)
}

/// Expansion of `(a_num + b_num e^{-hs}) / den`; `a_num` must be strictly
/// proper over `den` and `b_num` proper.
pub fn expand_parts(
    a_num: &Polynomial,
    b_num: &Polynomial,
    den: &Polynomial,
    h: f64,
) -> Result<ImpulseExpansion> {
    let poles = den.roots();
    for i in 0..poles.len() {
        for j in (i + 1)..poles.len() {
            if (poles[i] - poles[j]).norm() < ROOT_SEPARATION {
                return Err(Error::RepeatedDenominatorRoots(poles[i], poles[j]));
            }
        }
    }
    if !a_num.is_zero() && a_num.degree() >= den.degree() {
        return Err(Error::Format("A must be strictly proper".into()));
    }
    if !b_num.is_zero() && b_num.degree() > den.degree() {
        return Err(Error::Format("B must be proper".into()));
    }
    let direct_b = if b_num.degree() == den.degree() && !b_num.is_zero() {
        b_num.leading() / den.leading()
    } else {
        0.0
    };
    let b_rem = b_num - &den.scale(direct_b);
    let dden = den.derivative();
    let residues_a = poles
        .iter()
        .map(|&p| a_num.eval(p) / dden.eval(p))
        .collect();
    let residues_b = poles
        .iter()
        .map(|&p| b_rem.eval(p) / dden.eval(p))
        .collect();
    Ok(ImpulseExpansion {
        poles,
        residues_a,
        residues_b,
        direct_b,
        h,
    })
}

impl ImpulseExpansion {
    /// Regular part of the impulse response at `t >= 0` (the δ atom is
    /// reported separately by [`Self::delta`]).
    pub fn impulse_response(&self, t: f64) -> f64 {
        let sum: Complex64 = self
            .poles
            .iter()
            .zip(self.residues_a.iter().zip(&self.residues_b))
            .map(|(&p, (&ra, &rb))| {
                let weight = if t < self.h {
                    ra
                } else {
                    ra + rb * (-p * self.h).exp()
                };
                weight * (p * t).exp()
            })
            .sum();
        sum.re
    }

    /// `(time, weight)` of the delayed impulse.
    pub fn delta(&self) -> (f64, f64) {
        (self.h, self.direct_b)
    }

    /// `max_p |r_A(p) + r_B(p) e^{-hp}| / max_p |r_A(p)|`, zero when all
    /// residues are zero.
    pub fn finite_support_residual(&self) -> f64 {
        let scale = self.residues_a.iter().map(|r| r.norm()).fold(0.0, f64::max);
        let tail = self
            .poles
            .iter()
            .zip(self.residues_a.iter().zip(&self.residues_b))
            .map(|(&p, (&ra, &rb))| (ra + rb * (-p * self.h).exp()).norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            if tail == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            tail / scale
        }
    }

    /// `Σ r/(s - p)` for both parts plus `d_B e^{-hs}`: the frequency
    /// response rebuilt from the expansion.
    pub fn frequency_response(&self, s: Complex64) -> Complex64 {
        let e = (-self.h * s).exp();
        let (mut fa, mut fb) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (&p, (&ra, &rb)) in self
            .poles
            .iter()
            .zip(self.residues_a.iter().zip(&self.residues_b))
        {
            fa += ra / (s - p);
            fb += rb / (s - p);
        }
        fa + (fb + self.direct_b) * e
    }

    /// Sample `[0, t_max]` with step `dt`.
    pub fn sample(&self, t_max: f64, dt: f64) -> Result<Vec<(f64, f64)>> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!("dt = {dt} must be positive")));
        }
        if !(t_max >= 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "t_max = {t_max} must be nonnegative"
            )));
        }
        let n = (t_max / dt + 1e-9).floor() as usize;
        Ok((0..=n)
            .map(|i| {
                let t = i as f64 * dt;
                (t, self.impulse_response(t))
            })
            .collect())
    }

    /// CSV trace `t,value`, with `# delta,t=<h>,weight=<w>` appended when
    /// the atom falls inside the window. Returns whether the atom was written.
    pub fn write_trace<W: Write>(&self, out: &mut W, t_max: f64, dt: f64) -> Result<bool> {
        let samples = self.sample(t_max, dt)?;
        writeln!(out, "t,value")?;
        for (t, v) in samples {
            writeln!(out, "{t:.16e},{v:.16e}")?;
        }
        let (th, weight) = self.delta();
        let inside = th <= t_max;
        if inside {
            writeln!(out, "# delta,t={th},weight={weight}")?;
        }
        Ok(inside)
    }
}
