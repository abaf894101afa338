//! Independent closed-loop check of a synthesized controller: the stacked
//! mixed-sensitivity magnitude is computed from the raw plant
//! `R / (1 + e^{-hs} R)` and the controller, never through the
//! factorization, and compared with γ_opt. The reduction identities linking
//! the closed loop to the free parameter `Q1` are checked pointwise.
//!
//! Closed-loop stability is not certified. Boundedness of the loop on the
//! axis and of the recovered `Q1` is reported as evidence only.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lti::{refined_profile, Evaluate, FrequencyGrid};
use crate::plant::PlantFactorization;
use crate::report::to_json;
use crate::stabilization::{recover_q1, BezoutPair};
use crate::synthesis::WeightConfig;

/// Closed-loop quantities at one frequency.
#[derive(Clone, Copy, Debug)]
pub struct LoopPoint {
    pub omega: f64,
    pub sensitivity: Complex64,
    pub complementary: Complex64,
    pub weighted_sensitivity: f64,
    pub weighted_complementary: f64,
}

impl LoopPoint {
    pub fn stacked(&self) -> f64 {
        self.weighted_sensitivity.hypot(self.weighted_complementary)
    }
}

/// `S = (1 + PC)^{-1}` and `T = PC S` at `jω` from the raw plant.
pub fn loop_point<C: Evaluate + ?Sized>(
    fact: &PlantFactorization,
    c: &C,
    w: &WeightConfig,
    omega: f64,
) -> Result<LoopPoint> {
    let s = Complex64::new(0.0, omega);
    let loop_gain = fact.plant().eval(s)? * c.eval(s)?;
    let one_plus = 1.0 + loop_gain;
    if one_plus.norm() < 1e-12 * (1.0 + loop_gain.norm()) {
        return Err(Error::PoleHit { s });
    }
    let sensitivity = 1.0 / one_plus;
    let complementary = loop_gain * sensitivity;
    Ok(LoopPoint {
        omega,
        sensitivity,
        complementary,
        weighted_sensitivity: (w.w1().eval(s)? * sensitivity).norm(),
        weighted_complementary: (w.w2().eval(s)? * complementary).norm(),
    })
}

/// Stacked magnitude on a grid refined around its local maxima.
#[derive(Clone, Debug)]
pub struct NormSweep {
    pub norm: f64,
    pub peak_omega: f64,
    pub points: Vec<LoopPoint>,
}

pub fn mixed_sensitivity_sweep<C: Evaluate + ?Sized>(
    fact: &PlantFactorization,
    c: &C,
    w: &WeightConfig,
    grid: &FrequencyGrid,
) -> Result<NormSweep> {
    let (fine, _) = refined_profile(grid, |g| {
        g.points()
            .iter()
            .map(|&om| loop_point(fact, c, w, om).map(|p| p.stacked()))
            .collect()
    })?;
    let points = fine
        .points()
        .iter()
        .map(|&om| loop_point(fact, c, w, om))
        .collect::<Result<Vec<_>>>()?;
    let peak = points
        .iter()
        .max_by(|p, q| p.stacked().total_cmp(&q.stacked()))
        .expect("grid is nonempty");
    Ok(NormSweep {
        norm: peak.stacked(),
        peak_omega: peak.omega,
        points,
    })
}

/// Supremum over the refined grid of `sqrt(|W1 S|² + |W2 T|²)`.
pub fn mixed_sensitivity_norm<C: Evaluate + ?Sized>(
    fact: &PlantFactorization,
    c: &C,
    w: &WeightConfig,
    grid: &FrequencyGrid,
) -> Result<f64> {
    Ok(mixed_sensitivity_sweep(fact, c, w, grid)?.norm)
}

/// Largest pointwise residuals of the reduction identities.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct IdentityResiduals {
    /// `|S - M (Y - N_i Q1)|`
    pub sensitivity: f64,
    /// `|T - N (X + M Q)|` with `Q = N_o^{-1} Q1`
    pub complementary: f64,
    /// `|W2 T - W2 (1 - M (Y - N_i Q1))|`
    pub weighted_complementary: f64,
    /// Relative gap between the raw stacked norm and the norm of
    /// `[W1 (Y - N_i Q1); W2 (1 - M (Y - N_i Q1))]`.
    pub reduced_norm_gap: f64,
    /// `max |Q1(jω)|`
    pub q1_bound: f64,
}

impl IdentityResiduals {
    pub fn max_pointwise(&self) -> f64 {
        self.sensitivity
            .max(self.complementary)
            .max(self.weighted_complementary)
    }
}

pub fn reduction_identities<C: Evaluate + ?Sized>(
    fact: &PlantFactorization,
    bez: &BezoutPair,
    c: &C,
    w: &WeightConfig,
    grid: &FrequencyGrid,
) -> Result<IdentityResiduals> {
    let q1 = recover_q1(bez, c);
    let mut out = IdentityResiduals::default();
    let (mut raw_norm, mut reduced_norm) = (0.0_f64, 0.0_f64);
    for &om in grid.points() {
        let s = Complex64::new(0.0, om);
        let lp = loop_point(fact, c, w, om)?;
        let q1v = q1.eval(s)?;
        let (m, n_i, n_o) = (fact.m.eval(s)?, fact.n_i.eval(s)?, fact.n_o.eval(s)?);
        let y = bez.y().eval(s)?;
        let w2 = w.w2().eval(s)?;
        let inner = y - n_i * q1v;
        let t_param = n_i * n_o * (bez.x_at(s)? + m * q1v / n_o);

        out.sensitivity = out.sensitivity.max((lp.sensitivity - m * inner).norm());
        out.complementary = out.complementary.max((lp.complementary - t_param).norm());
        out.weighted_complementary = out
            .weighted_complementary
            .max((w2 * lp.complementary - w2 * (1.0 - m * inner)).norm());
        out.q1_bound = out.q1_bound.max(q1v.norm());

        raw_norm = raw_norm.max(lp.stacked());
        reduced_norm = reduced_norm.max(
            (w.rho * inner)
                .norm()
                .hypot((w2 * (1.0 - m * inner)).norm()),
        );
    }
    out.reduced_norm_gap = (raw_norm - reduced_norm).abs() / raw_norm;
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedLoopReport {
    pub achieved_norm: f64,
    pub gamma_opt: f64,
    pub relative_error: f64,
    pub peak_frequency: f64,
    /// `max |stacked - γ_opt| / γ_opt` over the refined grid; diagnostic only.
    pub flatness_deviation: f64,
    pub identity_residuals: IdentityResiduals,
    pub q1_bound: f64,
    pub grid_points: usize,
    #[serde(skip)]
    pub sweep: Vec<LoopPoint>,
}

impl ClosedLoopReport {
    pub fn within(&self, rel_tol: f64) -> bool {
        self.relative_error <= rel_tol
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// CSV `omega,stacked,weighted_sensitivity,weighted_complementary`.
    pub fn write_magnitude_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "omega,stacked,weighted_sensitivity,weighted_complementary"
        )?;
        for p in &self.sweep {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                p.omega,
                p.stacked(),
                p.weighted_sensitivity,
                p.weighted_complementary
            )?;
        }
        Ok(())
    }
}

/// Full closed-loop report for `c` against the γ it claims to achieve.
pub fn verify<C: Evaluate + ?Sized>(
    fact: &PlantFactorization,
    bez: &BezoutPair,
    c: &C,
    w: &WeightConfig,
    gamma_opt: f64,
    grid: &FrequencyGrid,
) -> Result<ClosedLoopReport> {
    let sweep = mixed_sensitivity_sweep(fact, c, w, grid)?;
    let identity_residuals = reduction_identities(fact, bez, c, w, grid)?;
    let flatness_deviation = sweep
        .points
        .iter()
        .map(|p| (p.stacked() - gamma_opt).abs() / gamma_opt)
        .fold(0.0, f64::max);
    Ok(ClosedLoopReport {
        achieved_norm: sweep.norm,
        gamma_opt,
        relative_error: (sweep.norm - gamma_opt).abs() / gamma_opt,
        peak_frequency: sweep.peak_omega,
        flatness_deviation,
        q1_bound: identity_residuals.q1_bound,
        identity_residuals,
        grid_points: sweep.points.len(),
        sweep: sweep.points,
    })
}
