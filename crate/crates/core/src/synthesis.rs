//! γ-search for the optimal mixed-sensitivity cost.
//!
//! For weights `W1 = ρ` and `W2 = (1 + αs) / (β + s)` the optimal cost is
//! the largest γ in the admissible interval at which the 4×4 interpolation
//! matrix `M_γ` built from `M(jω_γ) F_γ(jω_γ)` and `M(a) F_γ(a)` is
//! singular. The null vector of `M_γopt` parameterizes the controller.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mat_vec, svd, vec_norm, Matrix};
use crate::lti::{Evaluate, Polynomial, RationalTF};
use crate::plant::PlantFactorization;

pub const SCAN_POINTS: usize = 4000;
pub const SCAN_MARGIN: f64 = 1e-6;
pub const GOLDEN_WIDTH: f64 = 1e-12;
pub const SINGULAR_THRESHOLD: f64 = 1e-8;

/// `W1 = ρ`, `W2 = (1 + αs) / (β + s)`; valid when all are positive and `αβ < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub rho: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl WeightConfig {
    pub fn new(rho: f64, alpha: f64, beta: f64) -> Result<Self> {
        let w = Self { rho, alpha, beta };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { rho, alpha, beta } = *self;
        if [rho, alpha, beta].iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams(
                "weight parameters must be finite".into(),
            ));
        }
        if rho <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "rho = {rho} must satisfy rho > 0"
            )));
        }
        if alpha <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "alpha = {alpha} must satisfy alpha > 0"
            )));
        }
        if beta <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "beta = {beta} must satisfy beta > 0"
            )));
        }
        if alpha * beta >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "alpha * beta = {} must satisfy alpha * beta < 1",
                alpha * beta
            )));
        }
        Ok(())
    }

    pub fn w1(&self) -> RationalTF {
        RationalTF::constant(self.rho)
    }

    pub fn w2(&self) -> RationalTF {
        RationalTF::new(
            Polynomial::new(vec![1.0, self.alpha]),
            Polynomial::new(vec![self.beta, 1.0]),
        )
        .expect("beta + s is nonzero")
    }
}

/// `(max{α, ρ/√(1+ρ²β²)}, 1/β)`.
pub fn admissible_interval(w: &WeightConfig) -> (f64, f64) {
    let lower = w
        .alpha
        .max(w.rho / (1.0 + w.rho * w.rho * w.beta * w.beta).sqrt());
    (lower, 1.0 / w.beta)
}

/// The γ-dependent quantities `a_γ`, `b_γ`, `ω_γ`, `F_γ`.
#[derive(Clone, Debug)]
pub struct GammaScalars {
    pub gamma: f64,
    pub a_gamma: f64,
    pub b_gamma: f64,
    pub omega_gamma: f64,
    /// `γ (β - s) / (a_γ + b_γ s)`
    pub f_gamma: RationalTF,
}

pub fn gamma_scalars(w: &WeightConfig, gamma: f64) -> Result<GammaScalars> {
    let WeightConfig { rho, alpha, beta } = *w;
    let (lower, upper) = admissible_interval(w);
    let out = || Error::OutOfInterval {
        gamma,
        lower,
        upper,
    };
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(out());
    }
    let r2g2 = rho * rho / (gamma * gamma);
    let a2 = 1.0 + rho * rho * beta * beta - r2g2;
    let b2 = (1.0 - r2g2) * alpha * alpha + rho * rho;
    let omega_num = 1.0 - gamma * gamma * beta * beta;
    let omega_den = gamma * gamma - alpha * alpha;
    // ω_γ = 0 is allowed at the upper end γ = 1/β.
    if a2 <= 0.0 || b2 <= 0.0 || omega_den <= 0.0 || omega_num < 0.0 {
        return Err(out());
    }
    let (a_gamma, b_gamma) = (a2.sqrt(), b2.sqrt());
    let f_gamma = RationalTF::new(
        Polynomial::new(vec![gamma * beta, -gamma]),
        Polynomial::new(vec![a_gamma, b_gamma]),
    )?;
    Ok(GammaScalars {
        gamma,
        a_gamma,
        b_gamma,
        omega_gamma: (omega_num / omega_den).sqrt(),
        f_gamma,
    })
}

/// The interpolation matrix
///
/// ```text
/// [ 1     jω      μω      jω μω ]
/// [ 1     a       μa      a μa  ]
/// [ μω   -jω μω   1      -jω    ]
/// [ μa   -a μa    1      -a     ]
/// ```
///
/// with `μω = M(jω_γ) F_γ(jω_γ)` and `μa = M(a) F_γ(a)`.
pub fn build_m_gamma(fact: &PlantFactorization, g: &GammaScalars) -> Result<Matrix<4>> {
    let one = Complex64::new(1.0, 0.0);
    let jw = Complex64::new(0.0, g.omega_gamma);
    let a = Complex64::new(fact.params.a, 0.0);
    let mu_w = fact.m.eval(jw)? * g.f_gamma.eval(jw)?;
    let mu_a = fact.m.eval(a)? * g.f_gamma.eval(a)?;
    Ok([
        [one, jw, mu_w, jw * mu_w],
        [one, a, mu_a, a * mu_a],
        [mu_w, -jw * mu_w, one, -jw],
        [mu_a, -a * mu_a, one, -a],
    ])
}

/// σ_min / σ_max of a 4×4 complex matrix.
pub fn sigma_min_ratio(mg: &Matrix<4>) -> f64 {
    svd(mg).ratio()
}

/// Outcome of the γ-search.
#[derive(Clone, Debug, Serialize)]
pub struct GammaSearchResult {
    pub gamma_opt: f64,
    /// Scanned `(γ, σ_min/σ_max)` samples.
    pub curve: Vec<(f64, f64)>,
    /// Null vector `[l10, l11, l20, l21]`, real and unit-norm.
    pub l: [f64; 4],
    /// σ_min/σ_max at `gamma_opt`.
    pub ratio: f64,
    /// `‖M_γopt l‖ / ‖l‖` for the realified `l`.
    pub null_residual: f64,
    /// Largest imaginary part dropped during realification, relative to `‖l‖`.
    pub imag_residue: f64,
    /// All refined local minima `(γ, ratio)` found in the scan.
    pub candidates: Vec<(f64, f64)>,
}

fn ratio_at(fact: &PlantFactorization, w: &WeightConfig, gamma: f64) -> Result<f64> {
    let g = gamma_scalars(w, gamma)?;
    Ok(sigma_min_ratio(&build_m_gamma(fact, &g)?))
}

/// Golden-section minimization of `f` on `[lo, hi]` down to `width`.
pub fn golden_section<F>(f: F, mut lo: f64, mut hi: f64, width: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while hi - lo > width {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d)?;
        }
        if c >= d {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    let fx = f(x)?;
    Ok([(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("nonempty"))
}

/// Scan the admissible interval, refine every local minimum of the ratio
/// curve, and return the largest γ whose ratio falls below the singularity
/// threshold together with its realified null vector.
pub fn find_gamma_opt(fact: &PlantFactorization, w: &WeightConfig) -> Result<GammaSearchResult> {
    w.validate()?;
    let (lower, upper) = admissible_interval(w);
    let span = upper - lower;
    let lo = lower + SCAN_MARGIN * span;
    let hi = upper - SCAN_MARGIN * span;
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;

    let curve: Vec<(f64, f64)> = (0..SCAN_POINTS)
        .map(|i| {
            let g = if i == SCAN_POINTS - 1 {
                hi
            } else {
                lo + step * i as f64
            };
            ratio_at(fact, w, g).map(|r| (g, r))
        })
        .collect::<Result<_>>()?;

    let mut candidates = Vec::new();
    for i in 1..curve.len() - 1 {
        let (prev, cur, next) = (curve[i - 1].1, curve[i].1, curve[i + 1].1);
        if cur <= prev && cur <= next && (cur < prev || cur < next) {
            let refined = golden_section(
                |g| ratio_at(fact, w, g),
                curve[i - 1].0,
                curve[i + 1].0,
                GOLDEN_WIDTH,
            )?;
            candidates.push(refined);
        }
    }

    let best = candidates
        .iter()
        .copied()
        .filter(|c| c.1 < SINGULAR_THRESHOLD)
        .max_by(|p, q| p.0.total_cmp(&q.0));
    let Some((gamma_opt, ratio)) = best else {
        let best_ratio = candidates
            .iter()
            .chain(curve.iter())
            .map(|c| c.1)
            .fold(f64::INFINITY, f64::min);
        return Err(Error::NoSingularGamma {
            lower,
            upper,
            best_ratio,
        });
    };

    let g = gamma_scalars(w, gamma_opt)?;
    let mg = build_m_gamma(fact, &g)?;
    let (l, imag_residue) = realified_null_vector(&mg);
    let lc = l.map(|x| Complex64::new(x, 0.0));
    let null_residual = vec_norm(&mat_vec(&mg, &lc)) / vec_norm(&lc);
    Ok(GammaSearchResult {
        gamma_opt,
        curve,
        l,
        ratio,
        null_residual,
        imag_residue,
        candidates,
    })
}

/// Right singular vector of σ_min rotated so its largest-modulus entry is
/// real positive, then truncated to real parts and renormalized. Also
/// returns the largest discarded imaginary part.
pub fn realified_null_vector(mg: &Matrix<4>) -> ([f64; 4], f64) {
    let v = svd(mg).min_right_vector();
    let pivot = v
        .iter()
        .copied()
        .max_by(|p, q| p.norm().total_cmp(&q.norm()))
        .expect("nonempty");
    let rot = pivot.conj() / pivot.norm();
    let rotated = v.map(|x| x * rot);
    let norm = vec_norm(&rotated);
    let imag = rotated.iter().map(|x| x.im.abs()).fold(0.0, f64::max) / norm;
    let re = rotated.map(|x| x.re);
    let re_norm = re.iter().map(|x| x * x).sum::<f64>().sqrt();
    (re.map(|x| x / re_norm), imag)
}
