use num_complex::Complex64;

use super::tf::Evaluate;
use crate::error::{Error, Result};

pub const DEFAULT_OMEGA_MIN: f64 = 1e-3;
pub const DEFAULT_OMEGA_MAX: f64 = 1e4;
pub const DEFAULT_BASE_POINTS: usize = 2000;
pub const REFINE_FACTOR: usize = 10;

/// Strictly increasing, nonnegative angular frequencies in rad/s.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    points: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParams("frequency grid is empty".into()));
        }
        if points.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParams(
                "frequency grid has negative or non-finite points".into(),
            ));
        }
        if points.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::InvalidParams(
                "frequency grid is not strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    pub fn logarithmic(omega_min: f64, omega_max: f64, n: usize) -> Result<Self> {
        if !(omega_min > 0.0 && omega_max > omega_min) || n < 2 {
            return Err(Error::InvalidParams(format!(
                "logarithmic grid needs 0 < min < max and n >= 2 (got {omega_min}, {omega_max}, {n})"
            )));
        }
        let (l0, l1) = (omega_min.log10(), omega_max.log10());
        let step = (l1 - l0) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| 10f64.powf(l0 + step * i as f64)).collect();
        points[n - 1] = omega_max;
        Self::new(points)
    }

    /// 2000 log-spaced points on [1e-3, 1e4] rad/s.
    pub fn standard() -> Self {
        Self::logarithmic(DEFAULT_OMEGA_MIN, DEFAULT_OMEGA_MAX, DEFAULT_BASE_POINTS)
            .expect("default grid is valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Superset grid with `factor` times the density on both intervals
    /// adjacent to every interior local maximum of `values`.
    pub fn refined_around_maxima(&self, values: &[f64], factor: usize) -> Self {
        assert_eq!(values.len(), self.points.len());
        let n = self.points.len();
        let mut dense = vec![false; n.saturating_sub(1)];
        for i in 1..n.saturating_sub(1) {
            if values[i] > values[i - 1] && values[i] >= values[i + 1] {
                dense[i - 1] = true;
                dense[i] = true;
            }
        }
        // Endpoint maxima refine their single neighbouring interval.
        if n >= 2 && values[0] > values[1] {
            dense[0] = true;
        }
        if n >= 2 && values[n - 1] > values[n - 2] {
            dense[n - 2] = true;
        }
        let mut points = Vec::with_capacity(n * 2);
        for (i, &w0) in self.points.iter().enumerate() {
            points.push(w0);
            if i + 1 < n && dense[i] {
                let w1 = self.points[i + 1];
                for j in 1..factor {
                    let w = w0 + (w1 - w0) * j as f64 / factor as f64;
                    if w > w0 && w < w1 {
                        points.push(w);
                    }
                }
            }
        }
        Self { points }
    }
}

fn jw(omega: f64) -> Complex64 {
    Complex64::new(0.0, omega)
}

/// `|f(jω)|` at every grid point.
pub fn magnitude_profile<F: Evaluate + ?Sized>(f: &F, grid: &FrequencyGrid) -> Result<Vec<f64>> {
    grid.points()
        .iter()
        .map(|&w| f.eval(jw(w)).map(|v| v.norm()))
        .collect()
}

/// `sqrt(|f1(jω)|² + |f2(jω)|²)` at every grid point.
pub fn stacked_profile<F1, F2>(f1: &F1, f2: &F2, grid: &FrequencyGrid) -> Result<Vec<f64>>
where
    F1: Evaluate + ?Sized,
    F2: Evaluate + ?Sized,
{
    grid.points()
        .iter()
        .map(|&w| {
            let s = jw(w);
            Ok(f1.eval(s)?.norm().hypot(f2.eval(s)?.norm()))
        })
        .collect()
}

/// Largest `|f(jω)|` over the grid.
pub fn hinf_norm_on_grid<F: Evaluate + ?Sized>(f: &F, grid: &FrequencyGrid) -> Result<f64> {
    Ok(magnitude_profile(f, grid)?.into_iter().fold(0.0, f64::max))
}

/// Largest stacked two-block magnitude over the grid.
pub fn hinf_norm_stacked<F1, F2>(f1: &F1, f2: &F2, grid: &FrequencyGrid) -> Result<f64>
where
    F1: Evaluate + ?Sized,
    F2: Evaluate + ?Sized,
{
    Ok(stacked_profile(f1, f2, grid)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Evaluate a magnitude profile on `base`, refine around its local maxima,
/// and re-evaluate. Returns the refined grid with its profile.
pub fn refined_profile<P>(base: &FrequencyGrid, profile: P) -> Result<(FrequencyGrid, Vec<f64>)>
where
    P: Fn(&FrequencyGrid) -> Result<Vec<f64>>,
{
    let coarse = profile(base)?;
    let fine = base.refined_around_maxima(&coarse, REFINE_FACTOR);
    let values = profile(&fine)?;
    Ok((fine, values))
}
