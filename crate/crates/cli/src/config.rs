//! Run configuration: built-in defaults, then an optional `key = value`
//! file, then command-line flags.

use std::path::Path;

use mixsyn::lti::{FrequencyGrid, DEFAULT_BASE_POINTS, DEFAULT_OMEGA_MAX, DEFAULT_OMEGA_MIN};
use mixsyn::{Error, PlantParams, Result, WeightConfig};

pub const DEFAULT_TOLERANCE: f64 = 1e-2;

/// Every tunable value, each optional so layers can be merged.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub k: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub h: Option<f64>,
    pub rho: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub grid_points: Option<usize>,
    pub tolerance: Option<f64>,
}

impl Overrides {
    /// Values in `top` win.
    pub fn layered(self, top: Overrides) -> Overrides {
        Overrides {
            k: top.k.or(self.k),
            a: top.a.or(self.a),
            b: top.b.or(self.b),
            h: top.h.or(self.h),
            rho: top.rho.or(self.rho),
            alpha: top.alpha.or(self.alpha),
            beta: top.beta.or(self.beta),
            omega_min: top.omega_min.or(self.omega_min),
            omega_max: top.omega_max.or(self.omega_max),
            grid_points: top.grid_points.or(self.grid_points),
            tolerance: top.tolerance.or(self.tolerance),
        }
    }

    pub fn parse(text: &str) -> Result<Overrides> {
        let mut o = Overrides::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParams(format!("config line {}: expected key = value", n + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || {
                Error::InvalidParams(format!(
                    "config line {}: cannot parse {key} = {value}",
                    n + 1
                ))
            };
            match key {
                "grid_points" => o.grid_points = Some(value.parse().map_err(|_| bad())?),
                _ => {
                    let x: f64 = value.parse().map_err(|_| bad())?;
                    let slot = match key {
                        "k" => &mut o.k,
                        "a" => &mut o.a,
                        "b" => &mut o.b,
                        "h" => &mut o.h,
                        "rho" => &mut o.rho,
                        "alpha" => &mut o.alpha,
                        "beta" => &mut o.beta,
                        "omega_min" => &mut o.omega_min,
                        "omega_max" => &mut o.omega_max,
                        "tolerance" => &mut o.tolerance,
                        _ => {
                            return Err(Error::InvalidParams(format!(
                                "config line {}: unknown key {key}",
                                n + 1
                            )))
                        }
                    };
                    *slot = Some(x);
                }
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Overrides> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub plant: PlantParams,
    pub weights: WeightConfig,
    pub grid: FrequencyGrid,
    pub tolerance: f64,
}

impl RunConfig {
    /// Defaults are the worked example `k=2, a=3, b=1, h=0.5, ρ=0.5,
    /// α=0.1, β=0.4`.
    pub fn resolve(o: &Overrides) -> Result<RunConfig> {
        let plant = PlantParams::new(
            o.k.unwrap_or(2.0),
            o.a.unwrap_or(3.0),
            o.b.unwrap_or(1.0),
            o.h.unwrap_or(0.5),
        )?;
        let weights = WeightConfig::new(
            o.rho.unwrap_or(0.5),
            o.alpha.unwrap_or(0.1),
            o.beta.unwrap_or(0.4),
        )?;
        let grid = FrequencyGrid::logarithmic(
            o.omega_min.unwrap_or(DEFAULT_OMEGA_MIN),
            o.omega_max.unwrap_or(DEFAULT_OMEGA_MAX),
            o.grid_points.unwrap_or(DEFAULT_BASE_POINTS),
        )?;
        let tolerance = o.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "tolerance = {tolerance} must be positive"
            )));
        }
        Ok(RunConfig {
            plant,
            weights,
            grid,
            tolerance,
        })
    }
}
