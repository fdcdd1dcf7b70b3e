//! Parameter sweeps over the Gaussian two-way relay channel.
//!
//! The compression noise σ² is searched on a log-spaced grid with the four
//! closed-form thresholds inserted exactly, since feasibility switches and
//! the `min{…}` terms cross there. Grid points are evaluated in parallel and
//! collected in grid order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{gaussian_variables, CompressionNoise, GaussianTwrcConfig};
use crate::error::{Error, Result};
use crate::region::{max_sum_rate, region_from_sweep, Frontier, SumRateMax};
use crate::schemes::{thresholds, Scheme, SchemePoint, SigmaThresholds, TwrcTerms};

/// Log-spaced σ² search grid. Missing fields take their defaults when
/// deserialized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SigmaGrid {
    pub points: usize,
    pub min: f64,
    pub max: f64,
}

impl Default for SigmaGrid {
    fn default() -> Self {
        SigmaGrid {
            points: 2000,
            min: 1e-4,
            max: 1e4,
        }
    }
}

impl SigmaGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::config("sigma_grid.points", "need at least 2 points"));
        }
        if !(self.min > 0.0 && self.min.is_finite()) {
            return Err(Error::config(
                "sigma_grid.min",
                format!("must be positive, got {}", self.min),
            ));
        }
        if !(self.max > self.min && self.max.is_finite()) {
            return Err(Error::config(
                "sigma_grid.max",
                format!("must exceed min ({}), got {}", self.min, self.max),
            ));
        }
        Ok(())
    }

    /// Grid values plus those `extra` points that fall inside `[min, max]`,
    /// sorted and deduplicated.
    pub fn values(&self, extra: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        let (lo, hi) = (self.min.ln(), self.max.ln());
        let last = (self.points - 1) as f64;
        let mut v: Vec<f64> = (0..self.points)
            .map(|i| match i {
                0 => self.min,
                i if i == self.points - 1 => self.max,
                i => (lo + (hi - lo) * i as f64 / last).exp(),
            })
            .chain(
                extra
                    .iter()
                    .copied()
                    .filter(|x| (self.min..=self.max).contains(x)),
            )
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        Ok(v)
    }
}

/// Evaluation of several schemes over a σ² grid.
#[derive(Debug, Clone)]
pub struct SigmaSweep {
    pub config: GaussianTwrcConfig,
    pub thresholds: SigmaThresholds,
    pub sigma2: Vec<f64>,
    /// One point per grid value, per requested scheme, in request order.
    pub points: Vec<(Scheme, Vec<SchemePoint>)>,
}

impl SigmaSweep {
    pub fn points_for(&self, scheme: Scheme) -> Option<&[SchemePoint]> {
        self.points
            .iter()
            .find(|(s, _)| *s == scheme)
            .map(|(_, p)| p.as_slice())
    }

    pub fn frontier(&self, scheme: Scheme) -> Option<Frontier> {
        self.points_for(scheme).map(region_from_sweep)
    }

    pub fn best_sum_rate(&self, scheme: Scheme) -> Option<SumRateMax> {
        self.points_for(scheme).and_then(max_sum_rate)
    }
}

/// Evaluates `schemes` at every σ² of `grid` (plus the thresholds) with the
/// linear-Gaussian engine.
pub fn sweep_sigma(
    cfg: &GaussianTwrcConfig,
    schemes: &[Scheme],
    grid: &SigmaGrid,
) -> Result<SigmaSweep> {
    let th = thresholds(cfg)?;
    let sigma2 = grid.values(&th.as_array())?;
    let terms: Vec<TwrcTerms> = sigma2
        .par_iter()
        .map(|&s| TwrcTerms::evaluate(&gaussian_variables(cfg, CompressionNoise::new(s)?)?))
        .collect::<Result<_>>()?;
    let points = schemes
        .iter()
        .map(|&scheme| {
            let pts = terms
                .iter()
                .zip(&sigma2)
                .map(|(t, &s)| t.point(scheme, Some(s)))
                .collect();
            (scheme, pts)
        })
        .collect();
    Ok(SigmaSweep {
        config: *cfg,
        thresholds: th,
        sigma2,
        points,
    })
}

/// Best sum rate per scheme at each value of a swept channel parameter.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub parameter: String,
    pub grid: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub scheme: Scheme,
    pub best: Option<SumRateMax>,
}

impl SweepResult {
    pub fn series(&self, scheme: Scheme) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }
}

fn check_increasing(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} grid is empty")));
    }
    if grid
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidGrid(format!(
            "{name} grid must be strictly increasing"
        )));
    }
    Ok(())
}

fn sweep_param(
    parameter: &str,
    grid: &[f64],
    schemes: &[Scheme],
    sigma: &SigmaGrid,
    cfg_at: impl Fn(f64) -> Result<GaussianTwrcConfig> + Sync,
) -> Result<SweepResult> {
    check_increasing(parameter, grid)?;
    let per_value: Vec<Vec<SweepRow>> = grid
        .par_iter()
        .map(|&v| {
            let sweep = sweep_sigma(&cfg_at(v)?, schemes, sigma)?;
            Ok(schemes
                .iter()
                .map(|&scheme| SweepRow {
                    param: v,
                    scheme,
                    best: sweep.best_sum_rate(scheme),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows = per_value.into_iter().flatten().collect();
    Ok(SweepResult {
        parameter: parameter.to_string(),
        grid: grid.to_vec(),
        rows,
    })
}

/// Best sum rate versus transmit power, gains held fixed.
pub fn sweep_power(
    gains: &GaussianTwrcConfig,
    powers: &[f64],
    schemes: &[Scheme],
    sigma: &SigmaGrid,
) -> Result<SweepResult> {
    sweep_param("power", powers, schemes, sigma, |p| {
        let cfg = gains.with_power(p);
        cfg.validate()?;
        Ok(cfg)
    })
}

/// Line topology: user 1 at 0, relay at `d`, user 2 at 1, path-loss
/// exponent `gamma`. Relay links get gain `dist^(-γ/2)`, the direct link 1.
pub fn distance_config(power: f64, gamma: f64, d: f64) -> Result<GaussianTwrcConfig> {
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::config("d", format!("must lie in (0, 1), got {d}")));
    }
    if !gamma.is_finite() {
        return Err(Error::config(
            "gamma",
            format!("must be finite, got {gamma}"),
        ));
    }
    let near = d.powf(-gamma / 2.0);
    let far = (1.0 - d).powf(-gamma / 2.0);
    let cfg = GaussianTwrcConfig {
        g12: 1.0,
        g21: 1.0,
        gr1: near,
        g1r: near,
        gr2: far,
        g2r: far,
        power,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Best sum rate versus relay position on the line.
pub fn sweep_distance(
    power: f64,
    gamma: f64,
    ds: &[f64],
    schemes: &[Scheme],
    sigma: &SigmaGrid,
) -> Result<SweepResult> {
    sweep_param("d", ds, schemes, sigma, |d| {
        distance_config(power, gamma, d)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::regions_equal;
    use approx::assert_abs_diff_eq;

    fn fig4() -> GaussianTwrcConfig {
        GaussianTwrcConfig {
            g12: 0.1,
            g1r: 2.0,
            g21: 0.1,
            g2r: 0.5,
            gr1: 2.0,
            gr2: 0.5,
            power: 20.0,
        }
    }

    fn small() -> SigmaGrid {
        SigmaGrid {
            points: 200,
            ..SigmaGrid::default()
        }
    }

    #[test]
    fn grid_contains_endpoints_and_thresholds() {
        let g = SigmaGrid::default();
        let v = g.values(&[0.24, 0.015, f64::INFINITY, -1.0, 2e4]).unwrap();
        assert_eq!(v.len(), 2002);
        assert_eq!(v[0], 1e-4);
        assert_eq!(*v.last().unwrap(), 1e4);
        assert!(v.contains(&0.24) && v.contains(&0.015));
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn bad_grids() {
        assert!(SigmaGrid {
            points: 1,
            ..small()
        }
        .validate()
        .is_err());
        assert!(SigmaGrid {
            min: 0.0,
            ..small()
        }
        .validate()
        .is_err());
        assert!(SigmaGrid {
            max: 1e-5,
            ..small()
        }
        .validate()
        .is_err());
        let err = sweep_power(&fig4(), &[2.0, 1.0], &Scheme::ALL, &small()).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
    }

    #[test]
    fn nobin_switches_on_at_threshold() {
        let sw = sweep_sigma(&fig4(), &[Scheme::CfNobin], &small()).unwrap();
        let start = sw.thresholds.nobin_min();
        for p in sw.points_for(Scheme::CfNobin).unwrap() {
            assert_eq!(p.feasible(), p.sigma2.unwrap() >= start, "{p:?}");
        }
    }

    #[test]
    fn distance_gains() {
        let cfg = distance_config(10.0, 3.0, 0.5).unwrap();
        assert_abs_diff_eq!(cfg.gr1, 2.0f64.powf(1.5), epsilon = 1e-12);
        assert_abs_diff_eq!(cfg.gr1, 2.828, epsilon = 1e-3);
        assert_eq!(cfg.gr1, cfg.g2r);
        let flat = distance_config(10.0, 0.0, 0.2).unwrap();
        assert_eq!([flat.gr1, flat.g1r, flat.gr2, flat.g2r], [1.0; 4]);
        assert!(distance_config(10.0, 3.0, 0.0).is_err());
        assert!(distance_config(10.0, 3.0, 1.0).is_err());
    }

    #[test]
    fn midpoint_is_symmetric() {
        let res = sweep_distance(10.0, 3.0, &[0.5], &Scheme::ALL, &small()).unwrap();
        let sums: Vec<f64> = res.rows.iter().map(|r| r.best.unwrap().sum_rate).collect();
        assert_abs_diff_eq!(sums[0], sums[1], epsilon = 1e-9);
        assert_abs_diff_eq!(sums[1], sums[2], epsilon = 1e-9);
    }

    #[test]
    fn symmetric_channel_regions_coincide() {
        let cfg = GaussianTwrcConfig {
            g1r: 2.0,
            g2r: 2.0,
            gr1: 2.0,
            gr2: 2.0,
            ..fig4()
        };
        let sw = sweep_sigma(&cfg, &Scheme::ALL, &small()).unwrap();
        let f: Vec<_> = Scheme::ALL
            .iter()
            .map(|s| sw.frontier(*s).unwrap())
            .collect();
        assert!(regions_equal(&f[0], &f[1]));
        assert!(regions_equal(&f[1], &f[2]));
    }
}
