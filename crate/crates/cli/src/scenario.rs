//! Scenario documents: JSON, tagged by `"mode"`, unknown fields rejected.

use std::path::{Path, PathBuf};

use relaycf_core::verify::VerifyPlan;
use relaycf_core::{DmModel, GaussianTwrcConfig, Scheme, SigmaGrid};
use serde::Deserialize;

use crate::error::CliError;
use crate::format::round_sig;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Scenario {
    Region(RegionScenario),
    SumratePower(PowerScenario),
    SumrateDistance(DistanceScenario),
    Conditions(ConditionsScenario),
    DmEval(DmEvalScenario),
    Verify(VerifyScenario),
}

fn all_schemes() -> Vec<Scheme> {
    Scheme::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionScenario {
    pub name: Option<String>,
    pub out: Option<PathBuf>,
    pub config: GaussianTwrcConfig,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub sigma_grid: SigmaGrid,
}

/// Channel gains without a power, for power sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gains {
    pub g12: f64,
    pub g1r: f64,
    pub g21: f64,
    pub g2r: f64,
    pub gr1: f64,
    pub gr2: f64,
}

impl Gains {
    pub fn with_power(&self, power: f64) -> GaussianTwrcConfig {
        GaussianTwrcConfig {
            g12: self.g12,
            g1r: self.g1r,
            g21: self.g21,
            g2r: self.g2r,
            gr1: self.gr1,
            gr2: self.gr2,
            power,
        }
    }
}

/// Inclusive arithmetic range `start, start + step, …, stop`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

/// Largest number of values a [`Range`] may expand to.
pub const MAX_RANGE_LEN: usize = 100_000;

impl Range {
    /// Values of the range, each rounded to 12 significant digits so that
    /// decimal steps print as written. `field` names the range in errors.
    pub fn values(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let bad = |reason: String| CliError::Field {
            field: field.to_string(),
            reason,
        };
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(bad("start and stop must be finite".into()));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(bad(format!("step must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(bad(format!(
                "stop {} is below start {}",
                self.stop, self.start
            )));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor();
        if n >= MAX_RANGE_LEN as f64 {
            return Err(bad(format!("more than {MAX_RANGE_LEN} values")));
        }
        Ok((0..=n as usize)
            .map(|i| round_sig(self.start + i as f64 * self.step))
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerScenario {
    pub name: Option<String>,
    pub out: Option<PathBuf>,
    pub gains: Gains,
    /// Transmit power in dB; `P = 10^(dB/10)`.
    pub power_db: Range,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub sigma_grid: SigmaGrid,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceScenario {
    pub name: Option<String>,
    pub out: Option<PathBuf>,
    pub power: f64,
    pub gamma: f64,
    pub d: Range,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default)]
    pub sigma_grid: SigmaGrid,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionsScenario {
    pub name: Option<String>,
    pub out: Option<PathBuf>,
    pub config: GaussianTwrcConfig,
    #[serde(default)]
    pub sigma_grid: SigmaGrid,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmEvalScenario {
    pub name: Option<String>,
    pub out: Option<PathBuf>,
    /// Inline model; exclusive with `model_path`.
    pub model: Option<DmModel>,
    /// Model file, relative to the scenario file.
    pub model_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyScenario {
    pub name: Option<String>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub plan: VerifyPlan,
}

/// Mode a region-style scenario can be re-run under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeOverride {
    Region,
    Conditions,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Scenario::Region(s) => s.name.as_deref(),
            Scenario::SumratePower(s) => s.name.as_deref(),
            Scenario::SumrateDistance(s) => s.name.as_deref(),
            Scenario::Conditions(s) => s.name.as_deref(),
            Scenario::DmEval(s) => s.name.as_deref(),
            Scenario::Verify(s) => s.name.as_deref(),
        }
    }

    pub fn out(&self) -> Option<&Path> {
        match self {
            Scenario::Region(s) => s.out.as_deref(),
            Scenario::SumratePower(s) => s.out.as_deref(),
            Scenario::SumrateDistance(s) => s.out.as_deref(),
            Scenario::Conditions(s) => s.out.as_deref(),
            Scenario::DmEval(s) => s.out.as_deref(),
            Scenario::Verify(s) => s.out.as_deref(),
        }
    }

    /// Overrides the σ² grid size, where the mode has a σ² grid.
    pub fn set_grid_points(&mut self, points: usize) {
        match self {
            Scenario::Region(s) => s.sigma_grid.points = points,
            Scenario::SumratePower(s) => s.sigma_grid.points = points,
            Scenario::SumrateDistance(s) => s.sigma_grid.points = points,
            Scenario::Conditions(s) => s.sigma_grid.points = points,
            Scenario::DmEval(_) | Scenario::Verify(_) => {}
        }
    }

    /// Re-targets a scenario with a single Gaussian config to another mode.
    pub fn with_mode(self, mode: ModeOverride) -> Result<Self, CliError> {
        let (name, out, config, sigma_grid) = match self {
            Scenario::Region(s) => (s.name, s.out, s.config, s.sigma_grid),
            Scenario::Conditions(s) => (s.name, s.out, s.config, s.sigma_grid),
            _ => {
                return Err(CliError::Field {
                    field: "mode".into(),
                    reason: "--mode applies only to region and conditions scenarios".into(),
                })
            }
        };
        Ok(match mode {
            ModeOverride::Region => Scenario::Region(RegionScenario {
                name,
                out,
                config,
                schemes: all_schemes(),
                sigma_grid,
            }),
            ModeOverride::Conditions => Scenario::Conditions(ConditionsScenario {
                name,
                out,
                config,
                sigma_grid,
            }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG4: &str = r#"{
        "mode": "region",
        "config": {"g12": 0.1, "g1r": 2, "g21": 0.1, "g2r": 0.5, "gr1": 2, "gr2": 0.5, "power": 20}
    }"#;

    #[test]
    fn defaults_fill_in() {
        let Scenario::Region(s) = Scenario::from_json(FIG4).unwrap() else {
            panic!("wrong mode");
        };
        assert_eq!(s.schemes, Scheme::ALL.to_vec());
        assert_eq!(s.sigma_grid, SigmaGrid::default());
        assert_eq!(s.config.power, 20.0);
    }

    #[test]
    fn partial_grid() {
        let text = FIG4.replacen("\"mode\"", "\"sigma_grid\": {\"points\": 50}, \"mode\"", 1);
        let Scenario::Region(s) = Scenario::from_json(&text).unwrap() else {
            panic!("wrong mode");
        };
        assert_eq!(s.sigma_grid.points, 50);
        assert_eq!(s.sigma_grid.max, 1e4);
    }

    #[test]
    fn unknown_fields_are_named() {
        let text = FIG4.replacen("\"mode\"", "\"colour\": 1, \"mode\"", 1);
        let err = Scenario::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        let text = FIG4.replace("\"g12\"", "\"g13\"");
        let err = Scenario::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("g13"), "{err}");
        let err = Scenario::from_json(r#"{"mode": "plot"}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("plot"), "{err}");
    }

    #[test]
    fn ranges() {
        let r = Range {
            start: 0.05,
            stop: 0.95,
            step: 0.01,
        };
        let v = r.values("d").unwrap();
        assert_eq!(v.len(), 91);
        assert_eq!(v[0], 0.05);
        assert_eq!(v[37], 0.42);
        assert_eq!(*v.last().unwrap(), 0.95);
        let bad = Range { step: 0.0, ..r };
        assert!(bad.values("d").unwrap_err().to_string().contains("`d`"));
    }
}
