//! Randomized property suites over the schemes and the two backends.
//!
//! Each suite draws seeded instances, checks one family of identities or
//! inequalities, and reports the worst violation it saw. Instances are
//! evaluated in parallel; results do not depend on thread scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{dm_joint, gaussian_variables, CompressionNoise, DmModel};
use crate::error::Result;
use crate::region::excess;
use crate::sample::{
    instance_rng, random_dm_oneway, random_dm_twrc, random_gaussian_config, random_sigma2,
};
use crate::schemes::{
    gaussian_closed_forms, oneway_cf_binning, oneway_cf_nobin, thresholds, MiProvider, Scheme,
    Symbol, TwrcTerms,
};
use crate::sweep::{sweep_sigma, SigmaGrid};

/// Tolerance the suites check against, in bits.
pub const SUITE_TOL: f64 = 1e-9;

/// Outcome of one property suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    /// Instances drawn.
    pub cases: usize,
    /// Instances on which a conditional check applied (e.g. a constraint
    /// held); equals `cases` for unconditional suites.
    pub applicable: usize,
    /// Instances with a violation above `tol`.
    pub failures: usize,
    /// Largest violation seen, 0 when none.
    pub max_violation: f64,
    pub tol: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Per-instance outcome: whether the conditional part applied, and the
/// violation.
struct Case {
    applicable: bool,
    violation: f64,
}

fn run_suite(
    name: &'static str,
    seed: u64,
    cases: usize,
    tol: f64,
    check: impl Fn(u64) -> Result<Case> + Sync,
) -> Result<SuiteReport> {
    let results: Vec<Case> = (0..cases as u64)
        .into_par_iter()
        .map(|i| check(seed_index(seed, i)))
        .collect::<Result<_>>()?;
    Ok(SuiteReport {
        name,
        cases,
        applicable: results.iter().filter(|c| c.applicable).count(),
        failures: results.iter().filter(|c| c.violation > tol).count(),
        max_violation: results.iter().map(|c| c.violation).fold(0.0, f64::max),
        tol,
    })
}

// Packs (seed, index) into one value so `check` receives a single key.
fn seed_index(seed: u64, i: u64) -> u64 {
    seed.rotate_left(32) ^ i
}

fn rng_for(key: u64) -> rand_chacha::ChaCha8Rng {
    instance_rng(key, key)
}

/// Binning and no-binning agree wherever binning is feasible, and the
/// redundancy inequality `I(Ŷr;Yr|Xr,Y) ≥ I(Ŷr;Yr|Xr) − I(Ŷr;X,Y|Xr)` holds.
pub fn oneway_equivalence(seed: u64, cases: usize) -> Result<SuiteReport> {
    use Symbol::*;
    run_suite("oneway_equivalence", seed, cases, SUITE_TOL, |key| {
        let joint = dm_joint(&DmModel::OneWay(random_dm_oneway(&mut rng_for(key))?))?;
        let nobin = oneway_cf_nobin(&joint)?;
        let bin = oneway_cf_binning(&joint)?;
        let lhs = joint.cmi(&[Yhat], &[Yr], &[Xr, Y])?;
        let rhs = joint.cmi(&[Yhat], &[Yr], &[Xr])? - joint.cmi(&[Yhat], &[X, Y], &[Xr])?;
        let mut violation = (rhs - lhs).max(0.0);
        if bin.feasible {
            if !nobin.feasible {
                violation = f64::INFINITY;
            }
            violation = violation
                .max((nobin.rate - bin.rate).abs())
                .max((bin.min_form - bin.rate).abs());
        }
        Ok(Case {
            applicable: bin.feasible,
            violation,
        })
    })
}

/// The binning constraint implies the no-binning constraint, and feasible
/// binning bounds never exceed the no-binning bounds.
pub fn constraint_implication(seed: u64, cases: usize) -> Result<SuiteReport> {
    run_suite("constraint_implication", seed, cases, SUITE_TOL, |key| {
        let joint = dm_joint(&DmModel::Twrc(random_dm_twrc(&mut rng_for(key))?))?;
        let t = TwrcTerms::evaluate(&joint)?;
        let holds = t.wz1.max(t.wz2) <= t.relay1.min(t.relay2);
        if !holds {
            return Ok(Case {
                applicable: false,
                violation: 0.0,
            });
        }
        let mut violation = (t.quant1 - t.relay1).max(t.quant2 - t.relay2).max(0.0);
        let bin = t.point(Scheme::CfBinning, None).rates;
        let nobin = t.point(Scheme::CfNobin, None).rates;
        match (bin, nobin) {
            (Some(b), Some(n)) => {
                violation = violation.max(b.r1 - n.r1).max(b.r2 - n.r2);
            }
            (Some(_), None) => violation = f64::INFINITY,
            _ => {}
        }
        Ok(Case {
            applicable: true,
            violation,
        })
    })
}

/// Engine-evaluated two-way bounds against the Gaussian closed forms, on
/// `configs` random configs × `per_config` random σ².
pub fn closed_form_agreement(seed: u64, configs: usize, per_config: usize) -> Result<SuiteReport> {
    let mut report = run_suite("closed_form_agreement", seed, configs, SUITE_TOL, |key| {
        let mut rng = rng_for(key);
        let cfg = random_gaussian_config(&mut rng);
        let mut violation: f64 = 0.0;
        for _ in 0..per_config {
            let s = random_sigma2(&mut rng);
            let t = TwrcTerms::evaluate(&gaussian_variables(&cfg, CompressionNoise::new(s)?)?)?;
            let cf = gaussian_closed_forms(&cfg, s)?;
            for (engine, closed) in [
                (t.dec1, cf.r11),
                (t.mac1 - t.quant2, cf.r12),
                (t.dec2, cf.r21),
                (t.mac2 - t.quant1, cf.r22),
            ] {
                violation = violation.max((engine - closed).abs());
            }
        }
        Ok(Case {
            applicable: true,
            violation,
        })
    })?;
    report.applicable *= per_config;
    Ok(report)
}

/// `R11, R21` nonincreasing and `R12, R22` nondecreasing in σ², and
/// `σ_c1² ≤ σ_e1²`, `σ_c2² ≤ σ_e2²`.
pub fn monotonicity(seed: u64, cases: usize) -> Result<SuiteReport> {
    let grid = SigmaGrid {
        points: 400,
        ..SigmaGrid::default()
    }
    .values(&[])?;
    run_suite("monotonicity", seed, cases, SUITE_TOL, |key| {
        let cfg = random_gaussian_config(&mut rng_for(key));
        let th = thresholds(&cfg)?;
        let mut violation = (th.sigma_c1 - th.sigma_e1)
            .max(th.sigma_c2 - th.sigma_e2)
            .max(0.0);
        let forms = grid
            .iter()
            .map(|&s| gaussian_closed_forms(&cfg, s))
            .collect::<Result<Vec<_>>>()?;
        for w in forms.windows(2) {
            let (a, b) = (w[0], w[1]);
            violation = violation
                .max(b.r11 - a.r11)
                .max(b.r21 - a.r21)
                .max(a.r12 - b.r12)
                .max(a.r22 - b.r22);
        }
        Ok(Case {
            applicable: true,
            violation,
        })
    })
}

/// `nnc ⊇ cf_nobin ⊇ cf_binning` frontiers on random Gaussian configs.
pub fn frontier_nesting(seed: u64, cases: usize, grid_points: usize) -> Result<SuiteReport> {
    let grid = SigmaGrid {
        points: grid_points,
        ..SigmaGrid::default()
    };
    run_suite("frontier_nesting", seed, cases, SUITE_TOL, |key| {
        let cfg = random_gaussian_config(&mut rng_for(key));
        let sw = sweep_sigma(&cfg, &Scheme::ALL, &grid)?;
        let f = |s| sw.frontier(s).unwrap_or_default();
        let (bin, nobin, nnc) = (f(Scheme::CfBinning), f(Scheme::CfNobin), f(Scheme::Nnc));
        let violation = excess(&bin, &nobin).max(excess(&nobin, &nnc)).max(0.0);
        Ok(Case {
            applicable: true,
            violation,
        })
    })
}

/// Sizes of the standard verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyPlan {
    pub seed: u64,
    pub dm_cases: usize,
    pub gaussian_configs: usize,
    pub sigma_per_config: usize,
    pub nesting_cases: usize,
    pub nesting_grid_points: usize,
}

impl Default for VerifyPlan {
    fn default() -> Self {
        VerifyPlan {
            seed: 20_240_601,
            dm_cases: 500,
            gaussian_configs: 100,
            sigma_per_config: 20,
            nesting_cases: 20,
            nesting_grid_points: 200,
        }
    }
}

/// Runs every suite in a fixed order.
pub fn run_all(plan: &VerifyPlan) -> Result<Vec<SuiteReport>> {
    let s = plan.seed;
    Ok(vec![
        closed_form_agreement(s, plan.gaussian_configs, plan.sigma_per_config)?,
        monotonicity(s ^ 1, plan.gaussian_configs)?,
        oneway_equivalence(s ^ 2, plan.dm_cases)?,
        constraint_implication(s ^ 3, plan.dm_cases)?,
        frontier_nesting(s ^ 4, plan.nesting_cases, plan.nesting_grid_points)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for r in [
            closed_form_agreement(1, 5, 5).unwrap(),
            monotonicity(2, 5).unwrap(),
            oneway_equivalence(3, 40).unwrap(),
            constraint_implication(4, 40).unwrap(),
            frontier_nesting(5, 3, 100).unwrap(),
        ] {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn reports_are_reproducible() {
        assert_eq!(
            oneway_equivalence(9, 30).unwrap(),
            oneway_equivalence(9, 30).unwrap()
        );
    }
}
