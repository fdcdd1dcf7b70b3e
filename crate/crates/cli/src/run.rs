//! Scenario execution and CSV output.

use std::path::{Path, PathBuf};

use relaycf_core::schemes::TwrcTerms;
use relaycf_core::verify::{run_all, SuiteReport};
use relaycf_core::{
    binning_equality_holds, dm_joint, excess, gaussian_variables, oneway_cf_binning,
    oneway_cf_nobin, sweep_distance, sweep_power, sweep_sigma, thresholds, CompressionNoise,
    DmModel, Scheme, SchemePoint, SweepResult, REGION_EQ_TOL,
};

use crate::error::CliError;
use crate::format::fmt_num;
use crate::scenario::{
    ConditionsScenario, DistanceScenario, DmEvalScenario, PowerScenario, RegionScenario, Scenario,
    VerifyScenario,
};

/// Settings that come from the command line rather than the scenario.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Output directory; overrides the scenario's `out`.
    pub out: Option<PathBuf>,
    /// Write the convex hull of each region as well.
    pub hull: bool,
    /// Containment tolerance in bits for the containment table.
    pub tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            out: None,
            hull: false,
            tol: REGION_EQ_TOL,
        }
    }
}

/// Default output directory when neither the flag nor the scenario sets one.
pub const DEFAULT_OUT: &str = "out";

struct Output {
    dir: PathBuf,
    name: String,
    written: Vec<PathBuf>,
}

impl Output {
    fn write(
        &mut self,
        suffix: &str,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<(), CliError> {
        let path = self.dir.join(format!("{}_{suffix}.csv", self.name));
        let io_err = |e: csv::Error| CliError::Write {
            path: path.clone(),
            source: e.into(),
        };
        let mut w = csv::Writer::from_path(&path).map_err(io_err)?;
        w.write_record(header).map_err(io_err)?;
        for row in rows {
            w.write_record(row).map_err(io_err)?;
        }
        w.flush().map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }
}

/// Runs `scenario` and returns the files written, in writing order.
///
/// `base_dir` resolves relative paths inside the scenario (its `out` and a
/// DM `model_path`); pass the scenario file's directory. `fallback_name`
/// names the outputs when the scenario has no `name`.
pub fn run(
    scenario: &Scenario,
    opts: &RunOptions,
    base_dir: &Path,
    fallback_name: &str,
) -> Result<Vec<PathBuf>, CliError> {
    if !(opts.tol >= 0.0 && opts.tol.is_finite()) {
        return Err(CliError::Field {
            field: "tol".into(),
            reason: format!("must be a finite nonnegative number, got {}", opts.tol),
        });
    }
    let name = scenario.name().unwrap_or(fallback_name).to_string();
    if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
        return Err(CliError::Field {
            field: "name".into(),
            reason: format!("`{name}` cannot be used as a file name prefix"),
        });
    }
    let dir = match (&opts.out, scenario.out()) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => base_dir.join(d),
        (None, None) => PathBuf::from(DEFAULT_OUT),
    };
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Write {
        path: dir.clone(),
        source,
    })?;
    let mut out = Output {
        dir,
        name,
        written: Vec::new(),
    };
    match scenario {
        Scenario::Region(s) => region(s, opts, &mut out)?,
        Scenario::SumratePower(s) => sumrate_power(s, &mut out)?,
        Scenario::SumrateDistance(s) => sumrate_distance(s, &mut out)?,
        Scenario::Conditions(s) => conditions(s, &mut out)?,
        Scenario::DmEval(s) => dm_eval(s, base_dir, &mut out)?,
        Scenario::Verify(s) => verify(s, &mut out)?,
    }
    Ok(out.written)
}

fn check_schemes(schemes: &[Scheme]) -> Result<(), CliError> {
    let bad = |reason: &str| CliError::Field {
        field: "schemes".into(),
        reason: reason.into(),
    };
    if schemes.is_empty() {
        return Err(bad("at least one scheme is required"));
    }
    for (i, s) in schemes.iter().enumerate() {
        if schemes[..i].contains(s) {
            return Err(bad(&format!("`{s}` listed twice")));
        }
    }
    Ok(())
}

fn flag(b: bool) -> String {
    b.to_string()
}

fn rate_cells(p: &SchemePoint) -> [String; 2] {
    match p.rates {
        Some(r) => [fmt_num(r.r1), fmt_num(r.r2)],
        None => [String::new(), String::new()],
    }
}

fn region(s: &RegionScenario, opts: &RunOptions, out: &mut Output) -> Result<(), CliError> {
    check_schemes(&s.schemes)?;
    let sw = sweep_sigma(&s.config, &s.schemes, &s.sigma_grid)?;

    let mut rows = Vec::new();
    for (scheme, pts) in &sw.points {
        for p in pts {
            let [r1, r2] = rate_cells(p);
            let sigma2 = p.sigma2.map(fmt_num).unwrap_or_default();
            rows.push(vec![scheme.to_string(), sigma2, r1, r2, flag(p.feasible())]);
        }
    }
    out.write(
        "points",
        &["scheme", "sigma2", "r1", "r2", "feasible"],
        &rows,
    )?;

    let frontiers: Vec<_> = s
        .schemes
        .iter()
        .map(|&sc| (sc, sw.frontier(sc).unwrap_or_default()))
        .collect();
    for (scheme, f) in &frontiers {
        let rows: Vec<_> = f
            .corners()
            .iter()
            .map(|c| {
                vec![
                    scheme.to_string(),
                    fmt_num(c.point.r1),
                    fmt_num(c.point.r2),
                    c.sigma2.map(fmt_num).unwrap_or_default(),
                ]
            })
            .collect();
        out.write(
            &format!("frontier_{scheme}"),
            &["scheme", "corner_r1", "corner_r2", "sigma2"],
            &rows,
        )?;
        if opts.hull {
            let rows: Vec<_> = f
                .convex_hull()
                .iter()
                .map(|p| vec![scheme.to_string(), fmt_num(p.r1), fmt_num(p.r2)])
                .collect();
            out.write(
                &format!("hull_{scheme}"),
                &["scheme", "hull_r1", "hull_r2"],
                &rows,
            )?;
        }
    }

    let mut rows = Vec::new();
    for (outer, fo) in &frontiers {
        for (inner, fi) in &frontiers {
            if outer == inner {
                continue;
            }
            let e = excess(fi, fo);
            rows.push(vec![
                outer.to_string(),
                inner.to_string(),
                fmt_num(e),
                flag(e <= opts.tol),
            ]);
        }
    }
    out.write(
        "containment",
        &["outer", "inner", "excess", "contains"],
        &rows,
    )
}

fn sumrate_rows(res: &SweepResult) -> Vec<Vec<String>> {
    res.rows
        .iter()
        .map(|r| {
            let (sum, sigma) = match r.best {
                Some(b) => (
                    fmt_num(b.sum_rate),
                    b.sigma2.map(fmt_num).unwrap_or_default(),
                ),
                None => (String::new(), String::new()),
            };
            vec![fmt_num(r.param), r.scheme.to_string(), sum, sigma]
        })
        .collect()
}

const SUMRATE_HEADER: [&str; 4] = ["param", "scheme", "sum_rate", "best_sigma2"];

fn sumrate_power(s: &PowerScenario, out: &mut Output) -> Result<(), CliError> {
    check_schemes(&s.schemes)?;
    let db = s.power_db.values("power_db")?;
    let powers: Vec<f64> = db.iter().map(|d| 10f64.powf(d / 10.0)).collect();
    let cfg = s.gains.with_power(1.0);
    let mut res = sweep_power(&cfg, &powers, &s.schemes, &s.sigma_grid)?;
    // Report the swept parameter in dB, as configured.
    for row in &mut res.rows {
        let i = powers
            .iter()
            .position(|p| *p == row.param)
            .expect("row power is on the grid");
        row.param = db[i];
    }
    out.write("sumrate", &SUMRATE_HEADER, &sumrate_rows(&res))
}

fn sumrate_distance(s: &DistanceScenario, out: &mut Output) -> Result<(), CliError> {
    check_schemes(&s.schemes)?;
    let ds = s.d.values("d")?;
    let res = sweep_distance(s.power, s.gamma, &ds, &s.schemes, &s.sigma_grid)?;
    out.write("sumrate", &SUMRATE_HEADER, &sumrate_rows(&res))
}

fn conditions(s: &ConditionsScenario, out: &mut Output) -> Result<(), CliError> {
    let th = thresholds(&s.config)?;
    let mut equal_everywhere = true;
    for sigma2 in s.sigma_grid.values(&th.as_array())? {
        let set = gaussian_variables(&s.config, CompressionNoise::new(sigma2)?)?;
        if !binning_equality_holds(&set)? {
            equal_everywhere = false;
            break;
        }
    }
    let row = vec![
        fmt_num(th.sigma_c1),
        fmt_num(th.sigma_c2),
        fmt_num(th.sigma_e1),
        fmt_num(th.sigma_e2),
        flag(th.nnc_equivalence()),
        flag(equal_everywhere),
    ];
    out.write(
        "conditions",
        &[
            "sigma_c1",
            "sigma_c2",
            "sigma_e1",
            "sigma_e2",
            "nnc_equivalence",
            "binning_equality",
        ],
        &[row],
    )
}

fn dm_eval(s: &DmEvalScenario, base_dir: &Path, out: &mut Output) -> Result<(), CliError> {
    let model = match (&s.model, &s.model_path) {
        (Some(m), None) => m.clone(),
        (None, Some(p)) => {
            let path = base_dir.join(p);
            let text = std::fs::read_to_string(&path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            DmModel::from_json(&text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        }
        _ => {
            return Err(CliError::Field {
                field: "model".into(),
                reason: "give exactly one of `model` and `model_path`".into(),
            })
        }
    };
    let joint = dm_joint(&model)?;
    match model {
        DmModel::OneWay(_) => {
            let nb = oneway_cf_nobin(&joint)?;
            let bin = oneway_cf_binning(&joint)?;
            let cell = |r: Option<f64>| r.map(fmt_num).unwrap_or_default();
            let rows = vec![
                vec![
                    Scheme::CfNobin.to_string(),
                    cell(nb.achievable()),
                    flag(nb.feasible),
                ],
                vec![
                    Scheme::CfBinning.to_string(),
                    cell(bin.achievable()),
                    flag(bin.feasible),
                ],
            ];
            out.write("dm", &["scheme", "rate", "feasible"], &rows)
        }
        DmModel::Twrc(_) => {
            let terms = TwrcTerms::evaluate(&joint)?;
            let rows: Vec<_> = Scheme::ALL
                .iter()
                .map(|&sc| {
                    let p = terms.point(sc, None);
                    let [r1, r2] = rate_cells(&p);
                    vec![sc.to_string(), r1, r2, flag(p.feasible())]
                })
                .collect();
            out.write("dm", &["scheme", "r1", "r2", "feasible"], &rows)
        }
    }
}

fn verify(s: &VerifyScenario, out: &mut Output) -> Result<(), CliError> {
    let reports = run_all(&s.plan)?;
    let rows: Vec<_> = reports.iter().map(verify_row).collect();
    out.write(
        "verify",
        &[
            "suite",
            "cases",
            "applicable",
            "failures",
            "max_violation",
            "tol",
            "result",
        ],
        &rows,
    )?;
    match reports.iter().filter(|r| !r.passed()).count() {
        0 => Ok(()),
        n => Err(CliError::VerifyFailed(n)),
    }
}

fn verify_row(r: &SuiteReport) -> Vec<String> {
    vec![
        r.name.to_string(),
        r.cases.to_string(),
        r.applicable.to_string(),
        r.failures.to_string(),
        fmt_num(r.max_violation),
        fmt_num(r.tol),
        if r.passed() { "PASS" } else { "FAIL" }.to_string(),
    ]
}
