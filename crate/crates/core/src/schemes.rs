//! Rate bounds and feasibility constraints of compress-forward with and
//! without Wyner-Ziv binning, and of noisy network coding, for the one-way
//! and two-way relay channels.
//!
//! Every expression is evaluated through a [`MiProvider`], so the same code
//! runs against the exact Gaussian engine and against finite joint pmfs.
//! The Gaussian closed forms and σ² thresholds live here as well, as an
//! independent route for the Gaussian two-way channel.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::GaussianTwrcConfig;
use crate::dm::{dm_cmi, DmJoint};
use crate::error::{Error, Result};
use crate::gaussian::GaussianVarSet;
use crate::region::RatePoint;

/// Slack allowed when checking a feasibility constraint `lhs ≤ rhs`, in bits.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Tolerance for the equality conditions of [`binning_equality_holds`].
pub const EQUALITY_TOL: f64 = 1e-9;

/// Channel symbols a [`MiProvider`] can be queried about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// One-way source input.
    X,
    /// One-way destination output.
    Y,
    X1,
    X2,
    Xr,
    Y1,
    Y2,
    Yr,
    /// The relay's compressed observation Ŷr.
    Yhat,
}

impl Symbol {
    pub const fn name(self) -> &'static str {
        match self {
            Symbol::X => "X",
            Symbol::Y => "Y",
            Symbol::X1 => "X1",
            Symbol::X2 => "X2",
            Symbol::Xr => "Xr",
            Symbol::Y1 => "Y1",
            Symbol::Y2 => "Y2",
            Symbol::Yr => "Yr",
            Symbol::Yhat => "Yhat",
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Anything that can answer `I(A;B|C)` queries over channel symbols.
pub trait MiProvider {
    fn cmi(&self, a: &[Symbol], b: &[Symbol], c: &[Symbol]) -> Result<f64>;
}

fn names(symbols: &[Symbol]) -> Vec<&'static str> {
    symbols.iter().map(|s| s.name()).collect()
}

fn missing(err: Error, a: &[Symbol], b: &[Symbol], c: &[Symbol]) -> Error {
    match err {
        Error::UnknownVariable(n) => a
            .iter()
            .chain(b)
            .chain(c)
            .find(|s| s.name() == n)
            .map(|s| Error::MissingSymbol(*s))
            .unwrap_or(Error::UnknownVariable(n)),
        e => e,
    }
}

impl MiProvider for GaussianVarSet {
    fn cmi(&self, a: &[Symbol], b: &[Symbol], c: &[Symbol]) -> Result<f64> {
        self.cmi_by_label(&names(a), &names(b), &names(c))
            .map_err(|e| missing(e, a, b, c))
    }
}

impl MiProvider for DmJoint {
    fn cmi(&self, a: &[Symbol], b: &[Symbol], c: &[Symbol]) -> Result<f64> {
        dm_cmi(self, &names(a), &names(b), &names(c)).map_err(|e| missing(e, a, b, c))
    }
}

/// Which term of a `min{…}` rate bound is the smaller one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// The decoding term `I(X;Y,Ŷr|Xr)` (or its two-way analogue).
    Decoding,
    /// The compression-penalised term `I(X,Xr;Y) − I(Ŷr;Yr|X,Xr,Y)`.
    Compression,
}

fn min_bound(decoding: f64, compression: f64) -> (f64, Bound) {
    if compression < decoding {
        (compression, Bound::Compression)
    } else {
        (decoding, Bound::Decoding)
    }
}

/// Rate of compress-forward without binning on the one-way channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneWayNoBin {
    /// `max(0, min{I(X,Xr;Y) − I(Ŷr;Yr|X,Xr,Y), I(X;Y,Ŷr|Xr)})`.
    pub rate: f64,
    pub bound: Bound,
    /// `I(Xr;Y) + I(Ŷr;X,Y|Xr) ≥ I(Ŷr;Yr|Xr)`.
    pub feasible: bool,
}

/// Rate of compress-forward with binning on the one-way channel, in its
/// constrained form, with the unconstrained min-form alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneWayBinning {
    /// `I(X;Y,Ŷr|Xr)`.
    pub rate: f64,
    /// `I(Xr;Y) ≥ I(Ŷr;Yr|Xr,Y)`.
    pub feasible: bool,
    /// `max(0, min{I(X,Xr;Y) − I(Ŷr;Yr|X,Xr,Y), I(X;Y,Ŷr|Xr)})`.
    pub min_form: f64,
}

impl OneWayNoBin {
    pub fn achievable(&self) -> Option<f64> {
        self.feasible.then_some(self.rate)
    }
}

impl OneWayBinning {
    pub fn achievable(&self) -> Option<f64> {
        self.feasible.then_some(self.rate)
    }
}

struct OneWayTerms {
    decoding: f64,
    compression: f64,
}

fn one_way_terms(mi: &impl MiProvider) -> Result<OneWayTerms> {
    use Symbol::*;
    let decoding = mi.cmi(&[X], &[Y, Yhat], &[Xr])?;
    let compression = mi.cmi(&[X, Xr], &[Y], &[])? - mi.cmi(&[Yhat], &[Yr], &[X, Xr, Y])?;
    Ok(OneWayTerms {
        decoding,
        compression,
    })
}

pub fn oneway_cf_nobin(mi: &impl MiProvider) -> Result<OneWayNoBin> {
    use Symbol::*;
    let t = one_way_terms(mi)?;
    let (rate, bound) = min_bound(t.decoding, t.compression);
    let supply = mi.cmi(&[Xr], &[Y], &[])? + mi.cmi(&[Yhat], &[X, Y], &[Xr])?;
    let demand = mi.cmi(&[Yhat], &[Yr], &[Xr])?;
    Ok(OneWayNoBin {
        rate: rate.max(0.0),
        bound,
        feasible: demand <= supply + FEASIBILITY_TOL,
    })
}

pub fn oneway_cf_binning(mi: &impl MiProvider) -> Result<OneWayBinning> {
    use Symbol::*;
    let t = one_way_terms(mi)?;
    let supply = mi.cmi(&[Xr], &[Y], &[])?;
    let demand = mi.cmi(&[Yhat], &[Yr], &[Xr, Y])?;
    Ok(OneWayBinning {
        rate: t.decoding,
        feasible: demand <= supply + FEASIBILITY_TOL,
        min_form: t.decoding.min(t.compression).max(0.0),
    })
}

/// Relaying scheme on the two-way relay channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Compress-forward without binning, joint decoding.
    CfNobin,
    /// Compress-forward with Wyner-Ziv binning, successive decoding.
    CfBinning,
    /// Noisy network coding.
    Nnc,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::CfBinning, Scheme::CfNobin, Scheme::Nnc];

    pub const fn tag(self) -> &'static str {
        match self {
            Scheme::CfNobin => "cf_nobin",
            Scheme::CfBinning => "cf_binning",
            Scheme::Nnc => "nnc",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sch| sch.tag() == s)
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

/// Why a two-way point is (in)feasible and which bounds are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    Rates {
        r1: Bound,
        r2: Bound,
    },
    /// The compression-index constraint fails at user 1's and/or user 2's
    /// decoder.
    Infeasible {
        at_user1: bool,
        at_user2: bool,
    },
}

/// One evaluation of a two-way scheme at a fixed test channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemePoint {
    pub scheme: Scheme,
    /// Compression noise variance, for Gaussian evaluations.
    pub sigma2: Option<f64>,
    /// Rate bounds `(R1, R2)`; `None` when infeasible.
    pub rates: Option<RatePoint>,
    pub binding: Binding,
}

impl SchemePoint {
    pub fn feasible(&self) -> bool {
        self.rates.is_some()
    }

    pub fn sum_rate(&self) -> Option<f64> {
        self.rates.map(|r| r.r1 + r.r2)
    }
}

/// All mutual-information terms the two-way schemes need, evaluated once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwrcTerms {
    /// `I(X1;Y2,Ŷr|X2,Xr)`
    pub dec1: f64,
    /// `I(X1,Xr;Y2|X2)`
    pub mac1: f64,
    /// `I(Ŷr;Yr|X1,X2,Xr,Y2)`
    pub quant2: f64,
    /// `I(X2;Y1,Ŷr|X1,Xr)`
    pub dec2: f64,
    /// `I(X2,Xr;Y1|X1)`
    pub mac2: f64,
    /// `I(Ŷr;Yr|X1,X2,Xr,Y1)`
    pub quant1: f64,
    /// `I(Xr;Y1|X1)`
    pub relay1: f64,
    /// `I(Xr;Y2|X2)`
    pub relay2: f64,
    /// `I(Ŷr;Yr|X1,Xr,Y1)`
    pub wz1: f64,
    /// `I(Ŷr;Yr|X2,Xr,Y2)`
    pub wz2: f64,
}

impl TwrcTerms {
    pub fn evaluate(mi: &impl MiProvider) -> Result<Self> {
        use Symbol::*;
        Ok(TwrcTerms {
            dec1: mi.cmi(&[X1], &[Y2, Yhat], &[X2, Xr])?,
            mac1: mi.cmi(&[X1, Xr], &[Y2], &[X2])?,
            quant2: mi.cmi(&[Yhat], &[Yr], &[X1, X2, Xr, Y2])?,
            dec2: mi.cmi(&[X2], &[Y1, Yhat], &[X1, Xr])?,
            mac2: mi.cmi(&[X2, Xr], &[Y1], &[X1])?,
            quant1: mi.cmi(&[Yhat], &[Yr], &[X1, X2, Xr, Y1])?,
            relay1: mi.cmi(&[Xr], &[Y1], &[X1])?,
            relay2: mi.cmi(&[Xr], &[Y2], &[X2])?,
            wz1: mi.cmi(&[Yhat], &[Yr], &[X1, Xr, Y1])?,
            wz2: mi.cmi(&[Yhat], &[Yr], &[X2, Xr, Y2])?,
        })
    }

    /// `min{I(X1;Y2,Ŷr|X2,Xr), I(X1,Xr;Y2|X2) − I(Ŷr;Yr|X1,X2,Xr,Y2)}`,
    /// and the user-2 analogue. Shared by cf_nobin and nnc.
    pub fn joint_bounds(&self) -> ((f64, Bound), (f64, Bound)) {
        (
            min_bound(self.dec1, self.mac1 - self.quant2),
            min_bound(self.dec2, self.mac2 - self.quant1),
        )
    }

    /// Per-user checks of the no-binning compression constraint.
    pub fn nobin_constraint(&self) -> (bool, bool) {
        (
            self.quant1 <= self.relay1 + FEASIBILITY_TOL,
            self.quant2 <= self.relay2 + FEASIBILITY_TOL,
        )
    }

    /// Per-user checks of the binning constraint
    /// `max{wz1, wz2} ≤ min{relay1, relay2}`.
    pub fn binning_constraint(&self) -> (bool, bool) {
        let demand = self.wz1.max(self.wz2);
        (
            demand <= self.relay1 + FEASIBILITY_TOL,
            demand <= self.relay2 + FEASIBILITY_TOL,
        )
    }

    pub fn point(&self, scheme: Scheme, sigma2: Option<f64>) -> SchemePoint {
        let ((r1, b1), (r2, b2)) = self.joint_bounds();
        let (ok1, ok2, rates, binding) = match scheme {
            Scheme::Nnc => (true, true, (r1, r2), Binding::Rates { r1: b1, r2: b2 }),
            Scheme::CfNobin => {
                let (ok1, ok2) = self.nobin_constraint();
                (ok1, ok2, (r1, r2), Binding::Rates { r1: b1, r2: b2 })
            }
            Scheme::CfBinning => {
                let (ok1, ok2) = self.binning_constraint();
                let b = Bound::Decoding;
                (
                    ok1,
                    ok2,
                    (self.dec1, self.dec2),
                    Binding::Rates { r1: b, r2: b },
                )
            }
        };
        if ok1 && ok2 {
            SchemePoint {
                scheme,
                sigma2,
                rates: Some(RatePoint::new(rates.0.max(0.0), rates.1.max(0.0))),
                binding,
            }
        } else {
            SchemePoint {
                scheme,
                sigma2,
                rates: None,
                binding: Binding::Infeasible {
                    at_user1: !ok1,
                    at_user2: !ok2,
                },
            }
        }
    }

    /// Both equality conditions under which binning loses nothing.
    pub fn binning_equality(&self) -> bool {
        (self.relay1 - self.relay2).abs() <= EQUALITY_TOL
            && (self.wz1 - self.wz2).abs() <= EQUALITY_TOL
    }
}

/// Evaluates one scheme's rate bounds and feasibility on the two-way channel.
pub fn twrc_rates(mi: &impl MiProvider, scheme: Scheme) -> Result<SchemePoint> {
    Ok(TwrcTerms::evaluate(mi)?.point(scheme, None))
}

/// True iff `I(Xr;Y1|X1) = I(Xr;Y2|X2)` and
/// `I(Ŷr;Yr|X1,Xr,Y1) = I(Ŷr;Yr|X2,Xr,Y2)`, both within [`EQUALITY_TOL`].
pub fn binning_equality_holds(mi: &impl MiProvider) -> Result<bool> {
    use Symbol::*;
    let relay1 = mi.cmi(&[Xr], &[Y1], &[X1])?;
    let relay2 = mi.cmi(&[Xr], &[Y2], &[X2])?;
    let wz1 = mi.cmi(&[Yhat], &[Yr], &[X1, Xr, Y1])?;
    let wz2 = mi.cmi(&[Yhat], &[Yr], &[X2, Xr, Y2])?;
    Ok((relay1 - relay2).abs() <= EQUALITY_TOL && (wz1 - wz2).abs() <= EQUALITY_TOL)
}

/// Gaussian capacity function `C(x) = ½ log₂(1 + x)`.
pub fn capacity(x: f64) -> f64 {
    0.5 * x.ln_1p() / std::f64::consts::LN_2
}

/// Closed-form Gaussian rate terms at compression noise `σ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForms {
    /// `C(g21²P + gr1²P/(1+σ²))`
    pub r11: f64,
    /// `C(g21²P + g2r²P) − C(1/σ²)`
    pub r12: f64,
    /// `C(g12²P + gr2²P/(1+σ²))`
    pub r21: f64,
    /// `C(g12²P + g1r²P) − C(1/σ²)`
    pub r22: f64,
}

pub fn gaussian_closed_forms(cfg: &GaussianTwrcConfig, sigma2: f64) -> Result<ClosedForms> {
    cfg.validate()?;
    if sigma2 == 0.0 {
        return Err(Error::Divergent("C(1/sigma2)"));
    }
    if sigma2.is_nan() || sigma2 < 0.0 {
        return Err(Error::config(
            "sigma2",
            format!("must be >= 0, got {sigma2}"),
        ));
    }
    let p = cfg.power;
    let penalty = capacity(1.0 / sigma2);
    Ok(ClosedForms {
        r11: capacity(cfg.g21 * cfg.g21 * p + cfg.gr1 * cfg.gr1 * p / (1.0 + sigma2)),
        r12: capacity(cfg.g21 * cfg.g21 * p + cfg.g2r * cfg.g2r * p) - penalty,
        r21: capacity(cfg.g12 * cfg.g12 * p + cfg.gr2 * cfg.gr2 * p / (1.0 + sigma2)),
        r22: capacity(cfg.g12 * cfg.g12 * p + cfg.g1r * cfg.g1r * p) - penalty,
    })
}

/// Compression-noise thresholds of the Gaussian two-way channel.
///
/// `σ_c1², σ_c2²` bound the no-binning constraint from below; `σ_e1², σ_e2²`
/// are where the two terms of each user's rate bound cross. A zero
/// relay-to-user gain makes the corresponding pair infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaThresholds {
    pub sigma_c1: f64,
    pub sigma_c2: f64,
    pub sigma_e1: f64,
    pub sigma_e2: f64,
}

impl SigmaThresholds {
    pub fn has_infinite(&self) -> bool {
        !self.as_array().iter().all(|v| v.is_finite())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.sigma_c1, self.sigma_c2, self.sigma_e1, self.sigma_e2]
    }

    /// Smallest σ² at which compress-forward without binning is feasible.
    pub fn nobin_min(&self) -> f64 {
        self.sigma_c1.max(self.sigma_c2)
    }

    /// `σ_c1² ≤ σ_e2²` and `σ_c2² ≤ σ_e1²`.
    pub fn nnc_equivalence(&self) -> bool {
        self.sigma_c1 <= self.sigma_e2 && self.sigma_c2 <= self.sigma_e1
    }
}

pub fn thresholds(cfg: &GaussianTwrcConfig) -> Result<SigmaThresholds> {
    cfg.validate()?;
    let p = cfg.power;
    let sq = |g: f64| g * g * p;
    Ok(SigmaThresholds {
        sigma_c1: (1.0 + sq(cfg.g21)) / sq(cfg.g2r),
        sigma_c2: (1.0 + sq(cfg.g12)) / sq(cfg.g1r),
        sigma_e1: (1.0 + sq(cfg.g21) + sq(cfg.gr1)) / sq(cfg.g2r),
        sigma_e2: (1.0 + sq(cfg.g12) + sq(cfg.gr2)) / sq(cfg.g1r),
    })
}

/// Whether compress-forward without binning matches noisy network coding on
/// this Gaussian channel.
pub fn nnc_equivalence_holds(cfg: &GaussianTwrcConfig) -> Result<bool> {
    Ok(thresholds(cfg)?.nnc_equivalence())
}
