//! Exact conditional mutual information for jointly Gaussian variables.
//!
//! Every variable is a linear form over a fixed set of independent zero-mean
//! Gaussian sources, so any covariance is `A diag(v) Aᵀ` and every
//! conditional mutual information reduces to four log-determinants:
//!
//! ```text
//! I(A;B|C) = ½ log₂( pdet Σ_AC · pdet Σ_BC / (pdet Σ_C · pdet Σ_ABC) )
//! ```
//!
//! Determinants are pseudo-determinants. The rank is read off the
//! coefficient matrix (singular values below [`RANK_REL_CUTOFF`] times the
//! largest count as zero), and the nonzero eigenvalues are obtained as
//! squared singular values of the square-root factor `A diag(√v)`, which
//! avoids squaring its condition number.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative cutoff below which a coefficient singular value counts as zero.
pub const RANK_REL_CUTOFF: f64 = 1e-9;

/// Ordered, named set of independent zero-mean Gaussian sources.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceBasis {
    names: Vec<String>,
    variances: Vec<f64>,
}

impl SourceBasis {
    pub fn new<S: Into<String>>(sources: impl IntoIterator<Item = (S, f64)>) -> Result<Arc<Self>> {
        let mut names = Vec::new();
        let mut variances = Vec::new();
        for (name, var) in sources {
            let name = name.into();
            if names.contains(&name) {
                return Err(Error::InvalidBasis(format!("duplicate source `{name}`")));
            }
            if !(var >= 0.0 && var.is_finite()) {
                return Err(Error::InvalidBasis(format!(
                    "source `{name}` has variance {var}"
                )));
            }
            names.push(name);
            variances.push(var);
        }
        Ok(Arc::new(SourceBasis { names, variances }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A linear combination of the sources in a [`SourceBasis`].
#[derive(Debug, Clone)]
pub struct LinearVariable {
    basis: Arc<SourceBasis>,
    coeffs: Vec<f64>,
}

impl LinearVariable {
    pub fn new(basis: &Arc<SourceBasis>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::CoefficientLength {
                expected: basis.len(),
                found: coeffs.len(),
            });
        }
        Ok(LinearVariable {
            basis: Arc::clone(basis),
            coeffs,
        })
    }

    /// The variable equal to a single source.
    pub fn source(basis: &Arc<SourceBasis>, name: &str) -> Result<Self> {
        let idx = basis
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        let mut coeffs = vec![0.0; basis.len()];
        coeffs[idx] = 1.0;
        Self::new(basis, coeffs)
    }

    /// `Σ kᵢ·vᵢ` over variables sharing one basis.
    pub fn combine(terms: &[(f64, &LinearVariable)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidBasis("empty linear combination".into()))?;
        let basis = &first.basis;
        let mut coeffs = vec![0.0; basis.len()];
        for (k, v) in terms {
            if !same_basis(basis, &v.basis) {
                return Err(Error::BasisMismatch);
            }
            for (c, x) in coeffs.iter_mut().zip(&v.coeffs) {
                *c += k * x;
            }
        }
        Self::new(basis, coeffs)
    }

    pub fn basis(&self) -> &Arc<SourceBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn variance(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.basis.variances)
            .map(|(c, v)| c * c * v)
            .sum()
    }
}

fn same_basis(a: &Arc<SourceBasis>, b: &Arc<SourceBasis>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check_shared<'a>(vars: impl IntoIterator<Item = &'a LinearVariable>) -> Result<()> {
    let mut basis: Option<&Arc<SourceBasis>> = None;
    for v in vars {
        match basis {
            None => basis = Some(&v.basis),
            Some(b) if !same_basis(b, &v.basis) => return Err(Error::BasisMismatch),
            Some(_) => {}
        }
    }
    Ok(())
}

/// Covariance matrix of the listed variables.
pub fn covariance(vars: &[&LinearVariable]) -> Result<DMatrix<f64>> {
    check_shared(vars.iter().copied())?;
    let n = vars.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        vars[i]
            .coeffs
            .iter()
            .zip(&vars[j].coeffs)
            .zip(&vars[i].basis.variances)
            .map(|((a, b), v)| a * b * v)
            .sum()
    }))
}

#[derive(Debug, Clone, Copy)]
struct LogPdet {
    log2: f64,
    rank: usize,
}

fn log_pdet(rows: &[&LinearVariable]) -> LogPdet {
    if rows.is_empty() {
        return LogPdet { log2: 0.0, rank: 0 };
    }
    // Canonical row order makes the result independent of argument order.
    let mut rows = rows.to_vec();
    rows.sort_by(|a, b| {
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let basis = &rows[0].basis;
    // Rank comes from the coefficients on the nonzero-variance sources, which
    // are of order one; the variance-scaled factor can span many orders of
    // magnitude and would blur a relative cutoff.
    let live: Vec<usize> = (0..basis.len())
        .filter(|&j| basis.variances[j] > 0.0)
        .collect();
    let coeffs = DMatrix::from_fn(rows.len(), live.len(), |i, k| rows[i].coeffs[live[k]]);
    let sv = coeffs.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > RANK_REL_CUTOFF * top).count();
    if rank == 0 {
        return LogPdet { log2: 0.0, rank: 0 };
    }
    let factor = DMatrix::from_fn(rows.len(), live.len(), |i, k| {
        rows[i].coeffs[live[k]] * basis.variances[live[k]].sqrt()
    });
    let mut eig: Vec<f64> = factor.singular_values().iter().map(|s| s * s).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    LogPdet {
        log2: eig[..rank].iter().map(|l| l.log2()).sum(),
        rank,
    }
}

/// `I(A;B|C)` in bits. `C` may be empty.
///
/// Returns `+∞` when `A` and `B` share a deterministic component given `C`
/// (for instance `I(Y;Y|…)` with nonzero conditional variance). That case is
/// detected by rank: finite information requires
/// `rank(AC) + rank(BC) = rank(C) + rank(ABC)`.
pub fn cmi(a: &[&LinearVariable], b: &[&LinearVariable], c: &[&LinearVariable]) -> Result<f64> {
    check_shared(a.iter().chain(b).chain(c).copied())?;
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let ac: Vec<_> = a.iter().chain(c).copied().collect();
    let bc: Vec<_> = b.iter().chain(c).copied().collect();
    let abc: Vec<_> = a.iter().chain(b).chain(c).copied().collect();
    let (ac, bc, c, abc) = (log_pdet(&ac), log_pdet(&bc), log_pdet(c), log_pdet(&abc));
    if ac.rank + bc.rank > c.rank + abc.rank {
        return Ok(f64::INFINITY);
    }
    Ok((0.5 * ((ac.log2 + bc.log2) - (c.log2 + abc.log2))).max(0.0))
}

/// Named variables over one shared basis.
#[derive(Debug, Clone)]
pub struct GaussianVarSet {
    basis: Arc<SourceBasis>,
    vars: BTreeMap<String, LinearVariable>,
}

impl GaussianVarSet {
    pub fn new(basis: Arc<SourceBasis>) -> Self {
        GaussianVarSet {
            basis,
            vars: BTreeMap::new(),
        }
    }

    pub fn basis(&self) -> &Arc<SourceBasis> {
        &self.basis
    }

    pub fn insert(&mut self, label: impl Into<String>, var: LinearVariable) -> Result<()> {
        if !same_basis(&self.basis, &var.basis) {
            return Err(Error::BasisMismatch);
        }
        self.vars.insert(label.into(), var);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&LinearVariable> {
        self.vars.get(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.vars.keys().map(String::as_str)
    }

    fn lookup(&self, labels: &[&str]) -> Result<Vec<&LinearVariable>> {
        labels
            .iter()
            .map(|l| {
                self.vars
                    .get(*l)
                    .ok_or_else(|| Error::UnknownVariable((*l).to_string()))
            })
            .collect()
    }

    /// `I(A;B|C)` over labels of this set.
    pub fn cmi_by_label(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        cmi(&self.lookup(a)?, &self.lookup(b)?, &self.lookup(c)?)
    }
}
