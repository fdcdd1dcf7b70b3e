//! Entropy and conditional mutual information over finite joint pmfs.

use crate::error::{Error, Result};

/// Probabilities at or below this are treated as exact zeros.
pub const ZERO_MASS: f64 = 1e-15;

/// Tolerance on the total mass of a joint pmf.
pub const TOTAL_MASS_TOL: f64 = 1e-9;

/// Joint pmf over named finite variables, stored row-major in name order.
#[derive(Debug, Clone, PartialEq)]
pub struct DmJoint {
    names: Vec<String>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

impl DmJoint {
    pub fn new<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        sizes: Vec<usize>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() != sizes.len() {
            return Err(Error::distribution(
                "joint",
                format!("{} names but {} alphabet sizes", names.len(), sizes.len()),
            ));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::distribution(
                    "joint",
                    format!("duplicate variable `{n}`"),
                ));
            }
        }
        let entries: usize = sizes.iter().product();
        if probs.len() != entries {
            return Err(Error::distribution(
                "joint",
                format!("expected {entries} entries, found {}", probs.len()),
            ));
        }
        if probs.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::distribution("joint", "negative or non-finite entry"));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > TOTAL_MASS_TOL {
            return Err(Error::distribution("joint", format!("total mass {mass}")));
        }
        Ok(DmJoint {
            names,
            sizes,
            probs,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn axis(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Marginal pmf of `names`, row-major in the order given.
    pub fn marginal(&self, names: &[&str]) -> Result<Vec<f64>> {
        let axes = names
            .iter()
            .map(|n| self.axis(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.marginal_axes(&axes))
    }

    fn marginal_axes(&self, axes: &[usize]) -> Vec<f64> {
        let out_len: usize = axes.iter().map(|&a| self.sizes[a]).product();
        // Stride each source axis contributes to the output index.
        let mut out_stride = vec![0usize; self.sizes.len()];
        let mut s = 1;
        for &a in axes.iter().rev() {
            out_stride[a] += s;
            s *= self.sizes[a];
        }
        let mut out = vec![0.0; out_len];
        let mut digits = vec![0usize; self.sizes.len()];
        let mut target = 0usize;
        for &p in &self.probs {
            out[target] += p;
            // Odometer increment, last axis fastest.
            for ax in (0..digits.len()).rev() {
                digits[ax] += 1;
                target += out_stride[ax];
                if digits[ax] < self.sizes[ax] {
                    break;
                }
                target -= out_stride[ax] * digits[ax];
                digits[ax] = 0;
            }
        }
        out
    }

    /// Joint entropy `H(names)` in bits.
    pub fn entropy(&self, names: &[&str]) -> Result<f64> {
        Ok(entropy_of(&self.marginal(names)?))
    }
}

fn entropy_of(pmf: &[f64]) -> f64 {
    pmf.iter()
        .filter(|&&p| p > ZERO_MASS)
        .map(|&p| -p * p.log2())
        .sum()
}

/// `I(A;B|C) = H(A,C) + H(B,C) − H(C) − H(A,B,C)` in bits.
pub fn dm_cmi(joint: &DmJoint, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    let mut seen: Vec<&str> = Vec::new();
    for &n in a.iter().chain(b).chain(c) {
        joint.axis(n)?;
        if seen.contains(&n) {
            return Err(Error::OverlappingSets(n.to_string()));
        }
        seen.push(n);
    }
    if a.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let h_ac = joint.entropy(&[a, c].concat())?;
    let h_bc = joint.entropy(&[b, c].concat())?;
    let h_c = joint.entropy(c)?;
    let h_abc = joint.entropy(&[a, b, c].concat())?;
    Ok(((h_ac + h_bc) - (h_c + h_abc)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn binary_entropy(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    fn pair(probs: Vec<f64>) -> DmJoint {
        DmJoint::new(["X", "Y"], vec![2, 2], probs).unwrap()
    }

    #[test]
    fn copy_carries_one_bit() {
        let j = pair(vec![0.5, 0.0, 0.0, 0.5]);
        assert_abs_diff_eq!(
            dm_cmi(&j, &["X"], &["Y"], &[]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn independent_pair_carries_nothing() {
        let j = pair(vec![0.12, 0.28, 0.18, 0.42]);
        assert_abs_diff_eq!(
            dm_cmi(&j, &["X"], &["Y"], &[]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn bsc_capacity() {
        let e = 0.11;
        let j = pair(vec![0.5 * (1.0 - e), 0.5 * e, 0.5 * e, 0.5 * (1.0 - e)]);
        let want = 1.0 - binary_entropy(e);
        assert_abs_diff_eq!(
            dm_cmi(&j, &["X"], &["Y"], &[]).unwrap(),
            want,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(want, 0.5001, epsilon = 1e-4);
    }

    #[test]
    fn conditioning_on_xor_reveals_dependence() {
        // Z = X xor Y with X, Y independent fair bits.
        let mut probs = vec![0.0; 8];
        for x in 0..2 {
            for y in 0..2 {
                probs[(x * 2 + y) * 2 + (x ^ y)] = 0.25;
            }
        }
        let j = DmJoint::new(["X", "Y", "Z"], vec![2, 2, 2], probs).unwrap();
        assert_abs_diff_eq!(
            dm_cmi(&j, &["X"], &["Y"], &[]).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            dm_cmi(&j, &["X"], &["Y"], &["Z"]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            dm_cmi(&j, &["X", "Y"], &["Z"], &[]).unwrap(),
            1.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn marginal_reorders_axes() {
        let j = pair(vec![0.1, 0.2, 0.3, 0.4]);
        assert_eq!(j.marginal(&["Y", "X"]).unwrap(), vec![0.1, 0.3, 0.2, 0.4]);
        assert_eq!(j.marginal(&["Y"]).unwrap(), vec![0.4, 0.6000000000000001]);
        assert_eq!(j.marginal(&[]).unwrap().len(), 1);
    }

    #[test]
    fn errors() {
        let j = pair(vec![0.25; 4]);
        assert!(matches!(
            dm_cmi(&j, &["Q"], &["Y"], &[]),
            Err(Error::UnknownVariable(_))
        ));
        assert!(matches!(
            dm_cmi(&j, &["X"], &["X"], &[]),
            Err(Error::OverlappingSets(_))
        ));
        assert!(DmJoint::new(["X"], vec![2], vec![0.5, 0.6]).is_err());
        assert!(DmJoint::new(["X"], vec![2], vec![1.5, -0.5]).is_err());
        assert!(DmJoint::new(["X", "X"], vec![1, 1], vec![1.0]).is_err());
    }

    /// A quantized scalar Gaussian channel should land near ½log₂(1+P).
    #[test]
    fn discretized_gaussian_matches_capacity() {
        use statrs::distribution::{ContinuousCDF, Normal};
        let p = 1.0f64;
        let (nx, ny) = (64usize, 256usize);
        let std_normal = Normal::new(0.0, 1.0).unwrap();

        // Input: 64 levels over ±6√P, weights from Gaussian bin masses.
        let sx = p.sqrt();
        let dx = 12.0 * sx / nx as f64;
        let xs: Vec<f64> = (0..nx).map(|i| -6.0 * sx + (i as f64 + 0.5) * dx).collect();
        let mut px: Vec<f64> = xs
            .iter()
            .map(|x| std_normal.cdf((x + dx / 2.0) / sx) - std_normal.cdf((x - dx / 2.0) / sx))
            .collect();
        let total: f64 = px.iter().sum();
        px.iter_mut().for_each(|v| *v /= total);

        // Output: Y = X + Z quantized into 256 bins over ±6√(P+1); tails fold
        // into the end bins.
        let sy = (p + 1.0).sqrt();
        let dy = 12.0 * sy / ny as f64;
        let mut probs = Vec::with_capacity(nx * ny);
        for (x, w) in xs.iter().zip(&px) {
            for k in 0..ny {
                let lo = if k == 0 {
                    f64::NEG_INFINITY
                } else {
                    -6.0 * sy + k as f64 * dy
                };
                let hi = if k == ny - 1 {
                    f64::INFINITY
                } else {
                    -6.0 * sy + (k + 1) as f64 * dy
                };
                probs.push(w * (std_normal.cdf(hi - x) - std_normal.cdf(lo - x)));
            }
        }
        let j = DmJoint::new(["X", "Y"], vec![nx, ny], probs).unwrap();
        let mi = dm_cmi(&j, &["X"], &["Y"], &[]).unwrap();
        let cap = 0.5 * (1.0 + p).log2();
        assert!((mi - cap).abs() < 0.02, "{mi} vs {cap}");
    }
}
