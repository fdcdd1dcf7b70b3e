//! Seeded random instances for property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::channel::{DmOneWay, DmTwrc, GaussianTwrcConfig, OneWaySizes, TwrcSizes};
use crate::error::Result;

/// Deterministic generator for instance `index` of a suite seeded `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A point drawn uniformly from the probability simplex (Dirichlet(1)).
pub fn simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= total);
    v
}

/// `rows` conditional pmfs of width `n`, concatenated.
fn stochastic_rows(rng: &mut impl Rng, rows: usize, n: usize) -> Vec<f64> {
    (0..rows).flat_map(|_| simplex(rng, n)).collect()
}

/// Test channel rows blended toward uniform by a random weight, so that
/// compression ranges from nearly lossless to nearly useless across
/// instances.
fn test_channel(rng: &mut impl Rng, rows: usize, n: usize) -> Vec<f64> {
    let noise: f64 = rng.random();
    let uniform = 1.0 / n as f64;
    let mut t = stochastic_rows(rng, rows, n);
    t.iter_mut()
        .for_each(|p| *p = (1.0 - noise) * *p + noise * uniform);
    // Re-normalize each row so rounding cannot push a slice off unit mass.
    for row in t.chunks_mut(n) {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|p| *p /= s);
    }
    t
}

fn binary_or_ternary(rng: &mut impl Rng) -> usize {
    rng.random_range(2..=3)
}

pub fn random_dm_oneway(rng: &mut impl Rng) -> Result<DmOneWay> {
    let mut size = || binary_or_ternary(rng);
    let s = OneWaySizes {
        x: size(),
        xr: size(),
        y: size(),
        yr: size(),
        yhat: size(),
    };
    let p_x = simplex(rng, s.x);
    let p_xr = simplex(rng, s.xr);
    let channel = stochastic_rows(rng, s.x * s.xr, s.y * s.yr);
    let test = test_channel(rng, s.xr * s.yr, s.yhat);
    DmOneWay::new(s, p_x, p_xr, channel, test)
}

pub fn random_dm_twrc(rng: &mut impl Rng) -> Result<DmTwrc> {
    let mut size = || binary_or_ternary(rng);
    let s = TwrcSizes {
        x1: size(),
        x2: size(),
        xr: size(),
        y1: size(),
        y2: size(),
        yr: size(),
        yhat: size(),
    };
    let p_x1 = simplex(rng, s.x1);
    let p_x2 = simplex(rng, s.x2);
    let p_xr = simplex(rng, s.xr);
    let channel = stochastic_rows(rng, s.x1 * s.x2 * s.xr, s.y1 * s.y2 * s.yr);
    let test = test_channel(rng, s.xr * s.yr, s.yhat);
    DmTwrc::new(s, p_x1, p_x2, p_xr, channel, test)
}

/// Gains uniform on `[0.05, 3]`, power log-uniform on `[0.1, 100]`.
pub fn random_gaussian_config(rng: &mut impl Rng) -> GaussianTwrcConfig {
    let mut gain = || rng.random_range(0.05..3.0);
    let (g12, g1r, g21, g2r, gr1, gr2) = (gain(), gain(), gain(), gain(), gain(), gain());
    GaussianTwrcConfig {
        g12,
        g1r,
        g21,
        g2r,
        gr1,
        gr2,
        power: 10f64.powf(rng.random_range(-1.0..2.0)),
    }
}

/// Compression noise log-uniform on `[1e-3, 1e3]`.
pub fn random_sigma2(rng: &mut impl Rng) -> f64 {
    10f64.powf(rng.random_range(-3.0..3.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_instance() {
        let a = random_dm_twrc(&mut instance_rng(7, 3)).unwrap();
        let b = random_dm_twrc(&mut instance_rng(7, 3)).unwrap();
        let c = random_dm_twrc(&mut instance_rng(7, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn simplex_points_are_pmfs() {
        let mut rng = instance_rng(1, 0);
        for n in 1..6 {
            let p = simplex(&mut rng, n);
            assert_eq!(p.len(), n);
            assert!(p.iter().all(|v| *v >= 0.0));
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn random_configs_validate() {
        let mut rng = instance_rng(2, 0);
        for _ in 0..100 {
            random_gaussian_config(&mut rng).validate().unwrap();
            let s = random_sigma2(&mut rng);
            assert!((1e-3..=1e3).contains(&s));
        }
    }
}
