//! Relay-channel instances: the Gaussian two-way relay channel with an
//! additive Gaussian compression test channel, and finite discrete-memoryless
//! one-way and two-way models.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dm::DmJoint;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianVarSet, LinearVariable, SourceBasis};
use crate::schemes::Symbol;

/// Largest joint pmf (number of entries) a DM model may expand to.
pub const MAX_JOINT_ENTRIES: u128 = 10_000_000;

/// Tolerance on the mass of every conditional pmf slice.
pub const PMF_SLICE_TOL: f64 = 1e-12;

/// Gains and common power constraint of the Gaussian two-way relay channel:
///
/// ```text
/// Y1 = g12·X2 + g1r·Xr + Z1
/// Y2 = g21·X1 + g2r·Xr + Z2
/// Yr = gr1·X1 + gr2·X2 + Zr
/// ```
///
/// with unit-variance noises and power `P` at both users and the relay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianTwrcConfig {
    pub g12: f64,
    pub g1r: f64,
    pub g21: f64,
    pub g2r: f64,
    pub gr1: f64,
    pub gr2: f64,
    pub power: f64,
}

impl GaussianTwrcConfig {
    pub fn validate(&self) -> Result<()> {
        let gains = [
            ("g12", self.g12),
            ("g1r", self.g1r),
            ("g21", self.g21),
            ("g2r", self.g2r),
            ("gr1", self.gr1),
            ("gr2", self.gr2),
        ];
        for (name, g) in gains {
            if !g.is_finite() {
                return Err(Error::config(name, format!("gain must be finite, got {g}")));
            }
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return Err(Error::config(
                "power",
                format!("must be positive and finite, got {}", self.power),
            ));
        }
        Ok(())
    }

    /// The same gains at another power.
    pub fn with_power(&self, power: f64) -> Self {
        GaussianTwrcConfig { power, ..*self }
    }
}

/// Variance of the compression noise `Ẑ` in `Ŷr = Yr + Ẑ`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CompressionNoise(f64);

impl CompressionNoise {
    pub fn new(sigma2: f64) -> Result<Self> {
        if sigma2 >= 0.0 && sigma2.is_finite() {
            Ok(CompressionNoise(sigma2))
        } else {
            Err(Error::config(
                "sigma2",
                format!("must be finite and >= 0, got {sigma2}"),
            ))
        }
    }

    pub fn sigma2(self) -> f64 {
        self.0
    }
}

/// Linear-Gaussian model of the two-way relay channel.
///
/// The basis is `{X1, X2, Xr, Z1, Z2, Zr, Zhat}` with variances
/// `{P, P, P, 1, 1, 1, σ²}`; the set holds `X1, X2, Xr, Y1, Y2, Yr, Yhat`.
pub fn gaussian_variables(
    cfg: &GaussianTwrcConfig,
    noise: CompressionNoise,
) -> Result<GaussianVarSet> {
    cfg.validate()?;
    let p = cfg.power;
    let basis = SourceBasis::new([
        ("X1", p),
        ("X2", p),
        ("Xr", p),
        ("Z1", 1.0),
        ("Z2", 1.0),
        ("Zr", 1.0),
        ("Zhat", noise.sigma2()),
    ])?;
    let var = |coeffs: [f64; 7]| LinearVariable::new(&basis, coeffs.to_vec());
    let mut set = GaussianVarSet::new(Arc::clone(&basis));
    set.insert(Symbol::X1.name(), var([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])?)?;
    set.insert(Symbol::X2.name(), var([0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0])?)?;
    set.insert(Symbol::Xr.name(), var([0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0])?)?;
    set.insert(
        Symbol::Y1.name(),
        var([0.0, cfg.g12, cfg.g1r, 1.0, 0.0, 0.0, 0.0])?,
    )?;
    set.insert(
        Symbol::Y2.name(),
        var([cfg.g21, 0.0, cfg.g2r, 0.0, 1.0, 0.0, 0.0])?,
    )?;
    set.insert(
        Symbol::Yr.name(),
        var([cfg.gr1, cfg.gr2, 0.0, 0.0, 0.0, 1.0, 0.0])?,
    )?;
    set.insert(
        Symbol::Yhat.name(),
        var([cfg.gr1, cfg.gr2, 0.0, 0.0, 0.0, 1.0, 1.0])?,
    )?;
    Ok(set)
}

/// Alphabet sizes of a one-way relay channel and its test channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneWaySizes {
    pub x: usize,
    pub xr: usize,
    pub y: usize,
    pub yr: usize,
    pub yhat: usize,
}

/// Alphabet sizes of a two-way relay channel and its test channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwrcSizes {
    pub x1: usize,
    pub x2: usize,
    pub xr: usize,
    pub y1: usize,
    pub y2: usize,
    pub yr: usize,
    pub yhat: usize,
}

/// Discrete-memoryless one-way relay channel with input pmfs and test channel.
///
/// Flattened row-major layouts:
/// - `channel`: `p(y, yr | x, xr)` indexed `[x][xr][y][yr]`
/// - `test_channel`: `p(ŷr | xr, yr)` indexed `[xr][yr][ŷr]`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOneWay")]
pub struct DmOneWay {
    pub sizes: OneWaySizes,
    pub p_x: Vec<f64>,
    pub p_xr: Vec<f64>,
    pub channel: Vec<f64>,
    pub test_channel: Vec<f64>,
}

/// Discrete-memoryless two-way relay channel with input pmfs and test channel.
///
/// Flattened row-major layouts:
/// - `channel`: `p(y1, y2, yr | x1, x2, xr)` indexed `[x1][x2][xr][y1][y2][yr]`
/// - `test_channel`: `p(ŷr | xr, yr)` indexed `[xr][yr][ŷr]`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTwrc")]
pub struct DmTwrc {
    pub sizes: TwrcSizes,
    pub p_x1: Vec<f64>,
    pub p_x2: Vec<f64>,
    pub p_xr: Vec<f64>,
    pub channel: Vec<f64>,
    pub test_channel: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOneWay {
    sizes: OneWaySizes,
    p_x: Vec<f64>,
    p_xr: Vec<f64>,
    channel: Vec<f64>,
    test_channel: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTwrc {
    sizes: TwrcSizes,
    p_x1: Vec<f64>,
    p_x2: Vec<f64>,
    p_xr: Vec<f64>,
    channel: Vec<f64>,
    test_channel: Vec<f64>,
}

impl TryFrom<RawOneWay> for DmOneWay {
    type Error = Error;

    fn try_from(r: RawOneWay) -> Result<Self> {
        DmOneWay::new(r.sizes, r.p_x, r.p_xr, r.channel, r.test_channel)
    }
}

impl TryFrom<RawTwrc> for DmTwrc {
    type Error = Error;

    fn try_from(r: RawTwrc) -> Result<Self> {
        DmTwrc::new(r.sizes, r.p_x1, r.p_x2, r.p_xr, r.channel, r.test_channel)
    }
}

fn check_alphabet(sizes: &[(&str, usize)]) -> Result<()> {
    let mut entries: u128 = 1;
    for &(name, n) in sizes {
        if n == 0 {
            return Err(Error::config(
                format!("sizes.{name}"),
                "alphabet must be nonempty",
            ));
        }
        entries = entries.saturating_mul(n as u128);
    }
    if entries > MAX_JOINT_ENTRIES {
        return Err(Error::AlphabetTooLarge {
            entries,
            limit: MAX_JOINT_ENTRIES,
        });
    }
    Ok(())
}

/// Checks that `pmf` is a stack of `len / slice` conditional pmfs.
fn check_pmf(what: &str, pmf: &[f64], expected_len: usize, slice: usize) -> Result<()> {
    if pmf.len() != expected_len {
        return Err(Error::distribution(
            what,
            format!("expected {expected_len} entries, found {}", pmf.len()),
        ));
    }
    if let Some(bad) = pmf.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(Error::distribution(
            what,
            format!("entry {bad} is not a probability"),
        ));
    }
    for (i, row) in pmf.chunks(slice).enumerate() {
        let mass: f64 = row.iter().sum();
        if (mass - 1.0).abs() > PMF_SLICE_TOL {
            return Err(Error::distribution(
                what,
                format!("slice {i} sums to {mass}, expected 1"),
            ));
        }
    }
    Ok(())
}

impl DmOneWay {
    pub fn new(
        sizes: OneWaySizes,
        p_x: Vec<f64>,
        p_xr: Vec<f64>,
        channel: Vec<f64>,
        test_channel: Vec<f64>,
    ) -> Result<Self> {
        let s = sizes;
        check_alphabet(&[
            ("x", s.x),
            ("xr", s.xr),
            ("y", s.y),
            ("yr", s.yr),
            ("yhat", s.yhat),
        ])?;
        check_pmf("p_x", &p_x, s.x, s.x)?;
        check_pmf("p_xr", &p_xr, s.xr, s.xr)?;
        check_pmf("channel", &channel, s.x * s.xr * s.y * s.yr, s.y * s.yr)?;
        check_pmf("test_channel", &test_channel, s.xr * s.yr * s.yhat, s.yhat)?;
        Ok(DmOneWay {
            sizes,
            p_x,
            p_xr,
            channel,
            test_channel,
        })
    }
}

impl DmTwrc {
    pub fn new(
        sizes: TwrcSizes,
        p_x1: Vec<f64>,
        p_x2: Vec<f64>,
        p_xr: Vec<f64>,
        channel: Vec<f64>,
        test_channel: Vec<f64>,
    ) -> Result<Self> {
        let s = sizes;
        check_alphabet(&[
            ("x1", s.x1),
            ("x2", s.x2),
            ("xr", s.xr),
            ("y1", s.y1),
            ("y2", s.y2),
            ("yr", s.yr),
            ("yhat", s.yhat),
        ])?;
        check_pmf("p_x1", &p_x1, s.x1, s.x1)?;
        check_pmf("p_x2", &p_x2, s.x2, s.x2)?;
        check_pmf("p_xr", &p_xr, s.xr, s.xr)?;
        let outputs = s.y1 * s.y2 * s.yr;
        check_pmf("channel", &channel, s.x1 * s.x2 * s.xr * outputs, outputs)?;
        check_pmf("test_channel", &test_channel, s.xr * s.yr * s.yhat, s.yhat)?;
        Ok(DmTwrc {
            sizes,
            p_x1,
            p_x2,
            p_xr,
            channel,
            test_channel,
        })
    }
}

/// A DM model as stored on disk, tagged by `"kind"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DmModel {
    OneWay(DmOneWay),
    Twrc(DmTwrc),
}

impl DmModel {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Full joint pmf of a DM model, including `Ŷr`.
///
/// Variable order is `X, Xr, Y, Yr, Yhat` for the one-way channel and
/// `X1, X2, Xr, Y1, Y2, Yr, Yhat` for the two-way channel.
pub fn dm_joint(model: &DmModel) -> Result<DmJoint> {
    match model {
        DmModel::OneWay(m) => one_way_joint(m),
        DmModel::Twrc(m) => twrc_joint(m),
    }
}

fn one_way_joint(m: &DmOneWay) -> Result<DmJoint> {
    let s = m.sizes;
    let mut probs = Vec::with_capacity(s.x * s.xr * s.y * s.yr * s.yhat);
    for x in 0..s.x {
        for xr in 0..s.xr {
            let p_in = m.p_x[x] * m.p_xr[xr];
            for y in 0..s.y {
                for yr in 0..s.yr {
                    let p_ch = m.channel[((x * s.xr + xr) * s.y + y) * s.yr + yr];
                    let test = &m.test_channel[(xr * s.yr + yr) * s.yhat..][..s.yhat];
                    probs.extend(test.iter().map(|q| p_in * p_ch * q));
                }
            }
        }
    }
    DmJoint::new(
        [Symbol::X, Symbol::Xr, Symbol::Y, Symbol::Yr, Symbol::Yhat].map(Symbol::name),
        vec![s.x, s.xr, s.y, s.yr, s.yhat],
        probs,
    )
}

fn twrc_joint(m: &DmTwrc) -> Result<DmJoint> {
    let s = m.sizes;
    let outputs = s.y1 * s.y2 * s.yr;
    let mut probs = Vec::with_capacity(s.x1 * s.x2 * s.xr * outputs * s.yhat);
    for x1 in 0..s.x1 {
        for x2 in 0..s.x2 {
            for xr in 0..s.xr {
                let p_in = m.p_x1[x1] * m.p_x2[x2] * m.p_xr[xr];
                let block = &m.channel[((x1 * s.x2 + x2) * s.xr + xr) * outputs..][..outputs];
                for (o, p_ch) in block.iter().enumerate() {
                    let yr = o % s.yr;
                    let test = &m.test_channel[(xr * s.yr + yr) * s.yhat..][..s.yhat];
                    probs.extend(test.iter().map(|q| p_in * p_ch * q));
                }
            }
        }
    }
    DmJoint::new(
        [
            Symbol::X1,
            Symbol::X2,
            Symbol::Xr,
            Symbol::Y1,
            Symbol::Y2,
            Symbol::Yr,
            Symbol::Yhat,
        ]
        .map(Symbol::name),
        vec![s.x1, s.x2, s.xr, s.y1, s.y2, s.yr, s.yhat],
        probs,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
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

    #[test]
    fn zero_gains_leave_pure_noise() {
        let cfg = GaussianTwrcConfig {
            g12: 0.0,
            g1r: 0.0,
            g21: 0.0,
            g2r: 0.0,
            gr1: 0.0,
            gr2: 0.0,
            power: 5.0,
        };
        let set = gaussian_variables(&cfg, CompressionNoise::new(1.0).unwrap()).unwrap();
        assert_eq!(
            set.get("Y1").unwrap().coeffs(),
            &[0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn relay_observation_variance() {
        let set = gaussian_variables(&fig4(), CompressionNoise::new(1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(set.get("Yr").unwrap().variance(), 86.0, epsilon = 1e-12);
        assert_abs_diff_eq!(set.get("Yhat").unwrap().variance(), 87.0, epsilon = 1e-12);
    }

    #[test]
    fn noiseless_compression_copies_relay_observation() {
        let set = gaussian_variables(&fig4(), CompressionNoise::new(0.0).unwrap()).unwrap();
        let yr = set.get("Yr").unwrap();
        let yhat = set.get("Yhat").unwrap();
        assert_abs_diff_eq!(yr.variance(), yhat.variance());
        assert_eq!(&yr.coeffs()[..6], &yhat.coeffs()[..6]);
    }

    #[test]
    fn config_validation_names_field() {
        let err = fig4().with_power(0.0).validate().unwrap_err();
        assert!(err.to_string().contains("power"));
        let cfg = GaussianTwrcConfig {
            g2r: f64::NAN,
            ..fig4()
        };
        assert!(cfg.validate().unwrap_err().to_string().contains("g2r"));
        assert!(CompressionNoise::new(-1.0).is_err());
    }

    fn binary_sizes() -> OneWaySizes {
        OneWaySizes {
            x: 2,
            xr: 2,
            y: 2,
            yr: 2,
            yhat: 2,
        }
    }

    /// p(y|x) = BSC(ε), Yr an independent fair coin, constant Ŷr.
    fn bsc_one_way(eps: f64) -> DmOneWay {
        let mut channel = Vec::new();
        for x in 0..2 {
            for _xr in 0..2 {
                for y in 0..2 {
                    let py = if x == y { 1.0 - eps } else { eps };
                    channel.extend([py * 0.5, py * 0.5]);
                }
            }
        }
        DmOneWay::new(
            binary_sizes(),
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            channel,
            vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn bsc_marginal() {
        let joint = dm_joint(&DmModel::OneWay(bsc_one_way(0.11))).unwrap();
        let pxy = joint.marginal(&["X", "Y"]).unwrap();
        for (got, want) in pxy.iter().zip([0.445, 0.055, 0.055, 0.445]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn deterministic_channel_sits_on_diagonal() {
        let sizes = OneWaySizes {
            x: 3,
            xr: 1,
            y: 3,
            yr: 1,
            yhat: 1,
        };
        let mut channel = vec![0.0; 9];
        for x in 0..3 {
            channel[x * 3 + x] = 1.0;
        }
        let m = DmOneWay::new(sizes, vec![0.2, 0.3, 0.5], vec![1.0], channel, vec![1.0]).unwrap();
        let joint = dm_joint(&DmModel::OneWay(m)).unwrap();
        let pxy = joint.marginal(&["X", "Y"]).unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(pxy[x * 3 + y] > 0.0, x == y);
            }
        }
    }

    #[test]
    fn independent_coins_give_uniform_joint() {
        let s = TwrcSizes {
            x1: 2,
            x2: 2,
            xr: 2,
            y1: 2,
            y2: 2,
            yr: 2,
            yhat: 2,
        };
        let m = DmTwrc::new(
            s,
            vec![0.5; 2],
            vec![0.5; 2],
            vec![0.5; 2],
            vec![0.125; 64],
            vec![0.5; 8],
        )
        .unwrap();
        let joint = dm_joint(&DmModel::Twrc(m)).unwrap();
        assert_eq!(joint.probs().len(), 128);
        for p in joint.probs() {
            assert_abs_diff_eq!(*p, 1.0 / 128.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_pmfs() {
        let m = bsc_one_way(0.2);
        let err = DmOneWay::new(
            m.sizes,
            vec![0.6, 0.6],
            m.p_xr.clone(),
            m.channel.clone(),
            m.test_channel.clone(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidDistribution { ref what, .. } if what == "p_x"));
        let err = DmOneWay::new(
            m.sizes,
            m.p_x.clone(),
            m.p_xr.clone(),
            vec![0.25; 3],
            m.test_channel.clone(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidDistribution { ref what, .. } if what == "channel"));
        let mut neg = m.test_channel.clone();
        neg[0] = -0.5;
        neg[1] = 1.5;
        assert!(DmOneWay::new(
            m.sizes,
            m.p_x.clone(),
            m.p_xr.clone(),
            m.channel.clone(),
            neg
        )
        .is_err());
    }

    #[test]
    fn rejects_huge_alphabets() {
        let s = TwrcSizes {
            x1: 10,
            x2: 10,
            xr: 10,
            y1: 10,
            y2: 10,
            yr: 10,
            yhat: 11,
        };
        let err = DmTwrc::new(s, vec![], vec![], vec![], vec![], vec![]).unwrap_err();
        assert!(matches!(err, Error::AlphabetTooLarge { .. }));
    }

    #[test]
    fn json_round_trip_and_strictness() {
        let model = DmModel::OneWay(bsc_one_way(0.11));
        let text = serde_json::to_string(&model).unwrap();
        assert!(text.contains("\"kind\":\"one_way\""));
        assert_eq!(DmModel::from_json(&text).unwrap(), model);

        let extra = text.replacen("\"p_x\"", "\"bogus\":1,\"p_x\"", 1);
        let err = DmModel::from_json(&extra).unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");

        let bad = text.replacen("[0.5,0.5]", "[0.5,0.6]", 1);
        let err = DmModel::from_json(&bad).unwrap_err().to_string();
        assert!(err.contains("p_x"), "{err}");
    }

    #[test]
    fn joint_recovers_channel() {
        let m = bsc_one_way(0.3);
        let joint = dm_joint(&DmModel::OneWay(m.clone())).unwrap();
        let full = joint.marginal(&["X", "Xr", "Y", "Yr"]).unwrap();
        for x in 0..2 {
            for xr in 0..2 {
                for o in 0..4 {
                    let i = (x * 2 + xr) * 4 + o;
                    let cond = full[i] / (m.p_x[x] * m.p_xr[xr]);
                    assert_abs_diff_eq!(cond, m.channel[i], epsilon = 1e-12);
                }
            }
        }
    }
}
