//! Achievable rate regions of the one-way and two-way relay channels under
//! compress-forward (with and without Wyner-Ziv binning) and noisy network
//! coding.
//!
//! Two mutual-information backends share one set of scheme formulas:
//! [`gaussian`] evaluates exact conditional mutual information for
//! jointly Gaussian linear models, and [`dm`] evaluates it over finite joint
//! pmfs. [`region`] and [`sweep`] turn per-σ² evaluations into Pareto
//! frontiers and sum-rate curves.

pub mod channel;
pub mod dm;
pub mod error;
pub mod gaussian;
pub mod region;
pub mod sample;
pub mod schemes;
pub mod sweep;
pub mod verify;

pub use channel::{
    dm_joint, gaussian_variables, CompressionNoise, DmModel, DmOneWay, DmTwrc, GaussianTwrcConfig,
    OneWaySizes, TwrcSizes,
};
pub use dm::{dm_cmi, DmJoint};
pub use error::{Error, Result};
pub use gaussian::{cmi, covariance, GaussianVarSet, LinearVariable, SourceBasis};
pub use region::{
    contains, excess, max_sum_rate, region_from_sweep, regions_equal, Corner, Frontier, RatePoint,
    SumRateMax, REGION_EQ_TOL,
};
pub use schemes::{
    binning_equality_holds, capacity, gaussian_closed_forms, nnc_equivalence_holds,
    oneway_cf_binning, oneway_cf_nobin, thresholds, twrc_rates, Binding, Bound, ClosedForms,
    MiProvider, Scheme, SchemePoint, SigmaThresholds, Symbol, TwrcTerms,
};
pub use sweep::{
    distance_config, sweep_distance, sweep_power, sweep_sigma, SigmaGrid, SigmaSweep, SweepResult,
    SweepRow,
};
