//! Learning curves of memorizing classifiers.
//!
//! A memorizing classifier stores every labelled feature it has seen and
//! errs exactly on features it has not. After `n` i.i.d. draws from a
//! discrete feature distribution with masses `θ_1 ≥ θ_2 ≥ ...`, its
//! expected instantaneous error is
//!
//! ```text
//! E_n = Σ_i θ_i (1 − θ_i)^n
//! ```
//!
//! This crate evaluates that curve and its relatives four independent
//! ways, which cross-validate each other:
//!
//! * [`curves`]: exact evaluation of instantaneous and time-averaged
//!   means and variances, grouped over equal-mass atoms so that heavy
//!   tails with astronomically many atoms stay cheap;
//! * [`asymptotics`]: closed-form power-law predictions `c n^{-β}` with
//!   validity thresholds, plus rigorous upper and lower bounds;
//! * [`sim`]: parallel Monte-Carlo ensembles that are bit-reproducible
//!   for any worker count;
//! * [`powerfit`]: log-log least squares recovering `(β, c)` from any
//!   curve, measured or exact.
//!
//! [`dist`] constructs the feature distributions (uniform, Zipf,
//! exponential, and friends), [`noisy`] adds label noise and the
//! frequency-estimation loss it induces, and [`corpus`] runs the
//! word-novelty experiment on real text.

pub mod asymptotics;
pub mod corpus;
pub mod csvio;
pub mod curves;
pub mod dist;
pub mod error;
pub mod noisy;
pub mod powerfit;
pub mod rng;
pub mod series;
pub mod sim;

pub use dist::{DistSpec, Family, FeatureDistribution, Group, Truncation};
pub use error::Error;
pub use powerfit::{FitReport, PowerLawFit};
pub use series::{CurveKind, CurveSeries, SeriesMeta};
pub use sim::{EnsembleCurves, ExperimentConfig};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
