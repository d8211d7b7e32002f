//! Shared error type.

use thiserror::Error;

/// Everything that can go wrong across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution spec '{spec}': {reason}")]
    BadDistSpec { spec: String, reason: String },

    #[error("invalid parameter {name}={value}: {reason}")]
    BadParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("explicit weights must be positive and finite, got {value} at index {index}")]
    BadWeight { index: usize, value: f64 },

    #[error("explicit weight list is empty")]
    EmptyWeights,

    #[error("truncation must keep at least one atom")]
    EmptyTruncation,

    #[error("tail bound {requested:e} is unreachable; mass beyond the atom cap is {achievable:e}")]
    TailBoundUnreachable { requested: f64, achievable: f64 },

    #[error("horizon {0} is too small; need at least 1")]
    BadHorizon(u64),

    #[error("run count {0} is too small; need at least 1")]
    BadRuns(u64),

    #[error("exact noisy loss supports n <= {max}, got {n}")]
    ExactLossHorizon { n: u64, max: u64 },

    #[error("noise level {0} must lie in [0, 1]")]
    BadNoiseLevel(f64),

    #[error("group count {found} exceeds the exact-variance cap {cap}; use the asymptotic approximation")]
    GroupCapExceeded { found: usize, cap: usize },

    #[error("oracle supports at most 4 atoms and horizon 6, got {atoms} atoms, horizon {horizon}")]
    OracleCapExceeded { atoms: u64, horizon: u64 },

    #[error("no {what} for family '{family}'")]
    UnsupportedFamily {
        family: &'static str,
        what: &'static str,
    },

    #[error("sample sequence rises again after falling at index {0}; not unimodal")]
    NonUnimodal(usize),

    #[error("per-feature noise needs one level per atom: {expected} atoms, {found} levels")]
    NoiseLengthMismatch { expected: u64, found: usize },

    #[error("loss scale {0} must lie in (0, 1]")]
    BadLossScale(f64),

    #[error("fit window [{n_min}, {n_max}] is empty")]
    EmptyFitWindow { n_min: u64, n_max: u64 },

    #[error("fit needs at least {need} usable points, found {found}")]
    TooFewFitPoints { need: usize, found: usize },

    #[error("fit input contains no positive values in the window")]
    NoPositiveFitValues,

    #[error("series has no column '{0}'")]
    UnknownColumn(String),

    #[error("csv parse error at line {line}: {reason}")]
    CsvParse { line: usize, reason: String },

    #[error("csv is missing required header column '{0}'")]
    CsvMissingColumn(&'static str),

    #[error("corpus is empty after tokenization")]
    EmptyCorpus,

    #[error("rank table has fewer than {need} entries above min_count, found {found}")]
    TooFewRanks { need: usize, found: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
