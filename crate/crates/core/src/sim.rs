//! Monte-Carlo engine for the memorizing classifier, plus a
//! brute-force enumeration oracle for tiny instances.
//!
//! A run draws i.i.d. features and errs exactly on novel ones, so the
//! error sequence is a 0/1 novelty record. Ensembles aggregate pure
//! integer counts (error counts per position, squared prefix sums) and
//! convert to floats only at the end, which makes results bit-identical
//! for any worker count or work split.

use rayon::prelude::*;

use crate::curves::{inst_var, timeavg_var_capped};
use crate::dist::FeatureDistribution;
use crate::error::Error;
use crate::rng::SplitMix64;
use crate::series::{CurveKind, CurvePoint, CurveSeries, CurveTable, SeriesMeta};
use crate::Result;

/// Atom counts up to this use a dense seen bit-vector; larger supports
/// fall back to a hash set (banded tails can span 2^53 atoms).
const DENSE_SEEN_CAP: u64 = 1 << 25;

/// Theoretical standard errors are attached when the exact-curve work
/// stays under this many (group, point) pair evaluations.
const SE_PAIR_BUDGET: f64 = 2.0e8;

/// Per-point variance group cap reused from the exact engine.
const SE_GROUP_CAP: usize = 5000;

/// Everything that determines a simulation, and hence its output.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Independent runs averaged together.
    pub runs_k: u64,
    /// Largest sample size simulated; instantaneous errors cover
    /// 0..=horizon_n, averaged errors cover 1..=horizon_n.
    pub horizon_n: u64,
    /// Final multiplier on every mean and standard error, in (0, 1].
    pub loss_scale: f64,
    /// Textual distribution spec, carried into output metadata.
    pub dist_spec: String,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs_k == 0 {
            return Err(Error::BadRuns(self.runs_k));
        }
        if self.horizon_n == 0 {
            return Err(Error::BadHorizon(self.horizon_n));
        }
        if !(self.loss_scale > 0.0 && self.loss_scale <= 1.0) {
            return Err(Error::BadLossScale(self.loss_scale));
        }
        Ok(())
    }

    /// Build the distribution named by `dist_spec`.
    pub fn build_dist(&self) -> Result<FeatureDistribution> {
        self.dist_spec.parse::<crate::dist::DistSpec>()?.build()
    }
}

/// One simulated error sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    /// errors[n] = 1 iff the feature drawn at step n+1 was absent from
    /// the first n draws; length horizon_n + 1, errors[0] always 1.
    pub errors: Vec<bool>,
    pub run_index: u64,
}

enum SeenSet {
    Dense(Vec<u64>),
    Sparse(std::collections::HashSet<u64>),
}

impl SeenSet {
    fn for_dist(dist: &FeatureDistribution) -> Self {
        if dist.atom_count <= DENSE_SEEN_CAP {
            // Atom indices are 1-based, so bit atom_count must exist.
            SeenSet::Dense(vec![0u64; (dist.atom_count as usize + 1).div_ceil(64)])
        } else {
            SeenSet::Sparse(std::collections::HashSet::new())
        }
    }

    fn clear(&mut self) {
        match self {
            SeenSet::Dense(words) => words.fill(0),
            SeenSet::Sparse(set) => set.clear(),
        }
    }

    /// Insert, returning whether the feature was new.
    fn insert(&mut self, feature: u64) -> bool {
        match self {
            SeenSet::Dense(words) => {
                let word = &mut words[(feature / 64) as usize];
                let bit = 1u64 << (feature % 64);
                let new = *word & bit == 0;
                *word |= bit;
                new
            }
            SeenSet::Sparse(set) => set.insert(feature),
        }
    }
}

fn run_into(
    dist: &FeatureDistribution,
    config: &ExperimentConfig,
    run_index: u64,
    seen: &mut SeenSet,
    errors: &mut Vec<bool>,
) {
    let mut rng = SplitMix64::keyed(config.seed, run_index);
    seen.clear();
    errors.clear();
    for _ in 0..=config.horizon_n {
        errors.push(seen.insert(dist.sample(&mut rng)));
    }
}

/// Simulate one run: horizon_n + 1 i.i.d. draws, an error wherever the
/// draw is novel. Deterministic in (config.seed, run_index).
pub fn run_one(
    dist: &FeatureDistribution,
    config: &ExperimentConfig,
    run_index: u64,
) -> Result<RunRecord> {
    config.validate()?;
    let mut seen = SeenSet::for_dist(dist);
    let mut errors = Vec::with_capacity(config.horizon_n as usize + 1);
    run_into(dist, config, run_index, &mut seen, &mut errors);
    Ok(RunRecord { errors, run_index })
}

/// Integer aggregation state; merging two of these is exact and
/// commutative, so any parallel split yields identical totals.
struct Tally {
    /// error_count[n] = number of runs erring at position n.
    error_count: Vec<u64>,
    /// sq_prefix[N-1] = sum over runs of (error count at n < N)^2.
    sq_prefix: Vec<u128>,
}

impl Tally {
    fn new(horizon: u64) -> Self {
        Tally {
            error_count: vec![0; horizon as usize + 1],
            sq_prefix: vec![0; horizon as usize],
        }
    }

    fn absorb_run(&mut self, errors: &[bool]) {
        let mut prefix = 0u64;
        for (n, &e) in errors.iter().enumerate() {
            if e {
                self.error_count[n] += 1;
            }
            if n + 1 < errors.len() {
                prefix += u64::from(e);
                self.sq_prefix[n] += u128::from(prefix) * u128::from(prefix);
            }
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.error_count.iter_mut().zip(other.error_count) {
            *a += b;
        }
        for (a, b) in self.sq_prefix.iter_mut().zip(other.sq_prefix) {
            *a += b;
        }
        self
    }
}

/// The three Monte-Carlo curves of one ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleCurves {
    pub inst: CurveSeries,
    pub timeavg: CurveSeries,
    pub cumulative: CurveSeries,
}

impl EnsembleCurves {
    /// All three curves over a shared n axis, ready for CSV.
    pub fn table(&self) -> CurveTable {
        CurveTable::new(
            self.inst.meta.clone(),
            vec![
                self.inst.clone(),
                self.timeavg.clone(),
                self.cumulative.clone(),
            ],
        )
    }
}

fn ensemble_meta(dist: &FeatureDistribution, config: &ExperimentConfig) -> SeriesMeta {
    let mut meta = dist.series_meta();
    meta.dist_spec = config.dist_spec.clone();
    meta.runs_k = Some(config.runs_k);
    meta.seed = Some(config.seed);
    meta
}

/// Average `config.runs_k` independent runs.
///
/// Standard errors are theoretical (sigma_n / sqrt k from the exact
/// curves, matching how reference ensembles band their plots) when the
/// support is small enough to evaluate them, otherwise empirical
/// across runs; with a single run no empirical error exists and the
/// point carries none. `loss_scale` multiplies every mean and
/// standard error.
pub fn run_ensemble(
    dist: &FeatureDistribution,
    config: &ExperimentConfig,
) -> Result<EnsembleCurves> {
    config.validate()?;
    let horizon = config.horizon_n;
    let k = config.runs_k as f64;
    let scale = config.loss_scale;

    let tally = (0..config.runs_k)
        .into_par_iter()
        .fold(
            || (Tally::new(horizon), SeenSet::for_dist(dist), Vec::new()),
            |(mut tally, mut seen, mut errors), run_index| {
                run_into(dist, config, run_index, &mut seen, &mut errors);
                tally.absorb_run(&errors);
                (tally, seen, errors)
            },
        )
        .map(|(tally, _, _)| tally)
        .reduce(|| Tally::new(horizon), Tally::merge);

    let m = dist.group_count() as f64;
    let inst_theoretical = m * (horizon as f64 + 1.0) <= SE_PAIR_BUDGET;
    let timeavg_theoretical =
        dist.group_count() <= SE_GROUP_CAP && m * m * horizon as f64 <= SE_PAIR_BUDGET;
    let meta = ensemble_meta(dist, config);

    let mut inst_points = Vec::with_capacity(horizon as usize + 1);
    for (n, &count) in tally.error_count.iter().enumerate() {
        let p = count as f64 / k;
        let se = if inst_theoretical {
            Some(inst_var(dist, n as u64).sqrt() / k.sqrt())
        } else if config.runs_k > 1 {
            Some((p * (1.0 - p) / (k - 1.0)).sqrt())
        } else {
            None
        };
        inst_points.push(CurvePoint {
            n: n as u64,
            value: scale * p,
            se: se.map(|s| scale * s),
        });
    }

    let mut avg_points = Vec::with_capacity(horizon as usize);
    let mut cum_points = Vec::with_capacity(horizon as usize);
    let mut prefix_count = 0u64;
    for n_big in 1..=horizon {
        let i = (n_big - 1) as usize;
        prefix_count += tally.error_count[i];
        let n = n_big as f64;
        let value = scale * (prefix_count as f64 / (k * n));
        let se = if timeavg_theoretical {
            Some((timeavg_var_capped(dist, n_big, usize::MAX)? / k).sqrt())
        } else if config.runs_k > 1 {
            // Across-run sample variance of the per-run prefix mean.
            let sum = prefix_count as f64;
            let ss = tally.sq_prefix[i] as f64;
            let var_counts = ((ss - sum * sum / k) / (k - 1.0)).max(0.0);
            Some((var_counts / (n * n) / k).sqrt())
        } else {
            None
        };
        let se = se.map(|s| scale * s);
        avg_points.push(CurvePoint {
            n: n_big,
            value,
            se,
        });
        // The cumulative curve is exactly N times the time average.
        cum_points.push(CurvePoint {
            n: n_big,
            value: n * value,
            se: se.map(|s| n * s),
        });
    }

    Ok(EnsembleCurves {
        inst: CurveSeries {
            kind: CurveKind::McInstMean,
            points: inst_points,
            meta: meta.clone(),
        },
        timeavg: CurveSeries {
            kind: CurveKind::McTimeAvgMean,
            points: avg_points,
            meta: meta.clone(),
        },
        cumulative: CurveSeries {
            kind: CurveKind::McCumulativeMean,
            points: cum_points,
            meta,
        },
    })
}

/// Exact curve values from total enumeration of feature sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleCurves {
    /// Instantaneous error means at n = 0..=horizon.
    pub inst_mean: Vec<f64>,
    /// Mean of the time-averaged error at N = horizon.
    pub timeavg_mean: f64,
    /// Variance of the time-averaged error at N = horizon.
    pub timeavg_var: f64,
}

const ORACLE_ATOM_CAP: u64 = 4;
const ORACLE_HORIZON_CAP: u64 = 6;

/// Enumerate every feature sequence of length N+1 with its exact
/// probability and average the novelty records. No sampling and no
/// series formulas, so this independently checks the analytic curves
/// on tiny instances (at most 4^7 sequences).
pub fn brute_force_oracle(dist: &FeatureDistribution, horizon: u64) -> Result<OracleCurves> {
    if dist.atom_count > ORACLE_ATOM_CAP || horizon > ORACLE_HORIZON_CAP {
        return Err(Error::OracleCapExceeded {
            atoms: dist.atom_count,
            horizon,
        });
    }
    if horizon == 0 {
        return Err(Error::BadHorizon(0));
    }
    let atoms = dist.atom_count as usize;
    let probs: Vec<f64> = (1..=dist.atom_count)
        .map(|i| dist.theta(i).expect("atom index in range"))
        .collect();

    let len = horizon as usize + 1;
    let mut seq = vec![0usize; len];
    let mut inst = vec![0.0f64; len];
    let mut avg_mean = 0.0;
    let mut avg_sq = 0.0;
    loop {
        let mut prob = 1.0;
        let mut seen_mask = 0u8;
        let mut novel = vec![false; len];
        for (n, &atom) in seq.iter().enumerate() {
            prob *= probs[atom];
            novel[n] = seen_mask & (1 << atom) == 0;
            seen_mask |= 1 << atom;
        }
        let mut prefix = 0u64;
        for n in 0..len {
            if novel[n] {
                inst[n] += prob;
            }
            if n < horizon as usize {
                prefix += u64::from(novel[n]);
            }
        }
        let run_avg = prefix as f64 / horizon as f64;
        avg_mean += prob * run_avg;
        avg_sq += prob * run_avg * run_avg;
        if !advance(&mut seq, atoms) {
            break;
        }
    }
    Ok(OracleCurves {
        inst_mean: inst,
        timeavg_mean: avg_mean,
        timeavg_var: (avg_sq - avg_mean * avg_mean).max(0.0),
    })
}

/// Increment a little-endian base-`base` odometer; false on wrap.
fn advance(seq: &mut [usize], base: usize) -> bool {
    for digit in seq.iter_mut() {
        *digit += 1;
        if *digit < base {
            return true;
        }
        *digit = 0;
    }
    false
}
