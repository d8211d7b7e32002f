//! Square loss of the frequency estimator under noisy binary labels.
//!
//! Labels are Bernoulli(gamma_i) per feature. The naive learner
//! predicts the observed frequency A_i = k_i / n_i and pays
//! `(gamma_i - A_i)^2` (intrinsic label entropy `gamma(1-gamma)`
//! already removed), or 1 on a never-seen feature. The exact loss is a
//! double binomial sum over (n_i, k_i); the closed form replaces the
//! inner sum's `1/n_i` by `1/(n_i + 1)`, turning the loss into a mix
//! of the instantaneous and time-averaged novelty curves.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::curves::{inst_mean, pow_survival, timeavg_mean};
use crate::dist::{kahan_sum, FeatureDistribution};
use crate::error::Error;
use crate::rng::SplitMix64;
use crate::series::{CurveKind, CurvePoint, CurveSeries};
use crate::Result;

/// Exact evaluation is O(n^2 + groups * n); costs beyond this horizon
/// are better served by the closed form or simulation.
pub const EXACT_LOSS_CAP: u64 = 200;

/// Dense per-feature counters up to this support; hashing beyond.
const DENSE_COUNTER_CAP: u64 = 1 << 22;

/// Runs per deterministic aggregation block.
const RUN_BLOCK: u64 = 64;

/// Label noise: one Bernoulli rate for every feature, or one per atom.
#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    Uniform(f64),
    PerFeature(Vec<f64>),
}

impl NoiseModel {
    pub fn validate(&self, dist: &FeatureDistribution) -> Result<()> {
        let check = |g: f64| {
            if g.is_finite() && (0.0..=1.0).contains(&g) {
                Ok(())
            } else {
                Err(Error::BadNoiseLevel(g))
            }
        };
        match self {
            NoiseModel::Uniform(g) => check(*g),
            NoiseModel::PerFeature(gs) => {
                if gs.len() as u64 != dist.atom_count {
                    return Err(Error::NoiseLengthMismatch {
                        expected: dist.atom_count,
                        found: gs.len(),
                    });
                }
                gs.iter().try_for_each(|&g| check(g))
            }
        }
    }

    /// Noise rate of a (1-based) atom index.
    fn gamma_at(&self, atom: u64) -> f64 {
        match self {
            NoiseModel::Uniform(g) => *g,
            NoiseModel::PerFeature(gs) => gs[(atom - 1) as usize],
        }
    }

    /// Noise levels in {0, 1} make labels a function of the feature,
    /// collapsing the loss to the plain novelty curve.
    fn is_deterministic(&self) -> bool {
        match self {
            NoiseModel::Uniform(g) => *g == 0.0 || *g == 1.0,
            NoiseModel::PerFeature(gs) => gs.iter().all(|&g| g == 0.0 || g == 1.0),
        }
    }
}

/// inner[j] = E[(gamma - K/j)^2] for K ~ Binomial(j, gamma), the
/// estimator's squared error after j observations; inner[0] = 1 by the
/// never-seen convention. Terms are evaluated in log space so extreme
/// gamma cannot underflow the binomial weights.
fn estimator_square_error_table(gamma: f64, n: u64) -> Vec<f64> {
    let n = n as usize;
    let mut inner = vec![1.0f64; n + 1];
    if gamma == 0.0 || gamma == 1.0 {
        for v in inner.iter_mut().skip(1) {
            *v = 0.0;
        }
        return inner;
    }
    let lg = gamma.ln();
    let l1g = (-gamma).ln_1p();
    for (j, v) in inner.iter_mut().enumerate().skip(1) {
        let jf = j as f64;
        let mut lnc = 0.0f64;
        let mut acc = 0.0f64;
        let mut comp = 0.0f64;
        for k in 0..=j {
            if k > 0 {
                lnc += ((j - k + 1) as f64 / k as f64).ln();
            }
            let weight = (lnc + k as f64 * lg + (j - k) as f64 * l1g).exp();
            let dev = gamma - k as f64 / jf;
            let term = weight * dev * dev;
            let y = term - comp;
            let t = acc + y;
            comp = (t - acc) - y;
            acc = t;
        }
        *v = acc;
    }
    inner
}

/// Expected loss of one feature with hit probability theta after n
/// draws: binomial mixture over how often it was seen.
fn feature_loss(theta: f64, n: u64, inner: &[f64]) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if theta >= 1.0 {
        return inner[n as usize];
    }
    let lt = theta.ln();
    let l1t = (-theta).ln_1p();
    let nf = n as f64;
    let mut total = pow_survival(theta, n);
    let mut lnc = 0.0f64;
    for j in 1..=n {
        lnc += ((n - j + 1) as f64 / j as f64).ln();
        let jf = j as f64;
        total += (lnc + jf * lt + (nf - jf) * l1t).exp() * inner[j as usize];
    }
    total
}

/// Exact expected square loss at sample size n, by total expansion of
/// the double binomial sum. Capped at n = 200 (cost grows as n^2); use
/// [`closed_form_loss`] or [`simulate_noisy`] beyond.
pub fn exact_loss(dist: &FeatureDistribution, noise: &NoiseModel, n: u64) -> Result<f64> {
    noise.validate(dist)?;
    if n > EXACT_LOSS_CAP {
        return Err(Error::ExactLossHorizon {
            n,
            max: EXACT_LOSS_CAP,
        });
    }
    if noise.is_deterministic() {
        if let NoiseModel::Uniform(_) = noise {
            // The inner sum vanishes for j >= 1 and the j = 0 term has
            // weight (1-theta)^n, which is the novelty curve itself.
            return Ok(inst_mean(dist, n));
        }
    }
    match noise {
        NoiseModel::Uniform(g) => {
            let inner = estimator_square_error_table(*g, n);
            let total = kahan_sum(
                dist.groups
                    .iter()
                    .map(|grp| grp.mass() * feature_loss(grp.theta, n, &inner)),
            );
            Ok(total.clamp(0.0, 1.0))
        }
        NoiseModel::PerFeature(gs) => {
            let mut tables: HashMap<u64, Vec<f64>> = HashMap::new();
            let total = kahan_sum((1..=dist.atom_count).map(|i| {
                let theta = dist.theta(i).expect("atom index in range");
                let g = gs[(i - 1) as usize];
                if g == 0.0 || g == 1.0 {
                    return theta * pow_survival(theta, n);
                }
                let inner = tables
                    .entry(g.to_bits())
                    .or_insert_with(|| estimator_square_error_table(g, n));
                theta * feature_loss(theta, n, inner)
            }));
            Ok(total.clamp(0.0, 1.0))
        }
    }
}

/// The closed-form loss `[1 - g(1-g)] E_n + g(1-g) Ebar_{n+1}`, exact
/// for g in {0, 1} and within a factor of two of [`exact_loss`]
/// everywhere else.
pub fn closed_form_loss(dist: &FeatureDistribution, gamma: f64, n: u64) -> Result<f64> {
    if !(gamma.is_finite() && (0.0..=1.0).contains(&gamma)) {
        return Err(Error::BadNoiseLevel(gamma));
    }
    let entropy = gamma * (1.0 - gamma);
    Ok((1.0 - entropy) * inst_mean(dist, n) + entropy * timeavg_mean(dist, n + 1)?)
}

enum Counters {
    Dense(Vec<(u32, u32)>),
    Sparse(HashMap<u64, (u32, u32)>),
}

impl Counters {
    fn for_dist(dist: &FeatureDistribution) -> Self {
        if dist.atom_count <= DENSE_COUNTER_CAP {
            Counters::Dense(vec![(0, 0); dist.atom_count as usize])
        } else {
            Counters::Sparse(HashMap::new())
        }
    }

    fn clear(&mut self) {
        match self {
            Counters::Dense(v) => v.fill((0, 0)),
            Counters::Sparse(m) => m.clear(),
        }
    }

    /// Counter cell of a (1-based) atom index.
    fn get_mut(&mut self, atom: u64) -> &mut (u32, u32) {
        match self {
            Counters::Dense(v) => &mut v[(atom - 1) as usize],
            Counters::Sparse(m) => m.entry(atom).or_insert((0, 0)),
        }
    }
}

/// Monte-Carlo estimate of the noisy loss curve over n = 0..=horizon.
///
/// Each run draws features i.i.d., pays `(gamma_i - k_i/n_i)^2` on a
/// seen feature and 1 on a novel one, then updates the counters with a
/// freshly drawn label. Runs use substream (seed, run_index); block
/// sums are merged in run order, so results are bit-identical for any
/// worker count. Points carry empirical standard errors across runs.
pub fn simulate_noisy(
    dist: &FeatureDistribution,
    noise: &NoiseModel,
    horizon: u64,
    runs: u64,
    seed: u64,
) -> Result<CurveSeries> {
    noise.validate(dist)?;
    if horizon == 0 {
        return Err(Error::BadHorizon(0));
    }
    if runs == 0 {
        return Err(Error::BadRuns(runs));
    }
    let len = horizon as usize + 1;
    let blocks = runs.div_ceil(RUN_BLOCK);
    let mut sum = vec![0.0f64; len];
    let mut sumsq = vec![0.0f64; len];

    // Parallel across fixed blocks, sequential ordered merge: memory
    // stays bounded by the superblock and reduction order is fixed.
    const SUPERBLOCK: u64 = 256;
    let mut block_start = 0u64;
    while block_start < blocks {
        let super_end = (block_start + SUPERBLOCK).min(blocks);
        let partials: Vec<(Vec<f64>, Vec<f64>)> = (block_start..super_end)
            .into_par_iter()
            .map(|b| {
                let mut bsum = vec![0.0f64; len];
                let mut bsq = vec![0.0f64; len];
                let mut counters = Counters::for_dist(dist);
                let first = b * RUN_BLOCK;
                let last = (first + RUN_BLOCK).min(runs);
                for run_index in first..last {
                    let mut rng = SplitMix64::keyed(seed, run_index);
                    counters.clear();
                    for (s, q) in bsum.iter_mut().zip(bsq.iter_mut()) {
                        let atom = dist.sample(&mut rng);
                        let gamma = noise.gamma_at(atom);
                        let (seen, hits) = counters.get_mut(atom);
                        let loss = if *seen == 0 {
                            1.0
                        } else {
                            let dev = gamma - f64::from(*hits) / f64::from(*seen);
                            dev * dev
                        };
                        let label = rng.next_f64() < gamma;
                        *seen += 1;
                        *hits += u32::from(label);
                        *s += loss;
                        *q += loss * loss;
                    }
                }
                (bsum, bsq)
            })
            .collect();
        for (bsum, bsq) in partials {
            for i in 0..len {
                sum[i] += bsum[i];
                sumsq[i] += bsq[i];
            }
        }
        block_start = super_end;
    }

    let k = runs as f64;
    let mut meta = dist.series_meta();
    meta.runs_k = Some(runs);
    meta.seed = Some(seed);
    let points = (0..len)
        .map(|i| {
            let mean = sum[i] / k;
            let se = (runs > 1).then(|| {
                let var = ((sumsq[i] - sum[i] * sum[i] / k) / (k - 1.0)).max(0.0);
                (var / k).sqrt()
            });
            CurvePoint {
                n: i as u64,
                value: mean,
                se,
            }
        })
        .collect();
    Ok(CurveSeries {
        kind: CurveKind::McInstMean,
        points,
        meta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistSpec;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn build(spec: &str) -> FeatureDistribution {
        spec.parse::<DistSpec>().unwrap().build().unwrap()
    }

    #[test]
    fn estimator_error_table_matches_binomial_variance() {
        // The inner sum telescopes to g(1-g)/j; the table must agree
        // without ever using that shortcut.
        for gamma in [0.1, 0.25, 0.5, 0.93, 0.999] {
            let inner = estimator_square_error_table(gamma, 120);
            assert_eq!(inner[0], 1.0);
            for (j, &v) in inner.iter().enumerate().skip(1) {
                let expect = gamma * (1.0 - gamma) / j as f64;
                assert_relative_eq!(v, expect, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn singleton_half_noise_first_step() {
        let d = build("singleton");
        let loss = exact_loss(&d, &NoiseModel::Uniform(0.5), 1).unwrap();
        assert_abs_diff_eq!(loss, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn unseen_features_cost_one() {
        let d = build("uniform:m=2");
        let loss = exact_loss(&d, &NoiseModel::Uniform(0.5), 0).unwrap();
        assert_eq!(loss, 1.0);
    }

    #[test]
    fn deterministic_labels_reduce_to_novelty_curve() {
        for spec in ["uniform:m=10", "zipf:alpha=1,trunc=50", "explicit:0.6,0.3,0.1"] {
            let d = build(spec);
            for n in [0u64, 1, 3, 17, 50] {
                let e = inst_mean(&d, n);
                // Uniform 0/1 noise is exactly the novelty curve.
                assert_eq!(exact_loss(&d, &NoiseModel::Uniform(0.0), n).unwrap(), e);
                assert_eq!(exact_loss(&d, &NoiseModel::Uniform(1.0), n).unwrap(), e);
            }
        }
        // Mixed per-feature 0/1 rates: same value up to regrouping.
        let d = build("explicit:0.5,0.3,0.2");
        let noise = NoiseModel::PerFeature(vec![0.0, 1.0, 0.0]);
        for n in 0..=50u64 {
            assert_abs_diff_eq!(
                exact_loss(&d, &noise, n).unwrap(),
                inst_mean(&d, n),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn per_feature_rates_change_the_loss() {
        let d = build("explicit:0.5,0.5");
        let quiet = exact_loss(&d, &NoiseModel::PerFeature(vec![0.01, 0.01]), 20).unwrap();
        let loud = exact_loss(&d, &NoiseModel::PerFeature(vec![0.5, 0.5]), 20).unwrap();
        assert!(loud > quiet);
        let uniform = exact_loss(&d, &NoiseModel::Uniform(0.5), 20).unwrap();
        assert_relative_eq!(loud, uniform, max_relative = 1e-12);
    }

    #[test]
    fn noise_validation_errors() {
        let d = build("uniform:m=3");
        assert!(matches!(
            exact_loss(&d, &NoiseModel::Uniform(-0.1), 1),
            Err(Error::BadNoiseLevel(_))
        ));
        assert!(matches!(
            exact_loss(&d, &NoiseModel::Uniform(1.5), 1),
            Err(Error::BadNoiseLevel(_))
        ));
        assert!(matches!(
            exact_loss(&d, &NoiseModel::PerFeature(vec![0.5, 0.5]), 1),
            Err(Error::NoiseLengthMismatch {
                expected: 3,
                found: 2
            })
        ));
        assert!(matches!(
            exact_loss(&d, &NoiseModel::Uniform(0.5), 201),
            Err(Error::ExactLossHorizon { n: 201, max: 200 })
        ));
        assert!(closed_form_loss(&d, 2.0, 5).is_err());
    }

    #[test]
    fn closed_form_special_cases() {
        let d = build("uniform:m=10");
        for n in [0u64, 1, 5, 40] {
            assert_eq!(closed_form_loss(&d, 0.0, n).unwrap(), inst_mean(&d, n));
        }
        // Large n: the time-average term dominates and the loss decays
        // like g(1-g) * m / n, never faster than 1/n.
        let n = 10_000u64;
        let loss = closed_form_loss(&d, 0.5, n).unwrap();
        let tail = 0.25 * 10.0 / (n as f64 + 1.0);
        assert_relative_eq!(loss, tail, max_relative = 1e-3);
    }

    #[test]
    fn closed_form_stays_within_factor_two_of_exact() {
        let specs = ["uniform:m=10", "zipf:alpha=1", "exp:gamma=0.5"];
        for spec in specs {
            let d = build(spec);
            for gamma in [0.1, 0.25, 0.5] {
                let noise = NoiseModel::Uniform(gamma);
                for n in [1u64, 2, 5, 10, 20, 50, 100, 200] {
                    let exact = exact_loss(&d, &noise, n).unwrap();
                    let closed = closed_form_loss(&d, gamma, n).unwrap();
                    let ratio = closed / exact;
                    assert!(
                        (0.5..=2.0).contains(&ratio),
                        "{spec} gamma={gamma} n={n}: ratio {ratio}"
                    );
                }
            }
        }
    }

    #[test]
    fn loss_floor_is_the_time_average_term() {
        let d = build("zipf:alpha=1,trunc=100");
        for gamma in [0.1, 0.25, 0.5] {
            for n in [1u64, 10, 100, 1000] {
                let closed = closed_form_loss(&d, gamma, n).unwrap();
                let floor = gamma * (1.0 - gamma) * timeavg_mean(&d, n + 1).unwrap();
                assert!(closed >= floor);
                // Any distribution averages at least 1/N error over
                // its first N draws (the first draw is always novel).
                assert!(timeavg_mean(&d, n + 1).unwrap() >= 1.0 / (n as f64 + 1.0));
            }
        }
    }

    #[test]
    fn simulation_matches_exact_loss() {
        let d = build("uniform:m=10");
        let noise = NoiseModel::Uniform(0.3);
        let curve = simulate_noisy(&d, &noise, 150, 100_000, 9).unwrap();
        for n in [1u64, 10, 50, 150] {
            let exact = exact_loss(&d, &noise, n).unwrap();
            let p = &curve.points[n as usize];
            let se = p.se.unwrap();
            assert!(
                (p.value - exact).abs() <= 4.0 * se + 1e-9,
                "n={n}: {} vs {exact} (se {se})",
                p.value
            );
        }
        // n = 0 is always a novel feature: loss exactly 1, SE 0.
        assert_eq!(curve.points[0].value, 1.0);
        assert_eq!(curve.points[0].se, Some(0.0));
    }

    #[test]
    fn simulated_singleton_half_noise() {
        let d = build("singleton");
        let curve = simulate_noisy(&d, &NoiseModel::Uniform(0.5), 1, 100_000, 4).unwrap();
        let v = curve.points[1].value;
        assert!((v - 0.25).abs() <= 0.005, "{v}");
    }

    #[test]
    fn zero_noise_simulation_tracks_novelty_curve() {
        let d = build("zipf:alpha=1,trunc=50");
        let curve = simulate_noisy(&d, &NoiseModel::Uniform(0.0), 60, 40_000, 21).unwrap();
        for p in &curve.points {
            let exact = inst_mean(&d, p.n);
            assert!((p.value - exact).abs() <= 4.0 * p.se.unwrap() + 1e-9);
        }
    }

    #[test]
    fn noisy_simulation_is_deterministic_across_pools() {
        let d = build("uniform:m=5");
        let noise = NoiseModel::Uniform(0.25);
        let run_with = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| simulate_noisy(&d, &noise, 30, 1000, 123).unwrap())
        };
        let a = run_with(1);
        let b = run_with(7);
        let bits = |s: &CurveSeries| {
            s.points
                .iter()
                .map(|p| (p.value.to_bits(), p.se.map(f64::to_bits)))
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
    }
}
