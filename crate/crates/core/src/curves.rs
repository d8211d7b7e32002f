//! Exact learning-curve evaluation.
//!
//! For masses grouped as (theta_j, m_j), with p_j = (1-theta_j)^N:
//!
//! ```text
//! inst mean     E_n    = sum_j m_j theta_j (1-theta_j)^n
//! inst var             = E_n (1 - E_n)
//! timeavg mean  EbarN  = (1/N) sum_j m_j [1 - p_j]
//! timeavg var          = (1/N^2) [ sum_j m_j p_j (1-p_j)
//!                        + sum over distinct atom pairs of
//!                          ((1-theta_i-theta_j)^N - p_i p_j) ]
//! ```
//!
//! Pair multiplicities: m_j(m_j-1) inside a group, 2 m_j m_l across
//! groups. All powers go through log-space forms so that banded tails
//! (theta ~ 1e-16, multiplicity ~ 2^40) lose nothing to cancellation.

use crate::dist::{kahan_sum, DistSpec, FeatureDistribution};
use crate::error::Error;
use crate::series::{CurveKind, CurveSeries, CurveTable, SeriesMeta};
use crate::Result;

/// Largest group count the O(M^2) exact variance will attempt.
pub const DEFAULT_GROUP_CAP: usize = 5000;

/// Pair-term budget for whole-table variance columns; past this the
/// column is left blank rather than stalling for minutes.
const TABLE_PAIR_BUDGET: f64 = 2e8;

/// `(1-theta)^n` without drift for any n, flushing below 1e-300 to zero
/// so deep tails cannot drag evaluation into subnormal arithmetic.
#[inline]
pub(crate) fn pow_survival(theta: f64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if theta >= 1.0 {
        return 0.0;
    }
    if theta <= 0.0 {
        return 1.0;
    }
    let v = (n as f64 * (-theta).ln_1p()).exp();
    if v < 1e-300 {
        0.0
    } else {
        v
    }
}

/// `1 - (1-theta)^n`, accurate when theta is tiny and the direct
/// difference would cancel to noise.
#[inline]
pub(crate) fn one_minus_pow(theta: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if theta >= 1.0 {
        return 1.0;
    }
    if theta <= 0.0 {
        return 0.0;
    }
    -f64::exp_m1(n as f64 * (-theta).ln_1p())
}

fn meta_for(dist: &FeatureDistribution) -> SeriesMeta {
    SeriesMeta {
        dist_spec: DistSpec {
            family: dist.family.clone(),
            truncation: dist.truncation,
        }
        .to_string(),
        runs_k: None,
        seed: None,
        tail_mass_bound: dist.tail_mass_bound,
    }
}

impl FeatureDistribution {
    /// Provenance stamp for series computed from this distribution.
    pub fn series_meta(&self) -> SeriesMeta {
        meta_for(self)
    }
}

/// Expected error on sample n+1 after n i.i.d. samples.
pub fn inst_mean(dist: &FeatureDistribution, n: u64) -> f64 {
    let sum = kahan_sum(
        dist.groups
            .iter()
            .map(|g| g.multiplicity as f64 * g.theta * pow_survival(g.theta, n)),
    );
    sum.clamp(0.0, 1.0)
}

/// Variance of the error indicator at n: `mu_n (1 - mu_n)`.
pub fn inst_var(dist: &FeatureDistribution, n: u64) -> f64 {
    let mu = inst_mean(dist, n);
    mu * (1.0 - mu)
}

/// Expected error averaged over the first `n_samples` samples.
pub fn timeavg_mean(dist: &FeatureDistribution, n_samples: u64) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::BadHorizon(0));
    }
    let sum = kahan_sum(
        dist.groups
            .iter()
            .map(|g| g.multiplicity as f64 * one_minus_pow(g.theta, n_samples)),
    );
    Ok(sum / n_samples as f64)
}

/// Joint-survival excess for one atom pair:
/// `(1-ti-tj)^N - (1-ti)^N (1-tj)^N`.
///
/// Uses the factorization `(1-ti-tj) = (1-ti)(1-tj)(1-x)` with
/// `x = odds_i * odds_j`, so the result is `p_i p_j expm1(N ln1p(-x))`.
/// The literal difference of two near-equal powers loses all precision
/// exactly where banded tails need it (theta ~ 1e-16, huge pair counts).
#[inline]
fn pair_excess(surv_i: f64, odds_i: f64, surv_j: f64, odds_j: f64, nf: f64) -> f64 {
    let x = odds_i * odds_j;
    if !(x < 1.0) {
        // theta_i + theta_j >= 1: two distinct atoms cannot both stay
        // unseen, so the joint survival is exactly 0.
        return -(surv_i * surv_j);
    }
    surv_i * surv_j * f64::exp_m1(nf * (-x).ln_1p())
}

/// Exact variance of the time-averaged error, with an explicit group cap.
pub fn timeavg_var_capped(
    dist: &FeatureDistribution,
    n_samples: u64,
    group_cap: usize,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::BadHorizon(0));
    }
    let m = dist.groups.len();
    if m > group_cap {
        return Err(Error::GroupCapExceeded {
            found: m,
            cap: group_cap,
        });
    }
    let nf = n_samples as f64;
    let surv: Vec<f64> = dist
        .groups
        .iter()
        .map(|g| pow_survival(g.theta, n_samples))
        .collect();
    let gone: Vec<f64> = dist
        .groups
        .iter()
        .map(|g| one_minus_pow(g.theta, n_samples))
        .collect();
    let odds: Vec<f64> = dist.groups.iter().map(|g| g.theta / (1.0 - g.theta)).collect();

    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut add = |v: f64| {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };
    for (j, g) in dist.groups.iter().enumerate() {
        let mult = g.multiplicity as f64;
        add(mult * surv[j] * gone[j]);
        if g.multiplicity >= 2 {
            add(mult * (mult - 1.0) * pair_excess(surv[j], odds[j], surv[j], odds[j], nf));
        }
        for l in (j + 1)..m {
            let cross = 2.0 * mult * dist.groups[l].multiplicity as f64;
            add(cross * pair_excess(surv[j], odds[j], surv[l], odds[l], nf));
        }
    }
    Ok((sum / (nf * nf)).max(0.0))
}

/// Exact variance of the time-averaged error under the default cap.
pub fn timeavg_var(dist: &FeatureDistribution, n_samples: u64) -> Result<f64> {
    timeavg_var_capped(dist, n_samples, DEFAULT_GROUP_CAP)
}

/// Noise-to-signal ratio `sqrt(V[EbarN]) / E[EbarN]`; small means the
/// time-averaged curve of a single experiment is trustworthy.
pub fn signal_to_noise(dist: &FeatureDistribution, n_samples: u64) -> Result<f64> {
    let var = timeavg_var(dist, n_samples)?;
    let mean = timeavg_mean(dist, n_samples)?;
    Ok(var.sqrt() / mean)
}

/// Closed-form upper bound on [`signal_to_noise`]:
/// `sqrt(N E_N) / sum_{n<N} E_n`.
pub fn signal_to_noise_bound(dist: &FeatureDistribution, n_samples: u64) -> Result<f64> {
    let nf = n_samples as f64;
    let cum = nf * timeavg_mean(dist, n_samples)?;
    Ok((nf * inst_mean(dist, n_samples)).sqrt() / cum)
}

/// All exact columns over n = 0..=n_max, ready for CSV emission.
///
/// The `timeavg_var` column is O(M^2) per row; when the whole-table cost
/// would exceed a fixed budget the column is emitted with no points
/// (blank cells) instead of stalling, and the asymptotic approximation
/// should be used. Means are always filled.
pub fn curve_table(dist: &FeatureDistribution, n_max: u64) -> Result<CurveTable> {
    let meta = meta_for(dist);
    let mut inst = Vec::with_capacity(n_max as usize + 1);
    let mut ivar = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let mu = inst_mean(dist, n);
        inst.push((n, mu));
        ivar.push((n, mu * (1.0 - mu)));
    }
    let mut avg = Vec::with_capacity(n_max as usize);
    let mut cum = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let a = timeavg_mean(dist, n)?;
        avg.push((n, a));
        cum.push((n, n as f64 * a));
    }
    let m = dist.groups.len() as f64;
    let var_affordable =
        dist.groups.len() <= DEFAULT_GROUP_CAP && m * m / 2.0 * n_max as f64 <= TABLE_PAIR_BUDGET;
    let mut tvar = Vec::new();
    if var_affordable {
        for n in 1..=n_max {
            tvar.push((n, timeavg_var(dist, n)?));
        }
    }
    Ok(CurveTable::new(
        meta.clone(),
        vec![
            CurveSeries::from_values(CurveKind::InstMean, meta.clone(), inst),
            CurveSeries::from_values(CurveKind::InstVar, meta.clone(), ivar),
            CurveSeries::from_values(CurveKind::TimeAvgMean, meta.clone(), avg),
            CurveSeries::from_values(CurveKind::TimeAvgVar, meta.clone(), tvar),
            CurveSeries::from_values(CurveKind::CumulativeMean, meta, cum),
        ],
    ))
}
