//! Closed-form scaling predictions and rigorous bounds.
//!
//! The exact curve of a smooth mass density f admits the integral
//! approximation `E_n ~ integral of f'(f^{-1}(u))-shaped mass near
//! u = 1/n`, which collapses to closed forms:
//!
//! * Zipf-tailed masses (density `a x^-(1+a)`): `E_n ~ c_a n^-b` with
//!   `b = a/(1+a)` and `c_a = a^(1/(1+a)) Gamma(b) / (1+a)`;
//! * exponential masses: `E_n ~ 1/(g n)`, plus the rigorous bound
//!   `E_n <= (1/e + 1/g)/n`;
//! * any masses: `E_{n_i} >= 1/(2 n_i e^2)` at the checkpoints
//!   `n_i = ceil(1/vartheta_i)` for atoms with `theta_i < 0.79`.
//!
//! Everything here is pure closed-form arithmetic; the exact series
//! lives in [`crate::curves`].

use crate::dist::{kahan_sum, Family, FeatureDistribution};
use crate::error::Error;
use crate::Result;

/// Functional form of a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionForm {
    /// `coefficient * n^-beta` with beta < 1.
    PowerLaw,
    /// `coefficient / n` (beta = 1).
    OneOverN,
    /// Caller-supplied exponent and coefficient.
    Custom,
}

/// A closed-form learning-curve prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticPrediction {
    /// Decay exponent of the instantaneous curve.
    pub beta: f64,
    /// Leading coefficient of the instantaneous curve.
    pub coefficient: f64,
    pub form: PredictionForm,
    /// First n at which the prediction is trusted (`n theta_1 >= 2`).
    pub valid_from_n: u64,
}

impl AsymptoticPrediction {
    /// Predicted instantaneous error at n.
    pub fn evaluate(&self, n: u64) -> f64 {
        self.coefficient * (n as f64).powf(-self.beta)
    }

    /// Coefficient of the matching time-averaged curve,
    /// `c / (1 - beta)`; infinite when beta = 1.
    pub fn timeavg_coefficient(&self) -> f64 {
        self.coefficient / (1.0 - self.beta)
    }
}

/// Lanczos approximation (g = 7, 9 terms), with reflection below 1/2.
/// Relative error is ~1e-13 across (0, 3], comfortably inside the
/// 1e-10 contract, and identical on every platform.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::BadParameter {
            name: "x",
            value: x,
            reason: "gamma needs a positive finite argument",
        });
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the rational part on its accurate range.
        return std::f64::consts::PI
            / ((std::f64::consts::PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

/// Exponent and coefficient for Zipf-tailed masses:
/// `beta = a/(1+a)`, `c_a = a^(1/(1+a)) Gamma(beta) / (1+a)`.
pub fn zipf_prediction(alpha: f64) -> Result<AsymptoticPrediction> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::BadParameter {
            name: "alpha",
            value: alpha,
            reason: "must be finite and strictly positive",
        });
    }
    let beta = alpha / (1.0 + alpha);
    let coefficient = alpha.powf(1.0 / (1.0 + alpha)) * gamma_unchecked(beta) / (1.0 + alpha);
    Ok(AsymptoticPrediction {
        beta,
        coefficient,
        form: PredictionForm::PowerLaw,
        // theta_1 = 1 - 2^-a for the unit-cell construction.
        valid_from_n: (2.0 / -f64::exp_m1(-alpha * std::f64::consts::LN_2)).ceil() as u64,
    })
}

/// Prediction `1/(g n)` for exponentially decaying masses.
pub fn exponential_prediction(gamma: f64) -> Result<AsymptoticPrediction> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::BadParameter {
            name: "gamma",
            value: gamma,
            reason: "must be finite and strictly positive",
        });
    }
    Ok(AsymptoticPrediction {
        beta: 1.0,
        coefficient: 1.0 / gamma,
        form: PredictionForm::OneOverN,
        // theta_1 = 1 - e^-g.
        valid_from_n: (2.0 / -f64::exp_m1(-gamma)).ceil() as u64,
    })
}

/// Closed-form prediction for a family, where one exists.
pub fn prediction_for_family(family: &Family) -> Result<AsymptoticPrediction> {
    match family {
        Family::Zipf { alpha } => zipf_prediction(*alpha),
        Family::Exponential { gamma } => exponential_prediction(*gamma),
        other => Err(Error::UnsupportedFamily {
            family: other.name(),
            what: "closed-form asymptotic",
        }),
    }
}

/// The generic-density asymptotic `Gamma(2-d)/c' * n^(d-2)`, for
/// densities with `|f'(f^{-1}(u))| ~ c' u^d` near u = 0.
pub fn delta_asymptotic(c_prime: f64, delta: f64, n: u64) -> Result<f64> {
    if !(delta > 0.0 && delta < 2.0) {
        return Err(Error::BadParameter {
            name: "delta",
            value: delta,
            reason: "must lie strictly inside (0, 2)",
        });
    }
    if !c_prime.is_finite() || c_prime <= 0.0 {
        return Err(Error::BadParameter {
            name: "c_prime",
            value: c_prime,
            reason: "must be finite and strictly positive",
        });
    }
    if n == 0 {
        return Err(Error::BadHorizon(0));
    }
    Ok(gamma_unchecked(2.0 - delta) / c_prime * (n as f64).powf(delta - 2.0))
}

/// The (c', delta) pair of the Zipf density `a x^-(1+a)`:
/// `d = (a+2)/(a+1)`, `c' = a(1+a)/a^d`. Feeding these to
/// [`delta_asymptotic`] reproduces `c_a n^-b` exactly.
pub fn zipf_delta_params(alpha: f64) -> (f64, f64) {
    let delta = (alpha + 2.0) / (alpha + 1.0);
    (alpha * (1.0 + alpha) / alpha.powf(delta), delta)
}

/// Closed-form `E_n` for families with an analytic density: Zipf gives
/// `c_a n^-b`, exponential gives `1/(g n)`.
pub fn integral_approx(family: &Family, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::BadHorizon(0));
    }
    Ok(prediction_for_family(family)?.evaluate(n))
}

/// The proven part of the integral-approximation error: `1/(e n)`.
pub fn integral_error_bound(n: u64) -> f64 {
    1.0 / (std::f64::consts::E * n as f64)
}

/// Rigorous upper bound for exponentially decaying masses:
/// `E_n <= (1/e + 1/g) / n`, valid for every n >= 1 and any
/// normalization of the weights.
pub fn exponential_upper_bound(gamma: f64, n: u64) -> f64 {
    (1.0 / std::f64::consts::E + 1.0 / gamma) / n as f64
}

/// One guaranteed floor under the exact curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundPoint {
    /// Checkpoint sample size `n_i = ceil(1/vartheta_i)`.
    pub n: u64,
    /// Guaranteed `inst_mean(dist, n) >= bound = 1/(2 n e^2)`.
    pub bound: f64,
}

/// Universal lower-bound checkpoints: one per distinct mass with
/// `theta < 0.79` (the bound's validity range). Checkpoints beyond the
/// u64 horizon range are omitted; duplicate checkpoints are merged.
pub fn universal_lower_bound_points(dist: &FeatureDistribution) -> Vec<LowerBoundPoint> {
    let mut out: Vec<LowerBoundPoint> = Vec::new();
    for g in &dist.groups {
        if g.theta >= 0.79 {
            continue;
        }
        let vartheta = -f64::ln_1p(-g.theta);
        let n_real = (1.0 / vartheta).ceil();
        if !(n_real < 9.0e18) {
            continue;
        }
        let n = n_real as u64;
        if out.last().is_some_and(|p| p.n == n) {
            continue;
        }
        out.push(LowerBoundPoint {
            n,
            bound: 1.0 / (2.0 * n as f64 * std::f64::consts::E * std::f64::consts::E),
        });
    }
    out
}

/// The heuristic `V[EbarN] ~ E_N / (2N)` with `E_N` from the closed
/// form; the cheap stand-in when the exact O(M^2) variance is barred.
pub fn timeavg_var_approx(family: &Family, n_samples: u64) -> Result<f64> {
    Ok(integral_approx(family, n_samples)? / (2.0 * n_samples as f64))
}

/// Check `|sum_i g(i) - integral g| <= g_max + slack` for a unimodal
/// nonnegative g, given its integer samples, a numerical integral, and
/// its maximum. The bound is tight, so equality passes; the slack is
/// a fixed 1e-9 for accumulated rounding.
pub fn sum_integral_bound_check(
    g_samples: &[f64],
    g_integral: f64,
    g_max: f64,
) -> Result<bool> {
    let mut falling = false;
    for (i, w) in g_samples.windows(2).enumerate() {
        if w[0] < 0.0 || !w[0].is_finite() || !w[1].is_finite() || w[1] < 0.0 {
            return Err(Error::BadParameter {
                name: "g_samples",
                value: w[0].min(w[1]),
                reason: "samples must be finite and nonnegative",
            });
        }
        if w[1] < w[0] {
            falling = true;
        } else if w[1] > w[0] && falling {
            return Err(Error::NonUnimodal(i + 1));
        }
    }
    let sum = kahan_sum(g_samples.iter().copied());
    Ok((sum - g_integral).abs() <= g_max + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::inst_mean;
    use crate::dist::DistSpec;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn build(spec: &str) -> FeatureDistribution {
        spec.parse::<DistSpec>().unwrap().build().unwrap()
    }

    #[test]
    fn gamma_matches_reference_values() {
        assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(2.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(gamma_fn(3.0).unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(
            gamma_fn(0.5).unwrap(),
            1.772_453_850_905_516,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            gamma_fn(1.5).unwrap(),
            0.886_226_925_452_758,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            gamma_fn(2.5).unwrap(),
            1.329_340_388_179_137,
            max_relative = 1e-10
        );
        // Small argument, where the reflection branch matters.
        assert_relative_eq!(
            gamma_fn(1.0 / 11.0).unwrap(),
            10.505_874_856_078_685,
            max_relative = 1e-10
        );
    }

    #[test]
    fn gamma_satisfies_recurrence() {
        let mut x = 0.1;
        while x < 2.0 {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
            x += 0.037;
        }
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn zipf_prediction_matches_paper_constants() {
        let p = zipf_prediction(1.0).unwrap();
        assert_abs_diff_eq!(p.beta, 0.5);
        // c_1 = sqrt(pi)/2
        assert_relative_eq!(p.coefficient, 0.886_226_925_452_758, max_relative = 1e-10);
        assert_relative_eq!(
            p.timeavg_coefficient(),
            1.772_453_850_905_516,
            max_relative = 1e-10
        );
        assert_eq!(p.valid_from_n, 4);

        let p = zipf_prediction(0.1).unwrap();
        assert_abs_diff_eq!(p.beta, 1.0 / 11.0, epsilon = 1e-15);
        assert_relative_eq!(p.coefficient, 1.177_466_687_391_181, max_relative = 1e-9);
        assert_eq!(p.valid_from_n, 30);

        assert!(zipf_prediction(0.0).is_err());
        assert!(zipf_prediction(-1.0).is_err());
    }

    #[test]
    fn delta_form_reproduces_zipf_closed_form() {
        for alpha in [0.1, 0.5, 1.0, 2.0] {
            let p = zipf_prediction(alpha).unwrap();
            let (c_prime, delta) = zipf_delta_params(alpha);
            for n in [1u64, 10, 1000, 10_000] {
                let via_delta = delta_asymptotic(c_prime, delta, n).unwrap();
                assert_relative_eq!(via_delta, p.evaluate(n), max_relative = 1e-12);
            }
        }
        // delta=1, c'=1, n=1 -> Gamma(1) = 1.
        assert_relative_eq!(delta_asymptotic(1.0, 1.0, 1).unwrap(), 1.0, max_relative = 1e-12);
        assert!(delta_asymptotic(1.0, 2.0, 1).is_err());
        assert!(delta_asymptotic(1.0, 0.0, 1).is_err());
        assert!(delta_asymptotic(-1.0, 1.0, 1).is_err());
    }

    #[test]
    fn integral_approx_closed_forms() {
        let zipf = Family::Zipf { alpha: 1.0 };
        assert_relative_eq!(
            integral_approx(&zipf, 100).unwrap(),
            0.088_622_692_545_275_8,
            max_relative = 1e-9
        );
        let exp = Family::Exponential { gamma: 0.5 };
        assert_abs_diff_eq!(integral_approx(&exp, 100).unwrap(), 0.02, epsilon = 1e-15);
        assert!(integral_approx(&Family::Uniform { m: 10 }, 5).is_err());
        assert!(integral_approx(&Family::SuperExponential { gamma: 1.0 }, 5).is_err());
        assert!(integral_approx(&zipf, 0).is_err());
    }

    #[test]
    fn exponential_bound_dominates_exact_curve() {
        for gamma in [0.25, 0.5, 1.0] {
            let d = build(&format!("exp:gamma={gamma}"));
            for n in 1..=1000u64 {
                let e = inst_mean(&d, n);
                let b = exponential_upper_bound(gamma, n);
                assert!(e <= b, "gamma={gamma} n={n}: {e} > {b}");
            }
        }
    }

    #[test]
    fn zipf_envelope_spot_checks() {
        // Full sweep lives in the acceptance suite; spot-check here.
        for alpha in [0.5, 1.0] {
            let d = build(&format!("zipf:alpha={alpha},tail=1e-8"));
            let p = zipf_prediction(alpha).unwrap();
            for n in [10u64, 100, 1000, 10_000] {
                if n < p.valid_from_n {
                    continue;
                }
                let gap = (inst_mean(&d, n) - p.evaluate(n)).abs();
                let allowed = integral_error_bound(n)
                    + 0.5 * p.coefficient * (n as f64).powf(-p.beta - 0.2);
                assert!(gap <= allowed, "alpha={alpha} n={n}: {gap} > {allowed}");
            }
        }
    }

    #[test]
    fn lower_bound_checkpoints_hold() {
        let d = build("uniform:m=10");
        let pts = universal_lower_bound_points(&d);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].n, 10);
        assert_relative_eq!(pts[0].bound, 0.006_766_764_161_83, max_relative = 1e-9);
        assert!(inst_mean(&d, 10) >= pts[0].bound);

        // Singleton's only atom has theta = 1 > 0.79: no checkpoints.
        assert!(universal_lower_bound_points(&build("singleton")).is_empty());

        // Superexponential: the head atom is too heavy, later atoms
        // qualify and every checkpoint must hold.
        let d = build("superexp:gamma=1");
        let pts = universal_lower_bound_points(&d);
        assert!(!pts.is_empty());
        for p in pts {
            assert!(inst_mean(&d, p.n) >= p.bound, "failed at n={}", p.n);
        }
    }

    #[test]
    fn variance_approximation_values() {
        let v = timeavg_var_approx(&Family::Zipf { alpha: 1.0 }, 10_000).unwrap();
        assert_relative_eq!(v, 0.886_226_925_452_758e-2 / 2e4, max_relative = 1e-9);
        let v = timeavg_var_approx(&Family::Exponential { gamma: 1.0 }, 100).unwrap();
        assert_abs_diff_eq!(v, 5e-5, epsilon = 1e-18);
    }

    #[test]
    fn sum_integral_examples() {
        // g(x) = x e^-x: integral over (0, inf) is 1, max is 1/e.
        let samples: Vec<f64> = (1..=60).map(|i| i as f64 * (-(i as f64)).exp()).collect();
        assert!(sum_integral_bound_check(&samples, 1.0, (-1.0f64).exp()).unwrap());

        // Worst case: all the mass sits strictly between two integers,
        // so the samples see none of it and the bound is met exactly.
        assert!(sum_integral_bound_check(&[0.0, 0.0, 0.0], 0.7, 0.7).unwrap());
        assert!(!sum_integral_bound_check(&[0.0, 0.0, 0.0], 0.7001, 0.7).unwrap());

        // Zero function.
        assert!(sum_integral_bound_check(&[0.0, 0.0], 0.0, 0.0).unwrap());

        // A second rise is rejected.
        assert!(matches!(
            sum_integral_bound_check(&[0.1, 1.0, 0.4, 0.5], 1.0, 1.0),
            Err(Error::NonUnimodal(_))
        ));
        assert!(sum_integral_bound_check(&[-0.1, 0.2], 0.0, 1.0).is_err());
    }
}
