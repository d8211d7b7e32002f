//! Feature distributions.
//!
//! Everything downstream consumes a [`FeatureDistribution`]: atom masses
//! sorted non-increasing and collapsed into runs of exactly equal mass.
//! Grouping is what keeps heavy tails affordable: a Zipf tail of 2^53
//! virtual atoms collapses to a few thousand equal-mass bands, and a
//! uniform distribution over any m is a single group.

use crate::error::Error;
use crate::rng::SplitMix64;
use crate::Result;
use std::fmt;
use std::str::FromStr;

/// Ceiling on per-atom storage for families whose masses are all
/// distinct and therefore cannot be grouped.
pub const DENSE_ATOM_CAP: u64 = 10_000_000;

/// Ceiling on virtual (grouped) atom indices. Beyond 2^53 an f64 cannot
/// address individual atoms exactly, so builds refuse to go further.
pub const VIRTUAL_ATOM_CAP: u64 = 1 << 53;

/// Analytic tail-mass target used when no truncation is specified.
pub const DEFAULT_TAIL_TOL: f64 = 1e-6;

/// Relative width of the equal-mass bands used for far Zipf tails.
/// Width ~ i/64 keeps the within-band mass variation below ~1e-4 of the
/// band mean, far inside every tolerance the curve tests use.
const ZIPF_BAND_ETA: f64 = 1.0 / 64.0;

/// Parametric families of feature masses.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Single feature with mass 1: one guaranteed error, then none.
    Singleton,
    /// `m` equally likely features.
    Uniform { m: u64 },
    /// Zipf-tailed masses from unit cells of the density `a·x^-(1+a)`:
    /// `w_i = i^-a - (i+1)^-a`. Exactly normalized over all `i >= 1`
    /// (the sum telescopes), so `theta_1 = 1 - 2^-a` and the learning
    /// curve matches the `c_a·n^-b` asymptotics without rescaling.
    Zipf { alpha: f64 },
    /// Plain power-law weights `w_i = i^-(1+a)` renormalized over the
    /// truncated support. Same exponent as [`Family::Zipf`], but the
    /// renormalization rescales the curve's level, so absolute
    /// predictions can be off by tens of percent. Kept for
    /// rank-frequency style modelling where only the exponent matters.
    ZipfPower { alpha: f64 },
    /// Geometric decay `w_i = e^-(g·i)`.
    Exponential { gamma: f64 },
    /// `w_i = e^-(g·i^2)`; thinner than any power-law learning curve.
    SuperExponential { gamma: f64 },
    /// User-supplied nonnegative weights, renormalized.
    Explicit { weights: Vec<f64> },
    /// Word counts from a corpus, one atom per distinct word.
    Empirical { counts: Vec<(String, u64)> },
}

impl Family {
    /// Short family name as used in spec strings.
    pub fn name(&self) -> &'static str {
        match self {
            Family::Singleton => "singleton",
            Family::Uniform { .. } => "uniform",
            Family::Zipf { .. } => "zipf",
            Family::ZipfPower { .. } => "zipfpow",
            Family::Exponential { .. } => "exp",
            Family::SuperExponential { .. } => "superexp",
            Family::Explicit { .. } => "explicit",
            Family::Empirical { .. } => "empirical",
        }
    }
}

/// How much of an infinite-support family to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    /// Keep atoms until the analytic tail bound drops below
    /// [`DEFAULT_TAIL_TOL`], subject to the family's atom caps.
    Default,
    /// Keep atoms until the analytic tail bound drops below the given
    /// tolerance, subject to the family's atom caps.
    TailBound(f64),
    /// Keep exactly this many atoms.
    Atoms(u64),
}

/// Run of consecutive atoms sharing one exact per-atom mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Group {
    /// Per-atom mass.
    pub theta: f64,
    /// Number of atoms carrying `theta`.
    pub multiplicity: u64,
    /// 1-based index of the first atom in the run.
    pub first_index: u64,
}

impl Group {
    /// Total mass carried by the group.
    #[inline]
    pub fn mass(&self) -> f64 {
        self.theta * self.multiplicity as f64
    }
}

/// A built, normalized, truncated feature distribution.
///
/// Invariants: `groups` is non-empty, thetas are strictly decreasing
/// across groups, runs are contiguous (`first_index` of each group is
/// the previous group's `first_index + multiplicity`, starting at 1),
/// and total mass is 1 within 1e-12.
#[derive(Debug, Clone)]
pub struct FeatureDistribution {
    /// Family this distribution was built from.
    pub family: Family,
    /// Truncation rule that was applied.
    pub truncation: Truncation,
    /// Equal-mass groups, theta non-increasing.
    pub groups: Vec<Group>,
    /// Retained atom count I (atoms may be virtual in banded tails).
    pub atom_count: u64,
    /// Analytic upper bound on the mass discarded by truncation,
    /// relative to the untruncated family.
    pub tail_mass_bound: f64,
    /// True when an atom cap stopped truncation short of the requested
    /// tail tolerance; `tail_mass_bound` then reports what was achieved.
    pub truncation_capped: bool,
    /// Cumulative group masses for sampling; the last entry is ~1.
    cdf: Vec<f64>,
}

/// Compensated sum. The group tables can be millions of entries, and a
/// naive total would drift past the 1e-12 normalization budget.
pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::BadParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        });
    }
    Ok(())
}

/// Resolve the tolerance a truncation rule asks for, if any.
fn tail_tolerance(truncation: Truncation) -> Result<Option<f64>> {
    match truncation {
        Truncation::Default => Ok(Some(DEFAULT_TAIL_TOL)),
        Truncation::TailBound(tol) => {
            check_positive("tail", tol)?;
            Ok(Some(tol))
        }
        Truncation::Atoms(0) => Err(Error::EmptyTruncation),
        Truncation::Atoms(_) => Ok(None),
    }
}

/// Unnormalized build output of one family: groups with raw weights in
/// `theta`, plus the analytic tail bound and whether a cap bit.
struct RawBuild {
    groups: Vec<Group>,
    atom_count: u64,
    tail_mass_bound: f64,
    capped: bool,
}

fn build_singleton() -> RawBuild {
    RawBuild {
        groups: vec![Group {
            theta: 1.0,
            multiplicity: 1,
            first_index: 1,
        }],
        atom_count: 1,
        tail_mass_bound: 0.0,
        capped: false,
    }
}

fn build_uniform(m: u64, truncation: Truncation) -> Result<RawBuild> {
    if m == 0 {
        return Err(Error::BadParameter {
            name: "m",
            value: 0.0,
            reason: "uniform support must be non-empty",
        });
    }
    if m > VIRTUAL_ATOM_CAP {
        return Err(Error::BadParameter {
            name: "m",
            value: m as f64,
            reason: "exceeds the 2^53 atom cap",
        });
    }
    // The support is exactly m atoms; cutting below m would change the
    // family, so an explicit smaller truncation is an error.
    if let Truncation::Atoms(i) = truncation {
        if i < m {
            return Err(Error::BadParameter {
                name: "trunc",
                value: i as f64,
                reason: "uniform support cannot be cut below m",
            });
        }
    }
    Ok(RawBuild {
        groups: vec![Group {
            theta: 1.0,
            multiplicity: m,
            first_index: 1,
        }],
        atom_count: m,
        tail_mass_bound: 0.0,
        capped: false,
    })
}

/// Mass of Zipf cells b..b+width-1, i.e. `b^-a - (b+width)^-a`, computed
/// without the cancellation the literal difference suffers at large b.
#[inline]
fn zipf_cell_run_mass(alpha: f64, b: u64, width: u64) -> f64 {
    let bf = b as f64;
    bf.powf(-alpha) * -f64::exp_m1(-alpha * (width as f64 / bf).ln_1p())
}

fn build_zipf_cells(alpha: f64, truncation: Truncation) -> Result<RawBuild> {
    check_positive("alpha", alpha)?;
    // Discarded mass beyond atom I telescopes to exactly (I+1)^-a.
    let (atoms, capped) = match tail_tolerance(truncation)? {
        Some(tol) => {
            let want = tol.powf(-1.0 / alpha);
            if want >= VIRTUAL_ATOM_CAP as f64 {
                (VIRTUAL_ATOM_CAP, true)
            } else {
                (want.ceil() as u64, false)
            }
        }
        None => match truncation {
            Truncation::Atoms(i) if i > VIRTUAL_ATOM_CAP => {
                return Err(Error::BadParameter {
                    name: "trunc",
                    value: i as f64,
                    reason: "exceeds the 2^53 atom cap",
                });
            }
            Truncation::Atoms(i) => (i, false),
            _ => unreachable!(),
        },
    };
    let mut groups = Vec::new();
    let mut b: u64 = 1;
    while b <= atoms {
        let width = (((b as f64) * ZIPF_BAND_ETA) as u64)
            .max(1)
            .min(atoms - b + 1);
        groups.push(Group {
            theta: zipf_cell_run_mass(alpha, b, width) / width as f64,
            multiplicity: width,
            first_index: b,
        });
        b += width;
    }
    Ok(RawBuild {
        groups,
        atom_count: atoms,
        tail_mass_bound: ((atoms + 1) as f64).powf(-alpha),
        capped,
    })
}

fn build_zipf_power(alpha: f64, truncation: Truncation) -> Result<RawBuild> {
    check_positive("alpha", alpha)?;
    let tol = tail_tolerance(truncation)?;
    let atoms_limit = match truncation {
        Truncation::Atoms(i) => {
            if i > DENSE_ATOM_CAP {
                return Err(Error::BadParameter {
                    name: "trunc",
                    value: i as f64,
                    reason: "exceeds the 10^7 cap for ungroupable atoms",
                });
            }
            i
        }
        _ => DENSE_ATOM_CAP,
    };
    let mut groups = Vec::new();
    let mut partial = 0.0f64;
    let mut comp = 0.0f64;
    let mut tail_bound = f64::INFINITY;
    let mut capped = false;
    for i in 1..=atoms_limit {
        let w = (i as f64).powf(-(1.0 + alpha));
        let y = w - comp;
        let t = partial + y;
        comp = (t - partial) - y;
        partial = t;
        groups.push(Group {
            theta: w,
            multiplicity: 1,
            first_index: i,
        });
        // Integral bound on the discarded weight: Int_I^inf x^-(1+a) dx
        // over the kept partial sum.
        tail_bound = w * i as f64 / alpha / partial;
        if let Some(tol) = tol {
            if tail_bound < tol {
                break;
            }
        }
    }
    if let Some(tol) = tol {
        if tail_bound >= tol {
            capped = true;
        }
    }
    Ok(RawBuild {
        atom_count: groups.len() as u64,
        groups,
        tail_mass_bound: tail_bound,
        capped,
    })
}

/// Shared builder for the exponential-type families: `weight(i)` must be
/// positive and decreasing, `tail_bound(i, partial)` an analytic bound on
/// the discarded relative mass after keeping atoms 1..=i.
fn build_decaying(
    weight: impl Fn(u64) -> f64,
    tail_bound: impl Fn(u64, f64) -> f64,
    truncation: Truncation,
) -> Result<RawBuild> {
    let tol = tail_tolerance(truncation)?;
    let atoms_limit = match truncation {
        Truncation::Atoms(i) => i.min(DENSE_ATOM_CAP),
        _ => DENSE_ATOM_CAP,
    };
    let mut groups = Vec::new();
    let mut partial = 0.0f64;
    let mut bound = f64::INFINITY;
    for i in 1..=atoms_limit {
        let w = weight(i);
        // Once weights underflow they stop being atoms; the tail bound
        // already accounts for everything past this point.
        if w < 1e-300 {
            bound = 0.0;
            break;
        }
        partial += w;
        groups.push(Group {
            theta: w,
            multiplicity: 1,
            first_index: i,
        });
        bound = tail_bound(i, partial);
        if let Some(tol) = tol {
            if bound < tol {
                break;
            }
        }
    }
    if groups.is_empty() {
        return Err(Error::BadParameter {
            name: "gamma",
            value: f64::NAN,
            reason: "all masses underflow; decay rate is too large",
        });
    }
    let capped = match tol {
        Some(tol) => bound >= tol,
        None => false,
    };
    Ok(RawBuild {
        atom_count: groups.len() as u64,
        groups,
        tail_mass_bound: bound,
        capped,
    })
}

fn build_exponential(gamma: f64, truncation: Truncation) -> Result<RawBuild> {
    check_positive("gamma", gamma)?;
    build_decaying(
        |i| (-gamma * i as f64).exp(),
        // Geometric tail: sum_{i>I} e^-gi / sum_{i<=I} e^-gi
        // = e^-gI / (1 - e^-gI).
        |i, _| {
            let r = (-gamma * i as f64).exp();
            r / (1.0 - r)
        },
        truncation,
    )
}

fn build_super_exponential(gamma: f64, truncation: Truncation) -> Result<RawBuild> {
    check_positive("gamma", gamma)?;
    build_decaying(
        |i| {
            let x = i as f64;
            (-gamma * x * x).exp()
        },
        // Terms past I shrink by at least e^-g(2I+3) each step, so the
        // tail is dominated by a geometric series from the next term.
        |i, partial| {
            let x = (i + 1) as f64;
            let first = (-gamma * x * x).exp();
            let ratio = (-gamma * (2 * i + 3) as f64).exp();
            first / (1.0 - ratio) / partial
        },
        truncation,
    )
}

/// Sort weights descending, drop zeros, keep the `truncation` largest,
/// and group exact-equal runs. Shared by Explicit and Empirical.
fn build_sorted_weights(
    mut weights: Vec<f64>,
    truncation: Truncation,
) -> Result<RawBuild> {
    weights.sort_by(|a, b| b.partial_cmp(a).expect("weights are finite"));
    let total = kahan_sum(weights.iter().copied());
    while weights.last() == Some(&0.0) {
        weights.pop();
    }
    if weights.is_empty() || total <= 0.0 {
        return Err(Error::BadParameter {
            name: "weights",
            value: 0.0,
            reason: "all weights are zero",
        });
    }
    let keep = match truncation {
        Truncation::Atoms(i) => (i as usize).min(weights.len()),
        _ => weights.len(),
    };
    let discarded = kahan_sum(weights[keep..].iter().copied());
    weights.truncate(keep);
    let mut groups: Vec<Group> = Vec::new();
    for (idx, &w) in weights.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if g.theta == w => g.multiplicity += 1,
            _ => groups.push(Group {
                theta: w,
                multiplicity: 1,
                first_index: idx as u64 + 1,
            }),
        }
    }
    Ok(RawBuild {
        atom_count: weights.len() as u64,
        groups,
        tail_mass_bound: discarded / total,
        capped: false,
    })
}

fn build_explicit(weights: &[f64], truncation: Truncation) -> Result<RawBuild> {
    if weights.is_empty() {
        return Err(Error::EmptyWeights);
    }
    for (index, &value) in weights.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::BadWeight { index, value });
        }
    }
    build_sorted_weights(weights.to_vec(), truncation)
}

fn build_empirical(counts: &[(String, u64)], truncation: Truncation) -> Result<RawBuild> {
    if counts.is_empty() {
        return Err(Error::EmptyWeights);
    }
    // Equal counts yield bit-identical masses, so exact-equality grouping
    // collapses the (long) tail of hapax and low-frequency words.
    let mut sorted: Vec<u64> = counts.iter().map(|(_, c)| *c).collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    build_sorted_weights(sorted.into_iter().map(|c| c as f64).collect(), truncation)
}

impl FeatureDistribution {
    /// Build, truncate, and normalize a distribution.
    pub fn build(family: Family, truncation: Truncation) -> Result<Self> {
        if let Truncation::Atoms(0) = truncation {
            return Err(Error::EmptyTruncation);
        }
        let raw = match &family {
            Family::Singleton => build_singleton(),
            Family::Uniform { m } => build_uniform(*m, truncation)?,
            Family::Zipf { alpha } => build_zipf_cells(*alpha, truncation)?,
            Family::ZipfPower { alpha } => build_zipf_power(*alpha, truncation)?,
            Family::Exponential { gamma } => build_exponential(*gamma, truncation)?,
            Family::SuperExponential { gamma } => {
                build_super_exponential(*gamma, truncation)?
            }
            Family::Explicit { weights } => build_explicit(weights, truncation)?,
            Family::Empirical { counts } => build_empirical(counts, truncation)?,
        };
        let RawBuild {
            mut groups,
            atom_count,
            tail_mass_bound,
            capped,
        } = raw;
        debug_assert!(!groups.is_empty());
        let total = kahan_sum(groups.iter().map(|g| g.mass()));
        for g in &mut groups {
            g.theta /= total;
        }
        let mut cdf = Vec::with_capacity(groups.len());
        let mut cum = 0.0;
        let mut comp = 0.0;
        for g in &groups {
            let y = g.mass() - comp;
            let t = cum + y;
            comp = (t - cum) - y;
            cum = t;
            cdf.push(cum);
        }
        Ok(Self {
            family,
            truncation,
            groups,
            atom_count,
            tail_mass_bound,
            truncation_capped: capped,
            cdf,
        })
    }

    /// Number of distinct-mass groups.
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Largest single-atom mass, `theta_1`.
    pub fn theta_max(&self) -> f64 {
        self.groups[0].theta
    }

    /// Smallest retained single-atom mass.
    pub fn theta_min(&self) -> f64 {
        self.groups[self.groups.len() - 1].theta
    }

    /// Total retained mass (should be 1 within 1e-12; exposed for tests).
    pub fn total_mass(&self) -> f64 {
        kahan_sum(self.groups.iter().map(|g| g.mass()))
    }

    /// First sample size at which the power-law regime is trusted:
    /// the smallest n with `n * theta_1 >= 2`.
    pub fn valid_from_n(&self) -> u64 {
        (2.0 / self.theta_max()).ceil() as u64
    }

    /// Mass of atom `i` (1-based), or None outside the retained support.
    pub fn theta(&self, i: u64) -> Option<f64> {
        if i == 0 || i > self.atom_count {
            return None;
        }
        let g = self.groups.partition_point(|g| g.first_index <= i) - 1;
        Some(self.groups[g].theta)
    }

    /// Log-scale mass `-ln(1 - theta_i)`; infinite for a sure atom.
    pub fn vartheta(&self, i: u64) -> Option<f64> {
        self.theta(i).map(|t| -f64::ln_1p(-t))
    }

    /// Draw one atom index (1-based).
    pub fn sample(&self, rng: &mut SplitMix64) -> u64 {
        let r = rng.next_f64();
        let g = self
            .cdf
            .partition_point(|&c| c <= r)
            .min(self.groups.len() - 1);
        let group = &self.groups[g];
        if group.multiplicity == 1 {
            group.first_index
        } else {
            group.first_index + rng.next_below(group.multiplicity)
        }
    }
}

/// Parsed form of a CLI distribution spec such as `uniform:m=10`,
/// `zipf:alpha=1,trunc=100000`, or `explicit:0.5,0.3,0.2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistSpec {
    pub family: Family,
    pub truncation: Truncation,
}

impl DistSpec {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            truncation: Truncation::Default,
        }
    }

    /// Build the distribution this spec describes.
    pub fn build(&self) -> Result<FeatureDistribution> {
        FeatureDistribution::build(self.family.clone(), self.truncation)
    }
}

fn bad_spec(spec: &str, reason: impl Into<String>) -> Error {
    Error::BadDistSpec {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn parse_kv<'a>(spec: &str, item: &'a str) -> Result<(&'a str, &'a str)> {
    let (k, v) = item
        .split_once('=')
        .ok_or_else(|| bad_spec(spec, format!("expected key=value, got '{item}'")))?;
    Ok((k.trim(), v.trim()))
}

fn parse_f64(spec: &str, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| bad_spec(spec, format!("{key} is not a number: '{v}'")))
}

fn parse_u64(spec: &str, key: &str, v: &str) -> Result<u64> {
    v.parse::<u64>()
        .map_err(|_| bad_spec(spec, format!("{key} is not a count: '{v}'")))
}

impl FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s_trim = s.trim();
        let (name, params) = match s_trim.split_once(':') {
            Some((n, p)) => (n.trim(), p),
            None => (s_trim, ""),
        };
        let mut truncation = Truncation::Default;
        let mut named: Vec<(&str, &str)> = Vec::new();
        let mut bare: Vec<f64> = Vec::new();
        for item in params.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if item.contains('=') {
                let (k, v) = parse_kv(s_trim, item)?;
                match k {
                    "trunc" => truncation = Truncation::Atoms(parse_u64(s_trim, k, v)?),
                    "tail" => truncation = Truncation::TailBound(parse_f64(s_trim, k, v)?),
                    _ => named.push((k, v)),
                }
            } else {
                bare.push(
                    item.parse::<f64>()
                        .map_err(|_| bad_spec(s_trim, format!("bad weight '{item}'")))?,
                );
            }
        }
        let one_named = |key: &str| -> Result<&str> {
            match named.as_slice() {
                [(k, v)] if *k == key => Ok(v),
                [] => Err(bad_spec(s_trim, format!("missing parameter {key}"))),
                _ => Err(bad_spec(s_trim, format!("expected only {key}"))),
            }
        };
        if name != "explicit" && !bare.is_empty() {
            return Err(bad_spec(s_trim, "unexpected bare values"));
        }
        let family = match name {
            "singleton" => {
                if !named.is_empty() || !bare.is_empty() {
                    return Err(bad_spec(s_trim, "singleton takes no parameters"));
                }
                Family::Singleton
            }
            "uniform" => Family::Uniform {
                m: parse_u64(s_trim, "m", one_named("m")?)?,
            },
            "zipf" => Family::Zipf {
                alpha: parse_f64(s_trim, "alpha", one_named("alpha")?)?,
            },
            "zipfpow" => Family::ZipfPower {
                alpha: parse_f64(s_trim, "alpha", one_named("alpha")?)?,
            },
            "exp" => Family::Exponential {
                gamma: parse_f64(s_trim, "gamma", one_named("gamma")?)?,
            },
            "superexp" => Family::SuperExponential {
                gamma: parse_f64(s_trim, "gamma", one_named("gamma")?)?,
            },
            "explicit" => {
                if !named.is_empty() {
                    return Err(bad_spec(s_trim, "explicit takes only weights and trunc"));
                }
                if bare.is_empty() {
                    return Err(bad_spec(s_trim, "explicit needs at least one weight"));
                }
                Family::Explicit { weights: bare }
            }
            "empirical" => {
                return Err(bad_spec(
                    s_trim,
                    "empirical distributions are built from corpus data, not spec strings",
                ));
            }
            other => return Err(bad_spec(s_trim, format!("unknown family '{other}'"))),
        };
        Ok(DistSpec { family, truncation })
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Singleton => write!(f, "singleton")?,
            Family::Uniform { m } => write!(f, "uniform:m={m}")?,
            Family::Zipf { alpha } => write!(f, "zipf:alpha={alpha}")?,
            Family::ZipfPower { alpha } => write!(f, "zipfpow:alpha={alpha}")?,
            Family::Exponential { gamma } => write!(f, "exp:gamma={gamma}")?,
            Family::SuperExponential { gamma } => write!(f, "superexp:gamma={gamma}")?,
            Family::Explicit { weights } => {
                write!(f, "explicit:")?;
                for (i, w) in weights.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
            }
            Family::Empirical { counts } => {
                let tokens: u64 = counts.iter().map(|(_, c)| c).sum();
                write!(f, "empirical:types={},tokens={tokens}", counts.len())?;
            }
        }
        // Singleton prints no parameter list, so a truncation suffix
        // must open one; everywhere else it extends the existing list.
        let sep = match self.family {
            Family::Singleton => ':',
            _ => ',',
        };
        match self.truncation {
            Truncation::Default => Ok(()),
            Truncation::TailBound(t) => write!(f, "{sep}tail={t}"),
            Truncation::Atoms(i) => write!(f, "{sep}trunc={i}"),
        }
    }
}
