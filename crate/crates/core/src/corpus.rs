//! Word-novelty experiments on real text.
//!
//! The memorizer's error on a token stream is the new-word indicator:
//! position n errs iff the token was absent from the first n tokens.
//! That needs no labels, so any text yields a learning curve. Word
//! frequencies are roughly Zipf with a small exponent, which is what
//! ties book statistics to the power-law curves of [`crate::curves`].

use std::collections::{HashMap, HashSet};

use crate::dist::{Family, FeatureDistribution, Truncation};
use crate::error::Error;
use crate::powerfit::{fit_pairs, PowerLawFit};
use crate::series::{CurveKind, CurveSeries, CurveTable, SeriesMeta};
use crate::sim::{run_ensemble, ExperimentConfig};
use crate::Result;

/// Lowercase, split on any non-alphabetic character, drop empties,
/// keep at most `limit_words` tokens.
pub fn tokenize(text: &str, limit_words: Option<usize>) -> Vec<String> {
    let lowered = text.to_lowercase();
    let words = lowered
        .split(|c: char| !c.is_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_owned);
    match limit_words {
        Some(limit) => words.take(limit).collect(),
        None => words.collect(),
    }
}

/// Rank-frequency table of a token stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    /// (word, count), sorted by count descending, ties lexicographic.
    pub entries: Vec<(String, u64)>,
    /// Total token count; entry counts sum to it.
    pub total: u64,
}

impl FrequencyTable {
    pub fn from_tokens(tokens: &[String]) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for t in tokens {
            *counts.entry(t).or_insert(0) += 1;
        }
        let mut entries: Vec<(String, u64)> = counts
            .into_iter()
            .map(|(w, c)| (w.to_owned(), c))
            .collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(FrequencyTable {
            entries,
            total: tokens.len() as u64,
        })
    }

    /// Relative frequency of the entry at `rank` (0-based index).
    pub fn rel_freq(&self, index: usize) -> f64 {
        self.entries[index].1 as f64 / self.total as f64
    }

    /// The token counts as an empirical feature distribution.
    pub fn to_distribution(&self) -> Result<FeatureDistribution> {
        FeatureDistribution::build(
            Family::Empirical {
                counts: self.entries.clone(),
            },
            Truncation::Default,
        )
    }
}

/// How to turn a token stream into a novelty curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoveltyMode {
    /// One deterministic pass in the text's own order.
    Stream,
    /// Draw tokens i.i.d. from the empirical frequencies instead,
    /// matching the model's exchangeability assumption.
    Iid { seed: u64, runs: u64 },
}

fn stream_errors(tokens: &[String]) -> Vec<bool> {
    let mut seen: HashSet<&str> = HashSet::with_capacity(tokens.len() / 4);
    tokens.iter().map(|t| seen.insert(t)).collect()
}

/// The per-position novelty curve of a token stream.
///
/// Stream mode returns the raw 0/1 record; i.i.d. mode resamples the
/// empirical distribution through the Monte-Carlo engine and returns
/// its averaged instantaneous curve.
pub fn novelty_curve(tokens: &[String], mode: &NoveltyMode) -> Result<CurveSeries> {
    if tokens.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    match mode {
        NoveltyMode::Stream => {
            let errors = stream_errors(tokens);
            Ok(CurveSeries::from_values(
                CurveKind::InstMean,
                SeriesMeta::default(),
                errors
                    .iter()
                    .enumerate()
                    .map(|(n, &e)| (n as u64, f64::from(u8::from(e)))),
            ))
        }
        NoveltyMode::Iid { seed, runs } => {
            let table = FrequencyTable::from_tokens(tokens)?;
            let dist = table.to_distribution()?;
            let config = ExperimentConfig {
                seed: *seed,
                runs_k: *runs,
                horizon_n: tokens.len() as u64 - 1,
                loss_scale: 1.0,
                dist_spec: crate::dist::DistSpec {
                    family: Family::Empirical {
                        counts: table.entries.clone(),
                    },
                    truncation: Truncation::Default,
                }
                .to_string(),
            };
            Ok(run_ensemble(&dist, &config)?.inst)
        }
    }
}

/// Stream novelty as a full curve table: the 0/1 instantaneous record
/// plus its running average and cumulative sum, on the exact-curve
/// column names. The cumulative value at N is the number of distinct
/// tokens among the first N.
pub fn novelty_table(tokens: &[String]) -> Result<CurveTable> {
    if tokens.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let errors = stream_errors(tokens);
    let meta = SeriesMeta::default();
    let inst = CurveSeries::from_values(
        CurveKind::InstMean,
        meta.clone(),
        errors
            .iter()
            .enumerate()
            .map(|(n, &e)| (n as u64, f64::from(u8::from(e)))),
    );
    let mut distinct = 0u64;
    let mut avg = Vec::with_capacity(errors.len());
    let mut cum = Vec::with_capacity(errors.len());
    for (i, &e) in errors.iter().enumerate() {
        distinct += u64::from(e);
        let n = i as u64 + 1;
        avg.push((n, distinct as f64 / n as f64));
        cum.push((n, distinct as f64));
    }
    let timeavg = CurveSeries::from_values(CurveKind::TimeAvgMean, meta.clone(), avg);
    let cumulative = CurveSeries::from_values(CurveKind::CumulativeMean, meta.clone(), cum);
    Ok(CurveTable::new(meta, vec![inst, timeavg, cumulative]))
}

/// A rank-frequency power fit with the Zipf exponent read off it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfRankFit {
    pub fit: PowerLawFit,
    /// Rank-frequency exponent: counts ~ rank^-(1 + alpha_hat).
    pub alpha_hat: f64,
    /// False when counts barely decay with rank (slope near zero, so
    /// alpha_hat near -1): such a table is not Zipf-like at all.
    pub zipf_like: bool,
}

/// Fit `count ~ rank^-(1+alpha)` over entries with count >= min_count.
pub fn zipf_rank_fit(table: &FrequencyTable, min_count: u64) -> Result<ZipfRankFit> {
    let qualifying = table
        .entries
        .iter()
        .take_while(|(_, c)| *c >= min_count)
        .count();
    if qualifying < 3 {
        return Err(Error::TooFewRanks {
            need: 3,
            found: qualifying,
        });
    }
    let fit = fit_pairs(
        table.entries[..qualifying]
            .iter()
            .enumerate()
            .map(|(i, (_, c))| ((i + 1) as f64, *c as f64)),
        1,
        qualifying as u64,
    )?;
    let alpha_hat = fit.beta_hat - 1.0;
    Ok(ZipfRankFit {
        fit,
        alpha_hat,
        zipf_like: fit.beta_hat >= 0.1,
    })
}

/// The text shipped with the library: original prose placed in the
/// public domain, bundled so corpus experiments run out of the box.
pub fn bundled_sample_text() -> &'static str {
    include_str!("../assets/meadow.txt")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::inst_mean;
    use approx::assert_abs_diff_eq;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenizer_examples() {
        assert_eq!(
            tokenize("The cat, the hat", None),
            toks(&["the", "cat", "the", "hat"])
        );
        assert_eq!(tokenize("The cat, the hat", Some(2)), toks(&["the", "cat"]));
        assert_eq!(tokenize("a1b", None), toks(&["a", "b"]));
        assert_eq!(tokenize("12 -- !", None), Vec::<String>::new());
        assert_eq!(tokenize("Don't stop", None), toks(&["don", "t", "stop"]));
    }

    #[test]
    fn frequency_table_sorts_by_count_then_word() {
        let t = FrequencyTable::from_tokens(&toks(&["b", "a", "b", "c", "a", "b"])).unwrap();
        assert_eq!(t.total, 6);
        assert_eq!(
            t.entries,
            vec![
                ("b".to_string(), 3),
                ("a".to_string(), 2),
                ("c".to_string(), 1)
            ]
        );
        assert_abs_diff_eq!(t.rel_freq(0), 0.5);
        assert!(FrequencyTable::from_tokens(&[]).is_err());
    }

    #[test]
    fn stream_novelty_examples() {
        let c = novelty_curve(&toks(&["a", "b", "a", "b", "c"]), &NoveltyMode::Stream).unwrap();
        let values: Vec<f64> = c.points.iter().map(|p| p.value).collect();
        assert_eq!(values, vec![1.0, 1.0, 0.0, 0.0, 1.0]);

        let c = novelty_curve(&toks(&["x", "x", "x"]), &NoveltyMode::Stream).unwrap();
        let values: Vec<f64> = c.points.iter().map(|p| p.value).collect();
        assert_eq!(values, vec![1.0, 0.0, 0.0]);

        assert!(novelty_curve(&[], &NoveltyMode::Stream).is_err());
    }

    #[test]
    fn cumulative_novelty_counts_distinct_tokens() {
        let tokens = tokenize(bundled_sample_text(), Some(500));
        let table = novelty_table(&tokens).unwrap();
        let cum = table.column(CurveKind::CumulativeMean).unwrap();
        let mut seen = HashSet::new();
        for (i, t) in tokens.iter().enumerate() {
            seen.insert(t.as_str());
            assert_eq!(
                cum.value_at(i as u64 + 1).unwrap(),
                seen.len() as f64,
                "at N={}",
                i + 1
            );
        }
    }

    #[test]
    fn bundled_text_reference_statistics() {
        let tokens = tokenize(bundled_sample_text(), None);
        assert_eq!(tokens.len(), 10901);
        let table = FrequencyTable::from_tokens(&tokens).unwrap();
        assert_eq!(table.entries.len(), 2387);
        assert_eq!(table.entries[0], ("the".to_string(), 1148));
        assert_eq!(table.entries[1], ("and".to_string(), 441));
    }

    #[test]
    fn bundled_text_is_zipf_like_with_small_exponent() {
        let tokens = tokenize(bundled_sample_text(), None);
        let table = FrequencyTable::from_tokens(&tokens).unwrap();
        let z = zipf_rank_fit(&table, 1).unwrap();
        assert!(z.zipf_like);
        assert!(
            z.alpha_hat > -0.2 && z.alpha_hat < 0.4,
            "alpha_hat = {}",
            z.alpha_hat
        );
    }

    #[test]
    fn synthetic_zipf_counts_recover_alpha_zero() {
        let entries: Vec<(String, u64)> = (1..=50u64)
            .map(|r| (format!("w{r:02}"), (1000.0 / r as f64).round() as u64))
            .collect();
        let total = entries.iter().map(|e| e.1).sum();
        let table = FrequencyTable { entries, total };
        let z = zipf_rank_fit(&table, 1).unwrap();
        assert!(z.alpha_hat.abs() <= 0.05, "alpha_hat = {}", z.alpha_hat);
        assert!(z.zipf_like);
    }

    #[test]
    fn equal_counts_are_flagged_non_zipf() {
        let entries: Vec<(String, u64)> = (0..10)
            .map(|i| (format!("w{i}"), 7u64))
            .collect();
        let table = FrequencyTable { entries, total: 70 };
        let z = zipf_rank_fit(&table, 1).unwrap();
        assert_abs_diff_eq!(z.alpha_hat, -1.0, epsilon = 1e-12);
        assert!(!z.zipf_like);
    }

    #[test]
    fn min_count_filters_ranks() {
        let tokens = tokenize(bundled_sample_text(), None);
        let table = FrequencyTable::from_tokens(&tokens).unwrap();
        let all = zipf_rank_fit(&table, 1).unwrap();
        let frequent = zipf_rank_fit(&table, 5).unwrap();
        assert!(frequent.fit.points_used < all.fit.points_used);
        assert!(matches!(
            zipf_rank_fit(&table, 100_000),
            Err(Error::TooFewRanks { need: 3, .. })
        ));
    }

    #[test]
    fn iid_mode_matches_empirical_distribution_curve() {
        let tokens = toks(&["a", "a", "b", "b", "c", "a", "b", "c", "c", "c"]);
        let curve = novelty_curve(
            &tokens,
            &NoveltyMode::Iid {
                seed: 31,
                runs: 20_000,
            },
        )
        .unwrap();
        assert_eq!(curve.points[0].value, 1.0);
        let dist = FrequencyTable::from_tokens(&tokens)
            .unwrap()
            .to_distribution()
            .unwrap();
        for p in &curve.points {
            let exact = inst_mean(&dist, p.n);
            let se = p.se.unwrap();
            assert!(
                (p.value - exact).abs() <= 4.0 * se + 1e-9,
                "n={}: {} vs {exact}",
                p.n,
                p.value
            );
        }
    }
}
