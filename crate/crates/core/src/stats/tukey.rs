use super::dist::ptukey_sf;
use super::ttest::{cohens_d_summary, SampleSummary};
use super::{sum_sq_dev, Df, StatsError, TestResult};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TukeyPair {
    pub group_a: String,
    pub group_b: String,
    /// mean(a) - mean(b)
    pub mean_diff: f64,
    /// Studentized range statistic, p-value and pairwise Cohen's d.
    pub result: TestResult,
}

/// Tukey HSD over all pairs, with the error variance pooled within groups.
pub fn tukey_hsd(groups: &BTreeMap<String, Vec<f64>>) -> Result<Vec<TukeyPair>, StatsError> {
    check_groups(groups)?;
    let n: usize = groups.values().map(Vec::len).sum();
    let df = (n - groups.len()) as f64;
    let ss: f64 = groups.values().map(|g| sum_sq_dev(g)).sum();
    tukey_hsd_with_error(groups, ss / df, df)
}

fn check_groups(groups: &BTreeMap<String, Vec<f64>>) -> Result<(), StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooSmall { needed: 2, got: groups.len() });
    }
    if let Some(small) = groups.values().map(Vec::len).filter(|&l| l < 2).min() {
        return Err(StatsError::TooSmall { needed: 2, got: small });
    }
    Ok(())
}

/// Tukey HSD with an externally supplied error mean square, e.g. the
/// residual of a two-way model. Unequal group sizes use the Tukey-Kramer
/// standard error.
pub fn tukey_hsd_with_error(
    groups: &BTreeMap<String, Vec<f64>>,
    mse: f64,
    error_df: f64,
) -> Result<Vec<TukeyPair>, StatsError> {
    check_groups(groups)?;
    if mse <= 0.0 || !mse.is_finite() {
        return Err(StatsError::ZeroVariance);
    }
    let k = groups.len();
    let summaries: Vec<(&String, SampleSummary)> =
        groups.iter().map(|(name, v)| (name, SampleSummary::of(v))).collect();
    let mut pairs = Vec::with_capacity(k * (k - 1) / 2);
    for (i, (name_a, a)) in summaries.iter().enumerate() {
        for (name_b, b) in &summaries[i + 1..] {
            let diff = a.mean - b.mean;
            let se = (0.5 * mse * (1.0 / a.n as f64 + 1.0 / b.n as f64)).sqrt();
            let q = diff.abs() / se;
            let p = ptukey_sf(q, k, error_df);
            let mut result = TestResult::new("Tukey HSD", q, Df::Two(k as f64, error_df), p);
            result.effect_size = cohens_d_summary(*a, *b).ok();
            pairs.push(TukeyPair {
                group_a: (*name_a).clone(),
                group_b: (*name_b).clone(),
                mean_diff: diff,
                result,
            });
        }
    }
    Ok(pairs)
}
