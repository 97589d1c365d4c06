//! Deterministic statistics kernel.
//!
//! Every test returns a [`TestResult`] so analysis modules and the report
//! layer can treat them uniformly. All functions are pure.

mod anova;
mod contingency;
pub mod dist;
mod empirical;
mod kappa;
mod ks;
mod ttest;
mod tukey;

pub use anova::{anova_two_way, AnovaTable, AnovaTerm};
pub use contingency::{chi_square, cramers_v, odds_ratio, ContingencyTable};
pub use empirical::{empirical_p, EmpiricalP, Tail};
pub use kappa::cohens_kappa;
pub use ks::ks_two_sample;
pub use ttest::{cohens_d, cohens_d_summary, t_test_pooled, t_test_pooled_summary, SampleSummary};
pub use tukey::{tukey_hsd, tukey_hsd_with_error, TukeyPair};

use serde::Serialize;
use thiserror::Error;

/// Significance level used throughout the analyses.
pub const ALPHA: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("sample too small: need at least {needed}, got {got}")]
    TooSmall { needed: usize, got: usize },
    #[error("zero pooled variance with unequal means")]
    ZeroVariance,
    #[error("expected count is zero in cell ({row}, {col})")]
    ZeroExpected { row: usize, col: usize },
    #[error("degenerate table: {0}")]
    Degenerate(String),
    #[error("design has an empty cell: {0}")]
    EmptyCell(String),
    #[error("no residual degrees of freedom")]
    NoResidualDf,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Degrees of freedom attached to a test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Df {
    None,
    One(f64),
    Two(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub label: String,
    pub statistic: f64,
    pub df: Df,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effect_size: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci95: Option<[f64; 2]>,
}

impl TestResult {
    pub(crate) fn new(label: impl Into<String>, statistic: f64, df: Df, p_value: f64) -> Self {
        TestResult {
            label: label.into(),
            statistic,
            df,
            p_value: clamp_p(p_value),
            effect_size: None,
            ci95: None,
        }
    }

    pub fn with_effect(mut self, effect: f64) -> Self {
        self.effect_size = Some(effect);
        self
    }

    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

pub(crate) fn clamp_p(p: f64) -> f64 {
    if p.is_nan() {
        1.0
    } else {
        p.clamp(0.0, 1.0)
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sum of squared deviations from the mean, two-pass.
pub(crate) fn sum_sq_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Sample standard deviation (n - 1 denominator).
pub fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (sum_sq_dev(xs) / (xs.len() - 1) as f64).sqrt()
}
