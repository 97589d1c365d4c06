use super::dist::t_two_sided_p;
use super::{mean, sum_sq_dev, Df, StatsError, TestResult};
use serde::Serialize;

/// Size, mean and sample standard deviation of one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
}

impl SampleSummary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        let sd = if n > 1 {
            (sum_sq_dev(xs) / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        SampleSummary {
            n,
            mean: if n > 0 { mean(xs) } else { f64::NAN },
            sd,
        }
    }

    fn ss(&self) -> f64 {
        (self.n as f64 - 1.0) * self.sd * self.sd
    }
}

fn pooled_sd(a: &SampleSummary, b: &SampleSummary) -> f64 {
    let df = (a.n + b.n - 2) as f64;
    ((a.ss() + b.ss()) / df).sqrt()
}

fn check_sizes(a: usize, b: usize) -> Result<(), StatsError> {
    let small = a.min(b);
    if small < 2 {
        return Err(StatsError::TooSmall { needed: 2, got: small });
    }
    Ok(())
}

/// Pooled-variance Student t-test from group summaries. The statistic is
/// signed as mean(a) - mean(b); Cohen's d is attached as the effect size.
pub fn t_test_pooled_summary(a: SampleSummary, b: SampleSummary) -> Result<TestResult, StatsError> {
    check_sizes(a.n, b.n)?;
    let df = (a.n + b.n - 2) as f64;
    let sp = pooled_sd(&a, &b);
    let diff = a.mean - b.mean;
    if sp == 0.0 {
        if diff == 0.0 {
            return Ok(TestResult::new("pooled t-test", 0.0, Df::One(df), 1.0).with_effect(0.0));
        }
        return Err(StatsError::ZeroVariance);
    }
    let se = sp * (1.0 / a.n as f64 + 1.0 / b.n as f64).sqrt();
    let t = diff / se;
    Ok(TestResult::new("pooled t-test", t, Df::One(df), t_two_sided_p(t, df)).with_effect(diff.abs() / sp))
}

pub fn t_test_pooled(a: &[f64], b: &[f64]) -> Result<TestResult, StatsError> {
    check_sizes(a.len(), b.len())?;
    t_test_pooled_summary(SampleSummary::of(a), SampleSummary::of(b))
}

/// |mean difference| over the pooled standard deviation.
pub fn cohens_d(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    check_sizes(a.len(), b.len())?;
    cohens_d_summary(SampleSummary::of(a), SampleSummary::of(b))
}

pub fn cohens_d_summary(a: SampleSummary, b: SampleSummary) -> Result<f64, StatsError> {
    check_sizes(a.n, b.n)?;
    let sp = pooled_sd(&a, &b);
    if sp == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((a.mean - b.mean).abs() / sp)
}
