use super::StatsError;
use std::collections::BTreeMap;

/// Cohen's kappa for two raters over the union of their label sets.
///
/// When chance agreement is 1 (both raters constant and identical), kappa
/// is defined as 1.
pub fn cohens_kappa<T: Ord>(ratings_a: &[T], ratings_b: &[T]) -> Result<f64, StatsError> {
    if ratings_a.len() != ratings_b.len() {
        return Err(StatsError::LengthMismatch(ratings_a.len(), ratings_b.len()));
    }
    if ratings_a.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let n = ratings_a.len() as f64;
    let mut marg: BTreeMap<&T, (usize, usize)> = BTreeMap::new();
    let mut agree = 0usize;
    for (a, b) in ratings_a.iter().zip(ratings_b) {
        marg.entry(a).or_default().0 += 1;
        marg.entry(b).or_default().1 += 1;
        if a == b {
            agree += 1;
        }
    }
    let p_o = agree as f64 / n;
    let p_e: f64 = marg.values().map(|&(x, y)| (x as f64 / n) * (y as f64 / n)).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}
