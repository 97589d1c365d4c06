use super::dist::{chi2_sf, normal_two_sided_p};
use super::{Df, StatsError, TestResult};
use serde::Serialize;

/// An r x c table of non-negative counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ContingencyTable {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        counts: Vec<Vec<u64>>,
    ) -> Result<Self, StatsError> {
        if counts.len() != row_labels.len() {
            return Err(StatsError::LengthMismatch(counts.len(), row_labels.len()));
        }
        if let Some(bad) = counts.iter().find(|r| r.len() != col_labels.len()) {
            return Err(StatsError::LengthMismatch(bad.len(), col_labels.len()));
        }
        let table = ContingencyTable { row_labels, col_labels, counts };
        if table.rows() < 2 || table.cols() < 2 {
            return Err(StatsError::Degenerate("table needs at least 2 rows and 2 columns".into()));
        }
        if table.total() == 0 {
            return Err(StatsError::Degenerate("table is empty".into()));
        }
        Ok(table)
    }

    /// Builds a table with generated labels, mostly for tests.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self, StatsError> {
        let rows = (0..counts.len()).map(|i| format!("r{i}")).collect();
        let cols = (0..counts.first().map_or(0, Vec::len)).map(|j| format!("c{j}")).collect();
        Self::new(rows, cols, counts)
    }

    pub fn rows(&self) -> usize {
        self.counts.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_totals(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_totals(&self) -> Vec<u64> {
        (0..self.cols()).map(|j| self.counts.iter().map(|r| r[j]).sum()).collect()
    }

    /// Removes rows and columns whose total is zero, returning the removed
    /// labels. Fails if fewer than two rows or columns remain.
    pub fn drop_empty(&self) -> Result<(Self, Vec<String>), StatsError> {
        let (rt, ct) = (self.row_totals(), self.col_totals());
        let keep_r: Vec<usize> = (0..self.rows()).filter(|&i| rt[i] > 0).collect();
        let keep_c: Vec<usize> = (0..self.cols()).filter(|&j| ct[j] > 0).collect();
        let dropped = (0..self.rows())
            .filter(|i| !keep_r.contains(i))
            .map(|i| self.row_labels[i].clone())
            .chain((0..self.cols()).filter(|j| !keep_c.contains(j)).map(|j| self.col_labels[j].clone()))
            .collect();
        let table = ContingencyTable::new(
            keep_r.iter().map(|&i| self.row_labels[i].clone()).collect(),
            keep_c.iter().map(|&j| self.col_labels[j].clone()).collect(),
            keep_r.iter().map(|&i| keep_c.iter().map(|&j| self.counts[i][j]).collect()).collect(),
        )?;
        Ok((table, dropped))
    }

    pub fn transpose(&self) -> Self {
        let counts = (0..self.cols())
            .map(|j| self.counts.iter().map(|r| r[j]).collect())
            .collect();
        ContingencyTable {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            counts,
        }
    }
}

/// Pearson chi-square test of independence, without continuity correction.
/// Cramér's V is attached as the effect size.
pub fn chi_square(table: &ContingencyTable) -> Result<TestResult, StatsError> {
    let n = table.total() as f64;
    let rows = table.row_totals();
    let cols = table.col_totals();
    let mut stat = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &obs) in row.iter().enumerate() {
            let expected = rows[i] as f64 * cols[j] as f64 / n;
            if expected == 0.0 {
                return Err(StatsError::ZeroExpected { row: i, col: j });
            }
            let diff = obs as f64 - expected;
            stat += diff * diff / expected;
        }
    }
    let (r, c) = (table.rows(), table.cols());
    let df = ((r - 1) * (c - 1)) as f64;
    let v = cramers_v(stat, table.total(), r, c);
    Ok(TestResult::new("Pearson chi-square", stat, Df::One(df), chi2_sf(stat, df)).with_effect(v))
}

/// sqrt(chi2 / (n * (min(r, c) - 1)))
pub fn cramers_v(chi2: f64, n: u64, r: usize, c: usize) -> f64 {
    let k = r.min(c);
    if n == 0 || k < 2 {
        return f64::NAN;
    }
    (chi2 / (n as f64 * (k - 1) as f64)).sqrt()
}

/// Odds ratio of the 2x2 table [[a, b], [c, d]], i.e. (a/b) / (c/d), with a
/// Woolf (log-scale Wald) 95% interval.
///
/// When exactly one cell is zero, 0.5 is added to every cell. Two or more
/// zero cells leave the ratio undefined.
pub fn odds_ratio(a: u64, b: u64, c: u64, d: u64) -> Result<TestResult, StatsError> {
    let zeros = [a, b, c, d].iter().filter(|&&x| x == 0).count();
    if zeros >= 2 {
        return Err(StatsError::Degenerate(format!(
            "odds ratio undefined with {zeros} zero cells"
        )));
    }
    let shift = if zeros == 1 { 0.5 } else { 0.0 };
    let [a, b, c, d] = [a, b, c, d].map(|x| x as f64 + shift);
    let or = (a * d) / (b * c);
    let se = (1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d).sqrt();
    let log_or = or.ln();
    let z = 1.959_963_984_540_054;
    let mut result = TestResult::new("odds ratio", or, Df::None, normal_two_sided_p(log_or / se));
    result.ci95 = Some([(log_or - z * se).exp(), (log_or + z * se).exp()]);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn proportional_table_is_independent() {
        let t = ContingencyTable::from_counts(vec![vec![10, 20, 30], vec![20, 40, 60]]).unwrap();
        let r = chi_square(&t).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_hand_value() {
        let t = ContingencyTable::from_counts(vec![vec![10, 20], vec![20, 10]]).unwrap();
        let r = chi_square(&t).unwrap();
        assert!((r.statistic - 20.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.df, Df::One(1.0));
        assert!((r.p_value - 0.009_823_274_507_519).abs() < 1e-12);
    }

    #[test]
    fn zero_expected_cell() {
        let t = ContingencyTable::from_counts(vec![vec![10, 0], vec![20, 0]]).unwrap();
        assert!(matches!(chi_square(&t), Err(StatsError::ZeroExpected { .. })));
    }

    #[test]
    fn drop_empty_columns() {
        let t = ContingencyTable::from_counts(vec![vec![10, 0, 3], vec![20, 0, 4]]).unwrap();
        let (u, dropped) = t.drop_empty().unwrap();
        assert_eq!(dropped, vec!["c1".to_string()]);
        assert_eq!(u.counts, vec![vec![10, 3], vec![20, 4]]);
        let single = ContingencyTable::from_counts(vec![vec![10, 0], vec![20, 0]]).unwrap();
        assert!(single.drop_empty().is_err());
    }

    #[test]
    fn table_shape_checks() {
        assert!(ContingencyTable::from_counts(vec![vec![1, 2]]).is_err());
        assert!(ContingencyTable::from_counts(vec![vec![0, 0], vec![0, 0]]).is_err());
    }

    #[test]
    fn cramers_v_bounds() {
        assert_eq!(cramers_v(0.0, 100, 2, 2), 0.0);
        assert!((cramers_v(100.0, 100, 2, 2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn odds_ratio_hand_formula() {
        let r = odds_ratio(10, 5, 2, 8).unwrap();
        assert_eq!(r.statistic, 8.0);
        let se = (0.1f64 + 0.2 + 0.5 + 0.125).sqrt();
        let [lo, hi] = r.ci95.unwrap();
        assert!((lo - (8f64.ln() - 1.959_963_984_540_054 * se).exp()).abs() < 1e-9);
        assert!((hi - (8f64.ln() + 1.959_963_984_540_054 * se).exp()).abs() < 1e-9);
        assert!((r.p_value - 0.030_610_441_180_894).abs() < 1e-9);
    }

    #[test]
    fn odds_ratio_equal_odds() {
        assert_eq!(odds_ratio(4, 2, 8, 4).unwrap().statistic, 1.0);
    }

    #[test]
    fn odds_ratio_zero_cells() {
        let r = odds_ratio(0, 5, 2, 8).unwrap();
        assert!((r.statistic - (0.5 * 8.5) / (5.5 * 2.5)).abs() < 1e-12);
        assert!(odds_ratio(0, 5, 2, 0).is_err());
        assert!(odds_ratio(0, 0, 2, 3).is_err());
    }

    proptest! {
        #[test]
        fn odds_ratio_inversion(a in 1u64..500, b in 1u64..500, c in 1u64..500, d in 1u64..500) {
            let x = odds_ratio(a, b, c, d).unwrap().statistic;
            let y = odds_ratio(b, a, d, c).unwrap().statistic;
            prop_assert!((x * y - 1.0).abs() < 1e-12);
        }

        #[test]
        fn chi_square_transpose(counts in prop::collection::vec(prop::collection::vec(1u64..100, 3), 2..5)) {
            let t = ContingencyTable::from_counts(counts).unwrap();
            let a = chi_square(&t).unwrap();
            let b = chi_square(&t.transpose()).unwrap();
            prop_assert!((a.statistic - b.statistic).abs() < 1e-9 * (1.0 + a.statistic));
            prop_assert_eq!(a.df, b.df);
        }
    }
}
