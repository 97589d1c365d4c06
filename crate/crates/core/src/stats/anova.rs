use super::dist::f_sf;
use super::{Df, StatsError, TestResult};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaTerm {
    pub name: String,
    pub ss: f64,
    pub df: f64,
    pub ms: f64,
    pub f: f64,
    pub p_value: f64,
}

impl AnovaTerm {
    pub fn to_test(&self, residual_df: f64) -> TestResult {
        TestResult::new(
            format!("ANOVA {}", self.name),
            self.f,
            Df::Two(self.df, residual_df),
            self.p_value,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaTable {
    /// Factor A, factor B, A x B, in that order.
    pub terms: Vec<AnovaTerm>,
    pub residual_ss: f64,
    pub residual_df: f64,
}

impl AnovaTable {
    pub fn residual_ms(&self) -> f64 {
        self.residual_ss / self.residual_df
    }

    pub fn tests(&self) -> Vec<TestResult> {
        self.terms.iter().map(|t| t.to_test(self.residual_df)).collect()
    }

    /// Renames the terms from `A`, `B`, `A:B` to the given factor names.
    pub fn with_names(mut self, a: &str, b: &str) -> Self {
        let names = [a.to_string(), b.to_string(), format!("{a}:{b}")];
        for (term, name) in self.terms.iter_mut().zip(names) {
            term.name = name;
        }
        self
    }
}

fn level_index<T: Ord + Clone>(labels: &[T]) -> (Vec<usize>, usize) {
    let levels: BTreeMap<T, usize> = labels
        .iter()
        .cloned()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, l)| (l, i))
        .collect();
    (labels.iter().map(|l| levels[l]).collect(), levels.len())
}

/// Solves a small dense system by Gaussian elimination with partial pivoting.
fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Result<Vec<f64>, StatsError> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("non-empty range");
        if m[pivot][col].abs() < 1e-12 {
            return Err(StatsError::Degenerate("singular design".into()));
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            if factor != 0.0 {
                for k in col..n {
                    m[row][k] -= factor * m[col][k];
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Ok(x)
}

/// Two-way ANOVA with sequential (Type I) sums of squares, entered in the
/// order A, B, A x B. With unbalanced cells the result depends on that order.
pub fn anova_two_way<A: Ord + Clone, B: Ord + Clone>(
    values: &[f64],
    factor_a: &[A],
    factor_b: &[B],
) -> Result<AnovaTable, StatsError> {
    if values.len() != factor_a.len() {
        return Err(StatsError::LengthMismatch(values.len(), factor_a.len()));
    }
    if values.len() != factor_b.len() {
        return Err(StatsError::LengthMismatch(values.len(), factor_b.len()));
    }
    let (ia, p) = level_index(factor_a);
    let (ib, q) = level_index(factor_b);
    if p < 2 || q < 2 {
        return Err(StatsError::Invalid("each factor needs at least 2 levels".into()));
    }
    let n = values.len();
    let grand = values.iter().sum::<f64>() / n as f64;

    let mut counts = vec![vec![0usize; q]; p];
    let mut sums = vec![vec![0.0f64; q]; p];
    for ((&y, &i), &j) in values.iter().zip(&ia).zip(&ib) {
        counts[i][j] += 1;
        sums[i][j] += y - grand;
    }
    for i in 0..p {
        for j in 0..q {
            if counts[i][j] == 0 {
                return Err(StatsError::EmptyCell(format!("level pair ({i}, {j})")));
            }
        }
    }
    let residual_df = (n - p * q) as f64;
    if residual_df <= 0.0 {
        return Err(StatsError::NoResidualDf);
    }

    let cell_mean = |i: usize, j: usize| sums[i][j] / counts[i][j] as f64;
    let mut residual_ss = 0.0;
    for ((&y, &i), &j) in values.iter().zip(&ia).zip(&ib) {
        let e = (y - grand) - cell_mean(i, j);
        residual_ss += e * e;
    }
    let total_ss: f64 = values.iter().map(|y| (y - grand) * (y - grand)).sum();

    let row_n: Vec<f64> = counts.iter().map(|r| r.iter().sum::<usize>() as f64).collect();
    let row_sum: Vec<f64> = sums.iter().map(|r| r.iter().sum()).collect();
    let col_n: Vec<f64> = (0..q).map(|j| counts.iter().map(|r| r[j]).sum::<usize>() as f64).collect();
    let col_sum: Vec<f64> = (0..q).map(|j| sums.iter().map(|r| r[j]).sum()).collect();

    // Values are centred, so the intercept-only model has zero model SS.
    let ss_a: f64 = (0..p).map(|i| row_sum[i] * row_sum[i] / row_n[i]).sum();

    // Additive model: intercept, A levels 1.., B levels 1.. (treatment coding).
    let dim = 1 + (p - 1) + (q - 1);
    let a_col = |i: usize| i; // i in 1..p
    let b_col = |j: usize| p - 1 + j; // j in 1..q
    let mut xtx = vec![vec![0.0; dim]; dim];
    let mut xty = vec![0.0; dim];
    xtx[0][0] = n as f64;
    xty[0] = row_sum.iter().sum();
    for i in 1..p {
        let c = a_col(i);
        xtx[0][c] = row_n[i];
        xtx[c][0] = row_n[i];
        xtx[c][c] = row_n[i];
        xty[c] = row_sum[i];
    }
    for j in 1..q {
        let c = b_col(j);
        xtx[0][c] = col_n[j];
        xtx[c][0] = col_n[j];
        xtx[c][c] = col_n[j];
        xty[c] = col_sum[j];
        for i in 1..p {
            let r = a_col(i);
            xtx[r][c] = counts[i][j] as f64;
            xtx[c][r] = counts[i][j] as f64;
        }
    }
    let beta = solve(xtx, xty.clone())?;
    let additive_model_ss: f64 = beta.iter().zip(&xty).map(|(b, y)| b * y).sum();
    let ss_b = (additive_model_ss - ss_a).max(0.0);
    let ss_ab = (total_ss - additive_model_ss - residual_ss).max(0.0);

    let residual_ms = residual_ss / residual_df;
    let term = |name: &str, ss: f64, df: f64| {
        let ms = ss / df;
        let f = if residual_ms > 0.0 { ms / residual_ms } else { f64::INFINITY };
        let p_value = if residual_ms > 0.0 { f_sf(f, df, residual_df) } else { 0.0 };
        AnovaTerm { name: name.to_string(), ss, df, ms, f, p_value }
    };
    let (dfa, dfb) = ((p - 1) as f64, (q - 1) as f64);
    Ok(AnovaTable {
        terms: vec![
            term("A", ss_a, dfa),
            term("B", ss_b, dfb),
            term("A:B", ss_ab, dfa * dfb),
        ],
        residual_ss,
        residual_df,
    })
}
