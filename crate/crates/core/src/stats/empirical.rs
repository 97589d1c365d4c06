use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Lower,
    Upper,
    TwoSided,
}

/// Add-one empirical p-value against a null sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalP {
    pub p_value: f64,
    /// Number of null samples the value was computed against.
    pub k: usize,
    /// True when no null sample was as extreme as the observation, so the
    /// true p-value is only bounded above by `p_value`.
    pub at_floor: bool,
}

impl EmpiricalP {
    /// Human-readable form, e.g. "< 9.999e-5" when the floor was hit.
    pub fn display(&self) -> String {
        if self.at_floor {
            format!("< {:.4e}", self.p_value)
        } else {
            format!("{:.4e}", self.p_value)
        }
    }
}

/// p = (1 + #{null at least as extreme}) / (1 + K). The two-sided value is
/// twice the smaller tail, capped at 1.
pub fn empirical_p(observed: f64, nulls: &[f64], tail: Tail) -> EmpiricalP {
    let k = nulls.len();
    let denom = (k + 1) as f64;
    let below = nulls.iter().filter(|&&x| x <= observed).count();
    let above = nulls.iter().filter(|&&x| x >= observed).count();
    let lower = (1 + below) as f64 / denom;
    let upper = (1 + above) as f64 / denom;
    let (p_value, at_floor) = match tail {
        Tail::Lower => (lower, below == 0),
        Tail::Upper => (upper, above == 0),
        Tail::TwoSided => ((2.0 * lower.min(upper)).min(1.0), below == 0 || above == 0),
    };
    EmpiricalP { p_value, k, at_floor }
}
