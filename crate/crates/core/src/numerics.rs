use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by chain validation and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest accepted deviation of a row sum from 1.
    pub row_sum: f64,
    /// Largest accepted `‖πP − π‖∞` for a stationary distribution.
    pub stationarity: f64,
    /// Largest accepted detailed-balance violation `|π_i P_ij − π_j P_ji|`.
    pub reversibility: f64,
    /// Convergence threshold of the power-iteration cross-check.
    pub power_iteration: f64,
    pub power_iteration_max: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            row_sum: 1e-9,
            stationarity: 1e-10,
            reversibility: 1e-9,
            power_iteration: 1e-14,
            power_iteration_max: 1_000_000,
        }
    }
}

/// Neumaier-compensated sum, summed in iteration order.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean and sample standard deviation (zero for fewer than two values).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = compensated_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = compensated_sum(values.iter().map(|x| (x - mean) * (x - mean)));
    (mean, (ss / (n - 1.0)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn single_value_has_zero_spread() {
        assert_eq!(mean_std(&[3.5]), (3.5, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
