use nalgebra::DMatrix;
use rand::Rng;

use crate::error::ChainError;

/// Row-stochastic transition matrix with cached cumulative rows for sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    probs: Vec<f64>,
    cdf: Vec<f64>,
}

/// Checks that `rows` is a non-empty square matrix of finite non-negative entries.
pub(crate) fn check_shape(rows: &[Vec<f64>]) -> Result<usize, ChainError> {
    let n = rows.len();
    if n == 0 {
        return Err(ChainError::Empty);
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(ChainError::NotSquare { row: i, len: row.len(), expected: n });
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(ChainError::NonFinite { row: i, col: j });
            }
            if v < 0.0 {
                return Err(ChainError::NegativeEntry { row: i, col: j, value: v });
            }
        }
    }
    Ok(n)
}

/// Checks every row sum against 1 within `tolerance`.
pub(crate) fn check_row_sums(rows: &[Vec<f64>], tolerance: f64) -> Result<(), ChainError> {
    for (i, row) in rows.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(ChainError::RowSum { row: i, sum, tolerance });
        }
    }
    Ok(())
}

impl TransitionMatrix {
    /// Builds a matrix from rows whose sums are within `row_tolerance` of 1.
    ///
    /// Accepted rows are rescaled to unit sum so the stored matrix is
    /// stochastic to rounding precision.
    pub fn from_rows(rows: &[Vec<f64>], row_tolerance: f64) -> Result<Self, ChainError> {
        let n = check_shape(rows)?;
        check_row_sums(rows, row_tolerance)?;
        let mut probs = Vec::with_capacity(n * n);
        for row in rows {
            let sum: f64 = row.iter().sum();
            probs.extend(row.iter().map(|v| v / sum));
        }
        Ok(Self::from_flat(n, probs))
    }

    fn from_flat(n: usize, probs: Vec<f64>) -> Self {
        let mut cdf = Vec::with_capacity(n * n);
        for row in probs.chunks_exact(n) {
            let mut acc = 0.0;
            for &p in row {
                acc += p;
                cdf.push(acc);
            }
        }
        Self { n, probs, cdf }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.probs[i * self.n..(i + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.probs.chunks_exact(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.probs)
    }

    /// Draws the successor of state `i`.
    pub fn sample_next<R: Rng + ?Sized>(&self, i: usize, rng: &mut R) -> usize {
        sample_cdf(&self.cdf[i * self.n..(i + 1) * self.n], rng)
    }
}

/// Inverse-CDF draw from a cumulative probability row.
pub(crate) fn sample_cdf<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    // The last entry may round below 1; fall back to the last positive state.
    match cdf.iter().position(|&c| u < c) {
        Some(j) => j,
        None => {
            let total = cdf[cdf.len() - 1];
            cdf.iter().position(|&c| c >= total).unwrap_or(cdf.len() - 1)
        }
    }
}
