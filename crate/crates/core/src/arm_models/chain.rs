//! Ergodicity checks and spectral quantities of finite Markov chains.

use nalgebra::{DMatrix, DVector};

use super::matrix::{check_row_sums, check_shape, TransitionMatrix};
use crate::error::ChainError;
use crate::numerics::Tolerances;

/// Pass/fail outcome of each property the regret analysis relies on.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub row_stochastic: bool,
    pub irreducible: bool,
    pub aperiodic: bool,
    pub reversible: bool,
    /// Stationary distribution, when the chain is irreducible and aperiodic.
    pub stationary: Option<Vec<f64>>,
}

impl ChainReport {
    pub fn all_pass(&self) -> bool {
        self.row_stochastic && self.irreducible && self.aperiodic && self.reversible
    }

    /// Names of the failed properties, in check order.
    pub fn failures(&self) -> Vec<&'static str> {
        [
            (self.row_stochastic, "row-stochastic"),
            (self.irreducible, "irreducible"),
            (self.aperiodic, "aperiodic"),
            (self.reversible, "reversible"),
        ]
        .into_iter()
        .filter_map(|(ok, name)| (!ok).then_some(name))
        .collect()
    }
}

/// Validates a raw square matrix.
///
/// Structural problems (shape, negative entries, row sums) are errors; the
/// ergodicity properties are reported individually.
pub fn validate_chain(rows: &[Vec<f64>], tol: &Tolerances) -> Result<ChainReport, ChainError> {
    check_shape(rows)?;
    check_row_sums(rows, tol.row_sum)?;
    let matrix = TransitionMatrix::from_rows(rows, tol.row_sum)?;
    Ok(analyze(&matrix, tol))
}

/// Runs the ergodicity checks on an already well-formed matrix.
pub fn analyze(matrix: &TransitionMatrix, tol: &Tolerances) -> ChainReport {
    let adjacency = positive_pattern(matrix);
    let irreducible = is_strongly_connected(&adjacency);
    let aperiodic = is_aperiodic(&adjacency);
    let stationary = if irreducible && aperiodic {
        stationary_distribution(matrix, tol).ok()
    } else {
        None
    };
    let reversible = stationary
        .as_ref()
        .is_some_and(|pi| detailed_balance_violation(matrix, pi) <= tol.reversibility);
    ChainReport { row_stochastic: true, irreducible, aperiodic, reversible, stationary }
}

fn positive_pattern(matrix: &TransitionMatrix) -> Vec<Vec<bool>> {
    (0..matrix.dim())
        .map(|i| matrix.row(i).iter().map(|&p| p > 0.0).collect())
        .collect()
}

fn reachable(adjacency: &[Vec<bool>], start: usize, reverse: bool) -> Vec<bool> {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            let edge = if reverse { adjacency[j][i] } else { adjacency[i][j] };
            if edge && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

fn is_strongly_connected(adjacency: &[Vec<bool>]) -> bool {
    reachable(adjacency, 0, false).into_iter().all(|r| r)
        && reachable(adjacency, 0, true).into_iter().all(|r| r)
}

fn bool_square(a: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for k in (0..n).filter(|&k| a[i][k]) {
            for j in 0..n {
                out[i][j] |= a[k][j];
            }
        }
    }
    out
}

/// Positivity of `P^k` for some `k ≥ n²`, restricted to mutually reachable pairs.
///
/// Within a communicating class, `P^k` is positive for all large `k` exactly
/// when the class is aperiodic, and `k ≥ n²` exceeds Wielandt's bound.
fn is_aperiodic(adjacency: &[Vec<bool>]) -> bool {
    let n = adjacency.len();
    let target = (n * n).max(1);
    let mut power = adjacency.to_vec();
    let mut exponent = 1;
    while exponent < target {
        power = bool_square(&power);
        exponent *= 2;
    }
    let forward: Vec<Vec<bool>> = (0..n).map(|i| reachable(adjacency, i, false)).collect();
    (0..n).all(|i| (0..n).all(|j| !(forward[i][j] && forward[j][i]) || power[i][j]))
}

/// `max |π_i P_ij − π_j P_ji|` over all pairs.
pub fn detailed_balance_violation(matrix: &TransitionMatrix, pi: &[f64]) -> f64 {
    let n = matrix.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((pi[i] * matrix.get(i, j) - pi[j] * matrix.get(j, i)).abs());
        }
    }
    worst
}

/// `‖πP − π‖∞`.
pub fn stationarity_residual(matrix: &TransitionMatrix, pi: &[f64]) -> f64 {
    let n = matrix.dim();
    (0..n)
        .map(|j| {
            let flow: f64 = (0..n).map(|i| pi[i] * matrix.get(i, j)).sum();
            (flow - pi[j]).abs()
        })
        .fold(0.0, f64::max)
}

/// Stationary distribution by a direct solve of `π(P − I) = 0, Σπ = 1`.
///
/// The last balance equation is replaced by the normalization; two rounds of
/// iterative refinement bring the residual to rounding level.
pub fn stationary_distribution(
    matrix: &TransitionMatrix,
    tol: &Tolerances,
) -> Result<Vec<f64>, ChainError> {
    let adjacency = positive_pattern(matrix);
    if !is_strongly_connected(&adjacency) {
        return Err(ChainError::NotIrreducible);
    }
    if !is_aperiodic(&adjacency) {
        return Err(ChainError::NotAperiodic);
    }
    let n = matrix.dim();
    let p = matrix.to_dmatrix();
    let mut system: DMatrix<f64> = p.transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        system[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let lu = system.clone().lu();
    let mut pi = lu.solve(&rhs).ok_or(ChainError::Singular)?;
    for _ in 0..2 {
        let correction = lu.solve(&(&rhs - &system * &pi)).ok_or(ChainError::Singular)?;
        pi += correction;
    }
    let total: f64 = pi.iter().sum();
    let pi: Vec<f64> = pi.iter().map(|v| v / total).collect();
    let residual = stationarity_residual(matrix, &pi);
    if residual > tol.stationarity || pi.iter().any(|&v| v <= 0.0) {
        return Err(ChainError::Residual { residual, tolerance: tol.stationarity });
    }
    Ok(pi)
}

/// Stationary distribution by power iteration from state 0.
///
/// Used to cross-check the direct solve; periodic or slowly mixing chains
/// exhaust the iteration cap.
pub fn stationary_by_power_iteration(
    matrix: &TransitionMatrix,
    tol: &Tolerances,
) -> Result<Vec<f64>, ChainError> {
    let n = matrix.dim();
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..tol.power_iteration_max {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (i, &mass) in pi.iter().enumerate() {
            for (j, &p) in matrix.row(i).iter().enumerate() {
                next[j] += mass * p;
            }
        }
        let delta = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut pi, &mut next);
        if delta < tol.power_iteration {
            let total: f64 = pi.iter().sum();
            return Ok(pi.into_iter().map(|v| v / total).collect());
        }
    }
    Err(ChainError::NoConvergence { iterations: tol.power_iteration_max })
}

/// Eigenvalue gap `1 − λ₂` of a chain reversible with respect to `pi`.
///
/// `λ₂` is the second-largest (signed) eigenvalue, read from the symmetric
/// matrix `Π^{1/2} P Π^{−1/2}` which shares the spectrum of `P`. For chains
/// with strongly negative eigenvalues the gap can exceed 1.
pub fn eigenvalue_gap(
    matrix: &TransitionMatrix,
    pi: &[f64],
    tol: &Tolerances,
) -> Result<f64, ChainError> {
    let violation = detailed_balance_violation(matrix, pi);
    if violation > tol.reversibility {
        return Err(ChainError::NotReversible { max_violation: violation });
    }
    let n = matrix.dim();
    if n == 1 {
        return Ok(1.0);
    }
    let sqrt_pi: Vec<f64> = pi.iter().map(|v| v.sqrt()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| {
        let forward = sqrt_pi[i] * matrix.get(i, j) / sqrt_pi[j];
        let backward = sqrt_pi[j] * matrix.get(j, i) / sqrt_pi[i];
        0.5 * (forward + backward)
    });
    let mut eigenvalues: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(1.0 - eigenvalues[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm(rows: &[&[f64]]) -> TransitionMatrix {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        TransitionMatrix::from_rows(&rows, 1e-9).unwrap()
    }

    fn rows(r: &[&[f64]]) -> Vec<Vec<f64>> {
        r.iter().map(|r| r.to_vec()).collect()
    }

    /// Period of state 0 as the gcd of return lengths up to `2n²`.
    fn period_by_return_gcd(m: &TransitionMatrix) -> usize {
        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 { a } else { gcd(b, a % b) }
        }
        let n = m.dim();
        let mut frontier = vec![false; n];
        frontier[0] = true;
        let mut g = 0;
        for len in 1..=2 * n * n {
            let mut next = vec![false; n];
            for i in (0..n).filter(|&i| frontier[i]) {
                for j in 0..n {
                    next[j] |= m.get(i, j) > 0.0;
                }
            }
            if next[0] {
                g = gcd(g, len);
            }
            frontier = next;
        }
        g
    }

    #[test]
    fn two_state_chain_passes_everything() {
        let r = validate_chain(&rows(&[&[0.9, 0.1], &[0.2, 0.8]]), &Tolerances::default()).unwrap();
        assert!(r.all_pass(), "{:?}", r.failures());
    }

    #[test]
    fn identity_is_reducible() {
        let r = validate_chain(&rows(&[&[1.0, 0.0], &[0.0, 1.0]]), &Tolerances::default()).unwrap();
        assert!(!r.irreducible);
        assert_eq!(r.failures(), vec!["irreducible", "reversible"]);
    }

    #[test]
    fn alternation_is_periodic() {
        let r = validate_chain(&rows(&[&[0.0, 1.0], &[1.0, 0.0]]), &Tolerances::default()).unwrap();
        assert!(r.irreducible);
        assert!(!r.aperiodic);
    }

    #[test]
    fn structural_errors_are_reported() {
        let tol = Tolerances::default();
        assert!(matches!(
            validate_chain(&rows(&[&[0.5, 0.5, 0.0], &[0.5, 0.5, 0.0]]), &tol),
            Err(ChainError::NotSquare { .. })
        ));
        assert!(matches!(
            validate_chain(&rows(&[&[0.5, 0.5], &[0.5, 0.5 + 2e-9]]), &tol),
            Err(ChainError::RowSum { row: 1, .. })
        ));
        assert!(matches!(
            validate_chain(&rows(&[&[1.5, -0.5], &[0.5, 0.5]]), &tol),
            Err(ChainError::NegativeEntry { .. })
        ));
    }

    #[test]
    fn aperiodicity_agrees_with_return_gcd() {
        let cases: Vec<Vec<Vec<f64>>> = vec![
            rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]]),
            rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.5, 0.5, 0.0]]),
            rows(&[&[0.0, 0.5, 0.5], &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]]),
            rows(&[&[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[0.5, 0.0, 0.5, 0.0]]),
            rows(&[&[0.2, 0.8], &[0.6, 0.4]]),
        ];
        for c in cases {
            let m = TransitionMatrix::from_rows(&c, 1e-9).unwrap();
            let report = analyze(&m, &Tolerances::default());
            assert_eq!(report.aperiodic, period_by_return_gcd(&m) == 1, "{c:?}");
        }
    }

    #[test]
    fn symmetric_chain_is_uniform() {
        let m = tm(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let pi = stationary_distribution(&m, &Tolerances::default()).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15 && (pi[1] - 0.5).abs() < 1e-15);
        let gap = eigenvalue_gap(&m, &pi, &Tolerances::default()).unwrap();
        assert!((gap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_state_closed_forms() {
        // π₁ = p01 / (p01 + p10), λ₂ = 1 − p01 − p10
        let (p01, p10) = (0.1, 0.2);
        let m = tm(&[&[1.0 - p01, p01], &[p10, 1.0 - p10]]);
        let tol = Tolerances::default();
        let pi = stationary_distribution(&m, &tol).unwrap();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((pi[1] - 1.0 / 3.0).abs() < 1e-12);
        let gap = eigenvalue_gap(&m, &pi, &tol).unwrap();
        assert!((gap - 0.3).abs() < 1e-12);
        assert!(stationarity_residual(&m, &pi) <= 1e-12);
    }

    #[test]
    fn power_iteration_fails_on_periodic_chain() {
        let m = tm(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let tol = Tolerances { power_iteration_max: 1000, ..Tolerances::default() };
        assert_eq!(
            stationary_by_power_iteration(&m, &tol),
            Err(ChainError::NoConvergence { iterations: 1000 })
        );
        assert_eq!(stationary_distribution(&m, &tol), Err(ChainError::NotAperiodic));
    }

    #[test]
    fn non_reversible_chain_has_no_gap() {
        // Biased cycle: stationary is uniform but flow circulates.
        let m = tm(&[&[0.1, 0.8, 0.1], &[0.1, 0.1, 0.8], &[0.8, 0.1, 0.1]]);
        let tol = Tolerances::default();
        let pi = stationary_distribution(&m, &tol).unwrap();
        assert!(matches!(eigenvalue_gap(&m, &pi, &tol), Err(ChainError::NotReversible { .. })));
        assert!(!analyze(&m, &tol).reversible);
    }
}
