//! Closed-form finite-time regret bounds at epoch ends.

use crate::arm_models::{Arm, SystemConstants};
use crate::decentralized::{CollisionModel, RestlessModel};
use crate::error::{Error, Result};

/// Everything the bound evaluators need, with arms sorted by mean.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub constants: SystemConstants,
    /// Means `μ_σ(1) ≥ … ≥ μ_σ(N)`.
    pub mu_sorted: Vec<f64>,
    /// `σ`: arm index at each rank.
    pub order: Vec<usize>,
    /// Per-rank weight `(1/ln 2 + √2 ε_k √L / (10 Σ_s s)) |S_k|`.
    pub weights: Vec<f64>,
    pub d: f64,
    pub m: usize,
    pub collision: CollisionModel,
    pub restless: RestlessModel,
}

impl BoundInputs {
    /// `l_override` replaces the derived `L` in both the constants and the weights.
    pub fn from_arms(
        arms: &[Arm],
        d: f64,
        m: usize,
        collision: CollisionModel,
        restless: RestlessModel,
        l_override: Option<f64>,
    ) -> Result<Self> {
        let mut constants = SystemConstants::from_arms(arms)?;
        if m == 0 || m > arms.len() {
            return Err(Error::PlaysOutOfRange { m, n: arms.len() });
        }
        if let Some(l) = l_override {
            constants.l_value = l;
        }
        let order = rank_by_mean(arms);
        let mu_sorted = order.iter().map(|&i| arms[i].mu()).collect();
        let root_l = constants.l_value.sqrt();
        let weights = order
            .iter()
            .map(|&i| {
                let diag = arms[i].diagnostics();
                let eps = diag.gap;
                (1.0 / std::f64::consts::LN_2 + std::f64::consts::SQRT_2 * eps * root_l / (10.0 * diag.s_sum))
                    * arms[i].n_states() as f64
            })
            .collect();
        Ok(Self { constants, mu_sorted, order, weights, d, m, collision, restless })
    }

    pub fn n(&self) -> usize {
        self.mu_sorted.len()
    }

    fn top_sum(&self, m: usize) -> f64 {
        self.mu_sorted[..m].iter().sum()
    }

    fn total(&self) -> f64 {
        self.mu_sorted.iter().sum()
    }
}

/// Arm indices sorted by non-increasing mean, lowest index first on ties.
pub fn rank_by_mean(arms: &[Arm]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..arms.len()).collect();
    order.sort_by(|&a, &b| arms[b].mu().total_cmp(&arms[a].mu()).then(a.cmp(&b)));
    order
}

/// Smallest `k ≥ 0` with `4^k ≥ x`.
pub fn ceil_log4(x: f64) -> u32 {
    let mut k = 0;
    let mut p = 1.0;
    while p < x {
        p *= 4.0;
        k += 1;
    }
    k
}

/// Largest `k ≥ 0` with `4^k ≤ x`, for `x ≥ 1`.
pub fn floor_log4(x: f64) -> u32 {
    let mut k = 0;
    let mut p = 4.0;
    while p <= x {
        p *= 4.0;
        k += 1;
    }
    k
}

/// Constants of the three-term bound. `c3` is zero for the single-player forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

fn require_distinct(mu: &[f64], rank: usize) -> Result<()> {
    if rank < mu.len() && mu[rank - 1] <= mu[rank] {
        return Err(Error::TiedMeans { rank });
    }
    Ok(())
}

fn require_time(t: u64, n: usize) -> Result<()> {
    if t < n as u64 || t < 2 {
        return Err(Error::TimeTooSmall { t, min: (n as u64).max(2) });
    }
    Ok(())
}

/// `C₁` and `C₂` of the centralized bound with `m` plays per slot.
pub fn centralized_constants(inputs: &BoundInputs, m: usize) -> Result<BoundConstants> {
    let n = inputs.n();
    if m == 0 || m > n {
        return Err(Error::PlaysOutOfRange { m, n });
    }
    require_distinct(&inputs.mu_sorted, m)?;
    let mu = &inputs.mu_sorted;
    let w = &inputs.weights;
    let mut cross = 0.0;
    for j in 0..m {
        for i in m..n {
            cross += (mu[j] - mu[i]) * (w[j] + w[i]);
        }
    }
    let c1 = m as f64 * inputs.constants.a_max + 3.0 / inputs.constants.pi_min * cross;
    let c2 = (n.div_ceil(m) as f64 * inputs.top_sum(m) - inputs.total()) / 3.0;
    Ok(BoundConstants { c1, c2, c3: 0.0 })
}

fn centralized_bound(t: u64, inputs: &BoundInputs, m: usize) -> Result<f64> {
    let n = inputs.n();
    require_time(t, n)?;
    let k = centralized_constants(inputs, m)?;
    let tf = t as f64;
    let dl = 3.0 * inputs.d * tf.ln() + 1.0;
    Ok(k.c1 * ceil_log4(1.5 * (tf - n as f64) + 1.0) as f64
        + k.c2 * (4.0 * dl - 1.0)
        + n as f64 * inputs.constants.a_max * (floor_log4(dl) as f64 + 1.0))
}

/// Single-player bound at an epoch end `t` (ignores `inputs.m`).
pub fn theorem1_bound(t: u64, inputs: &BoundInputs) -> Result<f64> {
    centralized_bound(t, inputs, 1)
}

/// Centralized bound with `inputs.m` plays per slot.
pub fn theorem3_bound(t: u64, inputs: &BoundInputs) -> Result<f64> {
    centralized_bound(t, inputs, inputs.m)
}

/// Constants of the decentralized bound, selected by collision and restless model.
pub fn decentralized_constants(inputs: &BoundInputs) -> Result<BoundConstants> {
    let (n, m) = (inputs.n(), inputs.m);
    if m == 0 || m > n {
        return Err(Error::PlaysOutOfRange { m, n });
    }
    for rank in 1..=m {
        require_distinct(&inputs.mu_sorted, rank)?;
    }
    let mu = &inputs.mu_sorted;
    let w = &inputs.weights;
    let per_j: Vec<f64> = (0..m)
        .map(|j| (0..n).filter(|&i| i != j).map(|i| w[i] + w[j]).sum())
        .collect();
    let scale = 3.0 * m as f64 / inputs.constants.pi_min;
    let a_max = inputs.constants.a_max;
    let mut c1 = match inputs.collision {
        CollisionModel::Zero => inputs.top_sum(m) * scale * per_j.iter().sum::<f64>(),
        CollisionModel::Share => scale * per_j.iter().zip(mu).map(|(s, u)| u * s).sum::<f64>(),
    };
    let c2 = match inputs.restless {
        RestlessModel::Endogenous => {
            c1 += (m * m) as f64 * a_max;
            (n * m) as f64 * a_max
        }
        RestlessModel::Exogenous => 0.0,
    };
    let c3 = (n as f64 * inputs.top_sum(m) - m as f64 * inputs.total()) / 3.0;
    Ok(BoundConstants { c1, c2, c3 })
}

/// Decentralized bound at an epoch end `t`.
pub fn theorem5_bound(t: u64, inputs: &BoundInputs) -> Result<f64> {
    require_time(t, 1)?;
    let k = decentralized_constants(inputs)?;
    let tf = t as f64;
    let m = inputs.m as f64;
    let dl = 3.0 * inputs.d * tf.ln() + 1.0;
    Ok(k.c1 * ceil_log4(3.0 * tf / (2.0 * m) + 1.0) as f64
        + k.c2 * (floor_log4(dl) as f64 + 1.0)
        + k.c3 * (4.0 * dl - 1.0))
}

/// A bound valid at any slot: the epoch-end form evaluated at `4t + 3`.
pub fn anytime_bound(t: u64, inputs: &BoundInputs, bound: fn(u64, &BoundInputs) -> Result<f64>) -> Result<f64> {
    bound(4 * t + 3, inputs)
}

/// Which closed form applies to a policy family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    SinglePlayer,
    MultiPlay,
    Decentralized,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::SinglePlayer => "theorem1",
            Theorem::MultiPlay => "theorem3",
            Theorem::Decentralized => "theorem5",
        }
    }

    pub fn evaluate(self, t: u64, inputs: &BoundInputs) -> Result<f64> {
        match self {
            Theorem::SinglePlayer => theorem1_bound(t, inputs),
            Theorem::MultiPlay => theorem3_bound(t, inputs),
            Theorem::Decentralized => theorem5_bound(t, inputs),
        }
    }

    /// Smallest fixed `D` the bound assumes.
    pub fn required_d(self, inputs: &BoundInputs) -> Result<f64> {
        let mu = &inputs.mu_sorted;
        let gap = match self {
            Theorem::SinglePlayer => mean_gap(mu, 1),
            Theorem::MultiPlay => mean_gap(mu, inputs.m),
            Theorem::Decentralized => (1..=inputs.m).map(|j| mean_gap(mu, j)).fold(f64::INFINITY, f64::min),
        };
        crate::dsee::required_d(inputs.constants.l_value, gap)
    }
}

fn mean_gap(mu: &[f64], rank: usize) -> f64 {
    if rank < mu.len() {
        mu[rank - 1] - mu[rank]
    } else {
        f64::INFINITY
    }
}
