use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{rank_by_mean, BoundInputs, Theorem};
use super::episode::{Engine, PolicyKind, Scenario};
use crate::dsee::DParameter;
use crate::error::{Error, Result};
use crate::numerics::mean_std;

/// `Σ_{i≤M} μ_σ(i)`, the per-slot reward of the genie.
pub fn best_rate(mu_sorted: &[f64], m: usize) -> Result<f64> {
    if m > mu_sorted.len() {
        return Err(Error::PlaysOutOfRange { m, n: mu_sorted.len() });
    }
    Ok(mu_sorted[..m].iter().sum())
}

/// `r(t) = t Σ_{i≤M} μ_σ(i) − R(t)` for `t = 1..=T`.
pub fn empirical_regret(rewards: &[f64], mu_sorted: &[f64], m: usize) -> Result<Vec<f64>> {
    let best = best_rate(mu_sorted, m)?;
    let mut cum = 0.0;
    Ok(rewards
        .iter()
        .enumerate()
        .map(|(i, r)| {
            cum += r;
            (i + 1) as f64 * best - cum
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    /// Every slot up to 10⁴, log-spaced (plus epoch ends) beyond.
    #[default]
    Auto,
    All,
    Log,
}

/// Where curves are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplePlan {
    pub mode: SampleMode,
    /// Log-spaced points per decade.
    pub per_decade: u32,
    /// Add the global epoch ends to log-spaced samples.
    pub epoch_ends: bool,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self { mode: SampleMode::Auto, per_decade: 40, epoch_ends: true }
    }
}

/// Strictly increasing sample times in `1..=horizon`, always ending at the horizon.
pub fn sample_times(plan: &SamplePlan, horizon: u64, epoch_ends: &[u64]) -> Vec<u64> {
    if horizon == 0 {
        return Vec::new();
    }
    let all = match plan.mode {
        SampleMode::All => true,
        SampleMode::Auto => horizon <= 10_000,
        SampleMode::Log => false,
    };
    if all {
        return (1..=horizon).collect();
    }
    let per_decade = plan.per_decade.max(1) as f64;
    let mut times: Vec<u64> = (0..)
        .map(|k| 10f64.powf(k as f64 / per_decade).round() as u64)
        .take_while(|&t| t <= horizon)
        .collect();
    if plan.epoch_ends {
        times.extend(epoch_ends.iter().copied().filter(|&t| t <= horizon));
    }
    times.push(horizon);
    times.sort_unstable();
    times.dedup();
    times
}

/// Monte Carlo mean and spread of regret (and collisions) at sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub times: Vec<u64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub runs: usize,
    /// Mean cumulative collision events.
    pub collisions: Vec<f64>,
    /// Mean count of observations excluded from learning.
    pub discarded: Vec<f64>,
    /// Bound values, present at epoch ends only.
    pub bound: Option<Vec<Option<f64>>>,
}

/// Per-run values at the sample times.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSamples {
    pub regret: Vec<f64>,
    pub collisions: Vec<u64>,
    pub discarded: Vec<u64>,
}

/// Runs one episode and samples its regret at `times` (increasing, ≤ horizon).
pub fn sample_run(scenario: &Scenario, seed: u64, times: &[u64]) -> Result<RunSamples> {
    let order = rank_by_mean(&scenario.arms);
    let mu_sorted: Vec<f64> = order.iter().map(|&i| scenario.arms[i].mu()).collect();
    let best = best_rate(&mu_sorted, scenario.m)?;
    let mut engine = Engine::new(scenario, seed)?;
    let mut out = RunSamples {
        regret: Vec::with_capacity(times.len()),
        collisions: Vec::with_capacity(times.len()),
        discarded: Vec::with_capacity(times.len()),
    };
    let mut cum_reward = 0.0;
    let mut cum_collisions = 0u64;
    let mut next = times.iter().peekable();
    while let Some(&&target) = next.peek() {
        if target > scenario.horizon {
            return Err(Error::Config(format!("sample time {target} beyond horizon {}", scenario.horizon)));
        }
        while engine.t() < target {
            let slot = engine.step();
            cum_reward += slot.system_reward;
            cum_collisions += u64::from(slot.collisions);
        }
        out.regret.push(target as f64 * best - cum_reward);
        out.collisions.push(cum_collisions);
        out.discarded.push(engine.discarded());
        next.next();
    }
    Ok(out)
}

/// Runs `runs` independent episodes with seeds `base_seed..base_seed + runs`.
///
/// Runs execute in parallel; aggregation happens afterwards in seed order,
/// so results do not depend on the thread count.
pub fn monte_carlo(scenario: &Scenario, runs: usize, base_seed: u64, times: &[u64]) -> Result<RegretCurve> {
    if runs == 0 {
        return Err(Error::Config("runs must be at least 1".into()));
    }
    let samples: Vec<RunSamples> = (0..runs as u64)
        .into_par_iter()
        .map(|r| sample_run(scenario, base_seed.wrapping_add(r), times))
        .collect::<Result<_>>()?;
    let column = |i: usize, f: &dyn Fn(&RunSamples, usize) -> f64| -> Vec<f64> {
        samples.iter().map(|s| f(s, i)).collect()
    };
    let mut curve = RegretCurve {
        times: times.to_vec(),
        mean: Vec::with_capacity(times.len()),
        std: Vec::with_capacity(times.len()),
        runs,
        collisions: Vec::with_capacity(times.len()),
        discarded: Vec::with_capacity(times.len()),
        bound: None,
    };
    for i in 0..times.len() {
        let (mean, std) = mean_std(&column(i, &|s, i| s.regret[i]));
        curve.mean.push(mean);
        curve.std.push(std);
        curve.collisions.push(mean_std(&column(i, &|s, i| s.collisions[i] as f64)).0);
        curve.discarded.push(mean_std(&column(i, &|s, i| s.discarded[i] as f64)).0);
    }
    Ok(curve)
}

/// Closed form covering a scenario's policy, if any.
pub fn applicable_theorem(scenario: &Scenario) -> Option<Theorem> {
    match scenario.policy {
        PolicyKind::Dsee => Some(Theorem::SinglePlayer),
        PolicyKind::DseeMultiplay => Some(Theorem::MultiPlay),
        PolicyKind::DecentralizedSync => Some(Theorem::Decentralized),
        _ => None,
    }
}

/// Bound inputs for a fixed-`D` scenario.
pub fn bound_inputs(scenario: &Scenario) -> Result<Option<BoundInputs>> {
    let DParameter::Fixed(d) = scenario.d else { return Ok(None) };
    BoundInputs::from_arms(&scenario.arms, d, scenario.m, scenario.collision, scenario.restless, scenario.l)
        .map(Some)
}

/// Bound values at those sample times that are epoch ends.
pub fn bound_overlay(scenario: &Scenario, times: &[u64]) -> Result<Option<Vec<Option<f64>>>> {
    let (Some(theorem), Some(inputs)) = (applicable_theorem(scenario), bound_inputs(scenario)?) else {
        return Ok(None);
    };
    let ends = scenario.epoch_ends();
    Ok(Some(
        times
            .iter()
            .map(|t| ends.binary_search(t).ok().and_then(|_| theorem.evaluate(*t, &inputs).ok()))
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regret_of_zero_rewards_is_linear() {
        let r = empirical_regret(&[0.0; 4], &[0.9, 0.5, 0.1], 2).unwrap();
        let expected: Vec<f64> = (1..=4).map(|t| t as f64 * 1.4).collect();
        assert_eq!(r, expected);
        assert!(empirical_regret(&[0.0], &[1.0], 2).is_err());
    }

    #[test]
    fn sample_time_plans() {
        let plan = SamplePlan::default();
        assert_eq!(sample_times(&plan, 5, &[]), vec![1, 2, 3, 4, 5]);
        assert!(sample_times(&plan, 0, &[]).is_empty());
        let log = sample_times(&plan, 1_000_000, &[5, 25, 777_777]);
        assert!(log.windows(2).all(|w| w[0] < w[1]));
        assert!(log.contains(&777_777) && log.contains(&25));
        assert_eq!(*log.last().unwrap(), 1_000_000);
        assert!(log.len() < 300);
    }
}
