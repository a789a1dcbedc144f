use rand::Rng;

use super::chain::{analyze, eigenvalue_gap};
use super::matrix::{sample_cdf, TransitionMatrix};
use crate::error::{ChainError, Error, Result};
use crate::numerics::Tolerances;

/// How an arm's state moves in slots where it is not played.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum PassiveMode {
    /// State is held.
    Frozen,
    /// One step of the active chain.
    #[default]
    SameChain,
    /// One step of a separate chain over the same states.
    IndependentChain(TransitionMatrix),
    /// Fresh draw from the active chain's stationary distribution.
    IidStationary,
}

/// One restless arm: reward value per state, active chain and passive dynamics.
///
/// States are indexed `0..n`; distinct states may carry equal rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmSpec {
    rewards: Vec<f64>,
    transition: TransitionMatrix,
    passive: PassiveMode,
}

impl ArmSpec {
    pub fn new(
        rewards: Vec<f64>,
        transition: TransitionMatrix,
        passive: PassiveMode,
    ) -> Result<Self, ChainError> {
        let n = transition.dim();
        if rewards.len() != n {
            return Err(ChainError::RewardCount { expected: n, got: rewards.len() });
        }
        if let Some((state, &value)) =
            rewards.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(ChainError::BadReward { state, value });
        }
        if let PassiveMode::IndependentChain(m) = &passive {
            if m.dim() != n {
                return Err(ChainError::PassiveDimension { expected: n, got: m.dim() });
            }
        }
        Ok(Self { rewards, transition, passive })
    }

    /// Two-state arm with state 0 paying `r0` and state 1 paying `r1`.
    pub fn two_state(p01: f64, p10: f64, r0: f64, r1: f64) -> Result<Self, ChainError> {
        let m = TransitionMatrix::from_rows(&[vec![1.0 - p01, p01], vec![p10, 1.0 - p10]], 1e-12)?;
        Self::new(vec![r0, r1], m, PassiveMode::default())
    }

    pub fn with_passive(mut self, passive: PassiveMode) -> Result<Self, ChainError> {
        if let PassiveMode::IndependentChain(m) = &passive {
            if m.dim() != self.n_states() {
                return Err(ChainError::PassiveDimension { expected: self.n_states(), got: m.dim() });
            }
        }
        self.passive = passive;
        Ok(self)
    }

    /// Same chain with every reward multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, ChainError> {
        Self::new(
            self.rewards.iter().map(|r| r * factor).collect(),
            self.transition.clone(),
            self.passive.clone(),
        )
    }

    pub fn n_states(&self) -> usize {
        self.rewards.len()
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn reward(&self, state: usize) -> f64 {
        self.rewards[state]
    }

    pub fn transition(&self) -> &TransitionMatrix {
        &self.transition
    }

    pub fn passive(&self) -> &PassiveMode {
        &self.passive
    }

    pub fn step_active<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        self.transition.sample_next(state, rng)
    }

    /// Passive transition; `diagnostics` is needed only for [`PassiveMode::IidStationary`].
    pub fn step_passive<R: Rng + ?Sized>(
        &self,
        state: usize,
        diagnostics: Option<&ChainDiagnostics>,
        rng: &mut R,
    ) -> Result<usize> {
        Ok(match &self.passive {
            PassiveMode::Frozen => state,
            PassiveMode::SameChain => self.step_active(state, rng),
            PassiveMode::IndependentChain(m) => m.sample_next(state, rng),
            PassiveMode::IidStationary => {
                let d = diagnostics.ok_or(Error::MissingDiagnostics)?;
                sample_cdf(&d.stationary_cdf, rng)
            }
        })
    }

    /// Requires an irreducible, aperiodic, reversible active chain.
    pub fn diagnostics(&self, tol: &Tolerances) -> Result<ChainDiagnostics, ChainError> {
        let report = analyze(&self.transition, tol);
        if !report.irreducible {
            return Err(ChainError::NotIrreducible);
        }
        if !report.aperiodic {
            return Err(ChainError::NotAperiodic);
        }
        let pi = match report.stationary {
            Some(pi) => pi,
            None => super::chain::stationary_distribution(&self.transition, tol)?,
        };
        let gap = eigenvalue_gap(&self.transition, &pi, tol)?;
        let mu = reward_mean(&self.rewards, &pi);
        let pi_min = pi.iter().copied().fold(f64::INFINITY, f64::min);
        let s_sum: f64 = self.rewards.iter().sum();
        let mut acc = 0.0;
        let stationary_cdf = pi
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(ChainDiagnostics { mu, gap, pi_min, s_sum, a_p: s_sum / pi_min, pi, stationary_cdf })
    }
}

/// Stationary reward mean `Σ_s r(s) π(s)`.
pub fn reward_mean(rewards: &[f64], pi: &[f64]) -> f64 {
    rewards.iter().zip(pi).map(|(r, p)| r * p).sum()
}

/// Stationary and spectral constants of one arm.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainDiagnostics {
    pub pi: Vec<f64>,
    /// Stationary reward mean.
    pub mu: f64,
    /// Eigenvalue gap `1 − λ₂`.
    pub gap: f64,
    pub pi_min: f64,
    /// Sum of the reward values over the state space.
    pub s_sum: f64,
    /// Transient-loss constant `(min_s π_s)⁻¹ Σ_s s`.
    pub a_p: f64,
    stationary_cdf: Vec<f64>,
}

/// A validated arm ready for simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Arm {
    spec: ArmSpec,
    diagnostics: ChainDiagnostics,
}

impl Arm {
    pub fn new(spec: ArmSpec, tol: &Tolerances) -> Result<Self, ChainError> {
        let diagnostics = spec.diagnostics(tol)?;
        Ok(Self { spec, diagnostics })
    }

    pub fn spec(&self) -> &ArmSpec {
        &self.spec
    }

    pub fn diagnostics(&self) -> &ChainDiagnostics {
        &self.diagnostics
    }

    pub fn mu(&self) -> f64 {
        self.diagnostics.mu
    }

    pub fn n_states(&self) -> usize {
        self.spec.n_states()
    }

    pub fn reward(&self, state: usize) -> f64 {
        self.spec.reward(state)
    }

    pub fn step_active<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        self.spec.step_active(state, rng)
    }

    pub fn step_passive<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        match self.spec.passive() {
            PassiveMode::IidStationary => self.sample_stationary(rng),
            PassiveMode::Frozen => state,
            PassiveMode::SameChain => self.step_active(state, rng),
            PassiveMode::IndependentChain(m) => m.sample_next(state, rng),
        }
    }

    pub fn sample_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_cdf(&self.diagnostics.stationary_cdf, rng)
    }

    /// Lowest-reward state, lowest index on ties.
    pub fn worst_state(&self) -> usize {
        let r = self.spec.rewards();
        (0..r.len()).fold(0, |best, s| if r[s] < r[best] { s } else { best })
    }
}

/// Across-arm aggregates entering the regret bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConstants {
    pub eps_min: f64,
    pub pi_min: f64,
    pub r_max: f64,
    pub s_card_max: usize,
    pub a_max: f64,
    pub l_value: f64,
}

impl SystemConstants {
    /// `L = 30 r_max² / ((3 − 2√2) ε_min)`, with `ε` read as the eigenvalue gap.
    pub fn from_arms(arms: &[Arm]) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::NoArms);
        }
        let d = arms.iter().map(Arm::diagnostics);
        let eps_min = d.clone().map(|d| d.gap).fold(f64::INFINITY, f64::min);
        let pi_min = d.clone().map(|d| d.pi_min).fold(f64::INFINITY, f64::min);
        let r_max = d.clone().map(|d| d.s_sum).fold(f64::NEG_INFINITY, f64::max);
        let a_max = d.map(|d| d.a_p).fold(f64::NEG_INFINITY, f64::max);
        let s_card_max = arms.iter().map(Arm::n_states).max().unwrap_or(0);
        Ok(Self { eps_min, pi_min, r_max, s_card_max, a_max, l_value: l_constant(r_max, eps_min) })
    }
}

pub fn l_constant(r_max: f64, eps_min: f64) -> f64 {
    30.0 * r_max * r_max / ((3.0 - 2.0 * std::f64::consts::SQRT_2) * eps_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn channels_arm(k: usize) -> ArmSpec {
        let p01 = [0.1, 0.1, 0.5, 0.1, 0.1];
        let p10 = [0.2, 0.3, 0.1, 0.4, 0.5];
        ArmSpec::two_state(p01[k], p10[k], 0.1, 1.0).unwrap()
    }

    #[test]
    fn channels_means_match_two_state_closed_form() {
        let tol = Tolerances::default();
        // μ = r0 + (r1 − r0) p01 / (p01 + p10)
        let mu3 = channels_arm(2).diagnostics(&tol).unwrap().mu;
        assert!((mu3 - 0.85).abs() < 1e-12, "{mu3}");
        let mu1 = channels_arm(0).diagnostics(&tol).unwrap().mu;
        assert!((mu1 - 0.4).abs() < 1e-12, "{mu1}");
    }

    #[test]
    fn constant_rewards_give_constant_mean() {
        let m = TransitionMatrix::from_rows(
            &[vec![0.2, 0.5, 0.3], vec![0.5, 0.1, 0.4], vec![0.3, 0.4, 0.3]],
            1e-9,
        )
        .unwrap();
        let arm = ArmSpec::new(vec![0.7; 3], m, PassiveMode::Frozen).unwrap();
        let d = arm.diagnostics(&Tolerances::default()).unwrap();
        assert!((d.mu - 0.7).abs() < 1e-14);
    }

    #[test]
    fn rejects_negative_rewards_and_bad_passive_dimension() {
        let m = TransitionMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]], 1e-9).unwrap();
        assert!(matches!(
            ArmSpec::new(vec![0.0, -1.0], m.clone(), PassiveMode::Frozen),
            Err(ChainError::BadReward { state: 1, .. })
        ));
        let other = TransitionMatrix::from_rows(&[vec![1.0]], 1e-9).unwrap();
        assert!(matches!(
            ArmSpec::new(vec![0.0, 1.0], m, PassiveMode::IndependentChain(other)),
            Err(ChainError::PassiveDimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn frozen_passive_holds_state() {
        let m = TransitionMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 1e-9).unwrap();
        let arm = ArmSpec::new(vec![0.0, 1.0], m, PassiveMode::Frozen).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(arm.step_passive(1, None, &mut rng).unwrap(), 1);
    }

    #[test]
    fn iid_passive_needs_diagnostics() {
        let arm = channels_arm(0).with_passive(PassiveMode::IidStationary).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(arm.step_passive(0, None, &mut rng), Err(Error::MissingDiagnostics)));
        let d = arm.diagnostics(&Tolerances::default()).unwrap();
        assert!(arm.step_passive(0, Some(&d), &mut rng).is_ok());
    }

    #[test]
    fn single_arm_system_constants() {
        let arm = Arm::new(channels_arm(0), &Tolerances::default()).unwrap();
        let c = SystemConstants::from_arms(std::slice::from_ref(&arm)).unwrap();
        assert!((c.r_max - 1.1).abs() < 1e-15);
        assert!((c.eps_min - 0.3).abs() < 1e-12);
        let expected = 30.0 * 1.21 / ((3.0 - 2.0 * 2f64.sqrt()) * 0.3);
        assert!((c.l_value - expected).abs() < 1e-9 * expected);
        assert!((c.l_value - 705.23).abs() < 0.01, "{}", c.l_value);
        assert!(matches!(SystemConstants::from_arms(&[]), Err(Error::NoArms)));
    }

    #[test]
    fn channels_pi_min_over_all_entries() {
        let tol = Tolerances::default();
        let arms: Vec<Arm> = (0..5).map(|k| Arm::new(channels_arm(k), &tol).unwrap()).collect();
        let c = SystemConstants::from_arms(&arms).unwrap();
        // Smallest entry is arm 5's busy-to-idle mass p01/(p01+p10) = 0.1/0.6.
        assert!((c.pi_min - 1.0 / 6.0).abs() < 1e-12);
        assert!((c.eps_min - 0.3).abs() < 1e-12);
        assert_eq!(c.s_card_max, 2);
    }
}
