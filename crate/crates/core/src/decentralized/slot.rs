use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arm_models::Arm;

/// What colliding players receive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionModel {
    /// The arm's reward is counted once and split among the players.
    #[default]
    Share,
    /// Nobody is paid on a collided arm.
    Zero,
}

/// How unplayed arms evolve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestlessModel {
    /// Unplayed arms follow their own passive dynamics.
    #[default]
    Endogenous,
    /// Unplayed arms are frozen; restlessness comes only from other players.
    Exogenous,
}

/// Result of one slot's arm accesses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SlotOutcome {
    /// `Σ_j s_j 𝕀_j`.
    pub system_reward: f64,
    /// Reward indicator `𝕀_j` per arm.
    pub indicator: Vec<bool>,
    /// Number of plays per arm.
    pub plays: Vec<u32>,
    /// Arms chosen by more than one player.
    pub collisions: u32,
}

impl SlotOutcome {
    pub fn reset(&mut self, n_arms: usize) {
        self.system_reward = 0.0;
        self.collisions = 0;
        self.indicator.clear();
        self.indicator.resize(n_arms, false);
        self.plays.clear();
        self.plays.resize(n_arms, 0);
    }

    pub fn collided(&self, arm: usize) -> bool {
        self.plays[arm] > 1
    }
}

/// Counts plays per arm and pays each arm at most once.
///
/// Every player on arm `j` observes `s_j` regardless of collisions; the
/// observation itself is assembled by the caller from `states`.
pub fn resolve_slot(
    choices: &[usize],
    arms: &[Arm],
    states: &[usize],
    model: CollisionModel,
    out: &mut SlotOutcome,
) {
    out.reset(arms.len());
    for &arm in choices {
        out.plays[arm] += 1;
    }
    for (j, &count) in out.plays.iter().enumerate() {
        let paid = match model {
            CollisionModel::Share => count >= 1,
            CollisionModel::Zero => count == 1,
        };
        out.indicator[j] = paid;
        if paid {
            out.system_reward += arms[j].reward(states[j]);
        }
        if count > 1 {
            out.collisions += 1;
        }
    }
}

/// Advances all arm states by one slot. A played arm takes exactly one
/// active step however many players chose it.
pub fn evolve_system<R: Rng + ?Sized>(
    arms: &[Arm],
    states: &mut [usize],
    plays: &[u32],
    model: RestlessModel,
    rng: &mut R,
) {
    for (j, arm) in arms.iter().enumerate() {
        if plays[j] > 0 {
            states[j] = arm.step_active(states[j], rng);
        } else if model == RestlessModel::Endogenous {
            states[j] = arm.step_passive(states[j], rng);
        }
    }
}
