//! Regenerative-cycle baseline.
//!
//! An engaged arm is played until its state has visited the pilot state
//! twice. Only the slots from the first visit up to (excluding) the second
//! visit enter the learning statistics; those cycles are i.i.d., which
//! reduces selection to a UCB-style index over in-cycle sample means. Slots
//! before the first visit and the terminal revisit are played but discarded.

use rand::Rng;

use crate::agent::{Agent, Observation, SimRng};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockPhase {
    PreCycle,
    InCycle,
}

/// Per-arm regenerative-cycle bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct RcaArm {
    pub pilot: usize,
    pub phase: BlockPhase,
    pub cycle_reward: f64,
    /// In-cycle observations `w`.
    pub cycle_count: u64,
    pub pre_cycle_count: u64,
    pub terminal_count: u64,
    pub completed_blocks: u64,
}

impl RcaArm {
    pub fn new(pilot: usize) -> Self {
        Self {
            pilot,
            phase: BlockPhase::PreCycle,
            cycle_reward: 0.0,
            cycle_count: 0,
            pre_cycle_count: 0,
            terminal_count: 0,
            completed_blocks: 0,
        }
    }

    pub fn total_plays(&self) -> u64 {
        self.cycle_count + self.pre_cycle_count + self.terminal_count
    }

    pub fn cycle_mean(&self) -> Option<f64> {
        (self.cycle_count > 0).then(|| self.cycle_reward / self.cycle_count as f64)
    }
}

/// Outcome of feeding one observation to the engaged arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    /// The observation entered the in-cycle statistics.
    pub in_cycle: bool,
    /// The observation closed the block.
    pub block_done: bool,
}

/// Applies the block rule to the engaged arm and advances the in-cycle clock.
pub fn rca_step(arm: &mut RcaArm, clock: &mut u64, state: usize, reward: f64) -> StepOutcome {
    let at_pilot = state == arm.pilot;
    match arm.phase {
        BlockPhase::PreCycle if !at_pilot => {
            arm.pre_cycle_count += 1;
            StepOutcome { in_cycle: false, block_done: false }
        }
        BlockPhase::InCycle if at_pilot => {
            arm.terminal_count += 1;
            arm.completed_blocks += 1;
            arm.phase = BlockPhase::PreCycle;
            StepOutcome { in_cycle: false, block_done: true }
        }
        _ => {
            arm.phase = BlockPhase::InCycle;
            arm.cycle_reward += reward;
            arm.cycle_count += 1;
            *clock += 1;
            StepOutcome { in_cycle: true, block_done: false }
        }
    }
}

/// Index `s̄ + √(L ln t̂ / w)` maximizer among arms with in-cycle data;
/// lowest index on ties.
pub fn rca_select(arms: &[RcaArm], clock: u64, l: f64) -> usize {
    let log_clock = (clock.max(1) as f64).ln();
    let mut best = 0;
    let mut best_index = f64::NEG_INFINITY;
    for (i, arm) in arms.iter().enumerate() {
        let Some(mean) = arm.cycle_mean() else { continue };
        let index = mean + (l * log_clock / arm.cycle_count as f64).sqrt();
        if index > best_index {
            best = i;
            best_index = index;
        }
    }
    best
}

/// The full single-player baseline.
#[derive(Debug, Clone)]
pub struct RcaPolicy {
    arms: Vec<RcaArm>,
    l: f64,
    clock: u64,
    current: usize,
    next_forced: usize,
    block_done: bool,
}

impl RcaPolicy {
    /// One forced block per arm in index order precedes index selection.
    pub fn new(pilots: Vec<usize>, l: f64) -> Result<Self> {
        if pilots.is_empty() {
            return Err(Error::NoArms);
        }
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::Config(format!("RCA L must be non-negative, got {l}")));
        }
        Ok(Self {
            arms: pilots.into_iter().map(RcaArm::new).collect(),
            l,
            clock: 0,
            current: 0,
            next_forced: 1,
            block_done: false,
        })
    }

    /// Pilot states drawn uniformly from each arm's state space.
    pub fn with_random_pilots<R: Rng + ?Sized>(n_states: &[usize], l: f64, rng: &mut R) -> Result<Self> {
        let pilots = n_states.iter().map(|&n| rng.random_range(0..n)).collect();
        Self::new(pilots, l)
    }

    pub fn arms(&self) -> &[RcaArm] {
        &self.arms
    }

    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn current(&self) -> usize {
        self.current
    }

    /// The engaged arm, if its block is still open.
    pub fn open_block(&self) -> Option<usize> {
        (!self.block_done && self.arms[self.current].total_plays() > 0).then_some(self.current)
    }

    pub fn step(&mut self, state: usize, reward: f64) -> StepOutcome {
        let out = rca_step(&mut self.arms[self.current], &mut self.clock, state, reward);
        self.block_done = out.block_done;
        out
    }

    pub fn finish_slot(&mut self) {
        if !self.block_done {
            return;
        }
        self.block_done = false;
        self.current = if self.next_forced < self.arms.len() {
            self.next_forced += 1;
            self.next_forced - 1
        } else {
            rca_select(&self.arms, self.clock, self.l)
        };
    }
}

impl Agent for RcaPolicy {
    fn choose(&mut self, _rng: &mut SimRng, out: &mut Vec<usize>) {
        out.push(self.current);
    }

    fn observe(&mut self, obs: &Observation) -> bool {
        self.step(obs.state, obs.reward).in_cycle
    }

    fn end_slot(&mut self) {
        self.finish_slot();
    }

    fn open_block(&self) -> Option<usize> {
        RcaPolicy::open_block(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_rule_trace() {
        let mut arm = RcaArm::new(0);
        let mut clock = 0;
        let outcomes: Vec<StepOutcome> =
            [1, 1, 0, 1, 0].iter().map(|&s| rca_step(&mut arm, &mut clock, s, s as f64)).collect();
        let in_cycle: Vec<bool> = outcomes.iter().map(|o| o.in_cycle).collect();
        assert_eq!(in_cycle, vec![false, false, true, true, false]);
        assert!(outcomes[4].block_done);
        assert!(outcomes[..4].iter().all(|o| !o.block_done));
        assert_eq!(arm.cycle_count, 2);
        assert_eq!(arm.cycle_reward, 1.0);
        assert_eq!(clock, 2);
        assert_eq!(arm.total_plays(), 5);
    }

    #[test]
    fn pilot_first_means_empty_pre_cycle() {
        let mut arm = RcaArm::new(1);
        let mut clock = 0;
        assert!(rca_step(&mut arm, &mut clock, 1, 1.0).in_cycle);
        assert_eq!(arm.pre_cycle_count, 0);
    }

    fn arm_with(mean: f64, w: u64) -> RcaArm {
        let mut a = RcaArm::new(0);
        a.cycle_reward = mean * w as f64;
        a.cycle_count = w;
        a
    }

    #[test]
    fn selection_rules() {
        assert_eq!(rca_select(&[arm_with(0.3, 5)], 10, 2.0), 0);
        // Equal means: the less sampled arm has the larger bonus.
        assert_eq!(rca_select(&[arm_with(0.5, 50), arm_with(0.5, 10)], 100, 1.0), 1);
        // Without a bonus, greedy on means.
        assert_eq!(rca_select(&[arm_with(0.5, 50), arm_with(0.6, 500)], 1000, 0.0), 1);
        assert_eq!(rca_select(&[arm_with(0.5, 5), arm_with(0.5, 5)], 1000, 0.0), 0);
    }

    #[test]
    fn forced_blocks_then_index() {
        let mut p = RcaPolicy::new(vec![0, 0, 0], 0.0).unwrap();
        // Each block: pilot, then pilot again closes it.
        let mut engaged = Vec::new();
        for reward in [0.2, 0.9, 0.4] {
            engaged.push(p.current());
            p.step(0, reward);
            p.finish_slot();
            p.step(0, 0.0);
            p.finish_slot();
        }
        assert_eq!(engaged, vec![0, 1, 2]);
        assert_eq!(p.current(), 1);
    }
}
