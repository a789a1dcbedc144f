use super::schedule::{DParameter, EpochSchedule, EpochShape, Phase};
use super::stats::SampleStats;
use crate::agent::{Agent, AgentStatus, Observation, SimRng};
use crate::error::{Error, Result};

/// Centralized DSEE playing `m` of `n` arms per slot.
///
/// Exploration epochs walk the arms in contiguous segments (groups of `m`
/// arms for `m > 1`, with the last group padded by idle plays). Exploitation
/// epochs play the `m` best sample means frozen at the epoch start.
#[derive(Debug, Clone)]
pub struct DseePolicy {
    n: usize,
    m: usize,
    d: DParameter,
    schedule: EpochSchedule,
    stats: SampleStats,
    frozen_top: Vec<usize>,
}

impl DseePolicy {
    pub fn new(n: usize, m: usize, d: DParameter) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::PlaysOutOfRange { m, n });
        }
        d.validate()?;
        Ok(Self {
            n,
            m,
            d,
            schedule: EpochSchedule::new(EpochShape::centralized(n, m)),
            stats: SampleStats::new(n),
            frozen_top: Vec::new(),
        })
    }

    pub fn schedule(&self) -> &EpochSchedule {
        &self.schedule
    }

    pub fn stats(&self) -> &SampleStats {
        &self.stats
    }

    pub fn plays_per_slot(&self) -> usize {
        self.m
    }

    /// Arms frozen for the current exploitation epoch (empty before the first).
    pub fn frozen_top(&self) -> &[usize] {
        &self.frozen_top
    }

    /// Arms to play in the current slot; fewer than `m` means idle padding.
    pub fn select_actions(&self, out: &mut Vec<usize>) {
        match self.schedule.phase() {
            Phase::Exploration => {
                let first = self.schedule.block() * self.m;
                out.extend(first..(first + self.m).min(self.n));
            }
            Phase::Exploitation => out.extend_from_slice(&self.frozen_top),
        }
    }

    pub fn update(&mut self, arm: usize, reward: f64) {
        self.stats.update(arm, reward);
    }

    /// Closes the current slot; freezes the top arms when an exploitation epoch opens.
    pub fn advance(&mut self) {
        if self.schedule.advance(&self.d) == Some(Phase::Exploitation) {
            self.frozen_top = self.stats.top_m(self.m);
        }
    }
}

impl Agent for DseePolicy {
    fn choose(&mut self, _rng: &mut SimRng, out: &mut Vec<usize>) {
        self.select_actions(out);
    }

    fn observe(&mut self, obs: &Observation) -> bool {
        self.update(obs.arm, obs.reward);
        true
    }

    fn end_slot(&mut self) {
        self.advance();
    }

    fn status(&self) -> AgentStatus {
        AgentStatus {
            phase: Some(self.schedule.phase()),
            n_o: self.schedule.n_o(),
            n_i: self.schedule.n_i(),
        }
    }
}
