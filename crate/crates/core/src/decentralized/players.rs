use rand::Rng;

use super::oslash;
use crate::agent::{Agent, AgentStatus, Observation, SimRng};
use crate::dsee::{DParameter, EpochSchedule, EpochShape, Phase, SampleStats};
use crate::error::{Error, Result};

/// Arm played by the player with offset `k` in the `subepoch`-th subepoch
/// (both 1-based).
///
/// Exploration rotates over all `n_arms` arms: arm `(m + k) ⊘ N`.
/// Exploitation rotates over the player's ranked top arms: rank `(k + m) ⊘ M`.
/// Returned arm indices are 0-based.
pub fn sync_action(
    k: usize,
    phase: Phase,
    subepoch: usize,
    n_arms: usize,
    top_m: &[usize],
) -> Result<usize> {
    let count = match phase {
        Phase::Exploration => n_arms,
        Phase::Exploitation => top_m.len(),
    };
    if subepoch == 0 || subepoch > count {
        return Err(Error::Subepoch { index: subepoch, count });
    }
    Ok(match phase {
        Phase::Exploration => oslash(subepoch + k, n_arms) - 1,
        Phase::Exploitation => top_m[oslash(k + subepoch, top_m.len()) - 1],
    })
}

/// Uniform draw from `top_m` when entering an epoch or after a collision,
/// otherwise the current choice.
pub fn async_exploit_choice<R: Rng + ?Sized>(
    current: Option<usize>,
    top_m: &[usize],
    rng: &mut R,
    redraw: bool,
) -> usize {
    match current {
        Some(arm) if !redraw && top_m.contains(&arm) => arm,
        _ => top_m[rng.random_range(0..top_m.len())],
    }
}

/// Player of the synchronized decentralized policy with pre-agreed offset `k`.
#[derive(Debug, Clone)]
pub struct SyncPlayer {
    k: usize,
    n: usize,
    m: usize,
    d: DParameter,
    schedule: EpochSchedule,
    stats: SampleStats,
    top: Vec<usize>,
    fixed_ranking: Option<Vec<usize>>,
}

impl SyncPlayer {
    /// `k` in `1..=m`, `m < n` players.
    pub fn new(k: usize, n: usize, m: usize, d: DParameter) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::PlaysOutOfRange { m, n });
        }
        if k == 0 || k > m {
            return Err(Error::Config(format!("player offset {k} outside 1..={m}")));
        }
        d.validate()?;
        Ok(Self {
            k,
            n,
            m,
            d,
            schedule: EpochSchedule::new(EpochShape::decentralized(n, m)),
            stats: SampleStats::new(n),
            top: Vec::new(),
            fixed_ranking: None,
        })
    }

    /// Replaces the local ranking with `ranking` (best first) at every
    /// exploitation epoch start.
    pub fn with_fixed_ranking(mut self, ranking: Vec<usize>) -> Self {
        self.fixed_ranking = Some(ranking);
        self
    }

    pub fn offset(&self) -> usize {
        self.k
    }

    pub fn schedule(&self) -> &EpochSchedule {
        &self.schedule
    }

    pub fn stats(&self) -> &SampleStats {
        &self.stats
    }

    pub fn top(&self) -> &[usize] {
        &self.top
    }

    pub fn current_arm(&self) -> usize {
        let sub = self.schedule.block() + 1;
        sync_action(self.k, self.schedule.phase(), sub, self.n, &self.top)
            .expect("block index stays within the epoch")
    }
}

impl Agent for SyncPlayer {
    fn choose(&mut self, _rng: &mut SimRng, out: &mut Vec<usize>) {
        out.push(self.current_arm());
    }

    fn observe(&mut self, obs: &Observation) -> bool {
        self.stats.update(obs.arm, obs.reward);
        true
    }

    fn end_slot(&mut self) {
        if self.schedule.advance(&self.d) == Some(Phase::Exploitation) {
            self.top = match &self.fixed_ranking {
                Some(r) => r[..self.m].to_vec(),
                None => self.stats.top_m(self.m),
            };
        }
    }

    fn status(&self) -> AgentStatus {
        AgentStatus {
            phase: Some(self.schedule.phase()),
            n_o: self.schedule.n_o(),
            n_i: self.schedule.n_i(),
        }
    }
}

/// Player without global time or offsets. Joins at a given global slot and
/// runs its own epoch clock from there.
#[derive(Debug, Clone)]
pub struct AsyncPlayer {
    n: usize,
    m: usize,
    d: DParameter,
    wait: u64,
    schedule: EpochSchedule,
    stats: SampleStats,
    top: Vec<usize>,
    choice: Option<usize>,
    redraw: bool,
}

impl AsyncPlayer {
    /// `join_slot` is the first global slot (1-based) the player is active.
    pub fn new(n: usize, m: usize, d: DParameter, join_slot: u64) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::PlaysOutOfRange { m, n });
        }
        if join_slot == 0 {
            return Err(Error::Config("join slots start at 1".into()));
        }
        d.validate()?;
        Ok(Self {
            n,
            m,
            d,
            wait: join_slot - 1,
            schedule: EpochSchedule::new(EpochShape::decentralized(n, m)),
            stats: SampleStats::new(n),
            top: Vec::new(),
            choice: None,
            redraw: false,
        })
    }

    pub fn is_active(&self) -> bool {
        self.wait == 0
    }

    pub fn schedule(&self) -> &EpochSchedule {
        &self.schedule
    }

    pub fn stats(&self) -> &SampleStats {
        &self.stats
    }

    pub fn top(&self) -> &[usize] {
        &self.top
    }

    pub fn choice(&self) -> Option<usize> {
        self.choice
    }
}

impl Agent for AsyncPlayer {
    fn choose(&mut self, rng: &mut SimRng, out: &mut Vec<usize>) {
        if !self.is_active() {
            return;
        }
        let arm = match self.schedule.phase() {
            Phase::Exploration => self.schedule.block() % self.n,
            Phase::Exploitation => {
                let arm = async_exploit_choice(self.choice, &self.top, rng, self.redraw);
                self.redraw = false;
                self.choice = Some(arm);
                arm
            }
        };
        out.push(arm);
    }

    fn observe(&mut self, obs: &Observation) -> bool {
        self.stats.update(obs.arm, obs.reward);
        if obs.collided && self.schedule.phase() == Phase::Exploitation {
            self.redraw = true;
        }
        true
    }

    fn end_slot(&mut self) {
        if self.wait > 0 {
            self.wait -= 1;
            return;
        }
        if self.schedule.advance(&self.d) == Some(Phase::Exploitation) {
            self.top = self.stats.top_m(self.m);
            self.redraw = true;
        }
    }

    fn status(&self) -> AgentStatus {
        if !self.is_active() {
            return AgentStatus::default();
        }
        AgentStatus {
            phase: Some(self.schedule.phase()),
            n_o: self.schedule.n_o(),
            n_i: self.schedule.n_i(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::rng_stream;

    #[test]
    fn sync_exploration_offsets() {
        // N = 3, M = 2, first subepoch
        assert_eq!(sync_action(1, Phase::Exploration, 1, 3, &[]).unwrap(), 1);
        assert_eq!(sync_action(2, Phase::Exploration, 1, 3, &[]).unwrap(), 2);
    }

    #[test]
    fn sync_exploitation_rotates_ranks() {
        let (a, b) = (7, 4);
        assert_eq!(sync_action(1, Phase::Exploitation, 1, 10, &[a, b]).unwrap(), b);
        assert_eq!(sync_action(2, Phase::Exploitation, 1, 10, &[a, b]).unwrap(), a);
        assert_eq!(sync_action(1, Phase::Exploitation, 2, 10, &[a, b]).unwrap(), a);
        assert!(matches!(
            sync_action(1, Phase::Exploitation, 3, 10, &[a, b]),
            Err(Error::Subepoch { index: 3, count: 2 })
        ));
        assert!(sync_action(1, Phase::Exploration, 0, 10, &[]).is_err());
    }

    #[test]
    fn async_choice_contract() {
        let mut rng = rng_stream(5, 0);
        assert!((0..100).all(|_| async_exploit_choice(None, &[3], &mut rng, true) == 3));
        assert_eq!(async_exploit_choice(Some(2), &[1, 2], &mut rng, false), 2);
    }

    #[test]
    fn async_redraw_is_uniform() {
        let mut rng = rng_stream(11, 0);
        let top = [4, 1];
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| async_exploit_choice(Some(4), &top, &mut rng, true) == 1)
            .count();
        let freq = hits as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.01, "{freq}");
    }

    #[test]
    fn async_player_waits_for_join_slot() {
        let mut p = AsyncPlayer::new(3, 2, DParameter::Fixed(1.0), 3).unwrap();
        let mut rng = rng_stream(0, 0);
        let mut out = Vec::new();
        for _ in 0..2 {
            out.clear();
            p.choose(&mut rng, &mut out);
            assert!(out.is_empty());
            p.end_slot();
        }
        out.clear();
        p.choose(&mut rng, &mut out);
        assert_eq!(out, vec![0]);
        assert_eq!(p.schedule().t(), 1);
    }
}
