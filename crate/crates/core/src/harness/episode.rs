use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::bounds::rank_by_mean;
use crate::agent::{rng_stream, Agent, AgentStatus, Observation, SimRng};
use crate::arm_models::{Arm, SystemConstants};
use crate::decentralized::{
    evolve_system, resolve_slot, AsyncPlayer, CollisionModel, RestlessModel, SlotOutcome, SyncPlayer,
};
use crate::dsee::{DParameter, DseePolicy, EpochSchedule, EpochShape, Phase};
use crate::error::{Error, Result};
use crate::rca::RcaPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Dsee,
    DseeMultiplay,
    DecentralizedSync,
    DecentralizedAsync,
    Rca,
    OracleTopM,
    UniformRandom,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Dsee => "dsee",
            PolicyKind::DseeMultiplay => "dsee_multiplay",
            PolicyKind::DecentralizedSync => "decentralized_sync",
            PolicyKind::DecentralizedAsync => "decentralized_async",
            PolicyKind::Rca => "rca",
            PolicyKind::OracleTopM => "oracle_top_m",
            PolicyKind::UniformRandom => "uniform_random",
        }
    }

    pub fn is_decentralized(self) -> bool {
        matches!(self, PolicyKind::DecentralizedSync | PolicyKind::DecentralizedAsync)
    }
}

/// Initial arm states of an episode.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialStates {
    /// Independent draws from each arm's stationary distribution.
    #[default]
    Stationary,
    /// Every arm starts in its lowest-reward state.
    Worst,
    Fixed(Vec<usize>),
}

/// A validated, fully resolved experiment: arms plus policy settings.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub arms: Vec<Arm>,
    pub policy: PolicyKind,
    /// Plays per slot for centralized policies, number of players for decentralized ones.
    pub m: usize,
    pub d: DParameter,
    /// Exploration constant `L` of the RCA index and the bounds; derived
    /// from the arms when absent.
    pub l: Option<f64>,
    pub collision: CollisionModel,
    pub restless: RestlessModel,
    /// First active slot of each asynchronous player.
    pub join_slots: Vec<u64>,
    /// RCA pilot states; drawn per run when absent.
    pub pilots: Option<Vec<usize>>,
    /// Synchronized players use the true ranking instead of sample means.
    pub oracle_ranking: bool,
    pub initial: InitialStates,
    pub horizon: u64,
}

impl Scenario {
    pub fn n(&self) -> usize {
        self.arms.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::NoArms);
        }
        if self.m == 0 || self.m > n {
            return Err(Error::PlaysOutOfRange { m: self.m, n });
        }
        if matches!(self.policy, PolicyKind::Dsee | PolicyKind::Rca) && self.m != 1 {
            return Err(Error::Config(format!("policy {} plays one arm per slot", self.policy.name())));
        }
        self.d.validate()?;
        if let Some(l) = self.l {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::Config(format!("L must be non-negative, got {l}")));
            }
        }
        if self.policy == PolicyKind::DecentralizedAsync
            && !self.join_slots.is_empty()
            && self.join_slots.len() != self.m
        {
            return Err(Error::Config(format!(
                "{} join slots given for {} players",
                self.join_slots.len(),
                self.m
            )));
        }
        if self.join_slots.contains(&0) {
            return Err(Error::Config("join slots start at 1".into()));
        }
        if let Some(p) = &self.pilots {
            if p.len() != n {
                return Err(Error::Config(format!("{} pilot states given for {n} arms", p.len())));
            }
            if let Some(i) = (0..n).find(|&i| p[i] >= self.arms[i].n_states()) {
                return Err(Error::Config(format!("pilot state {} out of range for arm {i}", p[i])));
            }
        }
        if let InitialStates::Fixed(s) = &self.initial {
            if s.len() != n || (0..n).any(|i| s[i] >= self.arms[i].n_states()) {
                return Err(Error::Config("initial states must give one valid state per arm".into()));
            }
        }
        Ok(())
    }

    pub fn l_value(&self) -> Result<f64> {
        match self.l {
            Some(l) => Ok(l),
            None => Ok(SystemConstants::from_arms(&self.arms)?.l_value),
        }
    }

    /// Epoch shape of the DSEE-family policies; `None` for the baselines.
    pub fn epoch_shape(&self) -> Option<EpochShape> {
        match self.policy {
            PolicyKind::Dsee | PolicyKind::DseeMultiplay => Some(EpochShape::centralized(self.n(), self.m)),
            PolicyKind::DecentralizedSync | PolicyKind::DecentralizedAsync => {
                Some(EpochShape::decentralized(self.n(), self.m))
            }
            _ => None,
        }
    }

    /// Global epoch ends, where they are common to all decision makers.
    pub fn epoch_ends(&self) -> Vec<u64> {
        match (self.policy, self.epoch_shape()) {
            (PolicyKind::DecentralizedAsync, _) | (_, None) => Vec::new(),
            (_, Some(shape)) => EpochSchedule::epoch_ends(shape, &self.d, self.horizon),
        }
    }

    fn build_agents(&self, rngs: &mut [SimRng]) -> Result<Vec<Box<dyn Agent>>> {
        let (n, m, d) = (self.n(), self.m, self.d.clone());
        Ok(match self.policy {
            PolicyKind::Dsee | PolicyKind::DseeMultiplay => vec![Box::new(DseePolicy::new(n, m, d)?)],
            PolicyKind::Rca => {
                let policy = match &self.pilots {
                    Some(p) => RcaPolicy::new(p.clone(), self.l_value()?)?,
                    None => {
                        let sizes: Vec<usize> = self.arms.iter().map(Arm::n_states).collect();
                        RcaPolicy::with_random_pilots(&sizes, self.l_value()?, &mut rngs[0])?
                    }
                };
                vec![Box::new(policy)]
            }
            PolicyKind::OracleTopM => {
                let top = rank_by_mean(&self.arms)[..m].to_vec();
                vec![Box::new(FixedArms(top))]
            }
            PolicyKind::UniformRandom => vec![Box::new(UniformRandom { n, m })],
            PolicyKind::DecentralizedSync => {
                let ranking = rank_by_mean(&self.arms);
                (1..=m)
                    .map(|k| {
                        let p = SyncPlayer::new(k, n, m, d.clone())?;
                        let p = if self.oracle_ranking { p.with_fixed_ranking(ranking.clone()) } else { p };
                        Ok(Box::new(p) as Box<dyn Agent>)
                    })
                    .collect::<Result<_>>()?
            }
            PolicyKind::DecentralizedAsync => (0..m)
                .map(|k| {
                    let join = self.join_slots.get(k).copied().unwrap_or(1);
                    Ok(Box::new(AsyncPlayer::new(n, m, d.clone(), join)?) as Box<dyn Agent>)
                })
                .collect::<Result<_>>()?,
        })
    }

    /// Number of decision makers.
    pub fn n_agents(&self) -> usize {
        if self.policy.is_decentralized() {
            self.m
        } else {
            1
        }
    }
}

/// Always plays the same arms.
#[derive(Debug, Clone)]
struct FixedArms(Vec<usize>);

impl Agent for FixedArms {
    fn choose(&mut self, _rng: &mut SimRng, out: &mut Vec<usize>) {
        out.extend_from_slice(&self.0);
    }

    fn observe(&mut self, _obs: &Observation) -> bool {
        false
    }

    fn end_slot(&mut self) {}
}

/// Plays `m` distinct arms drawn uniformly each slot.
#[derive(Debug, Clone)]
struct UniformRandom {
    n: usize,
    m: usize,
}

impl Agent for UniformRandom {
    fn choose(&mut self, rng: &mut SimRng, out: &mut Vec<usize>) {
        out.extend(index::sample(rng, self.n, self.m).iter());
    }

    fn observe(&mut self, _obs: &Observation) -> bool {
        false
    }

    fn end_slot(&mut self) {}
}

/// One play of one decision maker, as emitted by the per-slot trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t: u64,
    pub player: usize,
    pub phase: Option<Phase>,
    pub n_o: u32,
    pub n_i: u32,
    pub arm: usize,
    pub state: usize,
    pub reward: f64,
    /// Reward indicator of the arm.
    pub paid: bool,
    pub collided: bool,
    /// Observation entered the learning statistics.
    pub learning: bool,
    pub system_reward: f64,
}

/// Steps a scenario slot by slot.
///
/// Stream 0 of the seed drives the arm dynamics and initial states; stream
/// `k + 1` belongs to decision maker `k`.
pub struct Engine<'a> {
    scenario: &'a Scenario,
    agents: Vec<Box<dyn Agent>>,
    rngs: Vec<SimRng>,
    system_rng: SimRng,
    states: Vec<usize>,
    t: u64,
    choices: Vec<usize>,
    owners: Vec<usize>,
    statuses: Vec<AgentStatus>,
    buf: Vec<usize>,
    outcome: SlotOutcome,
    discarded: u64,
    trace: Option<Vec<TraceRow>>,
}

impl<'a> Engine<'a> {
    pub fn new(scenario: &'a Scenario, seed: u64) -> Result<Self> {
        scenario.validate()?;
        let mut system_rng = rng_stream(seed, 0);
        let mut rngs: Vec<SimRng> = (0..scenario.n_agents()).map(|k| rng_stream(seed, k as u64 + 1)).collect();
        let agents = scenario.build_agents(&mut rngs)?;
        let states = match &scenario.initial {
            InitialStates::Stationary => scenario.arms.iter().map(|a| a.sample_stationary(&mut system_rng)).collect(),
            InitialStates::Worst => scenario.arms.iter().map(Arm::worst_state).collect(),
            InitialStates::Fixed(s) => s.clone(),
        };
        Ok(Self {
            scenario,
            agents,
            rngs,
            system_rng,
            states,
            t: 0,
            choices: Vec::new(),
            owners: Vec::new(),
            statuses: Vec::new(),
            buf: Vec::new(),
            outcome: SlotOutcome::default(),
            discarded: 0,
            trace: None,
        })
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    /// Slots played so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn agents(&self) -> &[Box<dyn Agent>] {
        &self.agents
    }

    /// Observations the agents did not learn from.
    pub fn discarded(&self) -> u64 {
        self.discarded
    }

    /// Arms played in the last slot, in player order.
    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    pub fn take_trace(&mut self) -> Vec<TraceRow> {
        self.trace.take().unwrap_or_default()
    }

    /// Plays one slot.
    pub fn step(&mut self) -> &SlotOutcome {
        self.t += 1;
        let arms = &self.scenario.arms;
        self.choices.clear();
        self.owners.clear();
        self.statuses.clear();
        for (k, agent) in self.agents.iter_mut().enumerate() {
            self.buf.clear();
            agent.choose(&mut self.rngs[k], &mut self.buf);
            self.owners.extend(std::iter::repeat_n(k, self.buf.len()));
            self.choices.extend_from_slice(&self.buf);
            self.statuses.push(agent.status());
        }
        resolve_slot(&self.choices, arms, &self.states, self.scenario.collision, &mut self.outcome);
        for (&arm, &k) in self.choices.iter().zip(&self.owners) {
            let state = self.states[arm];
            let obs = Observation { arm, state, reward: arms[arm].reward(state), collided: self.outcome.collided(arm) };
            let learning = self.agents[k].observe(&obs);
            if !learning {
                self.discarded += 1;
            }
            if let Some(trace) = &mut self.trace {
                let s = self.statuses[k];
                trace.push(TraceRow {
                    t: self.t,
                    player: k,
                    phase: s.phase,
                    n_o: s.n_o,
                    n_i: s.n_i,
                    arm,
                    state,
                    reward: obs.reward,
                    paid: self.outcome.indicator[arm],
                    collided: obs.collided,
                    learning,
                    system_reward: self.outcome.system_reward,
                });
            }
        }
        for agent in &mut self.agents {
            agent.end_slot();
        }
        evolve_system(arms, &mut self.states, &self.outcome.plays, self.scenario.restless, &mut self.system_rng);
        &self.outcome
    }

    /// Open regenerative block at the current time, if any.
    pub fn open_block(&self) -> Option<usize> {
        self.agents.iter().find_map(|a| a.open_block())
    }
}

/// Per-slot record of one episode.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub rewards: Vec<f64>,
    pub actions: Vec<Vec<usize>>,
    pub collisions: Vec<u32>,
    pub discarded: u64,
    /// Arm whose block the horizon cut off.
    pub open_block: Option<usize>,
}

pub fn run_episode(scenario: &Scenario, seed: u64) -> Result<Trajectory> {
    let mut engine = Engine::new(scenario, seed)?;
    let mut traj = Trajectory::default();
    for _ in 0..scenario.horizon {
        let out = engine.step();
        traj.rewards.push(out.system_reward);
        traj.collisions.push(out.collisions);
        traj.actions.push(engine.choices().to_vec());
    }
    traj.discarded = engine.discarded();
    traj.open_block = engine.open_block();
    Ok(traj)
}

/// Like [`run_episode`], also returning the per-play trace.
pub fn run_episode_traced(scenario: &Scenario, seed: u64) -> Result<(Trajectory, Vec<TraceRow>)> {
    let mut engine = Engine::new(scenario, seed)?.with_trace();
    let mut traj = Trajectory::default();
    for _ in 0..scenario.horizon {
        let out = engine.step();
        traj.rewards.push(out.system_reward);
        traj.collisions.push(out.collisions);
        traj.actions.push(engine.choices().to_vec());
    }
    traj.discarded = engine.discarded();
    traj.open_block = engine.open_block();
    Ok((traj, engine.take_trace()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm_models::ArmSpec;
    use crate::numerics::Tolerances;

    pub(crate) fn channels_scenario(policy: PolicyKind, m: usize, horizon: u64) -> Scenario {
        let p01 = [0.1, 0.1, 0.5, 0.1, 0.1];
        let p10 = [0.2, 0.3, 0.1, 0.4, 0.5];
        let arms = (0..5)
            .map(|k| Arm::new(ArmSpec::two_state(p01[k], p10[k], 0.1, 1.0).unwrap(), &Tolerances::default()).unwrap())
            .collect();
        Scenario {
            arms,
            policy,
            m,
            d: DParameter::Fixed(10.0),
            l: Some(10.0),
            collision: CollisionModel::Share,
            restless: RestlessModel::Endogenous,
            join_slots: Vec::new(),
            pilots: None,
            oracle_ranking: false,
            initial: InitialStates::Stationary,
            horizon,
        }
    }

    #[test]
    fn replay_is_bit_identical() {
        for policy in [PolicyKind::Dsee, PolicyKind::Rca, PolicyKind::UniformRandom] {
            let s = channels_scenario(policy, 1, 500);
            assert_eq!(run_episode(&s, 9).unwrap(), run_episode(&s, 9).unwrap());
        }
        let s = channels_scenario(PolicyKind::DecentralizedAsync, 2, 500);
        assert_eq!(run_episode(&s, 3).unwrap(), run_episode(&s, 3).unwrap());
    }

    #[test]
    fn zero_horizon_is_empty() {
        let t = run_episode(&channels_scenario(PolicyKind::Dsee, 1, 0), 1).unwrap();
        assert!(t.rewards.is_empty() && t.actions.is_empty());
    }

    #[test]
    fn oracle_plays_top_arms() {
        let t = run_episode(&channels_scenario(PolicyKind::OracleTopM, 2, 20), 1).unwrap();
        assert!(t.actions.iter().all(|a| a == &vec![2, 0]));
    }

    #[test]
    fn invalid_scenarios_are_rejected() {
        assert!(Engine::new(&channels_scenario(PolicyKind::Dsee, 2, 1), 0).is_err());
        let mut s = channels_scenario(PolicyKind::DecentralizedAsync, 2, 1);
        s.join_slots = vec![1];
        assert!(Engine::new(&s, 0).is_err());
    }

    #[test]
    fn trace_covers_every_play() {
        let (traj, trace) = run_episode_traced(&channels_scenario(PolicyKind::DseeMultiplay, 2, 50), 4).unwrap();
        let plays: usize = traj.actions.iter().map(Vec::len).sum();
        assert_eq!(trace.len(), plays);
        assert!(trace.iter().all(|r| r.learning));
    }
}
