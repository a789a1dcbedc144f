//! The interface the slot engine drives, plus the seeded random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dsee::Phase;

/// Random stream type used throughout the simulator.
pub type SimRng = ChaCha8Rng;

/// Stream `stream` of the generator seeded with `seed`. Streams of one seed
/// are independent, so the arm dynamics and each decision maker draw from
/// separate sequences.
pub fn rng_stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// What a player sees after playing an arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub arm: usize,
    pub state: usize,
    /// Reward value of the observed state (not the share actually received).
    pub reward: f64,
    /// Another player chose the same arm in this slot.
    pub collided: bool,
}

/// Snapshot of an agent's epoch bookkeeping for tracing.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgentStatus {
    pub phase: Option<Phase>,
    pub n_o: u32,
    pub n_i: u32,
}

/// A decision maker occupying one player seat.
pub trait Agent: Send {
    /// Pushes the arms played in the current slot. Pushing fewer arms than
    /// the agent's quota leaves the remaining plays idle.
    fn choose(&mut self, rng: &mut SimRng, out: &mut Vec<usize>);

    /// Delivers one observation. Returns whether it entered the learning statistics.
    fn observe(&mut self, obs: &Observation) -> bool;

    /// Called once after all observations of the slot.
    fn end_slot(&mut self);

    fn status(&self) -> AgentStatus {
        AgentStatus::default()
    }

    /// Arm whose regenerative block is still open, for agents that play in blocks.
    fn open_block(&self) -> Option<usize> {
        None
    }
}
