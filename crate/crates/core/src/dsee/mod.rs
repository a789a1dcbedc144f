//! Deterministic sequencing of exploration and exploitation (DSEE).
//!
//! Time is split into exploration epochs, where every arm is played equally
//! often in contiguous segments, and exploitation epochs, where the arms with
//! the best sample means are played. Both epoch types grow by a factor of 4.
//! At each epoch boundary an exploitation epoch opens iff the per-arm
//! exploration time `X_O = (4^{n_O} − 1)/3` exceeds `D ln t`.

mod policy;
mod schedule;
mod stats;

pub use policy::DseePolicy;
pub use schedule::{
    exploration_quota, required_d, should_exploit, DParameter, EpochSchedule, EpochShape, GrowthFn,
    Phase,
};
pub use stats::SampleStats;
