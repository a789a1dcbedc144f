//! Simulation of restless multi-armed bandits with Markovian arms.
//!
//! The crate provides the arm models and their chain diagnostics, the
//! epoch-structured DSEE policy (single player, multiple plays, and
//! decentralized players), a regenerative-cycle baseline, and a Monte Carlo
//! harness with closed-form regret bounds.

pub mod agent;
pub mod arm_models;
pub mod config;
pub mod decentralized;
pub mod dsee;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod rca;

pub use agent::{rng_stream, Agent, AgentStatus, Observation, SimRng};
pub use arm_models::{Arm, ArmSpec, ChainDiagnostics, PassiveMode, SystemConstants, TransitionMatrix};
pub use config::ExperimentConfig;
pub use decentralized::{CollisionModel, RestlessModel};
pub use dsee::{DParameter, DseePolicy, GrowthFn, Phase};
pub use error::{ChainError, Error, Result};
pub use harness::{PolicyKind, RegretCurve, Scenario};
pub use numerics::Tolerances;
pub use rca::RcaPolicy;
