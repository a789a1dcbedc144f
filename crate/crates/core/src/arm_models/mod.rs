//! Restless Markovian arms and the chain constants the regret bounds use.

mod arm;
pub mod assets;
mod chain;
mod matrix;

pub use arm::{l_constant, reward_mean, Arm, ArmSpec, ChainDiagnostics, PassiveMode, SystemConstants};
pub use chain::{
    analyze, detailed_balance_violation, eigenvalue_gap, stationarity_residual,
    stationary_by_power_iteration, stationary_distribution, validate_chain, ChainReport,
};
pub use matrix::TransitionMatrix;
