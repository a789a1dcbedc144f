//! Episodes, Monte Carlo regret curves, and the closed-form bounds.

pub mod bounds;
mod episode;
pub mod output;
mod regret;

pub use bounds::{
    anytime_bound, centralized_constants, decentralized_constants, rank_by_mean, theorem1_bound, theorem3_bound,
    theorem5_bound, BoundConstants, BoundInputs, Theorem,
};
pub use episode::{
    run_episode, run_episode_traced, Engine, InitialStates, PolicyKind, Scenario, TraceRow, Trajectory,
};
pub use regret::{
    applicable_theorem, best_rate, bound_inputs, bound_overlay, empirical_regret, monte_carlo, sample_run,
    sample_times, RegretCurve, RunSamples, SampleMode, SamplePlan,
};
