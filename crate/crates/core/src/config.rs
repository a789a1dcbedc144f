//! Experiment configuration files.
//!
//! Configs are TOML documents; see the repository README for the schema.
//! Arm and row indices in error messages are 0-based.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arm_models::assets::{self, ASSET_ROW_SLACK};
use crate::arm_models::{Arm, ArmSpec, PassiveMode, TransitionMatrix};
use crate::decentralized::{CollisionModel, RestlessModel};
use crate::dsee::{DParameter, GrowthFn};
use crate::error::{Error, Result};
use crate::harness::{InitialStates, PolicyKind, SamplePlan, Scenario};
use crate::numerics::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub policy: PolicyConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub numerics: Tolerances,
    pub arms: Vec<ArmConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    /// Plays per slot, or players for the decentralized policies.
    #[serde(default = "one")]
    pub plays: usize,
    #[serde(default = "default_d")]
    pub d: DConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision: Option<CollisionModel>,
    #[serde(default)]
    pub restless: RestlessModel,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub join_slots: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot_states: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub oracle_ranking: bool,
}

fn one() -> usize {
    1
}

fn default_d() -> DConfig {
    DConfig::Fixed(10.0)
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// `d = 10.0`, `d = "ln_ln"`, `d = "sqrt_ln"`, or a table `d = [[1, 2.0], [1000, 3.0]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DConfig {
    Fixed(f64),
    Preset(DPreset),
    Table(Vec<(u64, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DPreset {
    LnLn,
    SqrtLn,
}

impl DConfig {
    pub fn to_parameter(&self) -> DParameter {
        match self {
            DConfig::Fixed(d) => DParameter::Fixed(*d),
            DConfig::Preset(DPreset::LnLn) => DParameter::Growth(GrowthFn::LnLn),
            DConfig::Preset(DPreset::SqrtLn) => DParameter::Growth(GrowthFn::SqrtLn),
            DConfig::Table(t) => DParameter::Growth(GrowthFn::Table(t.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub horizon: u64,
    #[serde(default = "one")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub sampling: SamplePlan,
}

/// `initial = "stationary"`, `"worst"`, or one state index per arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialConfig {
    Named(InitialName),
    Fixed(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialName {
    Stationary,
    Worst,
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig::Named(InitialName::Stationary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassiveKind {
    #[default]
    SameChain,
    Frozen,
    IidStationary,
    /// Uses `passive_transition`.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoState {
    pub p01: f64,
    pub p10: f64,
}

/// One arm. Exactly one of `transition`, `matrix_file`, `two_state` gives the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_state: Option<TwoState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<f64>>>,
    pub rewards: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_scale: Option<f64>,
    #[serde(default)]
    pub passive: PassiveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passive_transition: Option<Vec<Vec<f64>>>,
}

impl ArmConfig {
    fn build(&self, base: Option<&Path>, tol: &Tolerances) -> std::result::Result<ArmSpec, ArmBuildError> {
        let sources =
            [self.two_state.is_some(), self.matrix_file.is_some(), self.transition.is_some()];
        if sources.iter().filter(|s| **s).count() != 1 {
            return Err(ArmBuildError::Config(
                "give exactly one of `two_state`, `matrix_file`, `transition`".into(),
            ));
        }
        let rows = if let Some(ts) = &self.two_state {
            vec![vec![1.0 - ts.p01, ts.p01], vec![ts.p10, 1.0 - ts.p10]]
        } else if let Some(rows) = &self.transition {
            rows.clone()
        } else {
            let file = self.matrix_file.as_deref().unwrap_or_default();
            load_matrix_relative(file, base).map_err(ArmBuildError::Other)?
        };
        let slack = if self.matrix_file.is_some() { ASSET_ROW_SLACK } else { tol.row_sum };
        let transition = TransitionMatrix::from_rows(&rows, slack)?;
        let passive = match self.passive {
            PassiveKind::SameChain => PassiveMode::SameChain,
            PassiveKind::Frozen => PassiveMode::Frozen,
            PassiveKind::IidStationary => PassiveMode::IidStationary,
            PassiveKind::Independent => {
                let rows = self.passive_transition.as_ref().ok_or_else(|| {
                    ArmBuildError::Config("passive = \"independent\" needs `passive_transition`".into())
                })?;
                PassiveMode::IndependentChain(TransitionMatrix::from_rows(rows, tol.row_sum)?)
            }
        };
        if self.passive != PassiveKind::Independent && self.passive_transition.is_some() {
            return Err(ArmBuildError::Config("`passive_transition` needs passive = \"independent\"".into()));
        }
        let scale = self.reward_scale.unwrap_or(1.0);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(ArmBuildError::Config(format!("reward_scale must be positive, got {scale}")));
        }
        let rewards = self.rewards.iter().map(|r| r * scale).collect();
        Ok(ArmSpec::new(rewards, transition, passive)?)
    }
}

enum ArmBuildError {
    Chain(crate::error::ChainError),
    Config(String),
    Other(Error),
}

impl From<crate::error::ChainError> for ArmBuildError {
    fn from(e: crate::error::ChainError) -> Self {
        ArmBuildError::Chain(e)
    }
}

fn arm_error(arm: usize, e: ArmBuildError) -> Error {
    match e {
        ArmBuildError::Chain(source) => Error::Arm { arm, source },
        ArmBuildError::Config(msg) => Error::Config(format!("arm {arm}: {msg}")),
        ArmBuildError::Other(e) => e,
    }
}

/// Resolves `file` against the config directory, then the bundled assets.
pub fn load_matrix_relative(file: &str, base: Option<&Path>) -> Result<Vec<Vec<f64>>> {
    let path = match base {
        Some(dir) => dir.join(file),
        None => PathBuf::from(file),
    };
    if path.exists() {
        return assets::load_matrix(&path);
    }
    match assets::bundled(file) {
        Some(text) => assets::parse_matrix(text),
        None => assets::load_matrix(&path),
    }
}

/// Prefix selecting a bundled config, e.g. `builtin:fig4`.
pub const BUILTIN_PREFIX: &str = "builtin:";

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a config file, or a bundled config named `builtin:<name>`.
    pub fn load(path: &str) -> Result<(Self, Option<PathBuf>)> {
        if let Some(name) = path.strip_prefix(BUILTIN_PREFIX) {
            let text = assets::bundled(&format!("{name}.cfg"))
                .ok_or_else(|| Error::Config(format!("no bundled config named {name}")))?;
            return Ok((Self::parse(text)?, None));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.to_string(), source })?;
        let base = Path::new(path).parent().map(Path::to_path_buf);
        Ok((Self::parse(&text)?, base))
    }

    /// Canonical text form; the digest is computed over it.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Hex SHA-256 of the canonical form.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.canonical().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Validated arms, in config order.
    pub fn build_arms(&self, base: Option<&Path>) -> Result<Vec<Arm>> {
        if self.arms.is_empty() {
            return Err(Error::NoArms);
        }
        self.arms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let spec = a.build(base, &self.numerics).map_err(|e| arm_error(i, e))?;
                Arm::new(spec, &self.numerics).map_err(|source| Error::Arm { arm: i, source })
            })
            .collect()
    }

    pub fn scenario(&self, base: Option<&Path>) -> Result<Scenario> {
        let p = &self.policy;
        let multi = p.kind.is_decentralized();
        if p.collision.is_some() && !multi {
            return Err(Error::Config("collision model applies only to decentralized policies".into()));
        }
        if !p.join_slots.is_empty() && p.kind != PolicyKind::DecentralizedAsync {
            return Err(Error::Config("join_slots applies only to decentralized_async".into()));
        }
        if p.pilot_states.is_some() && p.kind != PolicyKind::Rca {
            return Err(Error::Config("pilot_states applies only to rca".into()));
        }
        if p.oracle_ranking && p.kind != PolicyKind::DecentralizedSync {
            return Err(Error::Config("oracle_ranking applies only to decentralized_sync".into()));
        }
        let initial = match &self.run.initial {
            InitialConfig::Named(InitialName::Stationary) => InitialStates::Stationary,
            InitialConfig::Named(InitialName::Worst) => InitialStates::Worst,
            InitialConfig::Fixed(s) => InitialStates::Fixed(s.clone()),
        };
        let scenario = Scenario {
            arms: self.build_arms(base)?,
            policy: p.kind,
            m: p.plays,
            d: p.d.to_parameter(),
            l: p.l,
            collision: p.collision.unwrap_or_default(),
            restless: p.restless,
            join_slots: p.join_slots.clone(),
            pilots: p.pilot_states.clone(),
            oracle_ranking: p.oracle_ranking,
            initial,
            horizon: self.run.horizon,
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
