//! Batch commands behind the `rmab` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rmab::arm_models::analyze;
use rmab::config::{DConfig, ExperimentConfig};
use rmab::harness::output::{self, Manifest};
use rmab::harness::{
    bound_inputs, bound_overlay, monte_carlo, run_episode_traced, sample_times, BoundInputs,
    PolicyKind, RegretCurve, Scenario, Theorem,
};
use rmab::SystemConstants;

/// Command-line replacements for config values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<usize>,
    pub horizon: Option<u64>,
}

/// A config with overrides applied, plus the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base: Option<PathBuf>,
}

impl LoadedConfig {
    pub fn load(path: &str, overrides: &Overrides) -> Result<Self> {
        let (mut config, base) = ExperimentConfig::load(path).with_context(|| format!("loading {path}"))?;
        if let Some(seed) = overrides.seed {
            config.run.base_seed = seed;
        }
        if let Some(runs) = overrides.runs {
            config.run.runs = runs;
        }
        if let Some(horizon) = overrides.horizon {
            config.run.horizon = horizon;
        }
        Ok(Self { config, base })
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Ok(self.config.scenario(self.base.as_deref())?)
    }
}

/// Theorems whose bound speaks about a scenario's policy and play count.
pub fn theorems_for(scenario: &Scenario) -> Vec<Theorem> {
    match scenario.policy {
        PolicyKind::Dsee => vec![Theorem::SinglePlayer],
        PolicyKind::DseeMultiplay => vec![Theorem::MultiPlay],
        PolicyKind::DecentralizedSync | PolicyKind::DecentralizedAsync => vec![Theorem::Decentralized],
        _ if scenario.m == 1 => vec![Theorem::SinglePlayer],
        _ => vec![Theorem::MultiPlay],
    }
}

pub fn cmd_validate(config_path: &str) -> Result<String> {
    let loaded = LoadedConfig::load(config_path, &Overrides::default())?;
    let scenario = loaded.scenario()?;
    let tol = loaded.config.numerics;
    let mut report = String::new();
    let mut ok = true;
    for (i, arm) in scenario.arms.iter().enumerate() {
        let chain = analyze(arm.spec().transition(), &tol);
        let d = arm.diagnostics();
        let status = if chain.all_pass() { "ok".to_string() } else { format!("FAIL {}", chain.failures().join(",")) };
        ok &= chain.all_pass();
        let _ = writeln!(
            report,
            "arm {i}: {status} states={} mu={:.6} gap={:.6} pi_min={:.6}",
            arm.n_states(),
            d.mu,
            d.gap,
            d.pi_min
        );
    }
    let c = SystemConstants::from_arms(&scenario.arms)?;
    let _ = writeln!(
        report,
        "constants: eps_min={:.6} pi_min={:.6} r_max={} a_max={:.6} L={:.6}",
        c.eps_min, c.pi_min, c.r_max, c.a_max, c.l_value
    );
    match bound_inputs(&scenario)? {
        Some(inputs) => {
            for theorem in theorems_for(&scenario) {
                let required = theorem.required_d(&inputs)?;
                let verdict = if inputs.d >= required { "satisfied" } else { "violated (warning)" };
                let _ = writeln!(
                    report,
                    "{}: D={} required>={required:.4} {verdict}",
                    theorem.name(),
                    inputs.d
                );
            }
        }
        None => {
            let _ = writeln!(report, "D grows with time; fixed-D condition not applicable");
        }
    }
    let _ = writeln!(report, "{}", if ok { "valid" } else { "invalid" });
    ensure!(ok, "{report}");
    Ok(report)
}

/// Sample times for a config: its plan over its horizon, with the epoch ends added.
pub fn times_for(config: &ExperimentConfig, scenario: &Scenario) -> Vec<u64> {
    sample_times(&config.run.sampling, config.run.horizon, &scenario.epoch_ends())
}

pub fn run_curve(loaded: &LoadedConfig, times: &[u64]) -> Result<RegretCurve> {
    let scenario = loaded.scenario()?;
    let mut curve = monte_carlo(&scenario, loaded.config.run.runs, loaded.config.run.base_seed, times)?;
    curve.bound = bound_overlay(&scenario, times)?;
    Ok(curve)
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.toml");
    out.with_file_name(name)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn manifest(config: &ExperimentConfig, table: &Path) -> Manifest {
    let runs = config.run.runs;
    Manifest {
        version: output::code_version(),
        config_digest: config.digest(),
        policy: config.policy.kind.name().to_string(),
        horizon: config.run.horizon,
        runs,
        base_seed: config.run.base_seed,
        last_seed: config.run.base_seed.wrapping_add(runs as u64).wrapping_sub(1),
        table: table.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
    }
}

/// Runs the Monte Carlo experiment; writes the table to `out` (and its
/// manifest beside it), or returns it when `out` is `None`.
pub fn cmd_run(config_path: &str, out: Option<&Path>, overrides: &Overrides, trace: Option<&Path>) -> Result<String> {
    let loaded = LoadedConfig::load(config_path, overrides)?;
    let scenario = loaded.scenario()?;
    let times = times_for(&loaded.config, &scenario);
    let curve = run_curve(&loaded, &times)?;
    let table = output::curve_table(&curve, loaded.config.policy.kind.name(), &loaded.config.digest());
    if let Some(path) = trace {
        let (traj, rows) = run_episode_traced(&scenario, loaded.config.run.base_seed)?;
        write(path, &output::trace_table(&rows))?;
        if let Some(arm) = traj.open_block {
            eprintln!("note: block on arm {arm} still open at the horizon");
        }
    }
    if let Some(path) = out {
        write(path, &table)?;
        write(&manifest_path(path), &manifest(&loaded.config, path).to_toml())?;
    }
    Ok(table)
}

/// Final-time comparison of two curves.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSummary {
    pub t_end: u64,
    pub regret_a: f64,
    pub regret_b: f64,
    pub ratio: f64,
}

pub fn cmd_compare(
    config_a: &str,
    config_b: &str,
    out: Option<&Path>,
    overrides: &Overrides,
) -> Result<(String, CompareSummary)> {
    let a = LoadedConfig::load(config_a, overrides)?;
    let b = LoadedConfig::load(config_b, overrides)?;
    ensure!(a.config.arms == b.config.arms, "configs must share their arms");
    ensure!(a.config.run.horizon == b.config.run.horizon, "configs must share the horizon");
    ensure!(a.config.run.runs == b.config.run.runs, "configs must share the run count");
    let (sa, sb) = (a.scenario()?, b.scenario()?);
    let mut ends = sa.epoch_ends();
    ends.extend(sb.epoch_ends());
    ends.sort_unstable();
    ends.dedup();
    let times = sample_times(&a.config.run.sampling, a.config.run.horizon, &ends);
    ensure!(!times.is_empty(), "horizon must be positive");
    let ca = run_curve(&a, &times)?;
    let cb = run_curve(&b, &times)?;
    let mut table = String::from(output::TABLE_HEADER);
    table.push('\n');
    output::write_curve_rows(&mut table, &ca, a.config.policy.kind.name(), &a.config.digest());
    output::write_curve_rows(&mut table, &cb, b.config.policy.kind.name(), &b.config.digest());
    let (ra, rb) = (*ca.mean.last().unwrap(), *cb.mean.last().unwrap());
    let summary = CompareSummary { t_end: *times.last().unwrap(), regret_a: ra, regret_b: rb, ratio: ra / rb };
    if let Some(path) = out {
        write(path, &table)?;
        write(&manifest_path(path), &manifest(&a.config, path).to_toml())?;
    }
    Ok((table, summary))
}

pub const BOUND_HEADER: &str = "t,theorem,bound,anytime_bound,d,required_d,d_satisfied";

pub fn cmd_bound(config_path: &str, t_list: &[u64]) -> Result<String> {
    ensure!(!t_list.is_empty(), "no times given");
    let loaded = LoadedConfig::load(config_path, &Overrides::default())?;
    let scenario = loaded.scenario()?;
    let inputs: BoundInputs = bound_inputs(&scenario)?.context("bounds need a fixed D")?;
    let mut table = String::from(BOUND_HEADER);
    table.push('\n');
    for theorem in theorems_for(&scenario) {
        let required = theorem.required_d(&inputs)?;
        for &t in t_list {
            let bound = theorem.evaluate(t, &inputs)?;
            let anytime = theorem.evaluate(4 * t + 3, &inputs)?;
            let _ = writeln!(
                table,
                "{t},{},{bound},{anytime},{},{required},{}",
                theorem.name(),
                inputs.d,
                inputs.d >= required
            );
        }
    }
    Ok(table)
}

/// Parameters `cmd_sweep` can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    D,
    L,
    Runs,
    Horizon,
    Players,
}

impl std::str::FromStr for SweepParam {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "D" | "d" => SweepParam::D,
            "L" | "l" => SweepParam::L,
            "runs" => SweepParam::Runs,
            "horizon" => SweepParam::Horizon,
            "players" => SweepParam::Players,
            _ => bail!("unknown sweep parameter `{s}` (expected D, L, runs, horizon, players)"),
        })
    }
}

fn apply(config: &mut ExperimentConfig, param: SweepParam, value: f64) -> Result<()> {
    let as_count = || -> Result<u64> {
        ensure!(value >= 0.0 && value.fract() == 0.0, "{value} is not a whole number");
        Ok(value as u64)
    };
    match param {
        SweepParam::D => config.policy.d = DConfig::Fixed(value),
        SweepParam::L => config.policy.l = Some(value),
        SweepParam::Runs => config.run.runs = as_count()? as usize,
        SweepParam::Horizon => config.run.horizon = as_count()?,
        SweepParam::Players => config.policy.plays = as_count()? as usize,
    }
    Ok(())
}

/// One curve per value. Cell `i` starts its seeds after the seeds of cells `0..i`.
pub fn cmd_sweep(
    config_path: &str,
    param: SweepParam,
    values: &[f64],
    out: Option<&Path>,
    overrides: &Overrides,
) -> Result<String> {
    ensure!(!values.is_empty(), "sweep needs at least one value");
    let loaded = LoadedConfig::load(config_path, overrides)?;
    let mut table = String::from(output::TABLE_HEADER);
    table.push('\n');
    let mut seed = loaded.config.run.base_seed;
    let mut manifests = Vec::new();
    for &value in values {
        let mut cell = loaded.clone();
        apply(&mut cell.config, param, value)?;
        cell.config.run.base_seed = seed;
        seed = seed.wrapping_add(cell.config.run.runs as u64);
        let scenario = cell.scenario()?;
        let times = times_for(&cell.config, &scenario);
        let curve = run_curve(&cell, &times)?;
        output::write_curve_rows(&mut table, &curve, cell.config.policy.kind.name(), &cell.config.digest());
        if let Some(path) = out {
            manifests.push(manifest(&cell.config, path).to_toml());
        }
    }
    if let Some(path) = out {
        write(path, &table)?;
        let joined = manifests.iter().map(|m| format!("[[cell]]\n{m}")).collect::<Vec<_>>().join("\n");
        let text = if values.len() == 1 { manifests.remove(0) } else { joined };
        write(&manifest_path(path), &text)?;
    }
    Ok(table)
}
