use std::fmt::Write as _;

use serde::Serialize;

use super::episode::TraceRow;
use super::regret::RegretCurve;
use crate::dsee::Phase;

pub const TABLE_HEADER: &str = "t,mean_regret,std,n_runs,bound,policy,config_hash,mean_collisions,mean_discarded";

/// Appends the table rows of one curve (without header).
pub fn write_curve_rows(out: &mut String, curve: &RegretCurve, policy: &str, config_hash: &str) {
    for i in 0..curve.times.len() {
        let bound = curve.bound.as_ref().and_then(|b| b[i]).map(|b| b.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            curve.times[i],
            curve.mean[i],
            curve.std[i],
            curve.runs,
            bound,
            policy,
            config_hash,
            curve.collisions[i],
            curve.discarded[i],
        );
    }
}

pub fn curve_table(curve: &RegretCurve, policy: &str, config_hash: &str) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    write_curve_rows(&mut out, curve, policy, config_hash);
    out
}

pub const TRACE_HEADER: &str = "t,player,phase,n_o,n_i,arm,state,reward,paid,collided,learning,system_reward";

pub fn trace_table(rows: &[TraceRow]) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in rows {
        let phase = match r.phase {
            Some(Phase::Exploration) => "exploration",
            Some(Phase::Exploitation) => "exploitation",
            None => "",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.player,
            phase,
            r.n_o,
            r.n_i,
            r.arm,
            r.state,
            r.reward,
            u8::from(r.paid),
            u8::from(r.collided),
            u8::from(r.learning),
            r.system_reward,
        );
    }
    out
}

/// Sidecar record describing how a table was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub version: String,
    pub config_digest: String,
    pub policy: String,
    pub horizon: u64,
    pub runs: usize,
    pub base_seed: u64,
    pub last_seed: u64,
    pub table: String,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest fields are plain scalars")
    }
}

pub fn code_version() -> String {
    format!("rmab {}", env!("CARGO_PKG_VERSION"))
}
