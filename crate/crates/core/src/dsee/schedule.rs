use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Exploration,
    Exploitation,
}

/// Threshold coefficient `D` of the exploitation test, fixed or growing with time.
#[derive(Debug, Clone, PartialEq)]
pub enum DParameter {
    Fixed(f64),
    Growth(GrowthFn),
}

/// Named non-decreasing divergent growth functions for a time-varying `D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthFn {
    /// `ln ln t`, floored at 0 for `t ≤ e`.
    LnLn,
    /// `√(ln t)`.
    SqrtLn,
    /// Piecewise-constant `(start_slot, value)` pairs; the value of the last
    /// breakpoint at or before `t` applies, the first value before that.
    Table(Vec<(u64, f64)>),
}

impl GrowthFn {
    pub fn at(&self, t: u64) -> f64 {
        let lt = (t.max(1) as f64).ln();
        match self {
            GrowthFn::LnLn => lt.max(1.0).ln(),
            GrowthFn::SqrtLn => lt.sqrt(),
            GrowthFn::Table(points) => {
                let idx = points.partition_point(|(start, _)| *start <= t);
                points[idx.saturating_sub(1)].1
            }
        }
    }
}

impl DParameter {
    pub fn at(&self, t: u64) -> f64 {
        match self {
            DParameter::Fixed(d) => *d,
            DParameter::Growth(f) => f.at(t),
        }
    }

    /// Fixed values must be non-negative; tables sorted by start with non-decreasing values.
    pub fn validate(&self) -> Result<()> {
        match self {
            DParameter::Fixed(d) if !(d.is_finite() && *d >= 0.0) => {
                Err(Error::Config(format!("D must be a non-negative number, got {d}")))
            }
            DParameter::Growth(GrowthFn::Table(points)) => {
                if points.is_empty() {
                    return Err(Error::Config("D table is empty".into()));
                }
                for pair in points.windows(2) {
                    if pair[1].0 <= pair[0].0 || pair[1].1 < pair[0].1 {
                        return Err(Error::Config(
                            "D table must have increasing starts and non-decreasing values".into(),
                        ));
                    }
                }
                if points.iter().any(|(_, v)| !v.is_finite() || *v < 0.0) {
                    return Err(Error::Config("D table values must be non-negative".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Minimum `D` for the logarithmic bound: `4L / gap²`.
pub fn required_d(l_value: f64, mean_gap: f64) -> Result<f64> {
    if mean_gap.is_nan() || mean_gap <= 0.0 {
        return Err(Error::NonPositiveGap(mean_gap));
    }
    Ok(4.0 * l_value / (mean_gap * mean_gap))
}

/// Plays spent on each arm by the first `n_o` exploration epochs, `(4^{n_o} − 1)/3`.
pub fn exploration_quota(n_o: u32) -> u64 {
    ((1u128 << (2 * n_o)) - 1) as u64 / 3
}

/// `X_O > D(t) ln t`.
pub fn should_exploit(x_o: u64, t: u64, d: &DParameter) -> bool {
    x_o as f64 > d.at(t) * (t as f64).ln()
}

/// Number of blocks per epoch. An exploration epoch `n` lasts
/// `exploration_blocks · 4^{n−1}` slots, an exploitation epoch
/// `exploitation_blocks · 2 · 4^{n−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochShape {
    pub exploration_blocks: u64,
    pub exploitation_blocks: u64,
}

impl EpochShape {
    /// Centralized player choosing `m` of `n` arms per slot.
    pub fn centralized(n: usize, m: usize) -> Self {
        Self { exploration_blocks: n.div_ceil(m) as u64, exploitation_blocks: 1 }
    }

    /// Each of `m` distributed players, rotating over `n` arms.
    pub fn decentralized(n: usize, m: usize) -> Self {
        Self { exploration_blocks: n as u64, exploitation_blocks: m as u64 }
    }
}

/// Deterministic epoch bookkeeping, in local time.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSchedule {
    shape: EpochShape,
    phase: Phase,
    n_o: u32,
    n_i: u32,
    slot_in_epoch: u64,
    epoch_length: u64,
    block_len: u64,
    t: u64,
}

impl EpochSchedule {
    /// Starts the first exploration epoch (one play per block) at local slot 1.
    pub fn new(shape: EpochShape) -> Self {
        Self {
            shape,
            phase: Phase::Exploration,
            n_o: 1,
            n_i: 0,
            slot_in_epoch: 0,
            epoch_length: shape.exploration_blocks,
            block_len: 1,
            t: 1,
        }
    }

    pub fn shape(&self) -> EpochShape {
        self.shape
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// Exploration epochs started so far.
    pub fn n_o(&self) -> u32 {
        self.n_o
    }

    /// Exploitation epochs started so far.
    pub fn n_i(&self) -> u32 {
        self.n_i
    }

    pub fn slot_in_epoch(&self) -> u64 {
        self.slot_in_epoch
    }

    pub fn epoch_length(&self) -> u64 {
        self.epoch_length
    }

    /// Length of one block (subepoch) of the current epoch.
    pub fn block_len(&self) -> u64 {
        self.block_len
    }

    /// Zero-based block (subepoch) index of the current slot.
    pub fn block(&self) -> usize {
        (self.slot_in_epoch / self.block_len) as usize
    }

    /// Local index of the current slot, starting at 1.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Per-arm exploration plays once every started exploration epoch completes.
    pub fn x_o(&self) -> u64 {
        exploration_quota(self.n_o)
    }

    pub fn is_last_slot_of_epoch(&self) -> bool {
        self.slot_in_epoch + 1 == self.epoch_length
    }

    /// Moves to the next slot. Returns the phase of a newly opened epoch.
    pub fn advance(&mut self, d: &DParameter) -> Option<Phase> {
        self.t += 1;
        self.slot_in_epoch += 1;
        if self.slot_in_epoch < self.epoch_length {
            return None;
        }
        self.slot_in_epoch = 0;
        if should_exploit(self.x_o(), self.t, d) {
            self.phase = Phase::Exploitation;
            self.block_len = 2 * (1u64 << (2 * self.n_i));
            self.n_i += 1;
            self.epoch_length = self.shape.exploitation_blocks * self.block_len;
        } else {
            self.phase = Phase::Exploration;
            self.block_len = 1u64 << (2 * self.n_o);
            self.n_o += 1;
            self.epoch_length = self.shape.exploration_blocks * self.block_len;
        }
        Some(self.phase)
    }

    /// Last slots (local time) of every epoch ending at or before `horizon`.
    pub fn epoch_ends(shape: EpochShape, d: &DParameter, horizon: u64) -> Vec<u64> {
        let mut s = Self::new(shape);
        let mut ends = Vec::new();
        let mut end = s.epoch_length;
        while end <= horizon {
            ends.push(end);
            s.t = end;
            s.slot_in_epoch = s.epoch_length - 1;
            s.advance(d);
            end += s.epoch_length;
        }
        ends
    }
}
