//! Input-distribution-aware parallelism selectors and the complexity
//! accounting that goes with them.
//!
//! Three selector families are provided:
//!
//! - IDA: count the channel LLR magnitudes at or below a threshold gamma;
//!   a count at or below phi selects the reduced parallelism.
//! - M-IDA: observe a single sorted-LLR magnitude; strictly above gamma_M
//!   selects the reduced parallelism.
//! - MD-IDA: observe the gap between a sorted-LLR magnitude and the
//!   smallest one; strictly above gamma_MD selects the reduced parallelism.
//!
//! Multi-threshold ladders generalize M/MD to more than two levels.
//!
//! Complexity is the percentage of active decoding paths versus always
//! running at the highest level: a Chase level P costs 2^P attempts, an
//! ORBGRAND level costs its pattern budget nPat.

use crate::chase::{LlrVector, ReliabilityView};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// What a parallelism value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelKind {
    /// Chase parallelism P; the effective cost is 2^P decode attempts.
    ChaseP,
    /// ORBGRAND pattern budget; the cost is nPat itself.
    OrbNPat,
    /// A generic path count L costing L.
    GenericL,
}

/// A decoder parallelism level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelismLevel {
    pub kind: LevelKind,
    pub value: u32,
}

impl ParallelismLevel {
    pub fn chase_p(p: u32) -> Self {
        ParallelismLevel { kind: LevelKind::ChaseP, value: p }
    }

    pub fn orb_npat(n_pat: u32) -> Self {
        ParallelismLevel { kind: LevelKind::OrbNPat, value: n_pat }
    }

    /// Cost in active decoding paths.
    pub fn cost(&self) -> f64 {
        match self.kind {
            LevelKind::ChaseP => (1u64 << self.value) as f64,
            LevelKind::OrbNPat | LevelKind::GenericL => self.value as f64,
        }
    }
}

/// Count-based selector configuration.
#[derive(Debug, Clone)]
pub struct IdaConfig {
    pub gamma: f64,
    pub phi: u32,
    pub low: ParallelismLevel,
    pub high: ParallelismLevel,
}

/// Magnitude selector configuration.
#[derive(Debug, Clone)]
pub struct MIdaConfig {
    pub gamma_m: f64,
    /// Sorted-magnitude index to observe: P_high - 1 for Chase,
    /// w(nPat_high) - 1 for ORBGRAND.
    pub observe_rank: usize,
    pub low: ParallelismLevel,
    pub high: ParallelismLevel,
}

/// Magnitude-difference selector configuration.
#[derive(Debug, Clone)]
pub struct MDIdaConfig {
    pub gamma_md: f64,
    pub observe_rank: usize,
    pub low: ParallelismLevel,
    pub high: ParallelismLevel,
}

/// Which single-observation statistic a ladder uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    /// Magnitude of the observed sorted LLR.
    M,
    /// Gap between the observed sorted LLR and the smallest one.
    Md,
}

/// Multi-threshold ladder: m strictly descending thresholds split the
/// statistic range into m+1 intervals mapped onto m+1 strictly ascending
/// levels, the smallest level taken at the largest statistic.
#[derive(Debug, Clone)]
pub struct MultiThresholdConfig {
    pub selector_kind: SelectorKind,
    pub observe_rank: usize,
    pub thresholds: Vec<f64>,
    pub levels: Vec<ParallelismLevel>,
}

impl MultiThresholdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.len() != self.thresholds.len() + 1 {
            return Err(Error::config(format!(
                "ladder needs {} levels for {} thresholds, got {}",
                self.thresholds.len() + 1,
                self.thresholds.len(),
                self.levels.len()
            )));
        }
        if self.thresholds.is_empty() {
            return Err(Error::config("ladder needs at least one threshold"));
        }
        if !self.thresholds.windows(2).all(|ab| ab[0] > ab[1]) {
            return Err(Error::config("ladder thresholds must be strictly descending"));
        }
        if !self.levels.windows(2).all(|ab| ab[0].cost() < ab[1].cost()) {
            return Err(Error::config("ladder levels must be strictly ascending"));
        }
        Ok(())
    }
}

/// Count-based selection over the raw LLR vector.
///
/// A count of low-magnitude LLRs at or below phi routes to the reduced
/// level. (Equality routes low; this calibration reproduces the reference
/// operating points.)
pub fn ida_select(y: &LlrVector, cfg: &IdaConfig) -> ParallelismLevel {
    let count = y.values.iter().filter(|v| v.abs() <= cfg.gamma).count() as u32;
    ida_select_from_count(count, cfg)
}

/// Same rule applied to a pre-computed count.
pub fn ida_select_from_count(count: u32, cfg: &IdaConfig) -> ParallelismLevel {
    if count <= cfg.phi {
        cfg.low
    } else {
        cfg.high
    }
}

/// Single-magnitude selection: strictly above gamma_M routes low.
pub fn mida_select(view: &ReliabilityView, cfg: &MIdaConfig) -> ParallelismLevel {
    mida_select_from_stat(view.sorted_mag[cfg.observe_rank], cfg)
}

pub fn mida_select_from_stat(stat: f64, cfg: &MIdaConfig) -> ParallelismLevel {
    if stat > cfg.gamma_m {
        cfg.low
    } else {
        cfg.high
    }
}

/// Magnitude-difference selection: strictly above gamma_MD routes low.
pub fn mdida_select(view: &ReliabilityView, cfg: &MDIdaConfig) -> ParallelismLevel {
    mdida_select_from_stat(view.sorted_mag[cfg.observe_rank] - view.sorted_mag[0], cfg)
}

pub fn mdida_select_from_stat(stat: f64, cfg: &MDIdaConfig) -> ParallelismLevel {
    if stat > cfg.gamma_md {
        cfg.low
    } else {
        cfg.high
    }
}

/// Ladder selection; returns the index into `cfg.levels` alongside the
/// level so callers can accumulate per-level fractions.
pub fn multi_select_index(stat: f64, cfg: &MultiThresholdConfig) -> usize {
    cfg.thresholds.iter().filter(|&&g| stat <= g).count()
}

pub fn multi_select(view: &ReliabilityView, cfg: &MultiThresholdConfig) -> ParallelismLevel {
    let stat = match cfg.selector_kind {
        SelectorKind::M => view.sorted_mag[cfg.observe_rank],
        SelectorKind::Md => view.sorted_mag[cfg.observe_rank] - view.sorted_mag[0],
    };
    cfg.levels[multi_select_index(stat, cfg)]
}

/// Two-level run-time complexity in percent: the fraction delta of
/// decodings at the reduced level weighs its cost against always running
/// at the high level.
pub fn complexity_two_level(delta: f64, low: ParallelismLevel, high: ParallelismLevel) -> f64 {
    debug_assert!((0.0..=1.0).contains(&delta));
    100.0 * (delta * low.cost() + (1.0 - delta) * high.cost()) / high.cost()
}

/// Multi-level complexity in percent from per-level fractions; the last
/// level is the reference (highest) one.
pub fn complexity_multi(deltas: &[f64], levels: &[ParallelismLevel]) -> Result<f64> {
    if deltas.len() != levels.len() {
        return Err(Error::arg(format!(
            "{} fractions for {} levels",
            deltas.len(),
            levels.len()
        )));
    }
    let total: f64 = deltas.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::arg(format!("level fractions sum to {total}, expected 1")));
    }
    let high_cost = levels.last().ok_or_else(|| Error::arg("no levels"))?.cost();
    Ok(100.0
        * deltas
            .iter()
            .zip(levels)
            .map(|(d, l)| d * l.cost())
            .sum::<f64>()
        / high_cost)
}

/// Multi-level complexity for a Chase ladder given P values.
pub fn complexity_multi_chase(deltas: &[f64], p_levels: &[u32]) -> Result<f64> {
    let levels: Vec<ParallelismLevel> =
        p_levels.iter().map(|&p| ParallelismLevel::chase_p(p)).collect();
    complexity_multi(deltas, &levels)
}

/// Multi-level complexity for an ORBGRAND ladder given nPat values.
pub fn complexity_multi_orbgrand(deltas: &[f64], npat_levels: &[u32]) -> Result<f64> {
    let levels: Vec<ParallelismLevel> =
        npat_levels.iter().map(|&n| ParallelismLevel::orb_npat(n)).collect();
    complexity_multi(deltas, &levels)
}
