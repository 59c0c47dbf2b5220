//! BPSK/AWGN channel, seeded Monte-Carlo trial engine, trial records and
//! the statistics collectors built on them.
//!
//! Each trial owns a dedicated counter-based random substream (ChaCha8
//! keyed by a SplitMix64 expansion of the master seed and the trial
//! index), so the full record set is a pure function of (configuration,
//! seed) and never depends on worker count or scheduling.
//!
//! Decoding happens once per trial at full oracle depth (per-P Chase
//! success flags, first-success ORBGRAND pattern indices); every policy
//! and threshold sweep afterwards is an offline pass over the records.

use crate::bch::{encode, CodeSpec, Codeword};
use crate::chase::{min_required_p, sort_reliability, LlrVector, PerPSuccessMask};
use crate::galois::FieldTables;
use crate::orbgrand::{first_success_indices, PatternBook};
use crate::policy::{complexity_multi, ParallelismLevel, SelectorKind};
use crate::{Error, Result};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Channel parameters; sigma is derived from Eb/N0 and the code rate.
#[derive(Debug, Clone)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, rate: f64, seed: u64) -> Result<Self> {
        Ok(ChannelConfig { ebn0_db, rate, sigma: ebn0_to_sigma(ebn0_db, rate)?, seed })
    }
}

/// Noise standard deviation for BPSK with unit symbol energy:
/// sigma = sqrt(1 / (2 R 10^{EbN0/10})).
pub fn ebn0_to_sigma(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::arg(format!("code rate {rate} outside (0, 1]")));
    }
    Ok((1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt())
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Dedicated random substream for one trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut state = seed ^ trial_index.wrapping_mul(0xA24B_AED4_963E_E407);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// BPSK over AWGN in LLR form: y_i = 2/sigma^2 (1 - 2 c_i + e_i) with
/// e_i ~ N(0, sigma^2) drawn from `rng`.
pub fn transmit(c: &Codeword, cfg: &ChannelConfig, rng: &mut impl Rng) -> LlrVector {
    let scale = 2.0 / (cfg.sigma * cfg.sigma);
    let values = c
        .bits
        .iter()
        .map(|&b| {
            let e: f64 = rng.sample::<f64, _>(rand_distr::StandardNormal) * cfg.sigma;
            scale * (1.0 - 2.0 * b as f64 + e)
        })
        .collect();
    LlrVector::new(values)
}

/// What the trial engine records per trial.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Evaluate Chase success for every P up to this depth.
    pub chase_p_max: Option<usize>,
    /// Evaluate ORBGRAND first-success indices against this book.
    pub orb_book: Option<std::sync::Arc<PatternBook>>,
    /// Count |y_i| <= gamma for each of these grid points.
    pub gamma_grid: Vec<f64>,
    /// Number of leading sorted magnitudes to keep.
    pub prefix_len: usize,
    /// Transmit the all-zero codeword instead of random messages.
    pub all_zero_messages: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            chase_p_max: Some(6),
            orb_book: None,
            gamma_grid: Vec::new(),
            prefix_len: 8,
            all_zero_messages: false,
        }
    }
}

/// Per-trial oracle data; fully determined by (seed, trial index, code,
/// channel configuration).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: u64,
    /// Per-P Chase success flags, when the Chase oracle was requested.
    pub chase_mask: Option<PerPSuccessMask>,
    /// Smallest ORBGRAND pattern index recovering the transmitted word.
    pub orb_idx_true: Option<u32>,
    /// Smallest ORBGRAND pattern index yielding any valid codeword.
    pub orb_idx_any_valid: Option<u32>,
    /// Leading sorted LLR magnitudes |y~_0| .. |y~_{L-1}|.
    pub sorted_mag_prefix: Vec<f64>,
    /// Count of |y_i| <= gamma per configured grid point.
    pub count_below_gamma: Vec<u32>,
}

/// A batch of trial records plus the metadata needed to evaluate policies
/// against them.
#[derive(Debug, Clone)]
pub struct RecordSet {
    pub ebn0_db: f64,
    pub seed: u64,
    pub chase_p_max: Option<usize>,
    pub orb_book_len: Option<usize>,
    pub gamma_grid: Vec<f64>,
    pub prefix_len: usize,
    pub records: Vec<TrialRecord>,
}

/// Runs `trials` independent trials. Results are identical for any worker
/// count; trials are keyed by index with dedicated substreams.
pub fn run_trials(
    spec: &CodeSpec,
    tables: &FieldTables,
    channel: &ChannelConfig,
    trials: u64,
    oracle: &OracleConfig,
) -> RecordSet {
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|trial_index| run_one_trial(spec, tables, channel, trial_index, oracle))
        .collect();
    RecordSet {
        ebn0_db: channel.ebn0_db,
        seed: channel.seed,
        chase_p_max: oracle.chase_p_max,
        orb_book_len: oracle.orb_book.as_ref().map(|b| b.len()),
        gamma_grid: oracle.gamma_grid.clone(),
        prefix_len: oracle.prefix_len,
        records,
    }
}

fn run_one_trial(
    spec: &CodeSpec,
    tables: &FieldTables,
    channel: &ChannelConfig,
    trial_index: u64,
    oracle: &OracleConfig,
) -> TrialRecord {
    let mut rng = trial_rng(channel.seed, trial_index);
    let transmitted = if oracle.all_zero_messages {
        Codeword::zero(spec.n)
    } else {
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
        encode(&msg, spec).expect("message length matches k")
    };
    let y = transmit(&transmitted, channel, &mut rng);
    let view = sort_reliability(&y);
    let prefix_len = oracle.prefix_len.min(spec.n);
    let sorted_mag_prefix = view.sorted_mag[..prefix_len].to_vec();
    let count_below_gamma = oracle
        .gamma_grid
        .iter()
        .map(|&g| y.values.iter().filter(|v| v.abs() <= g).count() as u32)
        .collect();
    let chase_mask = oracle
        .chase_p_max
        .map(|p_max| min_required_p(&y, &transmitted, p_max, spec, tables));
    let (orb_idx_true, orb_idx_any_valid) = match &oracle.orb_book {
        None => (None, None),
        Some(book) => {
            let (t, a) = first_success_indices(&y, &transmitted, book, spec, tables);
            (t.map(|v| v as u32), a.map(|v| v as u32))
        }
    };
    TrialRecord {
        trial_index,
        chase_mask,
        orb_idx_true,
        orb_idx_any_valid,
        sorted_mag_prefix,
        count_below_gamma,
    }
}

impl TrialRecord {
    /// Whether decoding at `level` recovers the transmitted codeword.
    pub fn level_success(&self, level: ParallelismLevel) -> Result<bool> {
        match level.kind {
            crate::policy::LevelKind::ChaseP => {
                let mask = self
                    .chase_mask
                    .as_ref()
                    .ok_or_else(|| Error::MissingStatistic("Chase per-P success flags".into()))?;
                mask.mask
                    .get(level.value as usize)
                    .copied()
                    .ok_or_else(|| {
                        Error::MissingStatistic(format!(
                            "Chase success flag for P = {} (recorded depth {})",
                            level.value,
                            mask.mask.len() - 1
                        ))
                    })
            }
            crate::policy::LevelKind::OrbNPat | crate::policy::LevelKind::GenericL => {
                let n_pat = level.value;
                Ok(self
                    .orb_idx_any_valid
                    .is_some_and(|a| a <= n_pat && Some(a) == self.orb_idx_true))
            }
        }
    }
}

/// How a policy picks a level from recorded statistics.
#[derive(Debug, Clone)]
pub enum SelectRule {
    /// Always the level at this index of the ladder.
    Fixed(usize),
    /// Count-based IDA rule over a recorded gamma grid point; two levels.
    CountBelow { gamma: f64, phi: u32 },
    /// Single-observation statistic against descending thresholds.
    Stat { kind: SelectorKind, observe_rank: usize, thresholds: Vec<f64> },
}

/// An offline-evaluable policy: an ascending ladder of levels plus the
/// rule selecting among them. The last level is the complexity reference.
#[derive(Debug, Clone)]
pub struct EvalPolicy {
    pub levels: Vec<ParallelismLevel>,
    pub rule: SelectRule,
}

impl EvalPolicy {
    pub fn fixed(level: ParallelismLevel, high: ParallelismLevel) -> Self {
        if level == high {
            EvalPolicy { levels: vec![high], rule: SelectRule::Fixed(0) }
        } else {
            EvalPolicy { levels: vec![level, high], rule: SelectRule::Fixed(0) }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::config("policy needs at least one level"));
        }
        if !self.levels.windows(2).all(|ab| ab[0].cost() < ab[1].cost()) {
            return Err(Error::config("policy levels must be strictly ascending"));
        }
        match &self.rule {
            SelectRule::Fixed(i) => {
                if *i >= self.levels.len() {
                    return Err(Error::config("fixed level index outside the ladder"));
                }
            }
            SelectRule::CountBelow { phi, .. } => {
                if self.levels.len() != 2 {
                    return Err(Error::config("count-based selection needs exactly two levels"));
                }
                if *phi < 1 {
                    return Err(Error::config("count threshold phi must be >= 1"));
                }
            }
            SelectRule::Stat { thresholds, .. } => {
                if thresholds.len() + 1 != self.levels.len() {
                    return Err(Error::config(format!(
                        "{} thresholds need {} levels, got {}",
                        thresholds.len(),
                        thresholds.len() + 1,
                        self.levels.len()
                    )));
                }
                if !thresholds.windows(2).all(|ab| ab[0] > ab[1]) {
                    return Err(Error::config("thresholds must be strictly descending"));
                }
            }
        }
        Ok(())
    }

    /// Ladder index selected for one record.
    pub fn select_index(&self, set: &RecordSet, rec: &TrialRecord) -> Result<usize> {
        match &self.rule {
            SelectRule::Fixed(i) => Ok(*i),
            SelectRule::CountBelow { gamma, phi } => {
                let gi = set
                    .gamma_grid
                    .iter()
                    .position(|g| (g - gamma).abs() < 1e-12)
                    .ok_or_else(|| {
                        Error::MissingStatistic(format!(
                            "count of |y| <= {gamma} is not on the recorded gamma grid"
                        ))
                    })?;
                Ok(if rec.count_below_gamma[gi] <= *phi { 0 } else { 1 })
            }
            SelectRule::Stat { kind, observe_rank, thresholds } => {
                if *observe_rank >= set.prefix_len {
                    return Err(Error::MissingStatistic(format!(
                        "sorted magnitude at rank {observe_rank} (recorded prefix {})",
                        set.prefix_len
                    )));
                }
                let stat = match kind {
                    SelectorKind::M => rec.sorted_mag_prefix[*observe_rank],
                    SelectorKind::Md => {
                        rec.sorted_mag_prefix[*observe_rank] - rec.sorted_mag_prefix[0]
                    }
                };
                Ok(thresholds.iter().filter(|&&g| stat <= g).count())
            }
        }
    }
}

/// One BLER/complexity operating point.
#[derive(Debug, Clone)]
pub struct BlerComplexityPoint {
    pub ebn0_db: f64,
    pub bler: f64,
    /// 95% normal-approximation confidence half-width.
    pub bler_ci: f64,
    pub complexity_pct: f64,
    /// Fraction of trials routed to each ladder level.
    pub deltas: Vec<f64>,
    pub trials: u64,
    pub block_errors: u64,
    /// Fewer than 100 block errors behind the BLER estimate.
    pub low_confidence: bool,
}

/// Evaluates a policy offline over recorded trials: per record, select a
/// level from the stored statistics, look up success at that level, and
/// aggregate block errors and per-level fractions.
pub fn estimate_bler_complexity(set: &RecordSet, policy: &EvalPolicy) -> Result<BlerComplexityPoint> {
    policy.validate()?;
    if set.records.is_empty() {
        return Err(Error::arg("empty record set"));
    }
    let mut level_counts = vec![0u64; policy.levels.len()];
    let mut block_errors = 0u64;
    for rec in &set.records {
        let idx = policy.select_index(set, rec)?;
        level_counts[idx] += 1;
        if !rec.level_success(policy.levels[idx])? {
            block_errors += 1;
        }
    }
    let trials = set.records.len() as u64;
    let deltas: Vec<f64> = level_counts.iter().map(|&c| c as f64 / trials as f64).collect();
    let bler = block_errors as f64 / trials as f64;
    let bler_ci = 1.96 * (bler * (1.0 - bler) / trials as f64).sqrt();
    let complexity_pct = complexity_multi(&deltas, &policy.levels)?;
    Ok(BlerComplexityPoint {
        ebn0_db: set.ebn0_db,
        bler,
        bler_ci,
        complexity_pct,
        deltas,
        trials,
        block_errors,
        low_confidence: block_errors < 100,
    })
}

/// Histogram of the minimum Chase parallelism required per trial.
#[derive(Debug, Clone)]
pub struct MinPHistogram {
    /// fractions[p] = share of trials whose smallest successful P equals p.
    pub fractions: Vec<f64>,
    /// Share of trials no P <= P_max could decode to the transmitted word.
    pub uncorrectable: f64,
    pub trials: u64,
}

pub fn minp_table(set: &RecordSet) -> Result<MinPHistogram> {
    let p_max = set
        .chase_p_max
        .ok_or_else(|| Error::MissingStatistic("Chase per-P success flags".into()))?;
    let mut counts = vec![0u64; p_max + 1];
    let mut uncorrectable = 0u64;
    for rec in &set.records {
        let mask = rec
            .chase_mask
            .as_ref()
            .ok_or_else(|| Error::MissingStatistic("Chase per-P success flags".into()))?;
        match mask.min_required_p() {
            Some(p) => counts[p] += 1,
            None => uncorrectable += 1,
        }
    }
    let trials = set.records.len() as u64;
    Ok(MinPHistogram {
        fractions: counts.iter().map(|&c| c as f64 / trials as f64).collect(),
        uncorrectable: uncorrectable as f64 / trials as f64,
        trials,
    })
}

/// Conditional means of the leading sorted LLR magnitudes, bucketed by the
/// minimum required Chase parallelism.
#[derive(Debug, Clone)]
pub struct DistributionStats {
    /// Bucket condition: the minimum required P.
    pub condition_min_p: usize,
    /// mean |y~_i| for i = 0..rank count.
    pub mean_mag: Vec<f64>,
    /// mean (|y~_i| - |y~_0|), zero at rank 0 by construction.
    pub mean_diff: Vec<f64>,
    pub sample_count: u64,
}

/// Per-bucket conditional means over ranks `0..=max_rank`. Empty buckets
/// are omitted.
pub fn reliability_distributions(set: &RecordSet, max_rank: usize) -> Result<Vec<DistributionStats>> {
    let p_max = set
        .chase_p_max
        .ok_or_else(|| Error::MissingStatistic("Chase per-P success flags".into()))?;
    if max_rank >= set.prefix_len {
        return Err(Error::MissingStatistic(format!(
            "sorted magnitudes through rank {max_rank} (recorded prefix {})",
            set.prefix_len
        )));
    }
    let nranks = max_rank + 1;
    let mut sums = vec![vec![0.0f64; nranks]; p_max + 1];
    let mut diff_sums = vec![vec![0.0f64; nranks]; p_max + 1];
    let mut counts = vec![0u64; p_max + 1];
    for rec in &set.records {
        let mask = rec
            .chase_mask
            .as_ref()
            .ok_or_else(|| Error::MissingStatistic("Chase per-P success flags".into()))?;
        if let Some(p) = mask.min_required_p() {
            counts[p] += 1;
            for i in 0..nranks {
                sums[p][i] += rec.sorted_mag_prefix[i];
                diff_sums[p][i] += rec.sorted_mag_prefix[i] - rec.sorted_mag_prefix[0];
            }
        }
    }
    Ok((0..=p_max)
        .filter(|&p| counts[p] > 0)
        .map(|p| DistributionStats {
            condition_min_p: p,
            mean_mag: sums[p].iter().map(|s| s / counts[p] as f64).collect(),
            mean_diff: diff_sums[p].iter().map(|s| s / counts[p] as f64).collect(),
            sample_count: counts[p],
        })
        .collect())
}
