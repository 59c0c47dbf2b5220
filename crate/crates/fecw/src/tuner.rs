//! Offline threshold tuning over recorded trial sets.
//!
//! The tuner never re-runs the channel: it evaluates candidate policies
//! against the stored per-trial oracle data. Single-threshold sweeps use
//! an empirical-quantile grid of the observed statistic; ladder sweeps
//! run coordinate descent over cut positions in the sorted statistic
//! (the quantile grid's finest refinement), seeded by exact minimizers
//! of the error-penalized objective. All sweeps are deterministic and
//! ties break toward the more conservative (larger) threshold.

use crate::policy::{ParallelismLevel, SelectorKind};
use crate::sim::{estimate_bler_complexity, BlerComplexityPoint, EvalPolicy, RecordSet, SelectRule};
use crate::{Error, Result};

/// Constraint for a sweep: keep BLER at or below this value while
/// minimizing mean complexity.
#[derive(Debug, Clone, Copy)]
pub struct TuneTarget {
    pub max_bler: f64,
}

impl TuneTarget {
    /// Target relative to a reference policy: `reference BLER x factor`.
    pub fn from_reference(reference: &BlerComplexityPoint, factor: f64) -> Self {
        TuneTarget { max_bler: reference.bler * factor }
    }
}

/// Result of a sweep. When no candidate meets the constraint, `feasible`
/// is false and `point`/`thresholds` describe the lowest-BLER candidate
/// found, as a witness of how close the sweep got.
#[derive(Debug, Clone)]
pub struct TuneOutcome {
    pub thresholds: Vec<f64>,
    pub point: BlerComplexityPoint,
    pub feasible: bool,
    /// Number of evaluated candidates that met the BLER ceiling.
    pub feasible_count: usize,
}

/// Candidate grid: empirical quantiles of the statistic in half-percentile
/// steps, deduplicated, plus a below-minimum sentinel so "never select the
/// cheap level" is always on the grid. `extra` values (e.g. externally
/// published thresholds) are merged in for direct comparison.
pub fn candidate_thresholds(
    set: &RecordSet,
    kind: SelectorKind,
    observe_rank: usize,
    extra: &[f64],
) -> Result<Vec<f64>> {
    if observe_rank >= set.prefix_len {
        return Err(Error::MissingStatistic(format!(
            "sorted magnitude at rank {observe_rank} (recorded prefix {})",
            set.prefix_len
        )));
    }
    let mut stats: Vec<f64> = set
        .records
        .iter()
        .map(|r| match kind {
            SelectorKind::M => r.sorted_mag_prefix[observe_rank],
            SelectorKind::Md => r.sorted_mag_prefix[observe_rank] - r.sorted_mag_prefix[0],
        })
        .collect();
    if stats.is_empty() {
        return Err(Error::arg("empty record set"));
    }
    stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = stats.len();
    let mut grid: Vec<f64> = (0..=200)
        .map(|q| stats[((q as f64 / 200.0) * (n - 1) as f64).round() as usize])
        .collect();
    grid.insert(0, stats[0] - 1.0);
    grid.extend(extra.iter().copied().filter(|v| v.is_finite()));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    Ok(grid)
}

fn stat_policy(
    kind: SelectorKind,
    observe_rank: usize,
    levels: &[ParallelismLevel],
    thresholds: Vec<f64>,
) -> EvalPolicy {
    EvalPolicy {
        levels: levels.to_vec(),
        rule: SelectRule::Stat { kind, observe_rank, thresholds },
    }
}

/// Sweeps a single threshold between two levels: among candidates meeting
/// the BLER constraint, picks the one with the lowest complexity, breaking
/// ties toward the larger (more conservative) threshold.
pub fn sweep_single_threshold(
    set: &RecordSet,
    kind: SelectorKind,
    observe_rank: usize,
    levels: [ParallelismLevel; 2],
    target: TuneTarget,
    extra: &[f64],
) -> Result<TuneOutcome> {
    let grid = candidate_thresholds(set, kind, observe_rank, extra)?;
    let mut best: Option<(f64, BlerComplexityPoint)> = None;
    let mut witness: Option<(f64, BlerComplexityPoint)> = None;
    let mut feasible_count = 0usize;
    for &g in &grid {
        let point = estimate_bler_complexity(set, &stat_policy(kind, observe_rank, &levels, vec![g]))?;
        if witness.as_ref().is_none_or(|(_, w)| point.bler < w.bler) {
            witness = Some((g, point.clone()));
        }
        if point.bler <= target.max_bler {
            feasible_count += 1;
        }
        if point.bler <= target.max_bler
            && best
                .as_ref()
                .is_none_or(|(_, b)| point.complexity_pct <= b.complexity_pct)
        {
            // <= keeps the largest threshold among equal-complexity candidates
            // because the grid is ascending
            best = Some((g, point));
        }
    }
    let (feasible, (g, point)) = match best {
        Some(found) => (true, found),
        None => (false, witness.expect("grid is non-empty")),
    };
    Ok(TuneOutcome { thresholds: vec![g], point, feasible, feasible_count })
}

/// Precomputed view of a record set for one statistic and ladder: trials
/// sorted by the statistic, with per-level failure counts as prefix sums.
/// A ladder of descending thresholds maps to descending "cut" positions
/// in the sorted order (cut = number of trials with stat <= threshold),
/// and any ladder evaluates in O(levels) from the prefix sums.
struct LadderProfile {
    /// Statistic values in ascending order, one per trial.
    stats: Vec<f64>,
    /// fail_prefix[l][c] = failures at level l among the c smallest stats.
    fail_prefix: Vec<Vec<u32>>,
    /// Cut positions that a real-valued threshold can realize: 0, n, and
    /// every c with stats[c-1] < stats[c].
    boundaries: Vec<usize>,
    costs: Vec<f64>,
}

impl LadderProfile {
    fn build(
        set: &RecordSet,
        kind: SelectorKind,
        observe_rank: usize,
        levels: &[ParallelismLevel],
    ) -> Result<Self> {
        if observe_rank >= set.prefix_len {
            return Err(Error::MissingStatistic(format!(
                "sorted magnitude at rank {observe_rank} (recorded prefix {})",
                set.prefix_len
            )));
        }
        if set.records.is_empty() {
            return Err(Error::arg("empty record set"));
        }
        let mut rows: Vec<(f64, Vec<bool>)> = set
            .records
            .iter()
            .map(|r| {
                let stat = match kind {
                    SelectorKind::M => r.sorted_mag_prefix[observe_rank],
                    SelectorKind::Md => r.sorted_mag_prefix[observe_rank] - r.sorted_mag_prefix[0],
                };
                let fails: Result<Vec<bool>> =
                    levels.iter().map(|&l| r.level_success(l).map(|ok| !ok)).collect();
                Ok((stat, fails?))
            })
            .collect::<Result<_>>()?;
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let n = rows.len();
        let mut fail_prefix = vec![vec![0u32; n + 1]; levels.len()];
        for (i, (_, fails)) in rows.iter().enumerate() {
            for (l, fp) in fail_prefix.iter_mut().enumerate() {
                fp[i + 1] = fp[i] + u32::from(fails[l]);
            }
        }
        let stats: Vec<f64> = rows.into_iter().map(|(s, _)| s).collect();
        let mut boundaries = vec![0usize];
        boundaries.extend((1..n).filter(|&c| stats[c - 1] < stats[c]));
        boundaries.push(n);
        let costs = levels.iter().map(|l| l.cost()).collect();
        Ok(LadderProfile { stats, fail_prefix, boundaries, costs })
    }

    fn n(&self) -> usize {
        self.stats.len()
    }

    /// Exact minimizer of `cost_sum + lambda * errors` over descending
    /// cut ladders. With segment boundaries b_k = cuts[m-k] the penalized
    /// objective separates into one univariate term per boundary,
    /// H_{l+1}(c) - H_l(c) with H_l(c) = c cost_l + lambda F_l(c), so the
    /// monotone minimum is a prefix-min dynamic program over boundaries.
    fn lagrangian_cuts(&self, lambda: f64) -> Vec<usize> {
        let m = self.costs.len() - 1;
        let b = &self.boundaries;
        let nb = b.len();
        let mut dp = vec![0.0f64; nb];
        let mut parents: Vec<Vec<u32>> = Vec::with_capacity(m);
        for k in 1..=m {
            let l = m - k;
            let mut best = f64::INFINITY;
            let mut best_i = 0u32;
            let mut par = vec![0u32; nb];
            for (i, &c) in b.iter().enumerate() {
                let g = c as f64 * (self.costs[l + 1] - self.costs[l])
                    + lambda
                        * (self.fail_prefix[l + 1][c] as f64 - self.fail_prefix[l][c] as f64);
                let val = dp[i] + g;
                // <= prefers the larger cut among ties
                if val <= best {
                    best = val;
                    best_i = i as u32;
                }
                dp[i] = best;
                par[i] = best_i;
            }
            parents.push(par);
        }
        let mut cuts = Vec::with_capacity(m);
        let mut i = (nb - 1) as u32;
        for k in (1..=m).rev() {
            i = parents[k - 1][i as usize];
            cuts.push(b[i as usize]);
        }
        cuts
    }

    /// Total failures and summed per-trial cost for descending cuts.
    /// Trials below `cuts[j]` decode at level index >= j + 1; level m gets
    /// [0, cuts[m-1]) and level 0 gets [cuts[0], n).
    fn evaluate(&self, cuts: &[usize]) -> (u32, f64) {
        let m = cuts.len();
        let mut errors = 0u32;
        let mut cost_sum = 0.0;
        for lvl in 0..=m {
            let lo = if lvl == m { 0 } else { cuts[lvl] };
            let hi = if lvl == 0 { self.n() } else { cuts[lvl - 1] };
            errors += self.fail_prefix[lvl][hi] - self.fail_prefix[lvl][lo];
            cost_sum += (hi - lo) as f64 * self.costs[lvl];
        }
        (errors, cost_sum)
    }

    /// Thresholds realizing the given descending cuts, strictly
    /// descending themselves. A run of equal cuts (empty segments) is
    /// spread across the open interval between the adjacent stat values.
    fn cuts_to_thresholds(&self, cuts: &[usize]) -> Vec<f64> {
        let (stats, n) = (&self.stats, self.n());
        let mut out = Vec::with_capacity(cuts.len());
        let mut j = 0;
        while j < cuts.len() {
            let c = cuts[j];
            let run = cuts[j..].iter().take_while(|&&v| v == c).count();
            for r in 0..run {
                out.push(if c == 0 {
                    stats[0] - 1.0 - r as f64
                } else if c == n {
                    stats[n - 1] + (run - r) as f64
                } else if run == 1 {
                    stats[c - 1]
                } else {
                    let (a, b) = (stats[c - 1], stats[c]);
                    a + (b - a) * (run - r) as f64 / (run + 1) as f64
                });
            }
            j += run;
        }
        out
    }
}

/// Tunes a descending threshold ladder for `levels.len()` levels by
/// coordinate descent over cut positions in the sorted statistic, so the
/// candidate grid is every distinct observed value (the quantile grid's
/// finest refinement; `extra` values are subsumed and ignored). Each
/// coordinate is re-optimized over its full range in O(1) per candidate
/// via failure prefix sums, highest-level gate first, repeating until a
/// pass changes nothing. The descent runs from several deterministic
/// starting ladders — including the all-high ladder, whose BLER equals
/// the reference by construction — and keeps the best result, so a
/// feasible ceiling always yields a feasible outcome.
pub fn sweep_multi_threshold(
    set: &RecordSet,
    kind: SelectorKind,
    observe_rank: usize,
    levels: &[ParallelismLevel],
    target: TuneTarget,
    _extra: &[f64],
) -> Result<TuneOutcome> {
    let m = levels.len().checked_sub(1).filter(|&m| m >= 1).ok_or_else(|| {
        Error::config("multi-threshold tuning needs at least two levels")
    })?;
    let profile = LadderProfile::build(set, kind, observe_rank, levels)?;
    let n = profile.n();
    let feasible = |errors: u32| errors as f64 / n as f64 <= target.max_bler;

    let snap = |pos: usize| -> usize {
        let b = &profile.boundaries;
        match b.binary_search(&pos) {
            Ok(i) => b[i],
            Err(i) if i == 0 => b[0],
            Err(i) if i == b.len() => b[b.len() - 1],
            Err(i) => {
                if pos - b[i - 1] <= b[i] - pos { b[i - 1] } else { b[i] }
            }
        }
    };
    let mut quantile_start: Vec<usize> = (0..m).map(|j| snap(n * (m - j) / (m + 1))).collect();
    for j in 1..m {
        quantile_start[j] = quantile_start[j].min(quantile_start[j - 1]);
    }
    let mut starts = vec![vec![n; m], quantile_start, vec![0; m]];
    // bisect the error penalty: each iterate is the exact optimum of
    // cost + lambda * errors over all ladders, and the feasible ones seed
    // the descent near the global constrained optimum
    let mut lo = 0.0f64;
    let mut hi = n as f64 * profile.costs[m];
    for _ in 0..48 {
        let lambda = 0.5 * (lo + hi);
        let cuts = profile.lagrangian_cuts(lambda);
        let (errors, _) = profile.evaluate(&cuts);
        if feasible(errors) {
            if !starts.contains(&cuts) {
                starts.push(cuts);
            }
            hi = lambda;
        } else {
            lo = lambda;
        }
    }

    let mut feasible_count = 0usize;
    let mut best: Option<(Vec<usize>, u32, f64)> = None;
    for start in starts {
        let mut cuts = start;
        let (mut errors, mut cost_sum) = profile.evaluate(&cuts);
        feasible_count += usize::from(feasible(errors));
        for _pass in 0..64 {
            let mut changed = false;
            // last coordinate gates the highest level; optimize it first
            for j in (0..m).rev() {
                let upper = if j == 0 { n } else { cuts[j - 1] };
                let lower = if j == m - 1 { 0 } else { cuts[j + 1] };
                let from = profile.boundaries.partition_point(|&c| c < lower);
                let to = profile.boundaries.partition_point(|&c| c <= upper);
                let cur = cuts[j];
                let cost_step = profile.costs[j + 1] - profile.costs[j];
                let fp_hi = &profile.fail_prefix[j + 1];
                let fp_lo = &profile.fail_prefix[j];
                // moving the cut from `cur` to `c` reroutes the trials in
                // between from level j+1 to level j (or back)
                let delta_err = |c: usize| {
                    (fp_hi[c] + fp_lo[cur]) as i64 - (fp_hi[cur] + fp_lo[c]) as i64
                };
                let mut best_c = cur;
                let mut best_key = (u8::from(!feasible(errors)), if feasible(errors) {
                    cost_sum
                } else {
                    errors as f64
                });
                // descending scan: among equal keys the largest cut wins
                for &c in profile.boundaries[from..to].iter().rev() {
                    let e = (errors as i64 + delta_err(c)) as u32;
                    let ok = feasible(e);
                    feasible_count += usize::from(ok && c != cur);
                    let key = (u8::from(!ok), if ok {
                        cost_sum + (c as f64 - cur as f64) * cost_step
                    } else {
                        e as f64
                    });
                    if key < best_key {
                        best_key = key;
                        best_c = c;
                    }
                }
                if best_c != cur {
                    cuts[j] = best_c;
                    (errors, cost_sum) = profile.evaluate(&cuts);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let better = match &best {
            None => true,
            Some((_, be, bc)) => {
                let key = (u8::from(!feasible(errors)), if feasible(errors) { cost_sum } else { errors as f64 });
                let best_key =
                    (u8::from(!feasible(*be)), if feasible(*be) { *bc } else { *be as f64 });
                key < best_key
            }
        };
        if better {
            best = Some((cuts, errors, cost_sum));
        }
    }
    let (cuts, errors, _) = best.expect("at least one start");
    let thresholds = profile.cuts_to_thresholds(&cuts);
    let point = estimate_bler_complexity(
        set,
        &stat_policy(kind, observe_rank, levels, thresholds.clone()),
    )?;
    debug_assert_eq!(point.block_errors, errors as u64);
    let feasible = point.bler <= target.max_bler;
    Ok(TuneOutcome { thresholds, point, feasible, feasible_count })
}
