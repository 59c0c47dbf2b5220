//! Chase-2 soft-decision decoding over the bounded-distance core.
//!
//! Test patterns are enumerated as a binary counter `0..2^P` where bit `j`
//! of the counter flips the bit at reliability rank `j` (the j-th least
//! reliable position). Among all bounded-distance successes the candidate
//! with the smallest soft discrepancy versus the hard decision wins; ties
//! go to the lowest counter index. This fixes the tie-break so trial dumps
//! are reproducible bit for bit.

use crate::bch::{is_codeword, solve_syndromes, CodeSpec, Codeword};
use crate::galois::FieldTables;

/// Soft received vector of length n (unitless log-likelihood ratios).
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector {
    pub values: Vec<f64>,
}

impl LlrVector {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        LlrVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Hard decision per the channel model: bit 0 when the LLR is >= 0.
pub fn hard_decision(y: &LlrVector) -> Codeword {
    Codeword::from_bits(y.values.iter().map(|&v| u8::from(v < 0.0)).collect())
}

/// Permutation sorting the LLRs by ascending magnitude, ties broken by
/// ascending original index.
#[derive(Debug, Clone)]
pub struct ReliabilityView {
    /// order[i] = original index of the i-th least reliable LLR.
    pub order: Vec<u16>,
    /// sorted_mag[i] = |y[order[i]]|, non-decreasing.
    pub sorted_mag: Vec<f64>,
}

pub fn sort_reliability(y: &LlrVector) -> ReliabilityView {
    let mut order: Vec<u16> = (0..y.len() as u16).collect();
    order.sort_unstable_by(|&a, &b| {
        let ma = y.values[a as usize].abs();
        let mb = y.values[b as usize].abs();
        ma.partial_cmp(&mb).unwrap().then(a.cmp(&b))
    });
    let sorted_mag = order.iter().map(|&i| y.values[i as usize].abs()).collect();
    ReliabilityView { order, sorted_mag }
}

/// Outcome of a Chase decode.
#[derive(Debug, Clone, PartialEq)]
pub enum ChaseOutcome {
    Decoded {
        word: Codeword,
        /// Sum of |y_i| over positions where `word` differs from the hard
        /// decision.
        soft_discrepancy: f64,
        patterns_tried: usize,
    },
    Failure {
        patterns_tried: usize,
    },
}

/// A bounded-distance success for one test pattern, described as the set of
/// positions where the candidate differs from the hard decision.
#[derive(Debug, Clone)]
pub(crate) struct Candidate {
    /// Sorted positions, at most P + t of them.
    pub diff: Vec<u16>,
    pub discrepancy: f64,
}

/// Evaluates all `2^p_max` test patterns once, returning per-counter-index
/// bounded-distance results. Entry `c` covers the pattern flipping the set
/// of ranks in the binary expansion of `c`, so the prefix `c < 2^P` is
/// exactly the pattern set of a Chase decode at parallelism `P`.
pub(crate) fn evaluate_patterns(
    y: &LlrVector,
    hard: &Codeword,
    view: &ReliabilityView,
    p_max: usize,
    tables: &FieldTables,
) -> Vec<Option<Candidate>> {
    assert!(p_max <= view.order.len());
    let (s1h, s3h) = crate::bch::syndromes(hard, tables);
    let npat = 1usize << p_max;
    // Per-rank syndrome contributions of flipping the rank's position.
    let flip_s1: Vec<u8> = (0..p_max)
        .map(|j| tables.alpha_pow(view.order[j] as usize))
        .collect();
    let flip_s3: Vec<u8> = (0..p_max)
        .map(|j| tables.alpha_pow(3 * view.order[j] as usize))
        .collect();
    // Syndromes of hard + pattern, filled by prefix recurrence on the
    // counter (drop the lowest set bit).
    let mut syn = vec![(s1h, s3h); npat];
    let mut out = Vec::with_capacity(npat);
    let mut pos = [0usize; 2];
    for c in 0..npat {
        if c > 0 {
            let low = c.trailing_zeros() as usize;
            let (p1, p3) = syn[c & (c - 1)];
            syn[c] = (p1 ^ flip_s1[low], p3 ^ flip_s3[low]);
        }
        let (s1, s3) = syn[c];
        let cand = solve_syndromes(s1, s3, tables, &mut pos).map(|nfix| {
            // diff vs hard decision = flipped ranks XOR corrections
            let mut diff: Vec<u16> = (0..p_max)
                .filter(|j| c >> j & 1 != 0)
                .map(|j| view.order[j])
                .collect();
            for &p in pos.iter().take(nfix) {
                let p = p as u16;
                if let Some(at) = diff.iter().position(|&d| d == p) {
                    diff.swap_remove(at);
                } else {
                    diff.push(p);
                }
            }
            diff.sort_unstable();
            let discrepancy = diff.iter().map(|&p| y.values[p as usize].abs()).sum();
            Candidate { diff, discrepancy }
        });
        out.push(cand);
    }
    out
}

/// Index of the winning candidate among counter indices `0..2^p`, by
/// minimum discrepancy then lowest index.
pub(crate) fn select_candidate(cands: &[Option<Candidate>], p: usize) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (c, cand) in cands.iter().enumerate().take(1 << p) {
        if let Some(cand) = cand {
            match best {
                None => best = Some(c),
                Some(b) => {
                    if cand.discrepancy < cands[b].as_ref().unwrap().discrepancy {
                        best = Some(c);
                    }
                }
            }
        }
    }
    best
}

/// Chase-2 decoding with parallelism `P` (2^P test patterns).
pub fn chase_decode(
    y: &LlrVector,
    p: usize,
    spec: &CodeSpec,
    tables: &FieldTables,
) -> ChaseOutcome {
    assert!(p <= y.len());
    let hard = hard_decision(y);
    let view = sort_reliability(y);
    let cands = evaluate_patterns(y, &hard, &view, p, tables);
    match select_candidate(&cands, p) {
        None => ChaseOutcome::Failure { patterns_tried: 1 << p },
        Some(c) => {
            let cand = cands[c].as_ref().unwrap();
            let mut word = hard;
            for &d in &cand.diff {
                word.flip(d as usize);
            }
            debug_assert!(is_codeword(&word, spec));
            ChaseOutcome::Decoded {
                word,
                soft_discrepancy: cand.discrepancy,
                patterns_tried: 1 << p,
            }
        }
    }
}

/// Per-P success flags against the transmitted codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerPSuccessMask {
    /// mask[p] = true iff chase_decode at parallelism p returns exactly the
    /// transmitted codeword.
    pub mask: Vec<bool>,
}

impl PerPSuccessMask {
    /// Smallest P whose flag is true, or `None` when no P <= P_max recovers
    /// the transmitted word.
    pub fn min_required_p(&self) -> Option<usize> {
        self.mask.iter().position(|&s| s)
    }
}

/// Evaluates, for every P in `0..=p_max`, whether Chase decoding recovers
/// the transmitted codeword. All `2^p_max` patterns are bounded-distance
/// decoded once; each P reads the counter prefix `c < 2^P`.
pub fn min_required_p(
    y: &LlrVector,
    transmitted: &Codeword,
    p_max: usize,
    spec: &CodeSpec,
    tables: &FieldTables,
) -> PerPSuccessMask {
    debug_assert_eq!(y.len(), spec.n);
    let hard = hard_decision(y);
    let view = sort_reliability(y);
    let cands = evaluate_patterns(y, &hard, &view, p_max, tables);
    // transmitted as a diff-from-hard set
    let mut tx_diff: Vec<u16> = hard
        .bits
        .iter()
        .zip(&transmitted.bits)
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i as u16)
        .collect();
    tx_diff.sort_unstable();
    let mask = (0..=p_max)
        .map(|p| match select_candidate(&cands, p) {
            None => false,
            Some(c) => cands[c].as_ref().unwrap().diff == tx_diff,
        })
        .collect();
    PerPSuccessMask { mask }
}
