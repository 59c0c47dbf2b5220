//! ORBGRAND decoding: logistic-weight pattern book, pattern application in
//! reliability order, first-valid-codeword search with abandonment.
//!
//! A pattern is a set of distinct 1-based reliability ranks; its logistic
//! weight is the sum of those ranks. The book enumerates all partitions of
//! w = 1..w_max into distinct parts, ascending in w and, within a weight,
//! by ascending number of parts then lexicographically on the part
//! sequence: for w = 6 that is {6}, {1,5}, {2,4}, {1,2,3}. The paper never
//! fixes the intra-weight order; this canonical order makes truncation to
//! an exact pattern count deterministic.

use crate::bch::{syndromes, CodeSpec, Codeword};
use crate::chase::{LlrVector, ReliabilityView};
use crate::galois::FieldTables;
use crate::{Error, Result};

/// One bit-flipping pattern: strictly increasing 1-based reliability ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogisticPattern {
    pub parts: Vec<u16>,
}

impl LogisticPattern {
    pub fn weight(&self) -> u32 {
        self.parts.iter().map(|&p| p as u32).sum()
    }
}

/// Ordered pattern book; the empty (zero-flip) pattern is not stored, the
/// hard-decision membership check is implicit.
#[derive(Debug, Clone)]
pub struct PatternBook {
    pub patterns: Vec<LogisticPattern>,
    pub weights: Vec<u32>,
}

impl PatternBook {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Number of patterns with weight <= w.
    pub fn cumulative_count(&self, w: u32) -> usize {
        self.weights.iter().take_while(|&&x| x <= w).count()
    }
}

/// Enumerates partitions of `w` into distinct parts (each <= max_part) in
/// canonical order: ascending number of parts, then lexicographic.
fn partitions_into_distinct_parts(w: u32, max_part: u32) -> Vec<Vec<u16>> {
    let mut out: Vec<Vec<u16>> = Vec::new();
    let mut stack: Vec<u16> = Vec::new();
    fn rec(rem: u32, min_part: u32, max_part: u32, stack: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if rem == 0 {
            out.push(stack.clone());
            return;
        }
        for p in min_part..=rem.min(max_part) {
            stack.push(p as u16);
            rec(rem - p, p + 1, max_part, stack, out);
            stack.pop();
        }
    }
    rec(w, 1, max_part, &mut stack, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Builds the pattern book: all distinct-part partitions of w = 1..=w_max
/// with parts bounded by the code length, truncated to `max_count`
/// patterns.
pub fn generate_pattern_book(w_max: u32, max_count: usize, n: usize) -> Result<PatternBook> {
    if w_max < 1 {
        return Err(Error::arg("pattern book needs w_max >= 1"));
    }
    if max_count == 0 {
        return Err(Error::arg("pattern book needs max_count >= 1"));
    }
    let mut patterns = Vec::new();
    let mut weights = Vec::new();
    'outer: for w in 1..=w_max {
        for parts in partitions_into_distinct_parts(w, w.min(n as u32)) {
            patterns.push(LogisticPattern { parts });
            weights.push(w);
            if patterns.len() == max_count {
                break 'outer;
            }
        }
    }
    Ok(PatternBook { patterns, weights })
}

/// Flips, for each part j, the bit at the j-th least reliable position.
pub fn apply_pattern(
    hard: &Codeword,
    view: &ReliabilityView,
    pattern: &LogisticPattern,
) -> Result<Codeword> {
    let mut word = hard.clone();
    for &part in &pattern.parts {
        let rank = part as usize;
        if rank == 0 || rank > view.order.len() {
            return Err(Error::arg(format!(
                "pattern rank {rank} outside 1..={}",
                view.order.len()
            )));
        }
        word.flip(view.order[rank - 1] as usize);
    }
    Ok(word)
}

/// Outcome of an ORBGRAND decode.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbOutcome {
    Decoded {
        word: Codeword,
        /// Number of book patterns applied before success; 0 means the hard
        /// decision itself was a codeword.
        patterns_consumed: usize,
    },
    Abandoned {
        patterns_consumed: usize,
    },
}

/// ORBGRAND decoding with a budget of `n_pat` book patterns.
pub fn orbgrand_decode(
    y: &LlrVector,
    book: &PatternBook,
    n_pat: usize,
    spec: &CodeSpec,
    tables: &FieldTables,
) -> OrbOutcome {
    assert!(n_pat <= book.len());
    let hard = crate::chase::hard_decision(y);
    let view = crate::chase::sort_reliability(y);
    let (s1h, s3h) = syndromes(&hard, tables);
    if s1h == 0 && s3h == 0 {
        return OrbOutcome::Decoded { word: hard, patterns_consumed: 0 };
    }
    for (idx, pattern) in book.patterns.iter().take(n_pat).enumerate() {
        let mut s1 = s1h;
        let mut s3 = s3h;
        for &part in &pattern.parts {
            let pos = view.order[part as usize - 1] as usize;
            s1 ^= tables.alpha_pow(pos);
            s3 ^= tables.alpha_pow(3 * pos);
        }
        if s1 == 0 && s3 == 0 {
            let word = apply_pattern(&hard, &view, pattern).expect("parts already checked");
            debug_assert!(crate::bch::is_codeword(&word, spec));
            return OrbOutcome::Decoded { word, patterns_consumed: idx + 1 };
        }
    }
    OrbOutcome::Abandoned { patterns_consumed: n_pat }
}

/// Per-trial ORBGRAND oracle: smallest pattern index recovering the
/// transmitted word and smallest index yielding any valid codeword, with
/// index 0 standing for the hard decision itself. A decode with budget
/// `n_pat` succeeds in the BLER sense iff `idx_any_valid <= n_pat` and
/// `idx_any_valid == idx_true`.
pub fn first_success_indices(
    y: &LlrVector,
    transmitted: &Codeword,
    book: &PatternBook,
    spec: &CodeSpec,
    tables: &FieldTables,
) -> (Option<usize>, Option<usize>) {
    debug_assert_eq!(y.len(), spec.n);
    let hard = crate::chase::hard_decision(y);
    let view = crate::chase::sort_reliability(y);
    let (s1h, s3h) = syndromes(&hard, tables);
    // error ranks: reliability ranks (1-based) whose position differs from
    // the transmitted word
    let mut err_ranks: Vec<u16> = view
        .order
        .iter()
        .enumerate()
        .filter(|(_, &pos)| hard.bits[pos as usize] != transmitted.bits[pos as usize])
        .map(|(rank, _)| rank as u16 + 1)
        .collect();
    err_ranks.sort_unstable();

    let mut idx_true: Option<usize> = None;
    let mut idx_any: Option<usize> = None;
    if s1h == 0 && s3h == 0 {
        idx_any = Some(0);
    }
    if err_ranks.is_empty() {
        idx_true = Some(0);
    }
    for (i, pattern) in book.patterns.iter().enumerate() {
        if idx_true.is_some() && idx_any.is_some() {
            break;
        }
        let idx = i + 1;
        if idx_true.is_none() && pattern.parts == err_ranks {
            idx_true = Some(idx);
            if idx_any.is_none() {
                idx_any = Some(idx);
            }
            break;
        }
        if idx_any.is_none() {
            let mut s1 = s1h;
            let mut s3 = s3h;
            for &part in &pattern.parts {
                let pos = view.order[part as usize - 1] as usize;
                s1 ^= tables.alpha_pow(pos);
                s3 ^= tables.alpha_pow(3 * pos);
            }
            if s1 == 0 && s3 == 0 {
                idx_any = Some(idx);
            }
        }
    }
    (idx_true, idx_any)
}
