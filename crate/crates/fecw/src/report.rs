//! Deterministic artifact emission: CSV reports, the trial-records file,
//! and the JSON run manifest.
//!
//! Formatting is pinned so identical data always yields identical bytes:
//! LLR-scale statistics print with 6 decimals, probabilities/fractions
//! with 6 significant digits, and record files use serde_json's
//! shortest-round-trip float rendering. All writes go through a
//! write-then-rename step so a crash never leaves a half-written file.

use crate::bch::CodeSpec;
use crate::orbgrand::PatternBook;
use crate::sim::{
    BlerComplexityPoint, DistributionStats, MinPHistogram, RecordSet, TrialRecord,
};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

/// Writes bytes via a sibling temporary file and an atomic rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    std::fs::write(tmp.path(), bytes).map_err(|e| io_err(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

/// 6 significant digits for probabilities and fractions.
pub fn fmt_fraction(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let decimals = (5 - x.abs().log10().floor() as i64).max(0) as usize;
    format!("{x:.decimals$}")
}

/// 6 decimals for LLR-scale statistics, thresholds and percentages.
pub fn fmt_stat(x: f64) -> String {
    format!("{x:.6}")
}

/// BLER/complexity points, one CSV row per operating point.
pub fn bler_csv(points: &[BlerComplexityPoint]) -> String {
    let max_levels = points.iter().map(|p| p.deltas.len()).max().unwrap_or(0);
    let mut out = String::from("ebn0_db,bler,bler_ci,complexity_pct,trials,block_errors,low_confidence");
    for i in 0..max_levels {
        let _ = write!(out, ",delta_{i}");
    }
    out.push('\n');
    for p in points {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_stat(p.ebn0_db),
            fmt_fraction(p.bler),
            fmt_fraction(p.bler_ci),
            fmt_stat(p.complexity_pct),
            p.trials,
            p.block_errors,
            p.low_confidence
        );
        for i in 0..max_levels {
            match p.deltas.get(i) {
                Some(&d) => {
                    let _ = write!(out, ",{}", fmt_fraction(d));
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

/// Minimum-required-parallelism histogram, one row per P plus the
/// uncorrectable bucket.
pub fn table1_csv(hist: &MinPHistogram) -> String {
    let mut out = String::from("p,fraction\n");
    for (p, &f) in hist.fractions.iter().enumerate() {
        let _ = writeln!(out, "{p},{}", fmt_fraction(f));
    }
    let _ = writeln!(out, "uncorrectable,{}", fmt_fraction(hist.uncorrectable));
    out
}

/// Conditional sorted-magnitude means, one row per (bucket, rank).
pub fn dist_csv(stats: &[DistributionStats]) -> String {
    let mut out = String::from("min_p,rank,mean_mag,mean_diff,samples\n");
    for bucket in stats {
        for i in 0..bucket.mean_mag.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                bucket.condition_min_p,
                i,
                fmt_stat(bucket.mean_mag[i]),
                fmt_stat(bucket.mean_diff[i]),
                bucket.sample_count
            );
        }
    }
    out
}

/// Pattern book dump: query index, logistic weight, and `+`-joined
/// 1-based flipped ranks. Index 0 is the empty pattern (the hard decision
/// itself); stored patterns follow at index i + 1, matching the indices
/// reported by the decoder.
pub fn patterns_csv(book: &PatternBook) -> String {
    let mut out = String::from("index,weight,parts\n0,0,\n");
    for (i, pat) in book.patterns.iter().enumerate() {
        let parts: Vec<String> = pat.parts.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(out, "{},{},{}", i + 1, book.weights[i], parts.join("+"));
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordFileHeader {
    ebn0_db: f64,
    seed: u64,
    chase_p_max: Option<usize>,
    orb_book_len: Option<usize>,
    gamma_grid: Vec<f64>,
    prefix_len: usize,
    trials: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordLine {
    i: u64,
    /// Per-P success flags packed into a bit mask, bit p = success at P=p.
    m: Option<u32>,
    t: Option<u32>,
    a: Option<u32>,
    s: Vec<f64>,
    c: Vec<u32>,
}

/// Serializes a record set as JSON Lines: one metadata header line, then
/// one line per trial. Floats use shortest-round-trip rendering, so
/// re-reading reproduces the exact in-memory values.
pub fn records_jsonl(set: &RecordSet) -> String {
    let header = RecordFileHeader {
        ebn0_db: set.ebn0_db,
        seed: set.seed,
        chase_p_max: set.chase_p_max,
        orb_book_len: set.orb_book_len,
        gamma_grid: set.gamma_grid.clone(),
        prefix_len: set.prefix_len,
        trials: set.records.len() as u64,
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for rec in &set.records {
        let line = RecordLine {
            i: rec.trial_index,
            m: rec.chase_mask.as_ref().map(|mask| {
                mask.mask
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (p, &ok)| acc | ((ok as u32) << p))
            }),
            t: rec.orb_idx_true,
            a: rec.orb_idx_any_valid,
            s: rec.sorted_mag_prefix.clone(),
            c: rec.count_below_gamma.clone(),
        };
        out.push_str(&serde_json::to_string(&line).expect("record serializes"));
        out.push('\n');
    }
    out
}

/// Inverse of [`records_jsonl`].
pub fn parse_records_jsonl(text: &str) -> Result<RecordSet> {
    let mut lines = text.lines();
    let header: RecordFileHeader = serde_json::from_str(
        lines.next().ok_or_else(|| Error::Io("records file is empty".into()))?,
    )
    .map_err(|e| Error::Io(format!("records header: {e}")))?;
    let mut records = Vec::with_capacity(header.trials as usize);
    for line in lines {
        let rl: RecordLine =
            serde_json::from_str(line).map_err(|e| Error::Io(format!("records line: {e}")))?;
        records.push(TrialRecord {
            trial_index: rl.i,
            chase_mask: match (rl.m, header.chase_p_max) {
                (Some(bits), Some(p_max)) => Some(crate::chase::PerPSuccessMask {
                    mask: (0..=p_max).map(|p| bits >> p & 1 == 1).collect(),
                }),
                _ => None,
            },
            orb_idx_true: rl.t,
            orb_idx_any_valid: rl.a,
            sorted_mag_prefix: rl.s,
            count_below_gamma: rl.c,
        });
    }
    if records.len() as u64 != header.trials {
        return Err(Error::Io(format!(
            "records file truncated: header says {} trials, found {}",
            header.trials,
            records.len()
        )));
    }
    Ok(RecordSet {
        ebn0_db: header.ebn0_db,
        seed: header.seed,
        chase_p_max: header.chase_p_max,
        orb_book_len: header.orb_book_len,
        gamma_grid: header.gamma_grid,
        prefix_len: header.prefix_len,
        records,
    })
}

pub fn load_records(path: &Path) -> Result<RecordSet> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_records_jsonl(&text)
}

/// Run manifest: what was run, with which inputs, producing which files.
/// Emitted even when the run fails, with the failure cause recorded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub seed: u64,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_cause: Option<String>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        let mut body = serde_json::to_string_pretty(self).expect("manifest serializes");
        body.push('\n');
        write_atomic(&path, body.as_bytes())?;
        Ok(path)
    }
}

/// Summary of a code specification for human-readable output.
pub fn code_label(spec: &CodeSpec) -> String {
    format!("BCH({}, {}) t={}", spec.n, spec.k, spec.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chase::PerPSuccessMask;

    #[test]
    fn fraction_formatting_keeps_six_significant_digits() {
        assert_eq!(fmt_fraction(0.9653666), "0.965367");
        assert_eq!(fmt_fraction(0.0123456789), "0.0123457");
        assert_eq!(fmt_fraction(0.000001234567), "0.00000123457");
        assert_eq!(fmt_fraction(0.0), "0");
        assert_eq!(fmt_fraction(1.0), "1.00000");
        assert_eq!(fmt_stat(30.456789123), "30.456789");
    }

    #[test]
    fn empty_point_set_yields_header_only_csv() {
        let csv = bler_csv(&[]);
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("ebn0_db,bler,"));
    }

    #[test]
    fn bler_csv_rows_are_stable() {
        let point = BlerComplexityPoint {
            ebn0_db: 6.5,
            bler: 0.00123456,
            bler_ci: 0.0001,
            complexity_pct: 30.5,
            deltas: vec![0.875, 0.125],
            trials: 1000,
            block_errors: 12,
            low_confidence: true,
        };
        let csv = bler_csv(&[point.clone()]);
        assert_eq!(csv, bler_csv(&[point]));
        let row = csv.lines().nth(1).unwrap();
        assert_eq!(
            row,
            "6.500000,0.00123456,0.000100000,30.500000,1000,12,true,0.875000,0.125000"
        );
    }

    #[test]
    fn table1_csv_includes_uncorrectable_bucket() {
        let hist = MinPHistogram {
            fractions: vec![0.9654, 0.0255, 0.0066],
            uncorrectable: 0.0025,
            trials: 10000,
        };
        let csv = table1_csv(&hist);
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.ends_with("uncorrectable,0.00250000\n"));
    }

    fn sample_set() -> RecordSet {
        RecordSet {
            ebn0_db: 6.5,
            seed: 9,
            chase_p_max: Some(3),
            orb_book_len: Some(500),
            gamma_grid: vec![4.5, 7.0],
            prefix_len: 2,
            records: vec![
                TrialRecord {
                    trial_index: 0,
                    chase_mask: Some(PerPSuccessMask { mask: vec![true, true, true, true] }),
                    orb_idx_true: Some(0),
                    orb_idx_any_valid: Some(0),
                    sorted_mag_prefix: vec![0.12345678901234, 7.5],
                    count_below_gamma: vec![3, 10],
                },
                TrialRecord {
                    trial_index: 1,
                    chase_mask: Some(PerPSuccessMask { mask: vec![false, false, true, true] }),
                    orb_idx_true: None,
                    orb_idx_any_valid: Some(17),
                    sorted_mag_prefix: vec![0.5, 1.0 / 3.0],
                    count_below_gamma: vec![0, 2],
                },
            ],
        }
    }

    #[test]
    fn records_round_trip_is_exact() {
        let set = sample_set();
        let text = records_jsonl(&set);
        let back = parse_records_jsonl(&text).unwrap();
        assert_eq!(back.records, set.records);
        assert_eq!(back.gamma_grid, set.gamma_grid);
        assert_eq!(back.chase_p_max, set.chase_p_max);
        // bytes are reproducible too
        assert_eq!(records_jsonl(&back), text);
    }

    #[test]
    fn truncated_records_file_is_an_io_error() {
        let set = sample_set();
        let text = records_jsonl(&set);
        let cut = text.lines().take(2).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_records_jsonl(&cut), Err(Error::Io(_))));
    }

    #[test]
    fn manifest_round_trips_and_writes_atomically() {
        let manifest = RunManifest {
            config_digest: "ab".repeat(32),
            seed: 5,
            tool_version: "0.1.0".into(),
            started_at: "2026-01-01T00:00:00Z".into(),
            finished_at: "2026-01-01T00:00:01Z".into(),
            outputs: vec!["bler.csv".into()],
            status: "success".into(),
            failure_cause: None,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = manifest.write(dir.path()).unwrap();
        let back: RunManifest =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(back.config_digest, manifest.config_digest);
        assert_eq!(back.outputs, manifest.outputs);
        assert_eq!(back.failure_cause, None);
    }

    #[test]
    fn patterns_csv_lists_parts_in_book_order() {
        let book = crate::orbgrand::generate_pattern_book(3, usize::MAX, 255).unwrap();
        let csv = patterns_csv(&book);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,weight,parts");
        assert_eq!(lines[1], "0,0,");
        assert_eq!(lines[2], "1,1,1");
        assert_eq!(lines[3], "2,2,2");
        assert_eq!(lines[4], "3,3,3");
        assert_eq!(lines[5], "4,3,1+2");
    }
}
