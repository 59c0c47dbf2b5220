//! Pipeline orchestration: configuration in, CSV/JSON artifacts and a run
//! manifest out.
//!
//! A run simulates every configured E_b/N_0 point once at full oracle
//! depth, then derives all requested artifacts from the records. The
//! manifest is written even when the pipeline fails partway, with the
//! failure cause and whatever outputs were completed.

use crate::config::{EmitKind, RunConfig};
use crate::orbgrand::{generate_pattern_book, PatternBook};
use crate::report::{
    bler_csv, dist_csv, patterns_csv, records_jsonl, table1_csv, write_atomic, RunManifest,
};
use crate::sim::{
    estimate_bler_complexity, minp_table, reliability_distributions, run_trials,
    BlerComplexityPoint, ChannelConfig, EvalPolicy, OracleConfig, RecordSet,
};
use crate::tuner::{sweep_multi_threshold, sweep_single_threshold, TuneTarget};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn point_file(kind: &str, ebn0_db: f64, ext: &str) -> String {
    format!("{kind}_{ebn0_db:.2}dB.{ext}")
}

/// Completed run: the manifest plus the paths it lists.
#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub outputs: Vec<PathBuf>,
}

fn build_oracle(cfg: &RunConfig) -> Result<OracleConfig> {
    let orb_book = match cfg.record.orb_w_max {
        None => None,
        Some(w_max) => Some(Arc::new(generate_pattern_book(
            w_max,
            cfg.record.orb_max_patterns.unwrap_or(usize::MAX),
            cfg.code.n,
        )?)),
    };
    Ok(OracleConfig {
        chase_p_max: cfg.record.chase_p_max,
        orb_book,
        gamma_grid: cfg.record.gamma_grid.clone(),
        prefix_len: cfg.record.prefix_len,
        all_zero_messages: cfg.record.all_zero,
    })
}

/// Simulates one configured E_b/N_0 point.
pub fn simulate_point(cfg: &RunConfig, ebn0_db: f64) -> Result<RecordSet> {
    let spec = cfg.code.to_spec()?;
    let tables = crate::galois::FieldTables::build(spec.field_poly)?;
    let oracle = build_oracle(cfg)?;
    let channel = ChannelConfig::new(ebn0_db, cfg.rate(), cfg.channel.seed)?;
    Ok(run_trials(&spec, &tables, &channel, cfg.channel.trials, &oracle))
}

fn emit_for_point(
    cfg: &RunConfig,
    set: &RecordSet,
    policy: Option<&EvalPolicy>,
    out_dir: &Path,
    outputs: &mut Vec<PathBuf>,
    points: &mut Vec<BlerComplexityPoint>,
) -> Result<()> {
    for emit in &cfg.output.emit {
        match emit {
            EmitKind::Bler => {
                let policy = policy.ok_or_else(|| {
                    Error::config("output.emit includes \"bler\" but no [policy] is configured")
                })?;
                points.push(estimate_bler_complexity(set, policy)?);
            }
            EmitKind::Table1 => {
                let path = out_dir.join(point_file("table1", set.ebn0_db, "csv"));
                write_atomic(&path, table1_csv(&minp_table(set)?).as_bytes())?;
                outputs.push(path);
            }
            EmitKind::Dist => {
                let stats = reliability_distributions(set, set.prefix_len - 1)?;
                let path = out_dir.join(point_file("dist", set.ebn0_db, "csv"));
                write_atomic(&path, dist_csv(&stats).as_bytes())?;
                outputs.push(path);
            }
            EmitKind::Records => {
                let path = out_dir.join(point_file("records", set.ebn0_db, "jsonl"));
                write_atomic(&path, records_jsonl(set).as_bytes())?;
                outputs.push(path);
            }
            EmitKind::Patterns => {} // not per-point; handled once below
        }
    }
    Ok(())
}

fn run_pipeline(cfg: &RunConfig, out_dir: &Path, outputs: &mut Vec<PathBuf>) -> Result<()> {
    let policy = cfg.policy.as_ref().map(|p| p.to_eval_policy()).transpose()?;
    if cfg.output.emit.contains(&EmitKind::Patterns) {
        let w_max = cfg.record.orb_w_max.ok_or_else(|| {
            Error::config("output.emit includes \"patterns\" but record.orb_w_max is unset")
        })?;
        let book = generate_pattern_book(
            w_max,
            cfg.record.orb_max_patterns.unwrap_or(usize::MAX),
            cfg.code.n,
        )?;
        let path = out_dir.join("patterns.csv");
        write_atomic(&path, patterns_csv(&book).as_bytes())?;
        outputs.push(path);
    }
    let mut points = Vec::new();
    for &ebn0_db in &cfg.channel.ebn0_db {
        let set = simulate_point(cfg, ebn0_db)?;
        emit_for_point(cfg, &set, policy.as_ref(), out_dir, outputs, &mut points)?;
    }
    if cfg.output.emit.contains(&EmitKind::Bler) {
        let path = out_dir.join("bler.csv");
        write_atomic(&path, bler_csv(&points).as_bytes())?;
        outputs.push(path);
    }
    Ok(())
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::config(format!("workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Executes a full simulate → aggregate → emit run and writes the
/// manifest. On pipeline failure the manifest is still written (listing
/// the failure cause and any completed outputs) before the error is
/// returned.
pub fn execute_run(cfg: &RunConfig, workers: Option<usize>) -> Result<RunOutcome> {
    cfg.validate()?;
    let out_dir = PathBuf::from(&cfg.output.dir);
    let started_at = timestamp();
    let mut outputs = Vec::new();
    let result = with_pool(workers, || run_pipeline(cfg, &out_dir, &mut outputs))
        .and_then(|inner| inner);
    let manifest = RunManifest {
        config_digest: cfg.digest(),
        seed: cfg.channel.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        finished_at: timestamp(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        status: match &result {
            Ok(()) => "success".into(),
            Err(_) => "failure".into(),
        },
        failure_cause: result.as_ref().err().map(|e| e.to_string()),
    };
    let manifest_write = manifest.write(&out_dir);
    result?;
    manifest_write?;
    Ok(RunOutcome { manifest, outputs })
}

/// JSON payload emitted by a tune run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TuneReport {
    pub thresholds: Vec<f64>,
    pub bler: f64,
    pub bler_ci: f64,
    pub complexity_pct: f64,
    pub feasible: bool,
    pub feasible_count: usize,
    pub target_max_bler: f64,
    pub reference_bler: f64,
}

/// Tunes thresholds against an existing record set and writes
/// `tune.json`. The BLER ceiling is the measured BLER of the configured
/// reference level on the same records, times the slack factor.
pub fn execute_tune(cfg: &RunConfig, set: &RecordSet, out_dir: &Path) -> Result<TuneReport> {
    let tune = cfg
        .tune
        .as_ref()
        .ok_or_else(|| Error::config("tune requested but the [tune] section is missing"))?;
    let kind = tune.selector_kind()?;
    let reference_level = tune.reference();
    let reference =
        estimate_bler_complexity(set, &EvalPolicy::fixed(reference_level, reference_level))?;
    let target = TuneTarget::from_reference(&reference, tune.bler_slack);
    let ladder = tune.ladder();
    let outcome = if ladder.len() == 2 {
        sweep_single_threshold(
            set,
            kind,
            tune.observe_rank,
            [ladder[0], ladder[1]],
            target,
            &tune.extra_thresholds,
        )?
    } else {
        sweep_multi_threshold(set, kind, tune.observe_rank, &ladder, target, &tune.extra_thresholds)?
    };
    let report = TuneReport {
        thresholds: outcome.thresholds,
        bler: outcome.point.bler,
        bler_ci: outcome.point.bler_ci,
        complexity_pct: outcome.point.complexity_pct,
        feasible: outcome.feasible,
        feasible_count: outcome.feasible_count,
        target_max_bler: target.max_bler,
        reference_bler: reference.bler,
    };
    let mut body = serde_json::to_string_pretty(&report).expect("report serializes");
    body.push('\n');
    write_atomic(&out_dir.join("tune.json"), body.as_bytes())?;
    Ok(report)
}

/// Builds the ORBGRAND pattern book requested by the configuration; used
/// by the standalone `patterns` emission path.
pub fn build_book(cfg: &RunConfig) -> Result<PatternBook> {
    let w_max = cfg
        .record
        .orb_w_max
        .ok_or_else(|| Error::config("record.orb_w_max: required to build the pattern book"))?;
    generate_pattern_book(
        w_max,
        cfg.record.orb_max_patterns.unwrap_or(usize::MAX),
        cfg.code.n,
    )
}
