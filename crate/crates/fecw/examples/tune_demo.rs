//! Threshold tuning: record a trial batch once, then find the M-IDA
//! threshold that minimizes complexity without exceeding the BLER of
//! fixed Chase P = 4 on the same records.

use fecw::bch::CodeSpec;
use fecw::galois::FieldTables;
use fecw::policy::{ParallelismLevel, SelectorKind};
use fecw::sim::{estimate_bler_complexity, run_trials, ChannelConfig, EvalPolicy, OracleConfig};
use fecw::tuner::{sweep_single_threshold, TuneTarget};

fn main() {
    let spec = CodeSpec::bch_255_239();
    let tables = FieldTables::build(spec.field_poly).unwrap();
    let oracle = OracleConfig {
        chase_p_max: Some(5),
        orb_book: None,
        gamma_grid: vec![],
        prefix_len: 8,
        all_zero_messages: false,
    };
    let channel = ChannelConfig::new(6.0, 239.0 / 255.0, 5).unwrap();
    let set = run_trials(&spec, &tables, &channel, 50_000, &oracle);

    let p4 = ParallelismLevel::chase_p(4);
    let reference = estimate_bler_complexity(&set, &EvalPolicy::fixed(p4, p4)).unwrap();
    let target = TuneTarget::from_reference(&reference, 1.0);
    println!(
        "reference: fixed Chase P=4, BLER {:.3e} ({} block errors)",
        reference.bler, reference.block_errors
    );

    let out = sweep_single_threshold(
        &set,
        SelectorKind::M,
        4,
        [ParallelismLevel::chase_p(3), ParallelismLevel::chase_p(5)],
        target,
        &[],
    )
    .unwrap();
    println!(
        "tuned M-IDA threshold {:.4}: BLER {:.3e}, complexity {:.2}%, feasible={} ({} candidates met the ceiling)",
        out.thresholds[0], out.point.bler, out.point.complexity_pct, out.feasible, out.feasible_count
    );
}
