//! Adaptive-parallelism selectors evaluated offline: simulate a batch of
//! trials once at full oracle depth, then compare fixed, IDA, M-IDA and
//! MD-IDA policies on the same records.

use fecw::bch::CodeSpec;
use fecw::galois::FieldTables;
use fecw::policy::{ParallelismLevel, SelectorKind};
use fecw::sim::{
    estimate_bler_complexity, run_trials, ChannelConfig, EvalPolicy, OracleConfig, SelectRule,
};

fn main() {
    let spec = CodeSpec::bch_255_239();
    let tables = FieldTables::build(spec.field_poly).unwrap();
    let channel = ChannelConfig::new(6.0, 239.0 / 255.0, 17).unwrap();
    let oracle = OracleConfig {
        chase_p_max: Some(5),
        orb_book: None,
        gamma_grid: vec![4.5],
        prefix_len: 8,
        all_zero_messages: false,
    };
    let set = run_trials(&spec, &tables, &channel, 20_000, &oracle);

    let low = ParallelismLevel::chase_p(3);
    let high = ParallelismLevel::chase_p(5);
    let policies = [
        ("fixed P=5    ", EvalPolicy::fixed(high, high)),
        (
            "IDA          ",
            EvalPolicy {
                levels: vec![low, high],
                rule: SelectRule::CountBelow { gamma: 4.5, phi: 7 },
            },
        ),
        (
            "M-IDA        ",
            EvalPolicy {
                levels: vec![low, high],
                rule: SelectRule::Stat {
                    kind: SelectorKind::M,
                    observe_rank: 4,
                    thresholds: vec![3.0],
                },
            },
        ),
        (
            "MD-IDA       ",
            EvalPolicy {
                levels: vec![low, high],
                rule: SelectRule::Stat {
                    kind: SelectorKind::Md,
                    observe_rank: 4,
                    thresholds: vec![2.2],
                },
            },
        ),
    ];

    println!("policy         BLER       complexity  level fractions");
    for (name, policy) in policies {
        let point = estimate_bler_complexity(&set, &policy).unwrap();
        println!(
            "{name} {:.3e}  {:6.2}%     {:?}",
            point.bler, point.complexity_pct, point.deltas
        );
    }
}
