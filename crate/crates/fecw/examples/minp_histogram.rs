//! Minimum-required-parallelism histogram: how often Chase decoding
//! actually needs each P at a given channel quality.

use fecw::bch::CodeSpec;
use fecw::galois::FieldTables;
use fecw::sim::{minp_table, run_trials, ChannelConfig, OracleConfig};

fn main() {
    let spec = CodeSpec::bch_255_239();
    let tables = FieldTables::build(spec.field_poly).unwrap();
    let oracle = OracleConfig {
        chase_p_max: Some(6),
        orb_book: None,
        gamma_grid: vec![],
        prefix_len: 8,
        all_zero_messages: false,
    };
    let channel = ChannelConfig::new(6.5, 239.0 / 255.0, 99).unwrap();
    let set = run_trials(&spec, &tables, &channel, 50_000, &oracle);
    let hist = minp_table(&set).unwrap();

    println!("minimum required P over {} trials at 6.5 dB:", hist.trials);
    for (p, frac) in hist.fractions.iter().enumerate() {
        println!("  P = {p}: {:8.4}%", 100.0 * frac);
    }
    println!("  none : {:8.4}% (uncorrectable within P <= 6)", 100.0 * hist.uncorrectable);
}
