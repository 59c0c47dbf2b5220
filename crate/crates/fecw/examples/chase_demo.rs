//! Chase-2 decoding over a noisy AWGN channel: transmit one codeword,
//! then decode it with growing parallelism and show the smallest P that
//! recovers it.

use fecw::bch::{encode, CodeSpec};
use fecw::chase::{chase_decode, min_required_p, ChaseOutcome};
use fecw::galois::FieldTables;
use fecw::sim::{transmit, trial_rng, ChannelConfig};
use rand::Rng;

fn main() {
    let spec = CodeSpec::bch_255_239();
    let tables = FieldTables::build(spec.field_poly).unwrap();
    let channel = ChannelConfig::new(5.0, 239.0 / 255.0, 42).unwrap();

    // scan trials until one needs soft information (P >= 1)
    for trial in 0..500u64 {
        let mut rng = trial_rng(channel.seed, trial);
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
        let sent = encode(&msg, &spec).unwrap();
        let y = transmit(&sent, &channel, &mut rng);

        let mask = min_required_p(&y, &sent, 6, &spec, &tables);
        let Some(min_p) = mask.min_required_p() else { continue };
        if min_p == 0 {
            continue;
        }
        println!("trial {trial}: minimum required P = {min_p}");
        for p in 0..=min_p {
            match chase_decode(&y, p, &spec, &tables) {
                ChaseOutcome::Decoded { word, patterns_tried, soft_discrepancy } => {
                    let correct = word == sent;
                    println!(
                        "  P = {p}: decoded ({patterns_tried} patterns, discrepancy {soft_discrepancy:.3}) -> {}",
                        if correct { "transmitted word" } else { "a different codeword" }
                    );
                }
                ChaseOutcome::Failure { patterns_tried } => {
                    println!("  P = {p}: no candidate among {patterns_tried} patterns");
                }
            }
        }
        return;
    }
    println!("no trial needed P >= 1; raise the noise level");
}
