//! Systematic BCH(255, 239) encoding and bounded-distance decoding:
//! encode a random message, inject two bit errors, and recover them.

use fecw::bch::{bd_decode, encode, extract_message, BdOutcome, CodeSpec};
use fecw::galois::FieldTables;
use rand::prelude::*;

fn main() {
    let spec = CodeSpec::bch_255_239();
    let tables = FieldTables::build(spec.field_poly).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);

    let message: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
    let codeword = encode(&message, &spec).unwrap();
    println!("codeword (hex, LSB-first): {}", codeword.to_hex());

    let mut received = codeword.clone();
    let (e1, e2) = (17, 203);
    received.flip(e1);
    received.flip(e2);

    match bd_decode(&received, &spec, &tables) {
        BdOutcome::Corrected { word, num_flips } => {
            println!("corrected {num_flips} errors (injected at positions {e1} and {e2})");
            assert_eq!(word, codeword);
            assert_eq!(extract_message(&word, &spec), message);
            println!("message recovered exactly");
        }
        BdOutcome::Failure => unreachable!("two errors are within the t = 2 bound"),
    }
}
