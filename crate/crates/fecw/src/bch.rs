//! BCH(255,239,2) systematic encoding and bounded-distance hard decoding.
//!
//! Bit index `i` of a [`Codeword`] is the coefficient of `x^i`; the message
//! occupies the `k` high-order positions `n-k..n` and the parity (remainder
//! of `x^{n-k} m(x)` modulo the generator) the low-order positions.
//!
//! The t=2 decoder uses Peterson's direct solution of the error locator
//! (sigma1 = S1, sigma2 = (S3 + S1^3)/S1) with root finding by Chien search
//! over all positions.

use crate::galois::{FieldTables, FIELD_ORDER};
use crate::{Error, Result};

/// Code parameters for a binary BCH code decodable by the t=2 Peterson path.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    /// Generator polynomial as a bit mask, bit i = coefficient of x^i.
    pub gen_poly: u32,
    /// Field polynomial as a 9-bit mask.
    pub field_poly: u16,
}

impl CodeSpec {
    /// Validates degree(gen_poly) = n-k and gen_poly | x^n - 1 over GF(2).
    pub fn new(n: usize, k: usize, t: usize, gen_poly: u32, field_poly: u16) -> Result<Self> {
        let deg = 31 - gen_poly.leading_zeros() as usize;
        if gen_poly == 0 || deg != n - k {
            return Err(Error::arg(format!(
                "generator polynomial {gen_poly:#x} has degree {deg}, expected n-k = {}",
                n - k
            )));
        }
        // remainder of x^n + 1 modulo gen_poly over GF(2)
        let mut rem: u32 = 1; // running remainder of x^j, j = 0..n
        for _ in 0..n {
            rem <<= 1;
            if rem >> deg & 1 != 0 {
                rem ^= gen_poly;
            }
        }
        if rem != 1 {
            return Err(Error::arg(format!(
                "generator polynomial {gen_poly:#x} does not divide x^{n} - 1"
            )));
        }
        Ok(CodeSpec { n, k, t, gen_poly, field_poly })
    }

    /// The paper's BCH(255,239,2): g_C = 0x18DED over GF(2^8) with g_F = 0x171.
    pub fn bch_255_239() -> Self {
        CodeSpec::new(255, 239, 2, 0x18DED, 0x171).expect("built-in code parameters")
    }
}

/// Hard bit vector of length n; index 0 is the coefficient of x^0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub bits: Vec<u8>,
}

impl Codeword {
    pub fn zero(n: usize) -> Self {
        Codeword { bits: vec![0; n] }
    }

    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        Codeword { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] ^= 1;
    }

    pub fn hamming_distance(&self, other: &Codeword) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Hex string, least-significant coefficient first: bit i lands in byte
    /// i/8 at bit position i%8, bytes emitted in order as two lowercase
    /// hex digits each.
    pub fn to_hex(&self) -> String {
        let nbytes = self.bits.len().div_ceil(8);
        let mut bytes = vec![0u8; nbytes];
        for (i, &b) in self.bits.iter().enumerate() {
            bytes[i / 8] |= b << (i % 8);
        }
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Inverse of [`Codeword::to_hex`] for a word of length `n`.
    pub fn from_hex(s: &str, n: usize) -> Result<Self> {
        let nbytes = n.div_ceil(8);
        if s.len() != 2 * nbytes {
            return Err(Error::arg(format!(
                "hex codeword has {} digits, expected {}",
                s.len(),
                2 * nbytes
            )));
        }
        let mut bits = vec![0u8; n];
        for (j, chunk) in s.as_bytes().chunks(2).enumerate() {
            let byte = u8::from_str_radix(std::str::from_utf8(chunk).unwrap(), 16)
                .map_err(|e| Error::arg(format!("bad hex digit in codeword: {e}")))?;
            for bit in 0..8 {
                let i = j * 8 + bit;
                if i < n {
                    bits[i] = byte >> bit & 1;
                } else if byte >> bit & 1 != 0 {
                    return Err(Error::arg("hex codeword has bits beyond length n"));
                }
            }
        }
        Ok(Codeword { bits })
    }
}

/// Result of bounded-distance decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BdOutcome {
    Corrected { word: Codeword, num_flips: usize },
    Failure,
}

/// Systematic encoder: message bits occupy positions n-k..n, parity bits
/// 0..n-k hold the remainder of x^{n-k} m(x) modulo the generator.
pub fn encode(msg: &[u8], spec: &CodeSpec) -> Result<Codeword> {
    if msg.len() != spec.k {
        return Err(Error::arg(format!(
            "message length {} does not match k = {}",
            msg.len(),
            spec.k
        )));
    }
    let deg = spec.n - spec.k;
    let mask = (1u32 << deg) - 1;
    let mut rem: u32 = 0;
    // Long division of x^deg * m(x), highest coefficient first.
    for &bit in msg.iter().rev() {
        let feedback = (rem >> (deg - 1) & 1) as u8 ^ bit;
        rem = (rem << 1) & mask;
        if feedback != 0 {
            rem ^= spec.gen_poly & mask;
        }
    }
    let mut bits = vec![0u8; spec.n];
    for i in 0..deg {
        bits[i] = (rem >> i & 1) as u8;
    }
    bits[deg..].copy_from_slice(msg);
    Ok(Codeword { bits })
}

/// Extracts the message bits from a systematic codeword.
pub fn extract_message(word: &Codeword, spec: &CodeSpec) -> Vec<u8> {
    word.bits[spec.n - spec.k..].to_vec()
}

/// Membership test by polynomial divisibility (independent of the
/// syndrome route used inside the decoder).
pub fn is_codeword(word: &Codeword, spec: &CodeSpec) -> bool {
    debug_assert_eq!(word.len(), spec.n);
    let deg = spec.n - spec.k;
    let mask = (1u32 << deg) - 1;
    let mut rem: u32 = 0;
    for &bit in word.bits.iter().rev() {
        let feedback = (rem >> (deg - 1) & 1) as u8 ^ bit;
        rem = (rem << 1) & mask;
        if feedback != 0 {
            rem ^= spec.gen_poly & mask;
        }
    }
    rem == 0
}

/// S1 = r(alpha), S3 = r(alpha^3).
pub fn syndromes(word: &Codeword, tables: &FieldTables) -> (u8, u8) {
    let mut s1 = 0u8;
    let mut s3 = 0u8;
    for (i, &b) in word.bits.iter().enumerate() {
        if b != 0 {
            s1 ^= tables.alpha_pow(i);
            s3 ^= tables.alpha_pow(3 * i);
        }
    }
    (s1, s3)
}

/// Error positions implied by a t=2 syndrome pair, or `None` when the
/// syndromes are outside the bounded-distance radius.
///
/// Returns the number of positions filled into `out` (0, 1 or 2).
#[inline]
pub fn solve_syndromes(s1: u8, s3: u8, tables: &FieldTables, out: &mut [usize; 2]) -> Option<usize> {
    if s1 == 0 {
        // S1 = 0, S3 != 0 has no weight-1 or weight-2 explanation.
        return if s3 == 0 { Some(0) } else { None };
    }
    let s1_cubed = tables.cube(s1);
    if s3 == s1_cubed {
        out[0] = tables.log(s1) as usize;
        return Some(1);
    }
    // sigma(z) = z^2 + S1 z + sigma2 with sigma2 = (S3 + S1^3)/S1;
    // its roots are the two error locators.
    let sigma2 = tables.div(s3 ^ s1_cubed, s1);
    // Chien search: walk z = alpha^i over all positions, tracking
    // b = S1 * alpha^i and c = alpha^{2i} incrementally.
    let mut b = s1;
    let mut c = 1u8;
    let alpha = tables.alpha_pow(1);
    let alpha2 = tables.alpha_pow(2);
    let mut found = 0usize;
    for i in 0..FIELD_ORDER {
        if c ^ b ^ sigma2 == 0 {
            if found == 2 {
                return None; // more than two roots: not a valid locator
            }
            out[found] = i;
            found += 1;
        }
        b = tables.mul(b, alpha);
        c = tables.mul(c, alpha2);
    }
    // A quadratic over GF(2^8) with S1 != 0 has zero or two distinct roots;
    // anything else means the syndromes are out of bounds.
    if found == 2 {
        Some(2)
    } else {
        None
    }
}

/// Bounded-distance decoding: corrects up to t=2 errors, may miscorrect a
/// heavier pattern to a codeword within distance 2, otherwise fails.
pub fn bd_decode(word: &Codeword, spec: &CodeSpec, tables: &FieldTables) -> BdOutcome {
    debug_assert_eq!(word.len(), spec.n);
    let (s1, s3) = syndromes(word, tables);
    let mut pos = [0usize; 2];
    match solve_syndromes(s1, s3, tables, &mut pos) {
        None => BdOutcome::Failure,
        Some(num_flips) => {
            let mut fixed = word.clone();
            for &p in pos.iter().take(num_flips) {
                if p >= spec.n {
                    return BdOutcome::Failure;
                }
                fixed.flip(p);
            }
            debug_assert!(is_codeword(&fixed, spec));
            BdOutcome::Corrected { word: fixed, num_flips }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (CodeSpec, FieldTables) {
        let spec = CodeSpec::bch_255_239();
        let tables = FieldTables::build(spec.field_poly).unwrap();
        (spec, tables)
    }

    /// Independent GF(2) long-division oracle over bit vectors.
    fn poly_rem_oracle(dividend: &[u8], divisor: u32, deg: usize) -> u32 {
        let mut work = dividend.to_vec();
        for i in (deg..work.len()).rev() {
            if work[i] != 0 {
                for j in 0..=deg {
                    work[i - deg + j] ^= (divisor >> j & 1) as u8;
                }
            }
        }
        let mut rem = 0u32;
        for (i, &b) in work.iter().take(deg).enumerate() {
            rem |= (b as u32) << i;
        }
        rem
    }

    #[test]
    fn zero_message_encodes_to_zero() {
        let (spec, _) = setup();
        let cw = encode(&vec![0; spec.k], &spec).unwrap();
        assert_eq!(cw, Codeword::zero(spec.n));
    }

    #[test]
    fn unit_message_parity_matches_long_division() {
        let (spec, _) = setup();
        let mut msg = vec![0u8; spec.k];
        msg[0] = 1; // coefficient of x^16 in the codeword
        let cw = encode(&msg, &spec).unwrap();
        // oracle: remainder of x^16 modulo g_C
        let mut poly = vec![0u8; spec.n];
        poly[16] = 1;
        let rem = poly_rem_oracle(&poly, spec.gen_poly, 16);
        for i in 0..16 {
            assert_eq!(cw.bits[i] as u32, rem >> i & 1);
        }
        assert!(is_codeword(&cw, &spec));
    }

    #[test]
    fn random_encodes_are_divisible_and_round_trip() {
        let (spec, _) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
            let cw = encode(&msg, &spec).unwrap();
            let rem = poly_rem_oracle(&cw.bits, spec.gen_poly, 16);
            assert_eq!(rem, 0);
            assert!(is_codeword(&cw, &spec));
            assert_eq!(extract_message(&cw, &spec), msg);
        }
    }

    #[test]
    fn wrong_message_length_is_rejected() {
        let (spec, _) = setup();
        assert!(encode(&[1, 0, 1], &spec).is_err());
    }

    #[test]
    fn cyclic_shifts_of_codewords_are_codewords() {
        let (spec, _) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
            let mut bits = encode(&msg, &spec).unwrap().bits;
            bits.rotate_right(1);
            assert!(is_codeword(&Codeword::from_bits(bits), &spec));
        }
    }

    #[test]
    fn syndromes_of_codewords_are_zero() {
        let (spec, tables) = setup();
        assert_eq!(syndromes(&Codeword::zero(spec.n), &tables), (0, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
        let cw = encode(&msg, &spec).unwrap();
        assert_eq!(syndromes(&cw, &tables), (0, 0));
    }

    #[test]
    fn single_error_syndromes_match_polynomial_evaluation() {
        let (spec, tables) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
        let cw = encode(&msg, &spec).unwrap();
        for &i in &[0usize, 1, 10, 100, 254] {
            let mut w = cw.clone();
            w.flip(i);
            let (s1, s3) = syndromes(&w, &tables);
            assert_eq!(s1, tables.alpha_pow(i));
            assert_eq!(s3, tables.alpha_pow(3 * i));
        }
    }

    #[test]
    fn decoder_fixes_all_single_errors() {
        let (spec, tables) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
        let cw = encode(&msg, &spec).unwrap();
        for i in 0..spec.n {
            let mut w = cw.clone();
            w.flip(i);
            match bd_decode(&w, &spec, &tables) {
                BdOutcome::Corrected { word, num_flips } => {
                    assert_eq!(word, cw);
                    assert_eq!(num_flips, 1);
                }
                BdOutcome::Failure => panic!("single error at {i} not corrected"),
            }
        }
    }

    #[test]
    fn decoder_fixes_sampled_double_errors() {
        let (spec, tables) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
        let cw = encode(&msg, &spec).unwrap();
        for _ in 0..10_000 {
            let i = rng.random_range(0..spec.n);
            let mut j = rng.random_range(0..spec.n);
            while j == i {
                j = rng.random_range(0..spec.n);
            }
            let mut w = cw.clone();
            w.flip(i);
            w.flip(j);
            match bd_decode(&w, &spec, &tables) {
                BdOutcome::Corrected { word, num_flips } => {
                    assert_eq!(word, cw, "double error {{{i},{j}}} miscorrected");
                    assert_eq!(num_flips, 2);
                }
                BdOutcome::Failure => panic!("double error {{{i},{j}}} not corrected"),
            }
        }
    }

    #[test]
    fn specific_double_error_positions() {
        let (spec, tables) = setup();
        let cw = Codeword::zero(spec.n);
        let mut w = cw.clone();
        w.flip(10);
        w.flip(200);
        match bd_decode(&w, &spec, &tables) {
            BdOutcome::Corrected { word, num_flips } => {
                assert_eq!(word, cw);
                assert_eq!(num_flips, 2);
            }
            BdOutcome::Failure => panic!("double error not corrected"),
        }
    }

    #[test]
    fn triple_errors_fail_or_miscorrect_legally() {
        let (spec, tables) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
        let cw = encode(&msg, &spec).unwrap();
        let mut miscorrections = 0;
        for _ in 0..2000 {
            let mut w = cw.clone();
            let mut placed = std::collections::HashSet::new();
            while placed.len() < 3 {
                placed.insert(rng.random_range(0..spec.n));
            }
            for &i in &placed {
                w.flip(i);
            }
            match bd_decode(&w, &spec, &tables) {
                BdOutcome::Corrected { word, num_flips } => {
                    assert!(num_flips <= 2);
                    assert_ne!(word, cw, "3 errors cannot decode back to the original");
                    assert!(is_codeword(&word, &spec));
                    assert!(word.hamming_distance(&w) <= 2);
                    miscorrections += 1;
                }
                BdOutcome::Failure => {}
            }
        }
        // both outcomes should occur for this code
        assert!(miscorrections > 0);
    }

    #[test]
    fn codeword_hex_round_trip() {
        let (spec, _) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
        let cw = encode(&msg, &spec).unwrap();
        let hex = cw.to_hex();
        assert_eq!(Codeword::from_hex(&hex, spec.n).unwrap(), cw);
        // LSB-first convention: word with only bit 0 set starts with "01".
        let mut one = Codeword::zero(spec.n);
        one.flip(0);
        assert!(one.to_hex().starts_with("01"));
    }

    #[test]
    fn flipped_bit_breaks_membership() {
        let (spec, _) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let msg: Vec<u8> = (0..spec.k).map(|_| rng.random_range(0..2u8)).collect();
        let mut cw = encode(&msg, &spec).unwrap();
        cw.flip(17);
        assert!(!is_codeword(&cw, &spec));
    }

    #[test]
    fn rejects_non_dividing_generator() {
        assert!(CodeSpec::new(255, 239, 2, 0x18DEF, 0x171).is_err());
        assert!(CodeSpec::new(255, 239, 2, 0x8DED, 0x171).is_err());
    }
}
