//! GF(2^8) arithmetic backed by exponent/log tables.
//!
//! The field is defined by a degree-8 primitive polynomial given as a 9-bit
//! mask (default 0x171). Elements are `u8`, addition is XOR, and
//! multiplication/inversion go through the tables.

use crate::{Error, Result};

/// Number of nonzero elements of GF(2^8).
pub const FIELD_ORDER: usize = 255;

/// Exponent/log tables for GF(2^8) under a primitive field polynomial.
#[derive(Debug, Clone)]
pub struct FieldTables {
    field_poly: u16,
    /// exp[k] = alpha^k for k in 0..510, doubled so products of logs
    /// need no modulo reduction.
    exp: [u8; 2 * FIELD_ORDER],
    /// log[e] = k with exp[k] = e, for nonzero e. log[0] is unused.
    log: [u8; 256],
}

/// Multiply by alpha (the class of x) with reduction by the field polynomial.
#[inline]
pub fn mul_by_x(a: u8, field_poly: u16) -> u8 {
    let shifted = (a as u16) << 1;
    if shifted & 0x100 != 0 {
        (shifted ^ field_poly) as u8
    } else {
        shifted as u8
    }
}

impl FieldTables {
    /// Builds the tables, verifying that `field_poly` has degree 8 and that
    /// x generates the full multiplicative group (cycle length exactly 255).
    pub fn build(field_poly: u16) -> Result<Self> {
        if field_poly & 0x100 == 0 || field_poly > 0x1FF {
            return Err(Error::arg(format!(
                "field polynomial {field_poly:#x} must have degree 8 (9-bit mask)"
            )));
        }
        let mut exp = [0u8; 2 * FIELD_ORDER];
        let mut log = [0u8; 256];
        let mut e = 1u8;
        for k in 0..FIELD_ORDER {
            exp[k] = e;
            if e == 1 && k > 0 {
                return Err(Error::arg(format!(
                    "field polynomial {field_poly:#x} is not primitive: \
                     x has cycle length {k}, expected 255"
                )));
            }
            log[e as usize] = k as u8;
            e = mul_by_x(e, field_poly);
        }
        if e != 1 {
            // x never returned to 1 within 255 steps: not primitive
            // (or the polynomial is reducible and hit a zero divisor).
            return Err(Error::arg(format!(
                "field polynomial {field_poly:#x} failed the cycle-length check: \
                 alpha^255 = {e:#x}, expected 1"
            )));
        }
        exp.copy_within(0..FIELD_ORDER, FIELD_ORDER);
        Ok(FieldTables { field_poly, exp, log })
    }

    pub fn field_poly(&self) -> u16 {
        self.field_poly
    }

    /// alpha^k, for any k >= 0.
    #[inline]
    pub fn alpha_pow(&self, k: usize) -> u8 {
        self.exp[k % FIELD_ORDER]
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log(&self, a: u8) -> u8 {
        debug_assert!(a != 0, "log of zero");
        self.log[a as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0, "inverse of zero");
        self.exp[FIELD_ORDER - self.log[a as usize] as usize]
    }

    /// a / b for nonzero b.
    #[inline]
    pub fn div(&self, a: u8, b: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.exp
                [self.log[a as usize] as usize + FIELD_ORDER - self.log[b as usize] as usize]
        }
    }

    /// a^2 via the tables.
    #[inline]
    pub fn square(&self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            self.exp[2 * self.log[a as usize] as usize]
        }
    }

    /// a^3 via the tables.
    #[inline]
    pub fn cube(&self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            let l = self.log[a as usize] as usize;
            self.exp[(3 * l) % FIELD_ORDER]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: remainder of x^k modulo the field polynomial,
    /// computed by bit-level long division without the tables.
    fn x_pow_mod(k: usize, poly: u16) -> u8 {
        let mut r: u16 = 1;
        for _ in 0..k {
            r <<= 1;
            if r & 0x100 != 0 {
                r ^= poly;
            }
        }
        r as u8
    }

    #[test]
    fn alpha_is_x() {
        let t = FieldTables::build(0x171).unwrap();
        assert_eq!(t.alpha_pow(0), 0x01);
        assert_eq!(t.alpha_pow(1), 0x02);
    }

    #[test]
    fn alpha_eighth_power_reduces() {
        let t = FieldTables::build(0x171).unwrap();
        assert_eq!(x_pow_mod(8, 0x171), 0x71);
        assert_eq!(t.alpha_pow(8), 0x71);
    }

    #[test]
    fn alpha_has_period_255() {
        let t = FieldTables::build(0x171).unwrap();
        // table-free shift-and-reduce oracle
        assert_eq!(x_pow_mod(255, 0x171), 0x01);
        assert_eq!(t.alpha_pow(255), 0x01);
        for k in 1..255 {
            assert_ne!(t.alpha_pow(k), 0x01, "period divides {k}");
        }
    }

    #[test]
    fn exp_table_is_a_permutation_of_nonzero_elements() {
        let t = FieldTables::build(0x171).unwrap();
        let mut seen = [false; 256];
        for k in 0..FIELD_ORDER {
            let e = t.alpha_pow(k);
            assert!(e != 0);
            assert!(!seen[e as usize], "duplicate element {e:#x}");
            seen[e as usize] = true;
            assert_eq!(t.log(e) as usize, k);
        }
    }

    #[test]
    fn log_of_products_and_inverses() {
        let t = FieldTables::build(0x171).unwrap();
        for a in 1..=255u8 {
            assert_eq!(t.mul(a, t.inv(a)), 1);
            for b in [1u8, 2, 3, 0x71, 0xFF] {
                let p = t.mul(a, b);
                assert_eq!(
                    t.log(p) as usize,
                    (t.log(a) as usize + t.log(b) as usize) % FIELD_ORDER
                );
            }
        }
    }

    #[test]
    fn mul_matches_carryless_oracle() {
        // Independent route: shift-and-add polynomial multiplication.
        fn slow_mul(mut a: u8, mut b: u8, poly: u16) -> u8 {
            let mut acc = 0u8;
            while b != 0 {
                if b & 1 != 0 {
                    acc ^= a;
                }
                a = mul_by_x(a, poly);
                b >>= 1;
            }
            acc
        }
        let t = FieldTables::build(0x171).unwrap();
        for a in (0..=255u8).step_by(7) {
            for b in (0..=255u8).step_by(11) {
                assert_eq!(t.mul(a, b), slow_mul(a, b, 0x171));
            }
        }
    }

    #[test]
    fn rejects_wrong_degree() {
        assert!(FieldTables::build(0x71).is_err());
        assert!(FieldTables::build(0x371).is_err());
    }

    #[test]
    fn rejects_non_primitive_polynomial() {
        // x^8+x^4+x^3+x+1 (0x11B) is irreducible but not primitive:
        // x has order 51.
        let err = FieldTables::build(0x11B).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cycle length"), "unexpected message: {msg}");
    }
}
