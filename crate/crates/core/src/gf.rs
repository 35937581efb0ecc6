//! GF(2^b) arithmetic via log/antilog tables.
//!
//! Elements are stored as integers whose bit `t` is the coefficient of `x^t`
//! in the polynomial basis (so the bit vector of an element lists the `x^0`
//! coefficient first). Addition is XOR; multiplication and inversion go
//! through discrete-log tables built from a primitive polynomial.

use crate::error::Error;

/// A field element; only the low `b` bits are meaningful.
pub type GfElem = u16;

/// Default primitive polynomial per degree, bit `i` = coefficient of `x^i`.
///
/// Degree 3 is x^3+x+1 and degree 4 is x^4+x+1, the classical choices; the
/// rest are the smallest-weight primitive polynomials in common use.
const DEFAULT_PRIM_POLY: [u32; 9] = [
    0,
    0b11,          // x + 1
    0b111,         // x^2 + x + 1
    0b1011,        // x^3 + x + 1
    0b10011,       // x^4 + x + 1
    0b100101,      // x^5 + x^2 + 1
    0b1000011,     // x^6 + x + 1
    0b10001001,    // x^7 + x^3 + 1
    0b100011101,   // x^8 + x^4 + x^3 + x^2 + 1
];

/// GF(2^b) with its discrete-log tables.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    b: u32,
    prim_poly: u32,
    /// `antilog[i] = α^i` for `i` in `0..2^b-1`.
    antilog: Vec<GfElem>,
    /// `log[e]` for nonzero `e`; `log[0]` is a sentinel and never read.
    log: Vec<u16>,
}

impl FieldSpec {
    /// Builds GF(2^b) with the default primitive polynomial for `b ∈ [1, 8]`.
    pub fn new(b: u32) -> Result<Self, Error> {
        if !(1..=8).contains(&b) {
            return Err(Error::param("b", format!("bits per cell must be in 1..=8, got {b}")));
        }
        Self::with_poly(b, DEFAULT_PRIM_POLY[b as usize])
    }

    /// Builds GF(2^b) from an explicit primitive polynomial.
    pub fn with_poly(b: u32, prim_poly: u32) -> Result<Self, Error> {
        if !(1..=8).contains(&b) {
            return Err(Error::param("b", format!("bits per cell must be in 1..=8, got {b}")));
        }
        if prim_poly >> b != 1 || prim_poly & 1 == 0 {
            return Err(Error::param(
                "prim_poly",
                format!("{prim_poly:#b} is not a monic degree-{b} polynomial with constant term 1"),
            ));
        }
        let order = (1usize << b) - 1;
        let mut antilog = vec![0 as GfElem; order];
        let mut log = vec![u16::MAX; 1 << b];
        let mut e: u32 = 1;
        for i in 0..order {
            if log[e as usize] != u16::MAX {
                return Err(Error::param(
                    "prim_poly",
                    format!("{prim_poly:#b} is not primitive: α repeats after {i} steps"),
                ));
            }
            antilog[i] = e as GfElem;
            log[e as usize] = i as u16;
            e <<= 1;
            if e >> b == 1 {
                e ^= prim_poly;
            }
        }
        if e != 1 {
            return Err(Error::param(
                "prim_poly",
                format!("{prim_poly:#b} is not primitive: α^{order} ≠ 1"),
            ));
        }
        Ok(FieldSpec { b, prim_poly, antilog, log })
    }

    /// Bits per element.
    pub fn b(&self) -> u32 {
        self.b
    }

    /// The primitive polynomial in use.
    pub fn prim_poly(&self) -> u32 {
        self.prim_poly
    }

    /// Number of field elements, 2^b.
    pub fn size(&self) -> usize {
        1 << self.b
    }

    /// Multiplicative group order, 2^b − 1.
    pub fn order(&self) -> usize {
        self.size() - 1
    }

    /// Field addition (XOR); independent of the tables but kept here so call
    /// sites read uniformly.
    pub fn add(&self, a: GfElem, c: GfElem) -> GfElem {
        a ^ c
    }

    /// Field multiplication through the log tables.
    pub fn mul(&self, a: GfElem, c: GfElem) -> GfElem {
        if a == 0 || c == 0 {
            return 0;
        }
        let s = self.log[a as usize] as usize + self.log[c as usize] as usize;
        self.antilog[s % self.order()]
    }

    /// Multiplicative inverse; zero is rejected.
    pub fn inv(&self, a: GfElem) -> Result<GfElem, Error> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        let l = self.log[a as usize] as usize;
        Ok(self.antilog[(self.order() - l) % self.order()])
    }

    /// α^e with the exponent reduced mod the group order.
    pub fn alpha_pow(&self, e: usize) -> GfElem {
        self.antilog[e % self.order()]
    }

    /// The bit vector of an element, `x^0` coefficient first.
    pub fn elem_to_bits(&self, a: GfElem) -> Vec<u8> {
        (0..self.b).map(|t| ((a >> t) & 1) as u8).collect()
    }

    /// Inverse of [`elem_to_bits`](Self::elem_to_bits); the slice must hold
    /// exactly `b` bits.
    pub fn bits_to_elem(&self, bits: &[u8]) -> Result<GfElem, Error> {
        if bits.len() != self.b as usize {
            return Err(Error::Length {
                what: "element bits",
                expected: self.b as usize,
                got: bits.len(),
            });
        }
        let mut a: GfElem = 0;
        for (t, &bit) in bits.iter().enumerate() {
            if bit > 1 {
                return Err(Error::param("bits", format!("entry {bit} is not a bit")));
            }
            a |= (bit as GfElem) << t;
        }
        Ok(a)
    }
}
