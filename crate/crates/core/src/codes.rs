//! Component codes for the product construction.
//!
//! Three families are supported:
//!
//! - narrow-sense Reed-Solomon over GF(2^b), length `2^b − 1`, encoded
//!   systematically via the generator polynomial;
//! - singly-extended RS, which appends the overall GF sum as one extra parity
//!   symbol;
//! - systematic binary codes given by an explicit parity block, including
//!   random linear codes drawn from a seed.
//!
//! Every code also carries the binary image of its parity-check matrix, i.e.
//! the GF(2) matrix obtained by expanding each GF(2^b) entry `h` into the
//! `b×b` bit matrix of the map `v ↦ h·v`. Codewords are handled in transmit
//! order: the first `k` symbols are the message, the rest the parity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitMatrix;
use crate::error::Error;
use crate::gf::{FieldSpec, GfElem};

/// Which construction a [`ComponentCode`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    ReedSolomon,
    ExtendedReedSolomon,
    BinarySystematic,
}

/// A systematic component code together with its binary-image parity check.
#[derive(Debug, Clone)]
pub struct ComponentCode {
    field: FieldSpec,
    n: usize,
    k: usize,
    kind: CodeKind,
    /// Generator polynomial coefficients by degree (RS kinds; monic).
    gen_poly: Vec<GfElem>,
    /// Parity block of `[I | P]` (binary-systematic kind), `k × (n−k)` bits.
    parity: Vec<Vec<u8>>,
    h_bin: BitMatrix,
}

/// Narrow-sense RS code of dimension `k` over the given field, with
/// `n = 2^b − 1` and generator polynomial `∏_{i=1..n−k} (x − α^i)`.
pub fn rs_code(k: usize, field: FieldSpec) -> Result<ComponentCode, Error> {
    let n = field.order();
    if k < 1 || k >= n {
        return Err(Error::param(
            "k",
            format!("RS dimension must satisfy 1 ≤ k < n = {n}, got {k}"),
        ));
    }
    let mut gen_poly: Vec<GfElem> = vec![1];
    for i in 1..=(n - k) {
        let root = field.alpha_pow(i);
        // Multiply the running product by (x + root).
        let mut next = vec![0 as GfElem; gen_poly.len() + 1];
        for (d, &c) in gen_poly.iter().enumerate() {
            next[d + 1] ^= c;
            next[d] ^= field.mul(root, c);
        }
        gen_poly = next;
    }
    let h_gf = rs_h_gf(&field, n, k, false);
    let h_bin = expand_h(&field, &h_gf);
    Ok(ComponentCode {
        field,
        n,
        k,
        kind: CodeKind::ReedSolomon,
        gen_poly,
        parity: Vec::new(),
        h_bin,
    })
}

/// Extends an RS code by one overall-parity symbol `c_n = Σ_i c_i`
/// (characteristic 2, so the sum equals the negated sum).
pub fn extend_rs(code: &ComponentCode) -> Result<ComponentCode, Error> {
    if code.kind != CodeKind::ReedSolomon {
        return Err(Error::param(
            "code",
            "only a plain Reed-Solomon code can be extended",
        ));
    }
    let field = code.field.clone();
    let h_gf = rs_h_gf(&field, code.n, code.k, true);
    let h_bin = expand_h(&field, &h_gf);
    Ok(ComponentCode {
        field,
        n: code.n + 1,
        k: code.k,
        kind: CodeKind::ExtendedReedSolomon,
        gen_poly: code.gen_poly.clone(),
        parity: Vec::new(),
        h_bin,
    })
}

/// Systematic binary code `G = [I | P]` from an explicit `k × (n−k)` parity
/// block; its parity check is `H = [Pᵀ | I]`.
pub fn binary_systematic_code(
    n: usize,
    k: usize,
    parity: Vec<Vec<u8>>,
) -> Result<ComponentCode, Error> {
    if n < 1 || k < 1 || k > n {
        return Err(Error::param(
            "k",
            format!("need 1 ≤ k ≤ n, got k={k}, n={n}"),
        ));
    }
    if parity.len() != k || parity.iter().any(|row| row.len() != n - k) {
        return Err(Error::param(
            "parity",
            format!("parity block must be {k}×{}", n - k),
        ));
    }
    if parity.iter().flatten().any(|&b| b > 1) {
        return Err(Error::param("parity", "entries must be bits"));
    }
    let mut h_bin = BitMatrix::zeros(n - k, n);
    for r in 0..n - k {
        for (j, row) in parity.iter().enumerate() {
            h_bin.set(r, j, row[r] == 1);
        }
        h_bin.set(r, k + r, true);
    }
    Ok(ComponentCode {
        field: FieldSpec::new(1).expect("GF(2)"),
        n,
        k,
        kind: CodeKind::BinarySystematic,
        gen_poly: Vec::new(),
        parity,
        h_bin,
    })
}

/// Random systematic binary linear code: the parity block is drawn uniformly
/// from the seed. `k = n` is allowed and yields the trivial rate-1 code.
pub fn random_linear_code(n: usize, k: usize, seed: u64) -> Result<ComponentCode, Error> {
    if n < 1 || k < 1 || k > n {
        return Err(Error::param(
            "k",
            format!("need 1 ≤ k ≤ n, got k={k}, n={n}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parity: Vec<Vec<u8>> = (0..k)
        .map(|_| (0..n - k).map(|_| rng.gen::<bool>() as u8).collect())
        .collect();
    binary_systematic_code(n, k, parity)
}

impl ComponentCode {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Code length in symbols.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Code dimension in symbols.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    /// Generator polynomial coefficients by degree (empty for binary codes).
    pub fn gen_poly(&self) -> &[GfElem] {
        &self.gen_poly
    }

    /// Length of the binary image in bits.
    pub fn n_bits(&self) -> usize {
        self.n * self.field.b() as usize
    }

    /// Dimension of the binary image in bits.
    pub fn k_bits(&self) -> usize {
        self.k * self.field.b() as usize
    }

    /// Number of binary parity checks.
    pub fn redundancy_bits(&self) -> usize {
        self.n_bits() - self.k_bits()
    }

    /// Binary image of the parity-check matrix.
    pub fn h_bin(&self) -> &BitMatrix {
        &self.h_bin
    }

    /// Systematic encoding over symbols: the output starts with `msg`.
    pub fn encode_symbols(&self, msg: &[GfElem]) -> Result<Vec<GfElem>, Error> {
        if msg.len() != self.k {
            return Err(Error::Length {
                what: "message symbols",
                expected: self.k,
                got: msg.len(),
            });
        }
        let size = self.field.size() as GfElem;
        if msg.iter().any(|&m| m >= size) {
            return Err(Error::param("msg", "symbol outside the field"));
        }
        match self.kind {
            CodeKind::ReedSolomon => {
                let mut out = msg.to_vec();
                out.extend(self.rs_parity(msg));
                Ok(out)
            }
            CodeKind::ExtendedReedSolomon => {
                let mut out = msg.to_vec();
                out.extend(self.rs_parity(msg));
                let sum = out.iter().fold(0, |acc, &c| acc ^ c);
                out.push(sum);
                Ok(out)
            }
            CodeKind::BinarySystematic => {
                let mut out = msg.to_vec();
                for r in 0..self.n - self.k {
                    let mut p = 0;
                    for (j, &m) in msg.iter().enumerate() {
                        p ^= m & self.parity[j][r] as GfElem;
                    }
                    out.push(p);
                }
                Ok(out)
            }
        }
    }

    /// Remainder of `m(x)·x^{n−k} mod g(x)` via the usual feedback register;
    /// `rem[j]` is the coefficient of `x^j`, which in transmit order is the
    /// parity symbol at position `k + j`.
    fn rs_parity(&self, msg: &[GfElem]) -> Vec<GfElem> {
        let base_n = self.field.order();
        let r = base_n - self.k;
        let g = &self.gen_poly;
        let mut rem = vec![0 as GfElem; r];
        for t in (0..self.k).rev() {
            let feedback = msg[t] ^ rem[r - 1];
            for j in (1..r).rev() {
                rem[j] = rem[j - 1] ^ self.field.mul(feedback, g[j]);
            }
            rem[0] = self.field.mul(feedback, g[0]);
        }
        rem
    }

    /// Systematic encoding of the binary image: `k·b` message bits in,
    /// `n·b` codeword bits out.
    pub fn encode_bits(&self, msg_bits: &[u8]) -> Result<Vec<u8>, Error> {
        if msg_bits.len() != self.k_bits() {
            return Err(Error::Length {
                what: "message bits",
                expected: self.k_bits(),
                got: msg_bits.len(),
            });
        }
        let msg = self.bits_to_symbols(msg_bits)?;
        let cw = self.encode_symbols(&msg)?;
        Ok(self.symbols_to_bits(&cw))
    }

    /// True when `bits` (length `n·b`) has zero syndrome against the binary
    /// image parity check.
    pub fn is_codeword(&self, bits: &[u8]) -> Result<bool, Error> {
        if bits.len() != self.n_bits() {
            return Err(Error::Length {
                what: "codeword bits",
                expected: self.n_bits(),
                got: bits.len(),
            });
        }
        self.h_bin.in_kernel(bits)
    }

    /// [`is_codeword`](Self::is_codeword) on a symbol sequence (length `n`).
    pub fn is_codeword_symbols(&self, symbols: &[GfElem]) -> Result<bool, Error> {
        if symbols.len() != self.n {
            return Err(Error::Length {
                what: "codeword symbols",
                expected: self.n,
                got: symbols.len(),
            });
        }
        self.is_codeword(&self.symbols_to_bits(symbols))
    }

    /// Concatenates the bit vectors of the symbols (low coefficient first).
    pub fn symbols_to_bits(&self, symbols: &[GfElem]) -> Vec<u8> {
        let b = self.field.b();
        let mut bits = Vec::with_capacity(symbols.len() * b as usize);
        for &s in symbols {
            for t in 0..b {
                bits.push(((s >> t) & 1) as u8);
            }
        }
        bits
    }

    /// Inverse of [`symbols_to_bits`](Self::symbols_to_bits).
    pub fn bits_to_symbols(&self, bits: &[u8]) -> Result<Vec<GfElem>, Error> {
        let b = self.field.b() as usize;
        if bits.len() % b != 0 {
            return Err(Error::param(
                "bits",
                format!("length {} is not a multiple of b = {b}", bits.len()),
            ));
        }
        bits.chunks_exact(b)
            .map(|chunk| self.field.bits_to_elem(chunk))
            .collect()
    }
}

/// Transmit-order position `j` ↦ polynomial coefficient index, for a
/// systematic RS layout (message in the high coefficients).
fn coeff_index(n: usize, k: usize, j: usize) -> usize {
    if j < k {
        n - k + j
    } else {
        j - k
    }
}

/// Parity-check matrix over GF(2^b) in transmit order: the Vandermonde
/// evaluation rows `α^{i·(coefficient of position j)}`, `i = 1..n−k`, plus an
/// all-ones column/row pair when extended.
fn rs_h_gf(field: &FieldSpec, n: usize, k: usize, extended: bool) -> Vec<Vec<GfElem>> {
    let r = n - k;
    let mut h = Vec::with_capacity(r + extended as usize);
    for i in 1..=r {
        let mut row: Vec<GfElem> = (0..n)
            .map(|j| field.alpha_pow(i * coeff_index(n, k, j)))
            .collect();
        if extended {
            row.push(0);
        }
        h.push(row);
    }
    if extended {
        h.push(vec![1; n + 1]);
    }
    h
}

/// Expands a GF(2^b) matrix to its binary image: each entry `h` becomes the
/// `b×b` bit matrix whose column `t` is the bit vector of `h·x^t`.
fn expand_h(field: &FieldSpec, h_gf: &[Vec<GfElem>]) -> BitMatrix {
    let b = field.b() as usize;
    let rows = h_gf.len();
    let cols = h_gf.first().map_or(0, |r| r.len());
    let mut m = BitMatrix::zeros(rows * b, cols * b);
    for (i, row) in h_gf.iter().enumerate() {
        for (j, &h) in row.iter().enumerate() {
            if h == 0 {
                continue;
            }
            for t in 0..b {
                let prod = field.mul(h, 1 << t);
                for s in 0..b {
                    if (prod >> s) & 1 == 1 {
                        m.set(i * b + s, j * b + t, true);
                    }
                }
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf8() -> FieldSpec {
        FieldSpec::new(3).unwrap()
    }

    /// Naive polynomial remainder over the field, used as the encoder oracle.
    fn poly_mod(field: &FieldSpec, mut num: Vec<GfElem>, den: &[GfElem]) -> Vec<GfElem> {
        let d = den.len() - 1;
        assert_eq!(den[d], 1, "monic divisor");
        for i in (d..num.len()).rev() {
            let f = num[i];
            if f == 0 {
                continue;
            }
            for (j, &g) in den.iter().enumerate() {
                num[i - d + j] ^= field.mul(f, g);
            }
        }
        num.truncate(d);
        num
    }

    #[test]
    fn generator_polynomials_match_hand_expansion() {
        // (7,5): (x+α)(x+α²) = x² + 6x + 3.
        let c = rs_code(5, gf8()).unwrap();
        assert_eq!(c.gen_poly(), &[3, 6, 1]);
        // (7,3): ∏_{i=1..4}(x+α^i) = x⁴ + 3x³ + x² + 2x + 3.
        let c = rs_code(3, gf8()).unwrap();
        assert_eq!(c.gen_poly(), &[3, 2, 1, 3, 1]);
    }

    #[test]
    fn rs_dimension_bounds_are_enforced() {
        assert!(rs_code(0, gf8()).is_err());
        assert!(rs_code(7, gf8()).is_err());
        assert!(rs_code(8, gf8()).is_err());
    }

    #[test]
    fn systematic_prefix_and_zero_syndrome() {
        let c = rs_code(5, gf8()).unwrap();
        let mut msg = vec![0 as GfElem; 5];
        for trial in 0..10u16 {
            for (i, m) in msg.iter_mut().enumerate() {
                *m = (trial * 3 + i as u16 * 5) % 8;
            }
            let cw = c.encode_symbols(&msg).unwrap();
            assert_eq!(&cw[..5], &msg[..]);
            assert!(c.is_codeword(&c.symbols_to_bits(&cw)).unwrap());
        }
    }

    #[test]
    fn parity_matches_polynomial_remainder_oracle() {
        let field = gf8();
        for k in [3usize, 4, 5] {
            let c = rs_code(k, field.clone()).unwrap();
            for seed in 0..20u16 {
                let msg: Vec<GfElem> = (0..k).map(|i| (seed * 7 + i as u16 * 3 + 1) % 8).collect();
                let cw = c.encode_symbols(&msg).unwrap();
                // Rebuild the coefficient array and check it against the
                // independent division: coeff(x^{n−k+t}) = msg[t].
                let mut num = vec![0 as GfElem; 7];
                for (t, &m) in msg.iter().enumerate() {
                    num[7 - k + t] = m;
                }
                let rem = poly_mod(&field, num, c.gen_poly());
                assert_eq!(&cw[k..], &rem[..], "k={k} seed={seed}");
            }
        }
    }

    #[test]
    fn codeword_polynomial_has_the_prescribed_roots() {
        let field = gf8();
        let c = rs_code(4, field.clone()).unwrap();
        let msg = [2, 0, 7, 1];
        let cw = c.encode_symbols(&msg).unwrap();
        // Undo the transmit-order permutation into coefficients.
        let mut coeff = vec![0 as GfElem; 7];
        for (j, &s) in cw.iter().enumerate() {
            coeff[super::coeff_index(7, 4, j)] = s;
        }
        for i in 1..=3 {
            let x = field.alpha_pow(i);
            let mut acc = 0;
            let mut xp = 1;
            for &cf in &coeff {
                acc ^= field.mul(cf, xp);
                xp = field.mul(xp, x);
            }
            assert_eq!(acc, 0, "c(α^{i}) must vanish");
        }
    }

    #[test]
    fn rs_7_3_reaches_the_mds_distance() {
        let c = rs_code(3, gf8()).unwrap();
        let mut min_weight = usize::MAX;
        for m in 1..512u16 {
            let msg = [m % 8, (m / 8) % 8, m / 64];
            let w = c
                .encode_symbols(&msg)
                .unwrap()
                .iter()
                .filter(|&&s| s != 0)
                .count();
            min_weight = min_weight.min(w);
        }
        assert_eq!(min_weight, 5, "(7,3) is MDS with d = n−k+1");
    }

    #[test]
    fn binary_image_dimensions_and_rank() {
        let c = rs_code(5, gf8()).unwrap();
        assert_eq!((c.h_bin().nrows(), c.h_bin().ncols()), (6, 21));
        assert_eq!(c.h_bin().rank(), 6);

        let e = extend_rs(&rs_code(14, FieldSpec::new(4).unwrap()).unwrap()).unwrap();
        assert_eq!((e.h_bin().nrows(), e.h_bin().ncols()), (8, 64));
        assert_eq!(e.h_bin().rank(), 8);
    }

    #[test]
    fn binary_image_is_gf2_linear() {
        let c = rs_code(4, gf8()).unwrap();
        let a = c.encode_bits(&[1, 0, 1, 1, 1, 0, 0, 0, 1, 0, 1, 1]).unwrap();
        let b = c.encode_bits(&[0, 1, 1, 0, 0, 0, 1, 1, 1, 1, 0, 0]).unwrap();
        let xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        assert!(c.is_codeword(&xor).unwrap(), "XOR of codewords stays in the code");
    }

    #[test]
    fn single_bit_flip_breaks_the_syndrome() {
        let c = rs_code(5, gf8()).unwrap();
        let cw = c.encode_bits(&vec![0; 15]).unwrap();
        for i in 0..cw.len() {
            let mut flipped = cw.clone();
            flipped[i] ^= 1;
            assert!(!c.is_codeword(&flipped).unwrap(), "flip at {i}");
        }
    }

    #[test]
    fn extension_appends_the_overall_sum() {
        let base = rs_code(14, FieldSpec::new(4).unwrap()).unwrap();
        let ext = extend_rs(&base).unwrap();
        assert_eq!((ext.n(), ext.k()), (16, 14));
        for seed in 0..20u16 {
            let msg: Vec<GfElem> = (0..14).map(|i| (seed * 5 + i as u16 * 11 + 2) % 16).collect();
            let cw = ext.encode_symbols(&msg).unwrap();
            assert_eq!(cw.len(), 16);
            assert_eq!(&cw[..14], &msg[..]);
            assert_eq!(cw.iter().fold(0, |a, &c| a ^ c), 0, "symbols sum to zero");
            assert!(ext.is_codeword(&ext.symbols_to_bits(&cw)).unwrap());
        }
    }

    #[test]
    fn extended_rs_is_still_mds() {
        // (7,5) extends to the MDS (8,5) code with d = 4.
        let ext = extend_rs(&rs_code(5, gf8()).unwrap()).unwrap();
        let mut min_weight = usize::MAX;
        for m in 1..32_768u32 {
            let msg: Vec<GfElem> = (0..5).map(|i| ((m >> (3 * i)) & 7) as GfElem).collect();
            let w = ext
                .encode_symbols(&msg)
                .unwrap()
                .iter()
                .filter(|&&s| s != 0)
                .count();
            min_weight = min_weight.min(w);
        }
        assert_eq!(min_weight, 4);
    }

    #[test]
    fn double_extension_is_rejected() {
        let ext = extend_rs(&rs_code(5, gf8()).unwrap()).unwrap();
        assert!(extend_rs(&ext).is_err());
    }

    #[test]
    fn random_linear_code_shapes_and_membership() {
        let c = random_linear_code(144, 130, 1).unwrap();
        assert_eq!((c.n_bits(), c.k_bits()), (144, 130));
        assert_eq!((c.h_bin().nrows(), c.h_bin().ncols()), (14, 144));
        for seed in 0..10u64 {
            let c = random_linear_code(16, 8, seed).unwrap();
            let msg: Vec<u8> = (0..8).map(|i| ((seed >> i) & 1) as u8).collect();
            let cw = c.encode_bits(&msg).unwrap();
            assert!(c.is_codeword(&cw).unwrap());
            let mut flipped = cw.clone();
            flipped[3] ^= 1;
            assert!(!c.is_codeword(&flipped).unwrap());
        }
    }

    #[test]
    fn random_linear_code_is_seed_deterministic() {
        let a = random_linear_code(16, 11, 42).unwrap();
        let b = random_linear_code(16, 11, 42).unwrap();
        let c = random_linear_code(16, 11, 43).unwrap();
        let msg = [1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1];
        assert_eq!(a.encode_bits(&msg).unwrap(), b.encode_bits(&msg).unwrap());
        assert_ne!(a.encode_bits(&msg).unwrap(), c.encode_bits(&msg).unwrap());
    }

    #[test]
    fn rate_one_code_accepts_everything() {
        let c = random_linear_code(6, 6, 0).unwrap();
        assert_eq!(c.redundancy_bits(), 0);
        assert!(c.is_codeword(&[1, 0, 1, 1, 1, 0]).unwrap());
        assert_eq!(c.encode_bits(&[1, 0, 1, 1, 1, 0]).unwrap(), vec![1, 0, 1, 1, 1, 0]);
    }

    #[test]
    fn repetition_code_as_explicit_parity() {
        let rep = binary_systematic_code(4, 1, vec![vec![1, 1, 1]]).unwrap();
        assert_eq!(rep.encode_bits(&[1]).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(rep.encode_bits(&[0]).unwrap(), vec![0, 0, 0, 0]);
        assert!(!rep.is_codeword(&[1, 0, 1, 1]).unwrap());
    }
}
