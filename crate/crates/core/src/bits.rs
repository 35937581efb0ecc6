//! Packed GF(2) matrices and parity arithmetic.
//!
//! Parity-check matrices here are small (at most a few hundred columns) but
//! sit inside the decoder's innermost loop, so rows are packed into `u64`
//! words and syndromes of codes with at most 64 checks fit a single word.

use crate::error::Error;

/// A dense bit matrix with rows packed into `u64` words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    nrows: usize,
    ncols: usize,
    row_words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// All-zero matrix.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        let row_words = ncols.div_ceil(64).max(1);
        BitMatrix {
            nrows,
            ncols,
            row_words,
            data: vec![0; nrows * row_words],
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.nrows && c < self.ncols);
        let w = r * self.row_words + c / 64;
        let mask = 1u64 << (c % 64);
        if bit {
            self.data[w] |= mask;
        } else {
            self.data[w] &= !mask;
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.nrows && c < self.ncols);
        self.data[r * self.row_words + c / 64] >> (c % 64) & 1 == 1
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.row_words..(r + 1) * self.row_words]
    }

    /// Syndrome of a 0/1 byte vector: bit `r` of the result is `<row_r, v>`
    /// over GF(2).
    pub fn syndrome(&self, bits: &[u8]) -> Result<Vec<u8>, Error> {
        if bits.len() != self.ncols {
            return Err(Error::Length {
                what: "codeword bits",
                expected: self.ncols,
                got: bits.len(),
            });
        }
        let packed = pack_bits(bits);
        Ok((0..self.nrows)
            .map(|r| {
                let mut acc = 0u64;
                for (a, b) in self.row(r).iter().zip(packed.iter()) {
                    acc ^= a & b;
                }
                (acc.count_ones() & 1) as u8
            })
            .collect())
    }

    /// True when the syndrome is zero.
    pub fn in_kernel(&self, bits: &[u8]) -> Result<bool, Error> {
        Ok(self.syndrome(bits)?.iter().all(|&s| s == 0))
    }

    /// Column `c` packed into a word, bit `r` = entry `(r, c)`.
    /// Only valid when the matrix has at most 64 rows.
    pub fn column_word(&self, c: usize) -> u64 {
        assert!(self.nrows <= 64, "column_word needs ≤ 64 rows");
        let mut w = 0u64;
        for r in 0..self.nrows {
            if self.get(r, c) {
                w |= 1 << r;
            }
        }
        w
    }

    /// Rank over GF(2), computed on a scratch copy by row elimination.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = (0..self.nrows).map(|r| self.row(r).to_vec()).collect();
        let mut rank = 0;
        for c in 0..self.ncols {
            let (w, m) = (c / 64, 1u64 << (c % 64));
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] & m != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[w] & m != 0 {
                    for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                        *x ^= p;
                    }
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }
}

/// Packs a 0/1 byte slice into little-endian `u64` words.
pub fn pack_bits(bits: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(64).max(1)];
    for (i, &b) in bits.iter().enumerate() {
        debug_assert!(b <= 1);
        words[i / 64] |= (b as u64) << (i % 64);
    }
    words
}
