//! Square product codes built from one systematic component code.
//!
//! An `(n, k)` component over GF(2^b) yields an `n × n` grid of cells in
//! which every row and every column is a component codeword. The message is
//! the top-left `k × k` block; rows are encoded first and then every column,
//! which fills the parity-on-parity corner consistently because the encoder
//! is linear. The overall rate is `(k/n)²` and the binary image carries
//! `b` bits per cell, so a grid transmits `n²·b` bits (row-major cells,
//! low-order bit of each cell first).

use crate::codes::ComponentCode;
use crate::error::Error;
use crate::gf::GfElem;

/// A two-dimensional product of one component code with itself.
#[derive(Debug, Clone)]
pub struct ProductCode {
    component: ComponentCode,
}

impl ProductCode {
    pub fn new(component: ComponentCode) -> Self {
        ProductCode { component }
    }

    pub fn component(&self) -> &ComponentCode {
        &self.component
    }

    /// Cells per side.
    pub fn n(&self) -> usize {
        self.component.n()
    }

    /// Message cells per side.
    pub fn k(&self) -> usize {
        self.component.k()
    }

    /// Bits per cell.
    pub fn bits_per_cell(&self) -> usize {
        self.component.field().b() as usize
    }

    /// Total number of cells in a grid.
    pub fn cells(&self) -> usize {
        self.n() * self.n()
    }

    /// Bits in a transmitted grid.
    pub fn grid_bits(&self) -> usize {
        self.cells() * self.bits_per_cell()
    }

    /// Bits in a message block.
    pub fn message_bits(&self) -> usize {
        self.k() * self.k() * self.bits_per_cell()
    }

    /// Code rate `(k/n)²`.
    pub fn rate(&self) -> f64 {
        let r = self.k() as f64 / self.n() as f64;
        r * r
    }

    /// Encodes a row-major `k × k` message block into a row-major `n × n`
    /// grid whose rows and columns are all component codewords.
    pub fn encode_symbols(&self, msg: &[GfElem]) -> Result<Vec<GfElem>, Error> {
        let (n, k) = (self.n(), self.k());
        if msg.len() != k * k {
            return Err(Error::Length {
                what: "message cells",
                expected: k * k,
                got: msg.len(),
            });
        }
        let mut grid = vec![0 as GfElem; n * n];
        for i in 0..k {
            let row = self.component.encode_symbols(&msg[i * k..(i + 1) * k])?;
            grid[i * n..(i + 1) * n].copy_from_slice(&row);
        }
        let mut col_msg = vec![0 as GfElem; k];
        for j in 0..n {
            for i in 0..k {
                col_msg[i] = grid[i * n + j];
            }
            let col = self.component.encode_symbols(&col_msg)?;
            for i in k..n {
                grid[i * n + j] = col[i];
            }
        }
        Ok(grid)
    }

    /// Binary-image encoding: `k²·b` message bits to `n²·b` grid bits.
    pub fn encode_bits(&self, msg_bits: &[u8]) -> Result<Vec<u8>, Error> {
        if msg_bits.len() != self.message_bits() {
            return Err(Error::Length {
                what: "message bits",
                expected: self.message_bits(),
                got: msg_bits.len(),
            });
        }
        let msg = self.component.bits_to_symbols(msg_bits)?;
        let grid = self.encode_symbols(&msg)?;
        Ok(self.component.symbols_to_bits(&grid))
    }

    /// True when every row and every column of the bit grid is a component
    /// codeword.
    pub fn is_valid_grid(&self, grid_bits: &[u8]) -> Result<bool, Error> {
        if grid_bits.len() != self.grid_bits() {
            return Err(Error::Length {
                what: "grid bits",
                expected: self.grid_bits(),
                got: grid_bits.len(),
            });
        }
        let n = self.n();
        let b = self.bits_per_cell();
        let row_bits = n * b;
        for i in 0..n {
            if !self
                .component
                .is_codeword(&grid_bits[i * row_bits..(i + 1) * row_bits])?
            {
                return Ok(false);
            }
        }
        let mut col = vec![0u8; row_bits];
        for j in 0..n {
            for i in 0..n {
                col[i * b..(i + 1) * b]
                    .copy_from_slice(&grid_bits[i * row_bits + j * b..i * row_bits + (j + 1) * b]);
            }
            if !self.component.is_codeword(&col)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{extend_rs, random_linear_code, rs_code};
    use crate::gf::FieldSpec;

    fn product_7_5() -> ProductCode {
        ProductCode::new(rs_code(5, FieldSpec::new(3).unwrap()).unwrap())
    }

    #[test]
    fn dimensions_and_rate() {
        let p = product_7_5();
        assert_eq!((p.n(), p.k(), p.bits_per_cell()), (7, 5, 3));
        assert_eq!(p.cells(), 49);
        assert_eq!(p.grid_bits(), 147);
        assert_eq!(p.message_bits(), 75);
        assert!((p.rate() - 25.0 / 49.0).abs() < 1e-15);
    }

    #[test]
    fn zero_message_gives_zero_grid() {
        let p = product_7_5();
        let grid = p.encode_symbols(&vec![0; 25]).unwrap();
        assert!(grid.iter().all(|&c| c == 0));
    }

    #[test]
    fn systematic_block_and_all_lines_check() {
        let p = product_7_5();
        for seed in 0..5u16 {
            let msg: Vec<GfElem> = (0..25).map(|i| (seed * 13 + i * 3 + 1) % 8).collect();
            let grid = p.encode_symbols(&msg).unwrap();
            for i in 0..5 {
                assert_eq!(&grid[i * 7..i * 7 + 5], &msg[i * 5..(i + 1) * 5]);
            }
            let bits = p.component().symbols_to_bits(&grid);
            assert!(p.is_valid_grid(&bits).unwrap());
        }
    }

    #[test]
    fn column_first_encoding_gives_the_same_grid() {
        // Parity-on-parity is order independent for a linear encoder.
        let p = product_7_5();
        let msg: Vec<GfElem> = (0..25).map(|i| (i * 5 + 2) as GfElem % 8).collect();
        let grid = p.encode_symbols(&msg).unwrap();

        let (n, k) = (7, 5);
        let mut alt = vec![0 as GfElem; n * n];
        let mut col_msg = vec![0 as GfElem; k];
        for j in 0..k {
            for i in 0..k {
                col_msg[i] = msg[i * k + j];
            }
            let col = p.component().encode_symbols(&col_msg).unwrap();
            for i in 0..n {
                alt[i * n + j] = col[i];
            }
        }
        for i in 0..n {
            let row = p
                .component()
                .encode_symbols(&alt[i * n..i * n + k].to_vec())
                .unwrap();
            alt[i * n..(i + 1) * n].copy_from_slice(&row);
        }
        assert_eq!(grid, alt);
    }

    #[test]
    fn bit_level_encoding_matches_symbol_encoding() {
        let p = product_7_5();
        let msg: Vec<GfElem> = (0..25).map(|i| (i * 7 + 3) as GfElem % 8).collect();
        let msg_bits = p.component().symbols_to_bits(&msg);
        let grid_bits = p.encode_bits(&msg_bits).unwrap();
        let expect = p
            .component()
            .symbols_to_bits(&p.encode_symbols(&msg).unwrap());
        assert_eq!(grid_bits, expect);
    }

    #[test]
    fn grid_xor_stays_valid_and_flips_do_not() {
        let p = product_7_5();
        let a = p.encode_bits(&{
            let m: Vec<GfElem> = (0..25).map(|i| (i % 8) as GfElem).collect();
            p.component().symbols_to_bits(&m)
        });
        let b = p.encode_bits(&{
            let m: Vec<GfElem> = (0..25).map(|i| ((i * 3 + 1) % 8) as GfElem).collect();
            p.component().symbols_to_bits(&m)
        });
        let (a, b) = (a.unwrap(), b.unwrap());
        let xor: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        assert!(p.is_valid_grid(&xor).unwrap());
        let mut broken = xor;
        broken[31] ^= 1;
        assert!(!p.is_valid_grid(&broken).unwrap());
    }

    #[test]
    fn extended_rs_product_shape() {
        let comp = extend_rs(&rs_code(14, FieldSpec::new(4).unwrap()).unwrap()).unwrap();
        let p = ProductCode::new(comp);
        assert_eq!((p.n(), p.k()), (16, 14));
        assert_eq!(p.grid_bits(), 1024);
        assert!((p.rate() - (14.0f64 / 16.0).powi(2)).abs() < 1e-15);
        let msg: Vec<GfElem> = (0..196).map(|i| (i * 11 + 5) as GfElem % 16).collect();
        let bits = p
            .component()
            .symbols_to_bits(&p.encode_symbols(&msg).unwrap());
        assert!(p.is_valid_grid(&bits).unwrap());
    }

    #[test]
    fn binary_component_product() {
        let p = ProductCode::new(random_linear_code(8, 5, 7).unwrap());
        let msg: Vec<u8> = (0..25).map(|i| (i as u8 * 3 + 1) % 2).collect();
        let grid = p.encode_bits(&msg).unwrap();
        assert_eq!(grid.len(), 64);
        assert!(p.is_valid_grid(&grid).unwrap());
    }
}
