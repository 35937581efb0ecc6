//! Iterative product decoding: rows and columns exchange extrinsic soft
//! information through the component SISO decoder until the hard decision is
//! a valid product codeword or the iteration budget runs out.
//!
//! Two arithmetic modes share the same schedule (all columns, then all rows,
//! repeated):
//!
//! - *group mode* works on per-cell beliefs over `2^b` values. Each line
//!   decode feeds the SISO `normalize(log P_Ch + log P_A)` per cell, reads
//!   back marginalized APPs, and stores the dampened extrinsic
//!   `log P_A ← α·(log P_APP − log P_Ch − log P_A)` for the next
//!   half-iteration;
//! - *bit mode* works on one LLR per bit of the binary image and runs the
//!   same component decoder with 1-bit cells: SISO input `L_Ch + L_A`,
//!   extrinsic `L_E = L_APP − L_Ch − L_A`, update `L_A ← α·L_E`.
//!
//! Within one half-iteration the lines are disjoint, so cells are read and
//! written exactly once; the hard decision after every half-iteration is the
//! per-cell APP argmax (bit mode: `1{L_APP < 0}`), and the loop exits early
//! the moment it forms a valid product codeword.

use crate::belief::{CellBelief, LLR_CLAMP};
use crate::error::Error;
use crate::gf::GfElem;
use crate::math::log1p_exp;
use crate::product::ProductCode;
use crate::real::Real;
use crate::sogrand::{marginalize_app, sogrand_decode, sogrand_decode_bits, SisoParams};

/// Knobs of a full turbo decode.
#[derive(Debug, Clone)]
pub struct TurboParams<T> {
    /// Extrinsic dampening factor in `[0, 1]`.
    pub alpha: T,
    /// Full iterations (each is a column and a row half-iteration).
    pub i_max: usize,
    /// Component decoder settings.
    pub siso: SisoParams<T>,
    /// Optional hard cap on half-iterations (overrides `2·i_max`); useful
    /// for convergence studies at half-iteration granularity.
    pub max_half_iters: Option<usize>,
}

impl<T: Real> Default for TurboParams<T> {
    fn default() -> Self {
        TurboParams {
            alpha: T::rc(0.5),
            i_max: 8,
            siso: SisoParams::default(),
            max_half_iters: None,
        }
    }
}

impl<T: Real> TurboParams<T> {
    fn validate(&self) -> Result<usize, Error> {
        if !(self.alpha >= T::zero() && self.alpha <= T::one()) {
            return Err(Error::param("alpha", "dampening must lie in [0, 1]"));
        }
        let max_half = self.max_half_iters.unwrap_or(2 * self.i_max);
        if max_half == 0 {
            return Err(Error::param("i_max", "needs at least one half-iteration"));
        }
        Ok(max_half)
    }
}

/// Outcome counters of one decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TurboStats {
    /// Half-iterations actually run.
    pub half_iterations: usize,
    /// Candidate guesses summed over every component decode.
    pub queries: usize,
    /// Whether the returned word is a valid product codeword.
    pub valid: bool,
}

/// Cell indices of one line: column `j` runs down the grid, row `i` across.
fn line_cells(n: usize, line: usize, columns: bool) -> Vec<usize> {
    if columns {
        (0..n).map(|i| i * n + line).collect()
    } else {
        (0..n).map(|j| line * n + j).collect()
    }
}

/// Decodes one received product word from per-cell channel beliefs.
///
/// Returns the hard-decision grid (row-major cells) and run statistics.
pub fn turbo_decode_group<T: Real>(
    p_ch: &[CellBelief<T>],
    code: &ProductCode,
    params: &TurboParams<T>,
) -> Result<(Vec<GfElem>, TurboStats), Error> {
    let n = code.n();
    if p_ch.len() != n * n {
        return Err(Error::Length {
            what: "channel belief grid",
            expected: n * n,
            got: p_ch.len(),
        });
    }
    let max_half = params.validate()?;

    let support: Vec<&[GfElem]> = p_ch.iter().map(|cb| cb.values()).collect();
    let log_ch: Vec<&[T]> = p_ch.iter().map(|cb| cb.log_probs()).collect();
    let mut log_a: Vec<Vec<T>> = support.iter().map(|s| vec![T::zero(); s.len()]).collect();
    let mut hd: Vec<GfElem> = p_ch.iter().map(|cb| cb.arg_max()).collect();

    let mut queries = 0usize;
    let mut half_done = 0usize;
    let mut valid = false;

    for half in 0..max_half {
        let columns = half % 2 == 0;
        for line in 0..n {
            let cells = line_cells(n, line, columns);
            let input: Vec<CellBelief<T>> = cells
                .iter()
                .map(|&c| {
                    let w: Vec<T> = log_ch[c]
                        .iter()
                        .zip(&log_a[c])
                        .map(|(&ch, &a)| ch + a)
                        .collect();
                    CellBelief::from_support(support[c].to_vec(), w)
                })
                .collect::<Result<_, _>>()?;
            let so = sogrand_decode(&input, code.component(), &params.siso)?;
            queries += so.queries;
            let marg = marginalize_app(&so, &input);
            for (p, &c) in cells.iter().enumerate() {
                let mut best = 0usize;
                for k in 1..marg[p].len() {
                    if marg[p][k] > marg[p][best] {
                        best = k;
                    }
                }
                hd[c] = support[c][best];
                if params.alpha.is_zero() {
                    for a in log_a[c].iter_mut() {
                        *a = T::zero();
                    }
                } else {
                    for k in 0..marg[p].len() {
                        let mut log_e = marg[p][k].ln() - log_ch[c][k] - log_a[c][k];
                        if !log_e.is_finite() {
                            log_e = T::log_floor();
                        }
                        log_a[c][k] = params.alpha * log_e;
                    }
                }
            }
        }
        half_done = half + 1;
        let bits = code.component().symbols_to_bits(&hd);
        if code.is_valid_grid(&bits)? {
            valid = true;
            break;
        }
    }

    Ok((
        hd,
        TurboStats {
            half_iterations: half_done,
            queries,
            valid,
        },
    ))
}

/// Decodes one received product word from per-bit channel LLRs over the
/// binary image (grid-bit order: row-major cells, first transmitted bit of a
/// cell first).
pub fn turbo_decode_bit<T: Real>(
    l_ch: &[T],
    code: &ProductCode,
    params: &TurboParams<T>,
) -> Result<(Vec<GfElem>, TurboStats), Error> {
    let n = code.n();
    let b = code.bits_per_cell() as usize;
    let grid_bits = n * n * b;
    if l_ch.len() != grid_bits {
        return Err(Error::Length {
            what: "channel LLR grid",
            expected: grid_bits,
            got: l_ch.len(),
        });
    }
    let max_half = params.validate()?;
    if l_ch.iter().any(|l| !l.is_finite()) {
        return Err(Error::param("l_ch", "channel LLRs must be finite"));
    }

    let clamp = T::rc(LLR_CLAMP);
    let mut l_a = vec![T::zero(); grid_bits];
    let mut l_app = l_ch.to_vec();

    let mut queries = 0usize;
    let mut half_done = 0usize;
    let mut valid = false;

    for half in 0..max_half {
        let columns = half % 2 == 0;
        for line in 0..n {
            let bit_ids: Vec<usize> = line_cells(n, line, columns)
                .into_iter()
                .flat_map(|c| (0..b).map(move |u| c * b + u))
                .collect();
            let input: Vec<CellBelief<T>> = bit_ids
                .iter()
                .map(|&g| {
                    let l = l_ch[g] + l_a[g];
                    CellBelief::from_support(vec![0, 1], vec![-log1p_exp(-l), -log1p_exp(l)])
                })
                .collect::<Result<_, _>>()?;
            let so = sogrand_decode_bits(&input, code.component(), &params.siso)?;
            queries += so.queries;
            let marg = marginalize_app(&so, &input);
            for (p, &g) in bit_ids.iter().enumerate() {
                let raw = marg[p][0].ln() - marg[p][1].ln();
                let app = raw.max(-clamp).min(clamp);
                let l_e = app - l_ch[g] - l_a[g];
                l_app[g] = app;
                l_a[g] = if params.alpha.is_zero() {
                    T::zero()
                } else {
                    params.alpha * l_e
                };
            }
        }
        half_done = half + 1;
        let bits: Vec<u8> = l_app.iter().map(|&l| u8::from(l < T::zero())).collect();
        if code.is_valid_grid(&bits)? {
            valid = true;
            break;
        }
    }

    let bits: Vec<u8> = l_app.iter().map(|&l| u8::from(l < T::zero())).collect();
    let word = code.component().bits_to_symbols(&bits)?;
    Ok((
        word,
        TurboStats {
            half_iterations: half_done,
            queries,
            valid,
        },
    ))
}
