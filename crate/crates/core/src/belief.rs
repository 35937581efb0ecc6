//! Posterior preprocessing: from equalized channel observations to per-cell
//! and per-bit soft information.
//!
//! The observation stream is cut into windows of `g` consecutive symbols.
//! Because the noise is Gauss-Markov, the exact joint likelihood of a window
//! is a multivariate normal with AR(1) covariance `C_ij = σ²ρ^{|i−j|}`; its
//! inverse is tridiagonal and its determinant is `σ^{2g}(1−ρ²)^{g−1}`, so no
//! generic linear algebra is needed. Three posterior schemes are provided:
//!
//! - `gw` ([`gw_posterior`]): the full joint posterior over the `M^g` symbol
//!   tuples of one window;
//! - `bw` ([`bw_posterior`]): the per-symbol marginals of that joint;
//! - `bs` ([`bs_posterior`]): per-symbol posteriors that ignore the noise
//!   correlation altogether (white-noise metric at the stationary variance).
//!
//! For QAM the in-phase and quadrature components are two independent real
//! ASK windows, so the joint factorizes into a product over the two axes.
//!
//! A window spans `g·ℓ` bits, which by construction equals one `b`-bit cell
//! of the product code. Cell values store their first transmitted bit in the
//! least-significant position, while each symbol label reads its `ℓ` bits
//! most-significant first; [`cell_to_tuple_index`] converts between the two.
//! [`CellBelief`] keeps the `n_B` most probable cell values (ties broken
//! toward smaller values), renormalized over the retained support.

use num_complex::Complex;

use crate::channel::{ChannelParams, Constellation};
use crate::error::Error;
use crate::gf::GfElem;
use crate::math::{log_sum_exp_pair, normalize_log};
use crate::real::Real;

/// Magnitude at which log-likelihood ratios are clamped when probabilities
/// reach zero. Far beyond any operating-point LLR, so ordering is preserved.
pub const LLR_CLAMP: f64 = 40.0;

/// The three posterior-computation schemes, written `gw`/`bw`/`bs` in
/// configs and output tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Joint posterior over each window of `g` symbols.
    GroupWindow,
    /// Per-symbol marginals of the window posterior.
    BitWindow,
    /// Per-symbol posteriors under the white-noise metric, ignoring the
    /// correlation across the window.
    BitSymbol,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::GroupWindow, Scheme::BitWindow, Scheme::BitSymbol];
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "gw" => Ok(Scheme::GroupWindow),
            "bw" => Ok(Scheme::BitWindow),
            "bs" => Ok(Scheme::BitSymbol),
            _ => Err(Error::param(
                "scheme",
                format!("unknown scheme `{s}` (expected gw, bw, or bs)"),
            )),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::GroupWindow => "gw",
            Scheme::BitWindow => "bw",
            Scheme::BitSymbol => "bs",
        })
    }
}

fn clamp_llr<T: Real>(l: T) -> T {
    l.max(-T::rc(LLR_CLAMP)).min(T::rc(LLR_CLAMP))
}

/// Quadratic form `zᵀR⁻¹z` for the AR(1) correlation matrix `R_ij = ρ^{|i−j|}`
/// (unit variance), using the closed-form tridiagonal inverse.
fn ar1_quadform<T: Real>(z: &[T], rho: T) -> T {
    let g = z.len();
    if g == 1 {
        return z[0] * z[0];
    }
    let mut sq = T::zero();
    for &zi in z {
        sq += zi * zi;
    }
    let mut sq_inner = T::zero();
    for &zi in &z[1..g - 1] {
        sq_inner += zi * zi;
    }
    let mut cross = T::zero();
    for w in z.windows(2) {
        cross += w[0] * w[1];
    }
    (sq + rho * rho * sq_inner - T::rc(2.0) * rho * cross) / (T::one() - rho * rho)
}

/// Log-density of a zero-mean Gauss-Markov vector: `−½[g·ln(2π) + ln|C| +
/// zᵀC⁻¹z]` with `|C| = σ^{2g}(1−ρ²)^{g−1}`.
pub fn mvn_logpdf<T: Real>(z: &[T], rho: T, sigma2: T) -> Result<T, Error> {
    let g = z.len();
    if g < 1 {
        return Err(Error::param("z", "needs at least one component"));
    }
    if !(rho.abs() < T::one()) {
        return Err(Error::param("rho", "must satisfy |ρ| < 1"));
    }
    if !(sigma2 > T::zero()) {
        return Err(Error::param("sigma2", "must be positive"));
    }
    let g_t = T::rc(g as f64);
    let log_det = g_t * sigma2.ln() + T::rc((g - 1) as f64) * (T::one() - rho * rho).ln();
    let quad = ar1_quadform(z, rho) / sigma2;
    Ok(-T::rc(0.5) * (g_t * T::rc(2.0 * std::f64::consts::PI).ln() + log_det + quad))
}

/// Joint posterior over the `M^g` symbol tuples of one window.
///
/// Tuple index convention: the first symbol of the window is the most
/// significant digit, `index = Σ_t label_t · M^{g−1−t}`.
#[derive(Debug, Clone)]
pub struct GroupPosterior<T> {
    g: usize,
    m: usize,
    log_probs: Vec<T>,
}

impl<T: Real> GroupPosterior<T> {
    /// Normalizes raw log-weights (length `M^g`) into a posterior.
    pub fn from_log_weights(g: usize, m: usize, mut log_weights: Vec<T>) -> Result<Self, Error> {
        if g < 1 {
            return Err(Error::param("g", "window needs at least one symbol"));
        }
        if m < 2 {
            return Err(Error::param("m", "alphabet needs at least two symbols"));
        }
        let total = checked_tuple_count(m, g)?;
        if log_weights.len() != total {
            return Err(Error::Length {
                what: "tuple log-weights",
                expected: total,
                got: log_weights.len(),
            });
        }
        normalize_log(&mut log_weights)?;
        Ok(GroupPosterior {
            g,
            m,
            log_probs: log_weights,
        })
    }

    /// Window length in symbols.
    pub fn g(&self) -> usize {
        self.g
    }

    /// Constellation order.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Normalized log-probabilities over all `M^g` tuples.
    pub fn log_probs(&self) -> &[T] {
        &self.log_probs
    }

    pub fn log_prob(&self, tuple_index: usize) -> T {
        self.log_probs[tuple_index]
    }

    /// Label of symbol `t` within tuple `index`.
    pub fn label_at(&self, index: usize, t: usize) -> usize {
        (index / self.m.pow((self.g - 1 - t) as u32)) % self.m
    }
}

fn checked_tuple_count(m: usize, g: usize) -> Result<usize, Error> {
    let mut total = 1usize;
    for _ in 0..g {
        total = total
            .checked_mul(m)
            .filter(|&t| t <= 1 << 24)
            .ok_or_else(|| Error::param("g", "window posterior M^g too large"))?;
    }
    Ok(total)
}

/// Joint window posterior for a real ASK constellation under Gauss-Markov
/// noise: `P(x^g | y^g) ∝ exp(−½ zᵀC⁻¹z)` with `z = y − x(tuple)`.
pub fn gw_posterior<T: Real>(
    y: &[T],
    c: &Constellation<T>,
    p: &ChannelParams<T>,
) -> Result<GroupPosterior<T>, Error> {
    if !c.is_real() {
        return Err(Error::param("constellation", "gw_posterior needs ASK; use gw_posterior_qam"));
    }
    let g = y.len();
    let m = c.order();
    let total = checked_tuple_count(m, g)?;
    let sigma2 = p.sigma2();
    if !(sigma2 > T::zero()) {
        return Err(Error::param("sigma", "must be positive"));
    }
    let mut z = vec![T::zero(); g];
    let mut log_weights = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        for t in (0..g).rev() {
            let label = rest % m;
            rest /= m;
            z[t] = y[t] - c.point_real(label);
        }
        log_weights.push(-T::rc(0.5) * ar1_quadform(&z, p.rho) / sigma2);
    }
    GroupPosterior::from_log_weights(g, m, log_weights)
}

/// Joint window posterior for QAM: the in-phase and quadrature components are
/// independent real AR(1) windows, so the tuple log-likelihood is the sum of
/// the two per-axis quadratic forms.
pub fn gw_posterior_qam<T: Real>(
    y: &[Complex<T>],
    c: &Constellation<T>,
    p: &ChannelParams<T>,
) -> Result<GroupPosterior<T>, Error> {
    if c.is_real() {
        return Err(Error::param("constellation", "gw_posterior_qam needs QAM"));
    }
    let g = y.len();
    let m = c.order();
    let total = checked_tuple_count(m, g)?;
    let sigma2 = p.sigma2();
    if !(sigma2 > T::zero()) {
        return Err(Error::param("sigma", "must be positive"));
    }
    let mut z_re = vec![T::zero(); g];
    let mut z_im = vec![T::zero(); g];
    let mut log_weights = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        for t in (0..g).rev() {
            let label = rest % m;
            rest /= m;
            let pt = c.point(label);
            z_re[t] = y[t].re - pt.re;
            z_im[t] = y[t].im - pt.im;
        }
        let quad = ar1_quadform(&z_re, p.rho) + ar1_quadform(&z_im, p.rho);
        log_weights.push(-T::rc(0.5) * quad / sigma2);
    }
    GroupPosterior::from_log_weights(g, m, log_weights)
}

/// Per-symbol marginals of a window posterior (`g` log-domain distributions
/// over the `M` labels).
pub fn bw_posterior<T: Real>(gp: &GroupPosterior<T>) -> Vec<Vec<T>> {
    let (g, m) = (gp.g(), gp.m());
    let mut out = vec![vec![T::neg_infinity(); m]; g];
    for (idx, &lp) in gp.log_probs().iter().enumerate() {
        let mut rest = idx;
        for t in (0..g).rev() {
            let label = rest % m;
            rest /= m;
            out[t][label] = log_sum_exp_pair(out[t][label], lp);
        }
    }
    out
}

/// Symbol-wise posterior that ignores noise correlation:
/// `P(x | y) ∝ exp(−(y−x)²/(2σ²))` at the stationary variance.
pub fn bs_posterior<T: Real>(y: T, c: &Constellation<T>, sigma2: T) -> Result<Vec<T>, Error> {
    if !c.is_real() {
        return Err(Error::param("constellation", "bs_posterior needs ASK; use bs_posterior_qam"));
    }
    if !(sigma2 > T::zero()) {
        return Err(Error::param("sigma2", "must be positive"));
    }
    let half = T::rc(0.5) / sigma2;
    let mut logw: Vec<T> = (0..c.order())
        .map(|v| {
            let d = y - c.point_real(v);
            -half * d * d
        })
        .collect();
    normalize_log(&mut logw)?;
    Ok(logw)
}

/// QAM counterpart of [`bs_posterior`]: `P(x | y) ∝ exp(−|y−x|²/(2σ²))` with
/// `σ²` the per-component variance.
pub fn bs_posterior_qam<T: Real>(
    y: Complex<T>,
    c: &Constellation<T>,
    sigma2: T,
) -> Result<Vec<T>, Error> {
    if c.is_real() {
        return Err(Error::param("constellation", "bs_posterior_qam needs QAM"));
    }
    if !(sigma2 > T::zero()) {
        return Err(Error::param("sigma2", "must be positive"));
    }
    let half = T::rc(0.5) / sigma2;
    let mut logw: Vec<T> = (0..c.order())
        .map(|v| {
            let d = y - c.point(v);
            -half * (d.re * d.re + d.im * d.im)
        })
        .collect();
    normalize_log(&mut logw)?;
    Ok(logw)
}

/// Marginalizes a log-domain symbol distribution (indexed by label) to its
/// `ℓ` bit LLRs in transmitted order: `LLR_s = log P(bit_s = 0) − log P(bit_s
/// = 1)`, where `s = 0` is the first transmitted (most significant label)
/// bit. Clamped at ±[`LLR_CLAMP`].
pub fn symbol_to_bit_llrs<T: Real>(log_dist: &[T]) -> Result<Vec<T>, Error> {
    let m = log_dist.len();
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::param("log_dist", "length must be a power of two ≥ 2"));
    }
    let ell = m.trailing_zeros();
    let mut llrs = Vec::with_capacity(ell as usize);
    for s in 0..ell {
        let bit_pos = ell - 1 - s;
        let mut l0 = T::neg_infinity();
        let mut l1 = T::neg_infinity();
        for (v, &lp) in log_dist.iter().enumerate() {
            if (v >> bit_pos) & 1 == 0 {
                l0 = log_sum_exp_pair(l0, lp);
            } else {
                l1 = log_sum_exp_pair(l1, lp);
            }
        }
        llrs.push(clamp_llr(l0 - l1));
    }
    Ok(llrs)
}

/// Bit index mapping between one `b`-bit cell value and its window of `g`
/// symbols of `ℓ` bits each (`b = g·ℓ`): cell bit `u` is the `u`-th
/// transmitted bit, and each consecutive `ℓ`-bit chunk is read
/// most-significant-first as a symbol label. Returns the tuple index with
/// the first symbol most significant.
pub fn cell_to_tuple_index(mu: GfElem, g: usize, ell: u32) -> usize {
    let m = 1usize << ell;
    let mut idx = 0usize;
    for t in 0..g {
        let mut label = 0usize;
        for u in 0..ell {
            let bit = ((mu >> (t as u32 * ell + u)) & 1) as usize;
            label = (label << 1) | bit;
        }
        idx = idx * m + label;
    }
    idx
}

/// Reorders a window posterior into a log-distribution over the `2^b` cell
/// values (`b = g·ℓ`), indexed so bit `u` of the value is the `u`-th
/// transmitted bit of the cell.
pub fn cell_log_dist_from_group<T: Real>(gp: &GroupPosterior<T>) -> Result<Vec<T>, Error> {
    if !gp.m().is_power_of_two() {
        return Err(Error::param("m", "cell mapping needs a power-of-two alphabet"));
    }
    let ell = gp.m().trailing_zeros();
    let b = gp.g() as u32 * ell;
    if b > 16 {
        return Err(Error::param("g", "cell wider than 16 bits"));
    }
    Ok((0..1usize << b)
        .map(|mu| gp.log_prob(cell_to_tuple_index(mu as GfElem, gp.g(), ell)))
        .collect())
}

/// Builds the cell log-distribution from independent per-symbol log
/// distributions (the `bw`/`bs` schemes): the product over the window.
pub fn cell_log_dist_from_symbols<T: Real>(dists: &[Vec<T>]) -> Result<Vec<T>, Error> {
    let g = dists.len();
    if g == 0 {
        return Err(Error::param("dists", "needs at least one symbol"));
    }
    let m = dists[0].len();
    if m < 2 || !m.is_power_of_two() || dists.iter().any(|d| d.len() != m) {
        return Err(Error::param("dists", "equal power-of-two lengths required"));
    }
    let ell = m.trailing_zeros();
    let b = g as u32 * ell;
    if b > 16 {
        return Err(Error::param("dists", "cell wider than 16 bits"));
    }
    let mut out = Vec::with_capacity(1usize << b);
    for mu in 0..1usize << b {
        let mut lp = T::zero();
        let mut rest = cell_to_tuple_index(mu as GfElem, g, ell);
        for t in (0..g).rev() {
            lp += dists[t][rest % m];
            rest /= m;
        }
        out.push(lp);
    }
    Ok(out)
}

/// Per-bit LLRs of one cell's log-distribution (over `2^b` values), in
/// transmitted bit order (value bit `u` ↔ stream bit `u`). Clamped.
pub fn cell_bit_llrs<T: Real>(cell_log_dist: &[T]) -> Result<Vec<T>, Error> {
    let size = cell_log_dist.len();
    if size < 2 || !size.is_power_of_two() {
        return Err(Error::param("cell_log_dist", "length must be a power of two ≥ 2"));
    }
    let b = size.trailing_zeros();
    let mut llrs = Vec::with_capacity(b as usize);
    for u in 0..b {
        let mut l0 = T::neg_infinity();
        let mut l1 = T::neg_infinity();
        for (v, &lp) in cell_log_dist.iter().enumerate() {
            if (v >> u) & 1 == 0 {
                l0 = log_sum_exp_pair(l0, lp);
            } else {
                l1 = log_sum_exp_pair(l1, lp);
            }
        }
        llrs.push(clamp_llr(l0 - l1));
    }
    Ok(llrs)
}

/// Per-bit marginals `(P(bit_u = 0), P(bit_u = 1))` of a probability-domain
/// cell distribution, in transmitted bit order.
pub fn bit_marginals<T: Real>(cell_dist: &[T]) -> Result<Vec<(T, T)>, Error> {
    let size = cell_dist.len();
    if size < 2 || !size.is_power_of_two() {
        return Err(Error::param("cell_dist", "length must be a power of two ≥ 2"));
    }
    let b = size.trailing_zeros();
    let mut out = Vec::with_capacity(b as usize);
    for u in 0..b {
        let mut p0 = T::zero();
        let mut p1 = T::zero();
        for (v, &p) in cell_dist.iter().enumerate() {
            if (v >> u) & 1 == 0 {
                p0 += p;
            } else {
                p1 += p;
            }
        }
        out.push((p0, p1));
    }
    Ok(out)
}

/// Truncated per-cell belief: the retained cell values (ascending) with
/// log-probabilities renormalized over the retained support.
#[derive(Debug, Clone)]
pub struct CellBelief<T> {
    values: Vec<GfElem>,
    logp: Vec<T>,
}

impl<T: Real> CellBelief<T> {
    /// Keeps the `n_b` most probable entries of a full log-distribution
    /// (index = cell value). Ties prefer smaller values; zero-probability
    /// entries are never retained.
    pub fn from_log_probs(log_probs: &[T], n_b: usize) -> Result<Self, Error> {
        if n_b < 1 {
            return Err(Error::param("n_b", "must retain at least one value"));
        }
        if log_probs.is_empty() {
            return Err(Error::param("log_probs", "empty distribution"));
        }
        let mut order: Vec<usize> = (0..log_probs.len())
            .filter(|&v| log_probs[v] > T::neg_infinity())
            .collect();
        if order.is_empty() {
            return Err(Error::AllNegInfinity);
        }
        order.sort_by(|&a, &b| {
            log_probs[b]
                .partial_cmp(&log_probs[a])
                .expect("belief log-probabilities must not be NaN")
                .then(a.cmp(&b))
        });
        order.truncate(n_b);
        order.sort_unstable();
        let values: Vec<GfElem> = order.iter().map(|&v| v as GfElem).collect();
        let mut logp: Vec<T> = order.iter().map(|&v| log_probs[v]).collect();
        normalize_log(&mut logp)?;
        Ok(CellBelief { values, logp })
    }

    /// Wraps an explicit support (ascending, unique values) with log-weights,
    /// normalizing over it.
    pub fn from_support(values: Vec<GfElem>, mut logp: Vec<T>) -> Result<Self, Error> {
        if values.is_empty() || values.len() != logp.len() {
            return Err(Error::param("values", "support and weights must match and be nonempty"));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("values", "support must be strictly ascending"));
        }
        normalize_log(&mut logp)?;
        Ok(CellBelief { values, logp })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Retained cell values, ascending.
    pub fn values(&self) -> &[GfElem] {
        &self.values
    }

    /// Normalized log-probabilities, aligned with [`values`](Self::values).
    pub fn log_probs(&self) -> &[T] {
        &self.logp
    }

    /// Log-probability of a value, or `None` when it is outside the support.
    pub fn log_prob_of(&self, v: GfElem) -> Option<T> {
        self.values.binary_search(&v).ok().map(|i| self.logp[i])
    }

    /// Most probable value; ties resolve to the smallest value.
    pub fn arg_max(&self) -> GfElem {
        let mut best = 0usize;
        for i in 1..self.values.len() {
            if self.logp[i] > self.logp[best] {
                best = i;
            }
        }
        self.values[best]
    }

    pub fn iter(&self) -> impl Iterator<Item = (GfElem, T)> + '_ {
        self.values.iter().copied().zip(self.logp.iter().copied())
    }
}

/// Converts one window posterior per cell into a grid of truncated beliefs.
pub fn cell_beliefs_from_groups<T: Real>(
    gps: &[GroupPosterior<T>],
    n_b: usize,
) -> Result<Vec<CellBelief<T>>, Error> {
    gps.iter()
        .map(|gp| CellBelief::from_log_probs(&cell_log_dist_from_group(gp)?, n_b))
        .collect()
}
