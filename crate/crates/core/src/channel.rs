//! Modulation and the correlated-noise channel.
//!
//! Constellations are unit-average-energy ASK and square QAM. BPSK maps
//! `0 → +1`, `1 → −1`; larger ASK uses the binary reflected Gray code over
//! amplitudes in ascending order, so `2^ℓ`-ASK has spacing `2a` with
//! `a = √(3/(M²−1))`. A QAM label splits into its high half (in-phase ASK
//! label) and low half (quadrature), and the complex point is scaled by
//! `1/√2`. Bits map to labels most-significant first.
//!
//! The noise process is first-order Gauss-Markov with per-dimension variance
//! `σ²` and correlation `ρ`: `Z_1 = σW_1`, `Z_i = ρZ_{i−1} + √(1−ρ²)·σW_i`.
//! The same statistics arise from a unit-memory ISI channel
//! `Ỹ_i = X_i − ρX_{i−1} + Z̃_i` with white noise of variance `σ̃² = σ²(1−ρ²)`
//! followed by the recursive equalizer `Y_i = Ỹ_i + ρY_{i−1}`. Fed identical
//! normal draws, the two pipelines differ only in a transient from the first
//! sample (the direct process starts from the stationary law, the equalized
//! one from the innovation variance) that decays as `ρ^{i−1}`.

use num_complex::Complex;
use rand::Rng;

use crate::error::Error;
use crate::real::Real;
use crate::rng::standard_normal;

/// Real-line or complex-plane constellation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstellationKind {
    Ask,
    Qam,
}

/// A labelled constellation; `points[label]` is the transmitted symbol.
#[derive(Debug, Clone)]
pub struct Constellation<T> {
    kind: ConstellationKind,
    bits_per_symbol: u32,
    points: Vec<Complex<T>>,
}

impl<T: Real> Constellation<T> {
    /// `2^bits`-ASK with unit average energy.
    pub fn ask(bits: u32) -> Result<Self, Error> {
        if bits < 1 || bits > 8 {
            return Err(Error::param("bits", "ASK needs 1..=8 bits per symbol"));
        }
        let m = 1usize << bits;
        let mut points = vec![Complex::new(T::zero(), T::zero()); m];
        if bits == 1 {
            points[0] = Complex::new(T::one(), T::zero());
            points[1] = Complex::new(-T::one(), T::zero());
        } else {
            let a = T::rc((3.0 / ((m * m - 1) as f64)).sqrt());
            for idx in 0..m {
                let label = idx ^ (idx >> 1);
                let amp = a * T::rc(2.0 * idx as f64 - (m as f64 - 1.0));
                points[label] = Complex::new(amp, T::zero());
            }
        }
        Ok(Constellation {
            kind: ConstellationKind::Ask,
            bits_per_symbol: bits,
            points,
        })
    }

    /// Square `2^bits`-QAM: the in-phase component takes the high half of the
    /// label, the quadrature the low half, each through the ASK map above.
    pub fn qam(bits: u32) -> Result<Self, Error> {
        if bits < 2 || bits % 2 != 0 || bits > 16 {
            return Err(Error::param(
                "bits",
                "QAM needs an even number of bits per symbol in 2..=16",
            ));
        }
        let half = bits / 2;
        let axis = Constellation::<T>::ask(half)?;
        let side = 1usize << half;
        let scale = T::rc(0.5f64.sqrt());
        let m = 1usize << bits;
        let mut points = Vec::with_capacity(m);
        for label in 0..m {
            let i_amp = axis.point_real(label >> half);
            let q_amp = axis.point_real(label & (side - 1));
            points.push(Complex::new(i_amp * scale, q_amp * scale));
        }
        Ok(Constellation {
            kind: ConstellationKind::Qam,
            bits_per_symbol: bits,
            points,
        })
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    /// True when all points lie on the real line.
    pub fn is_real(&self) -> bool {
        self.kind == ConstellationKind::Ask
    }

    /// Bits carried per symbol (`ℓ`).
    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    /// Number of points (`M = 2^ℓ`).
    pub fn order(&self) -> usize {
        self.points.len()
    }

    /// Points per axis: `M` for ASK, `2^{ℓ/2}` for QAM.
    pub fn side(&self) -> usize {
        match self.kind {
            ConstellationKind::Ask => self.points.len(),
            ConstellationKind::Qam => 1usize << (self.bits_per_symbol / 2),
        }
    }

    pub fn point(&self, label: usize) -> Complex<T> {
        self.points[label]
    }

    /// Real part of a point; meaningful for ASK, where imag is zero.
    pub fn point_real(&self, label: usize) -> T {
        self.points[label].re
    }

    /// All points indexed by label.
    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    /// Reads `ℓ` bits most-significant first into a label.
    pub fn label_of_bits(&self, bits: &[u8]) -> Result<usize, Error> {
        if bits.len() != self.bits_per_symbol as usize {
            return Err(Error::Length {
                what: "label bits",
                expected: self.bits_per_symbol as usize,
                got: bits.len(),
            });
        }
        Ok(bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize))
    }

    /// Splits a bit stream into `ℓ`-bit labels.
    pub fn labels_of_bits(&self, bits: &[u8]) -> Result<Vec<usize>, Error> {
        let l = self.bits_per_symbol as usize;
        if bits.len() % l != 0 {
            return Err(Error::param(
                "bits",
                format!("length {} is not a multiple of ℓ = {l}", bits.len()),
            ));
        }
        bits.chunks_exact(l).map(|c| self.label_of_bits(c)).collect()
    }

    /// Maps a bit stream to channel symbols.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex<T>>, Error> {
        Ok(self
            .labels_of_bits(bits)?
            .into_iter()
            .map(|l| self.points[l])
            .collect())
    }

    /// Real-domain modulation for ASK constellations.
    pub fn modulate_real(&self, bits: &[u8]) -> Result<Vec<T>, Error> {
        if !self.is_real() {
            return Err(Error::param("constellation", "real modulation needs ASK"));
        }
        Ok(self
            .labels_of_bits(bits)?
            .into_iter()
            .map(|l| self.points[l].re)
            .collect())
    }
}

/// Noise level and correlation of the Gauss-Markov process (per real
/// dimension for complex channels).
#[derive(Debug, Clone, Copy)]
pub struct ChannelParams<T> {
    pub sigma: T,
    pub rho: T,
}

impl<T: Real> ChannelParams<T> {
    pub fn new(sigma: T, rho: T) -> Result<Self, Error> {
        if !(sigma >= T::zero()) || !sigma.is_finite() {
            return Err(Error::param("sigma", "must be finite and ≥ 0"));
        }
        if !(rho.abs() < T::one()) {
            return Err(Error::param("rho", "must satisfy |ρ| < 1"));
        }
        Ok(ChannelParams { sigma, rho })
    }

    /// Converts an information-bit SNR to the noise level via
    /// `σ² = 1 / (2·r·ℓ·10^{dB/10})`, with `r` the overall code rate and
    /// `ℓ` the bits per symbol.
    pub fn from_eb_n0_db(eb_n0_db: T, rate: T, bits_per_symbol: u32, rho: T) -> Result<Self, Error> {
        if !(rate > T::zero()) {
            return Err(Error::param("rate", "must be positive"));
        }
        let snr = T::rc(10.0).powf(eb_n0_db / T::rc(10.0));
        let sigma2 = (T::rc(2.0) * rate * T::rc(bits_per_symbol as f64) * snr).recip();
        ChannelParams::new(sigma2.sqrt(), rho)
    }

    pub fn sigma2(&self) -> T {
        self.sigma * self.sigma
    }
}

/// One realization of the Gauss-Markov process.
pub fn gauss_markov_noise<T: Real, R: Rng + ?Sized>(
    params: &ChannelParams<T>,
    len: usize,
    rng: &mut R,
) -> Vec<T> {
    let mut z = Vec::with_capacity(len);
    let innov = params.sigma * (T::one() - params.rho * params.rho).sqrt();
    let mut prev = T::zero();
    for i in 0..len {
        let w = T::rc(standard_normal(rng));
        let zi = if i == 0 {
            params.sigma * w
        } else {
            params.rho * prev + innov * w
        };
        z.push(zi);
        prev = zi;
    }
    z
}

/// Complex Gauss-Markov noise: independent processes on the real and
/// imaginary parts, drawing the pair (re, im) for each sample in turn.
pub fn gauss_markov_noise_complex<T: Real, R: Rng + ?Sized>(
    params: &ChannelParams<T>,
    len: usize,
    rng: &mut R,
) -> Vec<Complex<T>> {
    let mut z = Vec::with_capacity(len);
    let innov = params.sigma * (T::one() - params.rho * params.rho).sqrt();
    let mut prev = Complex::new(T::zero(), T::zero());
    for i in 0..len {
        let w = Complex::new(T::rc(standard_normal(rng)), T::rc(standard_normal(rng)));
        let zi = if i == 0 {
            w * params.sigma
        } else {
            prev * params.rho + w * innov
        };
        z.push(zi);
        prev = zi;
    }
    z
}

/// `Y_i = X_i + Z_i` with Gauss-Markov `Z`.
pub fn transmit_gm<T: Real, R: Rng + ?Sized>(
    x: &[T],
    params: &ChannelParams<T>,
    rng: &mut R,
) -> Vec<T> {
    gauss_markov_noise(params, x.len(), rng)
        .into_iter()
        .zip(x)
        .map(|(z, &xi)| xi + z)
        .collect()
}

/// Complex counterpart of [`transmit_gm`].
pub fn transmit_gm_complex<T: Real, R: Rng + ?Sized>(
    x: &[Complex<T>],
    params: &ChannelParams<T>,
    rng: &mut R,
) -> Vec<Complex<T>> {
    gauss_markov_noise_complex(params, x.len(), rng)
        .into_iter()
        .zip(x)
        .map(|(z, &xi)| xi + z)
        .collect()
}

/// Unit-memory ISI channel `Ỹ_i = X_i − ρX_{i−1} + Z̃_i` (taking `X_0 = 0`)
/// with i.i.d. white noise of variance `σ̃² = σ²(1−ρ²)`.
pub fn transmit_isi<T: Real, R: Rng + ?Sized>(
    x: &[T],
    params: &ChannelParams<T>,
    rng: &mut R,
) -> Vec<T> {
    let innov = params.sigma * (T::one() - params.rho * params.rho).sqrt();
    let mut y = Vec::with_capacity(x.len());
    let mut prev = T::zero();
    for &xi in x {
        let w = T::rc(standard_normal(rng));
        y.push(xi - params.rho * prev + innov * w);
        prev = xi;
    }
    y
}

/// Complex counterpart of [`transmit_isi`].
pub fn transmit_isi_complex<T: Real, R: Rng + ?Sized>(
    x: &[Complex<T>],
    params: &ChannelParams<T>,
    rng: &mut R,
) -> Vec<Complex<T>> {
    let innov = params.sigma * (T::one() - params.rho * params.rho).sqrt();
    let mut y = Vec::with_capacity(x.len());
    let mut prev = Complex::new(T::zero(), T::zero());
    for &xi in x {
        let w = Complex::new(T::rc(standard_normal(rng)), T::rc(standard_normal(rng)));
        y.push(xi - prev * params.rho + w * innov);
        prev = xi;
    }
    y
}

/// Recursive equalizer `Y_i = Ỹ_i + ρY_{i−1}`, inverting the ISI filter.
pub fn equalize<T: Real>(y_tilde: &[T], rho: T) -> Vec<T> {
    let mut y = Vec::with_capacity(y_tilde.len());
    let mut prev = T::zero();
    for &yt in y_tilde {
        let yi = yt + rho * prev;
        y.push(yi);
        prev = yi;
    }
    y
}

/// Complex counterpart of [`equalize`].
pub fn equalize_complex<T: Real>(y_tilde: &[Complex<T>], rho: T) -> Vec<Complex<T>> {
    let mut y = Vec::with_capacity(y_tilde.len());
    let mut prev = Complex::new(T::zero(), T::zero());
    for &yt in y_tilde {
        let yi = yt + prev * rho;
        y.push(yi);
        prev = yi;
    }
    y
}
