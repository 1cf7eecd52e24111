//! Shared numeric primitives: complex sample vectors, the forward DFT,
//! special functions used by the BER expressions, and seeded random streams.
//!
//! The DFT is unnormalized, `X[k] = sum_n x[n] exp(-j 2 pi k n / M)`, so a
//! unit-amplitude tone sitting on bin `k` produces exactly `M` there.

use std::f64::consts::{PI, TAU};
use std::ops::Index;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use num_complex::Complex64;

/// Baseband sample sequence.
pub type ComplexVector = Vec<Complex64>;

/// Output of [`dft`]; bin `k` holds the coefficient for `exp(j 2 pi k n / M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn into_bins(self) -> Vec<Complex64> {
        self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

impl Index<usize> for Spectrum {
    type Output = Complex64;

    fn index(&self, k: usize) -> &Complex64 {
        &self.bins[k]
    }
}

/// Unnormalized forward DFT.
pub fn dft(x: &[Complex64]) -> Result<Spectrum> {
    if x.is_empty() {
        return Err(Error::invalid("dft of an empty vector"));
    }
    let mut bins = x.to_vec();
    FftPlanner::new().plan_fft_forward(bins.len()).process(&mut bins);
    Ok(Spectrum { bins })
}

/// Inverse of [`dft`] (carries the `1/M` factor).
pub fn inverse_dft(spectrum: &Spectrum) -> ComplexVector {
    let mut x = spectrum.bins.clone();
    FftPlanner::new().plan_fft_inverse(x.len()).process(&mut x);
    let scale = 1.0 / x.len() as f64;
    x.iter_mut().for_each(|v| *v *= scale);
    x
}

/// Gaussian tail probability `Q(z) = P(N(0,1) > z)`.
pub fn q_function(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

/// `H_m = sum_{i=1}^m 1/i`, with `H_0 = 0`.
pub fn harmonic(m: u64) -> f64 {
    // smallest terms first
    (1..=m).rev().map(|i| 1.0 / i as f64).sum()
}

/// Table of `exp(j pi m / M)` for `m = 0..2M`.
///
/// Every chirp and tone used here has a phase of the form `pi/M * p` with an
/// integer `p`, so reducing `p` modulo `2M` and looking it up keeps the
/// samples exact to one rounding regardless of how large `n^2` gets.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    m: i64,
    table: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(m: usize) -> Self {
        let table = (0..2 * m)
            .map(|p| Complex64::from_polar(1.0, PI * p as f64 / m as f64))
            .collect();
        PhaseTable { m: m as i64, table }
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    /// `exp(j pi p / M)` for any integer `p`.
    #[inline]
    pub fn phasor(&self, p: i64) -> Complex64 {
        self.table[p.rem_euclid(2 * self.m) as usize]
    }
}

/// A deterministic random stream identified by `(master_seed, path)`.
///
/// Streams are single-owner; hand each worker its own.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    path: Vec<u64>,
    rng: ChaCha8Rng,
}

/// Derive the stream for `path` under `master_seed`.
///
/// The ChaCha key is the SHA-256 digest of the seed and the length-prefixed
/// path, so distinct paths (including prefixes of one another) give
/// unrelated keys.
pub fn derive_stream(master_seed: u64, path: &[u64]) -> RngStream {
    let mut hasher = Sha256::new();
    hasher.update(b"lcss/rng-stream/v1");
    hasher.update(master_seed.to_le_bytes());
    hasher.update((path.len() as u64).to_le_bytes());
    for p in path {
        hasher.update(p.to_le_bytes());
    }
    let key: [u8; 32] = hasher.finalize().into();
    RngStream {
        master_seed,
        path: path.to_vec(),
        rng: ChaCha8Rng::from_seed(key),
    }
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Uniform draw in `[0, 1)`.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform integer in `0..2^bits` (`bits <= 63`), one `u64` per call.
    #[inline]
    pub fn bits(&mut self, bits: u32) -> u64 {
        self.rng.next_u64() & ((1u64 << bits) - 1)
    }

    /// Circularly-symmetric complex Gaussian with total variance `variance`.
    ///
    /// Box-Muller over exactly two uniforms: the first sets the radius, the
    /// second the angle.
    #[inline]
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        Complex64::from_polar((-variance * u1.ln()).sqrt(), TAU * u2)
    }

    /// Standard normal draw (real part of a unit-per-dimension complex draw).
    pub fn gaussian(&mut self) -> f64 {
        self.complex_gaussian(2.0).re
    }
}
