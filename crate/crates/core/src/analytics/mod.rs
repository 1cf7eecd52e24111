//! Closed-form analysis: Gauss sums, inner products, interference, BER
//! theory, spectral efficiency, receiver complexity and PAPR.

mod gauss;
mod interference;
pub mod oracle;
mod theory;

pub use gauss::{gauss_sum_brute, gauss_sum_closed, theta_magnitude, GaussSumParams};
pub use interference::{
    cross_rate_inner_product, inner_product_closed, inner_product_components, interference_power, interference_profile,
    InterferenceDecomposition, DEFAULT_INTERFERENCE_SAMPLES,
};
pub use theory::{effective_snr, theoretical_ber, theoretical_ber_ebn0, BerTheoryInput, BerVariant, TheoryMode};

use crate::error::{Error, Result};
use crate::numeric::Complex64;
use crate::waveforms::{ModulationConfig, Scheme, Waveform};

/// Bits per second per hertz: bits per symbol over `M`.
pub fn spectral_efficiency(cfg: &ModulationConfig) -> f64 {
    cfg.bits_per_symbol() as f64 / cfg.m() as f64
}

/// Real operations per received symbol: one de-chirp plus one radix-2 FFT
/// plus peak search per chirp rate.
pub fn receiver_complexity(cfg: &ModulationConfig) -> u64 {
    let m = cfg.m() as u64;
    let sf = cfg.sf() as u64;
    let single = 4 * m * sf - 6 * m + 8;
    match cfg.scheme() {
        Scheme::Lora => single,
        Scheme::TdmCss | Scheme::IqTdmCss | Scheme::DmTdmCss => 2 * single,
        Scheme::Lcss | Scheme::Ldmcss => cfg.layers() as u64 * single,
    }
}

/// Peak-to-average power ratio (linear).
pub fn papr(w: &Waveform) -> Result<f64> {
    papr_of(&w.samples)
}

pub fn papr_of(x: &[Complex64]) -> Result<f64> {
    let (peak, total) = x
        .iter()
        .map(|v| v.norm_sqr())
        .fold((0.0f64, 0.0f64), |(p, t), e| (p.max(e), t + e));
    if total == 0.0 {
        return Err(Error::invalid("PAPR of an all-zero waveform"));
    }
    Ok(peak / (total / x.len() as f64))
}
