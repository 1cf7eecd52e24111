//! Direct evaluations used to cross-check the closed forms: sample-domain
//! inner products and explicit de-chirp + DFT bins.

use crate::detectors::dechirp;
use crate::error::{Error, Result};
use crate::numeric::{dft, Complex64};
use crate::waveforms::{modulate, ModulationConfig, SymbolIndices};

/// `sum_n s(n) conj(s_bar(n))` from the sampled waveforms.
pub fn inner_product_direct(cfg: &ModulationConfig, a: &SymbolIndices, b: &SymbolIndices) -> Result<Complex64> {
    let sa = modulate(cfg, a)?;
    let sb = modulate(cfg, b)?;
    Ok(sa.samples.iter().zip(&sb.samples).map(|(x, y)| x * y.conj()).sum())
}

/// `DFT(dechirp(modulate(idx), rate_layer))[bin]`.
pub fn spectrum_bin_direct(cfg: &ModulationConfig, idx: &SymbolIndices, layer: usize, bin: usize) -> Result<Complex64> {
    let rates = cfg.chirp_rates();
    let Some(&rate) = rates.get(layer) else {
        return Err(Error::invalid(format!("layer {layer} out of range")));
    };
    let w = modulate(cfg, idx)?;
    let spec = dft(&dechirp(&w.samples, rate, cfg.m())?)?;
    spec.bins()
        .get(bin)
        .copied()
        .ok_or_else(|| Error::invalid(format!("bin {bin} out of range")))
}
