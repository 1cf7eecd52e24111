//! De-chirp, DFT and per-layer decisions.
//!
//! Detection is dis-joint: each chirp rate gets one de-chirp and one DFT, and
//! every index field riding on that rate is decided from the same spectrum.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{Complex64, ComplexVector, PhaseTable};
use crate::waveforms::{BinSet, Carrier, ModulationConfig, Slot, SymbolIndices};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    Coherent,
    Noncoherent,
}

impl DetectorKind {
    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::Coherent => "coherent",
            DetectorKind::Noncoherent => "noncoherent",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Detector selection plus the channel knowledge a coherent receiver uses.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionMode {
    pub kind: DetectorKind,
    /// Flat channel gain `h`.
    pub csi: Option<Complex64>,
    /// Per-bin channel response `H(k)`; takes precedence over `csi`.
    pub bin_response: Option<ComplexVector>,
}

impl DetectionMode {
    pub fn coherent(h: Complex64) -> Self {
        DetectionMode {
            kind: DetectorKind::Coherent,
            csi: Some(h),
            bin_response: None,
        }
    }

    pub fn coherent_per_bin(response: ComplexVector) -> Self {
        DetectionMode {
            kind: DetectorKind::Coherent,
            csi: None,
            bin_response: Some(response),
        }
    }

    pub fn noncoherent() -> Self {
        DetectionMode {
            kind: DetectorKind::Noncoherent,
            csi: None,
            bin_response: None,
        }
    }

    fn check(&self, m: usize) -> Result<()> {
        if self.kind == DetectorKind::Noncoherent {
            return Ok(());
        }
        match (&self.bin_response, self.csi) {
            (Some(r), _) if r.len() != m => Err(Error::invalid(format!(
                "per-bin channel response has {} bins, expected {m}",
                r.len()
            ))),
            (None, None) => Err(Error::invalid("coherent detection needs channel state")),
            _ => Ok(()),
        }
    }
}

/// Element-wise product of `y` with the conjugate spreading symbol of `rate`.
pub fn dechirp(y: &[Complex64], rate: i64, m: usize) -> Result<ComplexVector> {
    if y.len() != m {
        return Err(Error::invalid(format!(
            "received vector has {} samples, expected {m}",
            y.len()
        )));
    }
    let table = PhaseTable::new(m);
    Ok(y.iter()
        .enumerate()
        .map(|(n, v)| {
            let n = n as i64;
            v * table.phasor(-rate * n * n)
        })
        .collect())
}

/// Index of the largest value, lowest index on ties. NaNs never win.
///
/// # Panics
/// If `values` is empty.
pub fn detect_tie_break(values: &[f64]) -> usize {
    assert!(!values.is_empty(), "tie-break over an empty sequence");
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    let mut found = false;
    for (i, &v) in values.iter().enumerate() {
        if !found && !v.is_nan() || v > best_value {
            best = i;
            best_value = v;
            found = true;
        }
    }
    best
}

/// Detector with cached FFT plan and conjugate chirps for one configuration.
pub struct Demodulator {
    cfg: ModulationConfig,
    slots: Vec<Slot>,
    rates: Vec<i64>,
    down_chirps: Vec<ComplexVector>,
    fft: Arc<dyn Fft<f64>>,
    buffer: ComplexVector,
    scratch: ComplexVector,
    scores: Vec<f64>,
    dfts: u64,
}

impl fmt::Debug for Demodulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Demodulator")
            .field("cfg", &self.cfg)
            .field("dfts", &self.dfts)
            .finish_non_exhaustive()
    }
}

impl Demodulator {
    pub fn new(cfg: ModulationConfig) -> Self {
        let m = cfg.m();
        let table = PhaseTable::new(m);
        let rates = cfg.chirp_rates();
        let down_chirps = rates
            .iter()
            .map(|&r| (0..m as i64).map(|n| table.phasor(-r * n * n)).collect())
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        let scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        Demodulator {
            cfg,
            slots: cfg.slots(),
            rates,
            down_chirps,
            fft,
            buffer: vec![Complex64::default(); m],
            scratch,
            scores: Vec::with_capacity(m),
            dfts: 0,
        }
    }

    pub fn config(&self) -> &ModulationConfig {
        &self.cfg
    }

    /// DFTs computed since construction.
    pub fn dfts_performed(&self) -> u64 {
        self.dfts
    }

    /// Spectrum `R = DFT(dechirp(y, rate))` for layer `layer`.
    pub fn layer_spectrum(&mut self, y: &[Complex64], layer: usize) -> Result<&[Complex64]> {
        let m = self.cfg.m();
        if y.len() != m {
            return Err(Error::invalid(format!(
                "received vector has {} samples, expected {m}",
                y.len()
            )));
        }
        if layer >= self.rates.len() {
            return Err(Error::invalid(format!("layer {layer} out of range")));
        }
        for ((b, v), c) in self.buffer.iter_mut().zip(y).zip(&self.down_chirps[layer]) {
            *b = v * c;
        }
        self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        self.dfts += 1;
        Ok(&self.buffer)
    }

    pub fn detect(&mut self, y: &[Complex64], mode: &DetectionMode) -> Result<SymbolIndices> {
        let fields = self.detect_fields(y, mode)?;
        SymbolIndices::from_fields(&self.cfg, &fields)
    }

    /// Decided index per slot, in slot order.
    pub fn detect_fields(&mut self, y: &[Complex64], mode: &DetectionMode) -> Result<Vec<usize>> {
        let m = self.cfg.m();
        if mode.kind == DetectorKind::Noncoherent && !self.cfg.scheme().supports_noncoherent() {
            return Err(Error::UnsupportedMode {
                scheme: self.cfg.scheme(),
                mode: "noncoherent",
            });
        }
        mode.check(m)?;
        let mut fields = vec![0; self.slots.len()];
        for layer in 0..self.rates.len() {
            self.layer_spectrum(y, layer)?;
            for (slot_no, slot) in self.slots.iter().enumerate() {
                if slot.layer != layer {
                    continue;
                }
                self.scores.clear();
                for k in 0..slot.bins.cardinality(m) {
                    let bin = slot.bins.bin(k);
                    let r = self.buffer[bin];
                    let score = match mode.kind {
                        DetectorKind::Noncoherent => r.norm_sqr(),
                        DetectorKind::Coherent => {
                            let h = match &mode.bin_response {
                                Some(resp) => resp[bin],
                                None => mode.csi.unwrap_or_default(),
                            };
                            let z = h.conj() * r;
                            match slot.carrier {
                                Carrier::InPhase => z.re,
                                Carrier::Quadrature => z.im,
                            }
                        }
                    };
                    self.scores.push(score);
                }
                fields[slot_no] = detect_tie_break(&self.scores);
            }
        }
        Ok(fields)
    }
}

/// One-shot detection; use [`Demodulator`] in loops.
pub fn detect(cfg: &ModulationConfig, y: &[Complex64], mode: &DetectionMode) -> Result<SymbolIndices> {
    Demodulator::new(*cfg).detect(y, mode)
}

/// Bin set a parity-restricted decision searches, for documentation and tests.
pub fn candidate_bins(bins: BinSet, m: usize) -> Vec<usize> {
    (0..bins.cardinality(m)).map(|k| bins.bin(k)).collect()
}
