//! Layered chirp spread spectrum (LCSS) and its benchmarks: waveform
//! generation, detection, channel impairments, closed-form analytics and a
//! deterministic Monte Carlo harness.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod channels;
pub mod detectors;
pub mod error;
pub mod numeric;
pub mod simkit;
pub mod waveforms;

pub use analytics::{BerVariant, TheoryMode};
pub use channels::ChannelSpec;
pub use detectors::{Demodulator, DetectionMode, DetectorKind};
pub use error::{Error, Result};
pub use numeric::{derive_stream, Complex64, ComplexVector, RngStream, Spectrum};
pub use simkit::{BerEstimate, BerPointSpec, CcdfCurve};
pub use waveforms::{ModulationConfig, Modulator, Scheme, SymbolIndices, Waveform};
