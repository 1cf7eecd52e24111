//! Transmit waveforms for LoRa, the three time-domain-multiplexed benchmark
//! schemes and the two layered schemes.
//!
//! Every scheme is described the same way: a list of [`Slot`]s, one per
//! information-bearing index field. A slot names the chirp rate it rides on,
//! whether it is carried in-phase or in quadrature, and which DFT bins its
//! index may occupy. A transmit symbol is the sum over slots of
//! `coef * exp{j pi/M (2 b n + r n^2)}`, where `b` is the slot's bin and `r`
//! its rate. Modulation, detection and the closed-form analytics all read
//! the same slot table.
//!
//! Bits map to indices big-endian within each field, fields in slot order
//! (layer-ascending, even before odd).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{Complex64, ComplexVector, PhaseTable};

/// Smallest and largest supported spreading factor.
pub const MIN_SF: u32 = 3;
pub const MAX_SF: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Lora,
    TdmCss,
    IqTdmCss,
    DmTdmCss,
    Lcss,
    Ldmcss,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Lora,
        Scheme::TdmCss,
        Scheme::IqTdmCss,
        Scheme::DmTdmCss,
        Scheme::Lcss,
        Scheme::Ldmcss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Lora => "lora",
            Scheme::TdmCss => "tdm-css",
            Scheme::IqTdmCss => "iq-tdm-css",
            Scheme::DmTdmCss => "dm-tdm-css",
            Scheme::Lcss => "lcss",
            Scheme::Ldmcss => "ldmcss",
        }
    }

    /// Whether the layer count is a free parameter.
    pub fn is_layered(self) -> bool {
        matches!(self, Scheme::Lcss | Scheme::Ldmcss)
    }

    pub fn supports_noncoherent(self) -> bool {
        self != Scheme::IqTdmCss
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scheme `{s}`")))
    }
}

/// Which DFT bins a slot's index addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinSet {
    /// Index `k` sits on bin `k`, `k in 0..M`.
    Full,
    /// Index `k` sits on bin `2k`, `k in 0..M/2`.
    Even,
    /// Index `k` sits on bin `2k + 1`, `k in 0..M/2`.
    Odd,
}

impl BinSet {
    #[inline]
    pub fn bin(self, k: usize) -> usize {
        match self {
            BinSet::Full => k,
            BinSet::Even => 2 * k,
            BinSet::Odd => 2 * k + 1,
        }
    }

    /// Number of admissible indices for alphabet size `m`.
    pub fn cardinality(self, m: usize) -> usize {
        match self {
            BinSet::Full => m,
            BinSet::Even | BinSet::Odd => m / 2,
        }
    }
}

/// In-phase slots carry coefficient `1`, quadrature slots carry `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carrier {
    InPhase,
    Quadrature,
}

impl Carrier {
    pub fn coefficient(self) -> Complex64 {
        match self {
            Carrier::InPhase => Complex64::new(1.0, 0.0),
            Carrier::Quadrature => Complex64::new(0.0, 1.0),
        }
    }
}

/// One index field of a transmit symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    /// Chirp rate (`+l` up-chirp of rate `l`, `-1` down-chirp).
    pub rate: i64,
    /// Position of `rate` in [`ModulationConfig::chirp_rates`].
    pub layer: usize,
    pub carrier: Carrier,
    pub bins: BinSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModulationConfig {
    scheme: Scheme,
    sf: u32,
    layers: usize,
}

impl ModulationConfig {
    /// `layers` is `L` for LCSS and `L~` for LDMCSS; it is ignored for the
    /// fixed-structure schemes.
    pub fn new(scheme: Scheme, sf: u32, layers: usize) -> Result<Self> {
        if !(MIN_SF..=MAX_SF).contains(&sf) {
            return Err(Error::invalid(format!(
                "spreading factor {sf} outside {MIN_SF}..={MAX_SF}"
            )));
        }
        let layers = match scheme {
            Scheme::Lora => 1,
            Scheme::TdmCss | Scheme::IqTdmCss | Scheme::DmTdmCss => 2,
            Scheme::Lcss | Scheme::Ldmcss => {
                if layers == 0 {
                    return Err(Error::invalid("layered schemes need at least one layer"));
                }
                if layers >= 1 << sf {
                    return Err(Error::invalid(format!(
                        "{layers} layers is not below the alphabet size {}",
                        1u64 << sf
                    )));
                }
                layers
            }
        };
        Ok(ModulationConfig { scheme, sf, layers })
    }

    pub fn lora(sf: u32) -> Result<Self> {
        Self::new(Scheme::Lora, sf, 1)
    }

    pub fn lcss(sf: u32, layers: usize) -> Result<Self> {
        Self::new(Scheme::Lcss, sf, layers)
    }

    pub fn ldmcss(sf: u32, layers: usize) -> Result<Self> {
        Self::new(Scheme::Ldmcss, sf, layers)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Spreading factor `lambda = log2(M)`.
    pub fn sf(&self) -> u32 {
        self.sf
    }

    /// Alphabet size `M`.
    pub fn m(&self) -> usize {
        1 << self.sf
    }

    /// Number of distinct chirp rates, i.e. de-chirp/DFT branches at the receiver.
    pub fn layers(&self) -> usize {
        self.layers
    }

    /// Chirp rate of each layer: `1..=L` for the layered schemes, `{+1, -1}`
    /// for the benchmarks, `1` for LoRa.
    pub fn chirp_rates(&self) -> Vec<i64> {
        match self.scheme {
            Scheme::Lora => vec![1],
            Scheme::TdmCss | Scheme::IqTdmCss | Scheme::DmTdmCss => vec![1, -1],
            Scheme::Lcss | Scheme::Ldmcss => (1..=self.layers as i64).collect(),
        }
    }

    /// Index fields in bit-mapping order.
    pub fn slots(&self) -> Vec<Slot> {
        let rates = self.chirp_rates();
        let slot = |layer: usize, carrier, bins| Slot {
            rate: rates[layer],
            layer,
            carrier,
            bins,
        };
        use BinSet::*;
        use Carrier::*;
        match self.scheme {
            Scheme::Lora | Scheme::TdmCss | Scheme::Lcss => {
                (0..rates.len()).map(|l| slot(l, InPhase, Full)).collect()
            }
            Scheme::IqTdmCss => vec![
                slot(0, InPhase, Full),
                slot(0, Quadrature, Full),
                slot(1, InPhase, Full),
                slot(1, Quadrature, Full),
            ],
            Scheme::DmTdmCss | Scheme::Ldmcss => (0..rates.len())
                .flat_map(|l| [slot(l, InPhase, Even), slot(l, InPhase, Odd)])
                .collect(),
        }
    }

    /// Bits carried by one index of `slot`.
    pub fn field_bits(&self, slot: &Slot) -> u32 {
        match slot.bins {
            BinSet::Full => self.sf,
            BinSet::Even | BinSet::Odd => self.sf - 1,
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        let l = self.layers;
        let sf = self.sf as usize;
        match self.scheme {
            Scheme::Lora => sf,
            Scheme::TdmCss => 2 * sf,
            Scheme::IqTdmCss => 4 * sf,
            Scheme::DmTdmCss => 4 * sf - 4,
            Scheme::Lcss => l * sf,
            Scheme::Ldmcss => l * (2 * sf - 2),
        }
    }

    /// Number of unit-amplitude chirps summed into one symbol.
    pub fn active_tones(&self) -> usize {
        self.slots().len()
    }
}

impl fmt::Display for ModulationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(M={}, L={})", self.scheme, self.m(), self.layers)
    }
}

/// Activated frequency-shift indices of one symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymbolIndices {
    Lora(usize),
    TdmCss {
        up: usize,
        down: usize,
    },
    IqTdmCss {
        up_i: usize,
        up_q: usize,
        down_i: usize,
        down_q: usize,
    },
    DmTdmCss {
        up_even: usize,
        up_odd: usize,
        down_even: usize,
        down_odd: usize,
    },
    /// `k_l` for layers `l = 1..=L`.
    Lcss(Vec<usize>),
    /// `(k_e, k_o)` for layers `1..=L~`.
    Ldmcss(Vec<(usize, usize)>),
}

impl SymbolIndices {
    pub fn scheme(&self) -> Scheme {
        match self {
            SymbolIndices::Lora(_) => Scheme::Lora,
            SymbolIndices::TdmCss { .. } => Scheme::TdmCss,
            SymbolIndices::IqTdmCss { .. } => Scheme::IqTdmCss,
            SymbolIndices::DmTdmCss { .. } => Scheme::DmTdmCss,
            SymbolIndices::Lcss(_) => Scheme::Lcss,
            SymbolIndices::Ldmcss(_) => Scheme::Ldmcss,
        }
    }

    /// Field values in slot order.
    pub fn fields(&self) -> Vec<usize> {
        match self {
            SymbolIndices::Lora(k) => vec![*k],
            SymbolIndices::TdmCss { up, down } => vec![*up, *down],
            SymbolIndices::IqTdmCss {
                up_i,
                up_q,
                down_i,
                down_q,
            } => vec![*up_i, *up_q, *down_i, *down_q],
            SymbolIndices::DmTdmCss {
                up_even,
                up_odd,
                down_even,
                down_odd,
            } => vec![*up_even, *up_odd, *down_even, *down_odd],
            SymbolIndices::Lcss(ks) => ks.clone(),
            SymbolIndices::Ldmcss(pairs) => pairs.iter().flat_map(|&(e, o)| [e, o]).collect(),
        }
    }

    /// Rebuild from field values in slot order, validating ranges.
    pub fn from_fields(cfg: &ModulationConfig, fields: &[usize]) -> Result<Self> {
        let slots = cfg.slots();
        if fields.len() != slots.len() {
            return Err(Error::invalid(format!(
                "{} expects {} index fields, got {}",
                cfg.scheme(),
                slots.len(),
                fields.len()
            )));
        }
        for (slot, &k) in slots.iter().zip(fields) {
            let card = slot.bins.cardinality(cfg.m());
            if k >= card {
                return Err(Error::invalid(format!(
                    "index {k} out of range 0..{card} for {}",
                    cfg.scheme()
                )));
            }
        }
        let f = fields;
        Ok(match cfg.scheme() {
            Scheme::Lora => SymbolIndices::Lora(f[0]),
            Scheme::TdmCss => SymbolIndices::TdmCss { up: f[0], down: f[1] },
            Scheme::IqTdmCss => SymbolIndices::IqTdmCss {
                up_i: f[0],
                up_q: f[1],
                down_i: f[2],
                down_q: f[3],
            },
            Scheme::DmTdmCss => SymbolIndices::DmTdmCss {
                up_even: f[0],
                up_odd: f[1],
                down_even: f[2],
                down_odd: f[3],
            },
            Scheme::Lcss => SymbolIndices::Lcss(f.to_vec()),
            Scheme::Ldmcss => SymbolIndices::Ldmcss(f.chunks(2).map(|c| (c[0], c[1])).collect()),
        })
    }

    /// Check that these indices belong to `cfg` and are in range.
    pub fn validate(&self, cfg: &ModulationConfig) -> Result<()> {
        if self.scheme() != cfg.scheme() {
            return Err(Error::invalid(format!(
                "{} indices used with a {} configuration",
                self.scheme(),
                cfg.scheme()
            )));
        }
        Self::from_fields(cfg, &self.fields()).map(|_| ())
    }
}

/// Sampled transmit symbol and its energy `E_s = sum |s(n)|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: ComplexVector,
    pub symbol_energy: f64,
}

impl Waveform {
    pub fn new(samples: ComplexVector) -> Self {
        let symbol_energy = energy(&samples);
        Waveform {
            samples,
            symbol_energy,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub(crate) fn energy(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

/// A single chirped tone `coef * exp{j pi/M (2 bin n + rate n^2)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpComponent {
    pub coef: Complex64,
    pub bin: i64,
    pub rate: i64,
}

/// Decompose a symbol into its chirped tones.
pub fn components(cfg: &ModulationConfig, idx: &SymbolIndices) -> Result<Vec<ChirpComponent>> {
    idx.validate(cfg)?;
    Ok(cfg
        .slots()
        .iter()
        .zip(idx.fields())
        .map(|(slot, k)| ChirpComponent {
            coef: slot.carrier.coefficient(),
            bin: slot.bins.bin(k) as i64,
            rate: slot.rate,
        })
        .collect())
}

/// Spreading symbol `c(n) = exp{j pi/M rate n^2}`.
pub fn spreading_symbol(m: usize, rate: i64) -> Result<ComplexVector> {
    if m < 2 {
        return Err(Error::invalid("spreading symbol needs M >= 2"));
    }
    let table = PhaseTable::new(m);
    Ok((0..m as i64).map(|n| table.phasor(rate * n * n)).collect())
}

/// Un-chirped tone `g(n) = exp{j pi/M 2 k n}`.
pub fn unchirped_symbol(m: usize, k: usize) -> Result<ComplexVector> {
    if k >= m {
        return Err(Error::invalid(format!("frequency shift {k} out of range 0..{m}")));
    }
    let table = PhaseTable::new(m);
    Ok((0..m as i64).map(|n| table.phasor(2 * k as i64 * n)).collect())
}

/// Reusable modulator holding the phase table for one configuration.
#[derive(Debug, Clone)]
pub struct Modulator {
    cfg: ModulationConfig,
    slots: Vec<Slot>,
    table: PhaseTable,
}

impl Modulator {
    pub fn new(cfg: ModulationConfig) -> Self {
        Modulator {
            cfg,
            slots: cfg.slots(),
            table: PhaseTable::new(cfg.m()),
        }
    }

    pub fn config(&self) -> &ModulationConfig {
        &self.cfg
    }

    pub fn modulate(&self, idx: &SymbolIndices) -> Result<Waveform> {
        idx.validate(&self.cfg)?;
        let mut samples = vec![Complex64::new(0.0, 0.0); self.cfg.m()];
        self.modulate_fields_into(&idx.fields(), &mut samples);
        Ok(Waveform::new(samples))
    }

    /// Write the symbol for already-validated `fields` into `out`.
    pub(crate) fn modulate_fields_into(&self, fields: &[usize], out: &mut [Complex64]) {
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (slot, &k) in self.slots.iter().zip(fields) {
            let coef = slot.carrier.coefficient();
            let bin = slot.bins.bin(k) as i64;
            for (n, v) in out.iter_mut().enumerate() {
                let n = n as i64;
                *v += coef * self.table.phasor(2 * bin * n + slot.rate * n * n);
            }
        }
    }
}

/// Composite transmit symbol for `idx` under `cfg`. No amplitude
/// normalization is applied.
pub fn modulate(cfg: &ModulationConfig, idx: &SymbolIndices) -> Result<Waveform> {
    Modulator::new(*cfg).modulate(idx)
}

/// Binary-to-decimal conversion, big-endian per field, fields in slot order.
pub fn bits_to_indices(cfg: &ModulationConfig, bits: &[bool]) -> Result<SymbolIndices> {
    if bits.len() != cfg.bits_per_symbol() {
        return Err(Error::invalid(format!(
            "{} carries {} bits per symbol, got {}",
            cfg.scheme(),
            cfg.bits_per_symbol(),
            bits.len()
        )));
    }
    let mut rest = bits;
    let fields = cfg
        .slots()
        .iter()
        .map(|slot| {
            let (head, tail) = rest.split_at(cfg.field_bits(slot) as usize);
            rest = tail;
            head.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
        })
        .collect::<Vec<_>>();
    SymbolIndices::from_fields(cfg, &fields)
}

/// Inverse of [`bits_to_indices`].
pub fn indices_to_bits(cfg: &ModulationConfig, idx: &SymbolIndices) -> Result<Vec<bool>> {
    idx.validate(cfg)?;
    let mut bits = Vec::with_capacity(cfg.bits_per_symbol());
    for (slot, k) in cfg.slots().iter().zip(idx.fields()) {
        let width = cfg.field_bits(slot);
        bits.extend((0..width).rev().map(|b| (k >> b) & 1 == 1));
    }
    Ok(bits)
}
