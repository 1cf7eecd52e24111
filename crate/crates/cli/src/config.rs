//! Run configuration, read from TOML. Unknown keys are rejected and a
//! `master_seed` is mandatory.

use std::path::Path;

use serde::Deserialize;

use lcss_core::{ChannelSpec, Complex64, DetectorKind, ModulationConfig, Scheme};

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    /// Worker threads for Monte Carlo runs; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    pub ber_sweep: Option<BerSweepConfig>,
    pub se_ee: Option<SeEeConfig>,
    pub analyze: Option<AnalyzeConfig>,
    pub papr: Option<PaprConfig>,
    pub validate: Option<ValidateConfig>,
}

/// One scheme and the layer counts to run it at.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeGrid {
    pub scheme: Scheme,
    #[serde(default = "one_layer")]
    pub layers: Vec<usize>,
}

fn one_layer() -> Vec<usize> {
    vec![1]
}

impl SchemeGrid {
    /// Configurations at spreading factor `sf`, one per distinct layer count.
    pub fn configs(&self, sf: u32) -> Result<Vec<ModulationConfig>, CliError> {
        let layers: &[usize] = if self.scheme.is_layered() { &self.layers } else { &[1] };
        if layers.is_empty() {
            return Err(CliError::Config(format!("{}: empty layer list", self.scheme)));
        }
        layers
            .iter()
            .map(|&l| ModulationConfig::new(self.scheme, sf, l).map_err(CliError::from_config))
            .collect()
    }
}

pub fn expand(grids: &[SchemeGrid], sf: u32) -> Result<Vec<ModulationConfig>, CliError> {
    if grids.is_empty() {
        return Err(CliError::Config("scheme list is empty".into()));
    }
    let mut out = Vec::new();
    for g in grids {
        out.extend(g.configs(sf)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub gain_re: Option<f64>,
    pub gain_im: Option<f64>,
    pub tap_rho: f64,
    pub freq_offset: f64,
    pub phase_offset: f64,
}

impl ChannelConfig {
    pub fn spec(&self) -> Result<ChannelSpec, CliError> {
        let spec = ChannelSpec {
            gain_h: Complex64::new(self.gain_re.unwrap_or(1.0), self.gain_im.unwrap_or(0.0)),
            tap_rho: self.tap_rho,
            freq_offset: self.freq_offset,
            phase_offset: self.phase_offset,
            noise_variance: 0.0,
        };
        spec.validate().map_err(CliError::from_config)?;
        Ok(spec)
    }
}

/// Short label for output rows: `awgn`, or the active impairments joined by `+`.
pub fn channel_label(spec: &ChannelSpec) -> String {
    let mut parts = Vec::new();
    if spec.tap_rho != 0.0 {
        parts.push(format!("fading(rho={:.4})", spec.tap_rho));
    }
    if spec.gain_h != Complex64::new(1.0, 0.0) {
        parts.push(format!("gain(h={:.4}{:+.4}j)", spec.gain_h.re, spec.gain_h.im));
    }
    if spec.freq_offset != 0.0 {
        parts.push(format!("fo(df={:.4})", spec.freq_offset));
    }
    if spec.phase_offset != 0.0 {
        parts.push(format!("po(psi={:.4})", spec.phase_offset));
    }
    if parts.is_empty() {
        "awgn".into()
    } else {
        parts.join("+")
    }
}

fn both_detectors() -> Vec<DetectorKind> {
    vec![DetectorKind::Coherent, DetectorKind::Noncoherent]
}

fn default_min_bit_errors() -> u64 {
    200
}

fn default_max_symbols() -> u64 {
    10_000_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BerSweepConfig {
    pub sf: u32,
    pub schemes: Vec<SchemeGrid>,
    #[serde(default = "both_detectors")]
    pub detectors: Vec<DetectorKind>,
    /// Grid in dB; `inf` runs noiseless.
    pub ebn0_db: Vec<f64>,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default = "default_min_bit_errors")]
    pub min_bit_errors: u64,
    #[serde(default)]
    pub min_bits: u64,
    #[serde(default = "default_max_symbols")]
    pub max_symbols: u64,
}

fn default_target() -> f64 {
    1e-3
}

fn default_tol() -> f64 {
    0.1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeEeConfig {
    pub sf: Vec<u32>,
    pub schemes: Vec<SchemeGrid>,
    #[serde(default = "both_detectors")]
    pub detectors: Vec<DetectorKind>,
    #[serde(default = "default_target")]
    pub target_ber: f64,
    #[serde(default = "default_tol")]
    pub tol_db: f64,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default = "default_min_bit_errors")]
    pub min_bit_errors: u64,
    #[serde(default = "default_max_symbols")]
    pub max_symbols: u64,
}

fn default_sf() -> u32 {
    10
}

fn default_interference_samples() -> usize {
    lcss_core::analytics::DEFAULT_INTERFERENCE_SAMPLES
}

fn default_theory_grid() -> Vec<f64> {
    (0..=12).map(|d| d as f64).collect()
}

fn all_schemes() -> Vec<SchemeGrid> {
    Scheme::ALL
        .iter()
        .map(|&scheme| SchemeGrid {
            scheme,
            layers: match scheme {
                Scheme::Lcss => vec![4, 6, 8],
                Scheme::Ldmcss => vec![2, 3, 4],
                _ => vec![1],
            },
        })
        .collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    #[serde(default = "default_sf")]
    pub sf: u32,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<SchemeGrid>,
    #[serde(default = "default_interference_samples")]
    pub interference_samples: usize,
    #[serde(default = "default_theory_grid")]
    pub theory_ebn0_db: Vec<f64>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            sf: default_sf(),
            schemes: all_schemes(),
            interference_samples: default_interference_samples(),
            theory_ebn0_db: default_theory_grid(),
        }
    }
}

fn default_papr_sf() -> u32 {
    8
}

fn default_papr_symbols() -> usize {
    10_000
}

fn default_thresholds() -> Vec<f64> {
    (0..=48).map(|i| i as f64 * 0.25).collect()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaprConfig {
    #[serde(default = "default_papr_sf")]
    pub sf: u32,
    pub schemes: Vec<SchemeGrid>,
    #[serde(default = "default_thresholds")]
    pub thresholds_db: Vec<f64>,
    #[serde(default = "default_papr_symbols")]
    pub n_symbols: usize,
}

fn default_random_cases() -> usize {
    1_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateConfig {
    /// Randomized cases per check at `M = 1024`.
    #[serde(default = "default_random_cases")]
    pub random_cases: usize,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            random_cases: default_random_cases(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
