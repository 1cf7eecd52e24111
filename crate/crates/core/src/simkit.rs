//! Monte Carlo engine: BER points, target-BER search and PAPR CCDFs.
//!
//! Trial `t` of point `p` draws everything from
//! `derive_stream(master_seed, [p, t])`. Trials run in fixed-size batches on
//! a rayon pool and are folded in trial order, with the stop rule checked
//! after every trial, so counters do not depend on the worker count.

use rayon::prelude::*;

use crate::analytics::papr_of;
use crate::channels::{apply_channel_in_place, ChannelSpec};
use crate::detectors::{Demodulator, DetectionMode, DetectorKind};
use crate::error::{Error, Result};
use crate::numeric::{derive_stream, Complex64};
use crate::waveforms::{energy, ModulationConfig, Modulator};

const BATCH: u64 = 512;
const SEARCH_LOW_DB: f64 = -10.0;
const SEARCH_HIGH_DB: f64 = 40.0;
const SEARCH_STEP_DB: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BerPointSpec {
    pub cfg: ModulationConfig,
    pub detector: DetectorKind,
    /// Channel template; its noise variance is overwritten per trial.
    pub channel: ChannelSpec,
    /// `+inf` disables noise.
    pub ebn0_db: f64,
    pub min_bit_errors: u64,
    /// Keep going until at least this many bits were sent.
    pub min_bits: u64,
    pub max_symbols: u64,
    pub master_seed: u64,
    /// First element of every trial's stream path.
    pub point_id: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl BerPointSpec {
    pub fn new(cfg: ModulationConfig, detector: DetectorKind, ebn0_db: f64, master_seed: u64) -> Self {
        BerPointSpec {
            cfg,
            detector,
            channel: ChannelSpec::default(),
            ebn0_db,
            min_bit_errors: 200,
            min_bits: 0,
            max_symbols: 10_000_000,
            master_seed,
            point_id: 0,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_bit_errors == 0 || self.max_symbols == 0 {
            return Err(Error::invalid("min_bit_errors and max_symbols must be at least 1"));
        }
        if self.ebn0_db.is_nan() || self.ebn0_db == f64::NEG_INFINITY {
            return Err(Error::invalid(format!("E_b/N_0 of {} dB", self.ebn0_db)));
        }
        if self.detector == DetectorKind::Noncoherent && !self.cfg.scheme().supports_noncoherent() {
            return Err(Error::UnsupportedMode {
                scheme: self.cfg.scheme(),
                mode: "noncoherent",
            });
        }
        self.channel.validate()
    }

    /// Per-sample noise variance for a symbol of energy `es`.
    pub fn noise_variance(&self, es: f64) -> f64 {
        if self.ebn0_db == f64::INFINITY {
            0.0
        } else {
            es / (self.cfg.bits_per_symbol() as f64 * 10f64.powf(self.ebn0_db / 10.0))
        }
    }

    fn detection_mode(&self) -> DetectionMode {
        match self.detector {
            // offsets are unknown to the receiver; only the complex gain is
            DetectorKind::Coherent => DetectionMode::coherent(self.channel.gain_h),
            DetectorKind::Noncoherent => DetectionMode::noncoherent(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub bit_errors: u64,
    pub bits_sent: u64,
    pub symbol_errors: u64,
    pub symbols_sent: u64,
    pub ber: f64,
    pub ser: f64,
    /// Half-width of the normal-approximation 95% interval on `ber`.
    pub ci95_halfwidth: f64,
    pub seed_used: u64,
}

impl BerEstimate {
    pub fn from_counts(bit_errors: u64, bits_sent: u64, symbol_errors: u64, symbols_sent: u64, seed_used: u64) -> Self {
        let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let ber = ratio(bit_errors, bits_sent);
        let ci95_halfwidth = if bits_sent == 0 {
            0.0
        } else {
            1.96 * (ber * (1.0 - ber) / bits_sent as f64).sqrt()
        };
        BerEstimate {
            bit_errors,
            bits_sent,
            symbol_errors,
            symbols_sent,
            ber,
            ser: ratio(symbol_errors, symbols_sent),
            ci95_halfwidth,
            seed_used,
        }
    }
}

struct TrialState {
    modulator: Modulator,
    demod: Demodulator,
    tx: Vec<usize>,
    buf: Vec<Complex64>,
}

impl TrialState {
    fn new(cfg: ModulationConfig) -> Self {
        TrialState {
            modulator: Modulator::new(cfg),
            demod: Demodulator::new(cfg),
            tx: Vec::new(),
            buf: vec![Complex64::default(); cfg.m()],
        }
    }
}

/// (bit errors, symbol error) of trial `t`.
fn run_trial(spec: &BerPointSpec, mode: &DetectionMode, widths: &[u32], st: &mut TrialState, t: u64) -> Result<(u64, bool)> {
    let mut stream = derive_stream(spec.master_seed, &[spec.point_id, t]);
    st.tx.clear();
    st.tx.extend(widths.iter().map(|&w| stream.bits(w) as usize));
    st.modulator.modulate_fields_into(&st.tx, &mut st.buf);
    let channel = spec.channel.with_noise(spec.noise_variance(energy(&st.buf)));
    apply_channel_in_place(&mut st.buf, &channel, &mut stream)?;
    let rx = st.demod.detect_fields(&st.buf, mode)?;
    let bit_errors: u64 = st.tx.iter().zip(&rx).map(|(a, b)| (a ^ b).count_ones() as u64).sum();
    Ok((bit_errors, bit_errors > 0))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))
}

/// Estimate BER at one `E_b/N_0` point.
pub fn ber_point(spec: &BerPointSpec) -> Result<BerEstimate> {
    spec.validate()?;
    let cfg = spec.cfg;
    let widths: Vec<u32> = cfg.slots().iter().map(|s| cfg.field_bits(s)).collect();
    let bits_per_symbol = cfg.bits_per_symbol() as u64;
    let mode = spec.detection_mode();
    let pool = pool(spec.workers)?;

    let (mut bit_errors, mut symbol_errors, mut symbols) = (0u64, 0u64, 0u64);
    let done = |bit_errors: u64, symbols: u64| {
        symbols >= spec.max_symbols
            || (bit_errors >= spec.min_bit_errors && symbols * bits_per_symbol >= spec.min_bits)
    };
    'batches: while !done(bit_errors, symbols) {
        let start = symbols;
        let end = (start + BATCH).min(spec.max_symbols);
        let outcomes: Vec<Result<(u64, bool)>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map_init(|| TrialState::new(cfg), |st, t| run_trial(spec, &mode, &widths, st, t))
                .collect()
        });
        for outcome in outcomes {
            let (errs, sym_err) = outcome?;
            bit_errors += errs;
            symbol_errors += sym_err as u64;
            symbols += 1;
            if done(bit_errors, symbols) {
                break 'batches;
            }
        }
    }
    Ok(BerEstimate::from_counts(
        bit_errors,
        symbols * bits_per_symbol,
        symbol_errors,
        symbols,
        spec.master_seed,
    ))
}

/// Smallest `E_b/N_0` (dB) at which `evaluate` drops to `target`, by an
/// upward scan from -10 dB in 2 dB steps followed by bisection down to
/// `tol_db`. Returns the bracket midpoint.
///
/// If the curve is already at or below `target` at -10 dB, -10 is returned.
pub fn ebn0_for_target<F>(mut evaluate: F, target: f64, tol_db: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::invalid(format!("target BER {target} outside (0, 0.5)")));
    }
    if !(tol_db > 0.0) {
        return Err(Error::invalid(format!("tolerance {tol_db} dB must be positive")));
    }
    let mut lo = SEARCH_LOW_DB;
    if evaluate(lo)? <= target {
        return Ok(lo);
    }
    let mut hi = lo;
    loop {
        hi = (hi + SEARCH_STEP_DB).min(SEARCH_HIGH_DB);
        if evaluate(hi)? <= target {
            break;
        }
        if hi >= SEARCH_HIGH_DB {
            return Err(Error::SearchFailure(format!(
                "BER stays above {target:e} up to {SEARCH_HIGH_DB} dB"
            )));
        }
        lo = hi;
    }
    while hi - lo > tol_db {
        let mid = 0.5 * (lo + hi);
        if evaluate(mid)? <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// [`ebn0_for_target`] driven by [`ber_point`]. Every probe reuses the
/// template's seed and point id. Probes send at least `100/target` bits and
/// stop once `2 * min_bit_errors / target` bits have been sent, which
/// already places them clearly on one side of the target.
pub fn ebn0_for_target_sim(template: &BerPointSpec, target: f64, tol_db: f64) -> Result<f64> {
    let bits_per_symbol = template.cfg.bits_per_symbol() as f64;
    let min_bits = (100.0 / target).ceil() as u64;
    let cap_bits = 2.0 * template.min_bit_errors as f64 / target;
    let max_symbols = ((cap_bits / bits_per_symbol).ceil() as u64).clamp(1, template.max_symbols);
    ebn0_for_target(
        |ebn0_db| {
            let spec = BerPointSpec {
                ebn0_db,
                min_bits: template.min_bits.max(min_bits),
                max_symbols,
                ..template.clone()
            };
            let est = ber_point(&spec)?;
            log::debug!("probe {ebn0_db:.4} dB -> ber {:.5e} ({} bits)", est.ber, est.bits_sent);
            Ok(est.ber)
        },
        target,
        tol_db,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    pub thresholds_db: Vec<f64>,
    /// `Pr(papr > threshold)` per threshold.
    pub exceed_prob: Vec<f64>,
}

/// Empirical PAPR CCDF over `n_symbols` uniformly drawn symbols; symbol `t`
/// uses `derive_stream(seed, [t])`.
pub fn papr_ccdf(cfg: &ModulationConfig, n_symbols: usize, thresholds_db: &[f64], seed: u64) -> Result<CcdfCurve> {
    if n_symbols == 0 {
        return Err(Error::invalid("papr_ccdf needs at least one symbol"));
    }
    if thresholds_db.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::invalid("thresholds must be sorted ascending"));
    }
    let widths: Vec<u32> = cfg.slots().iter().map(|s| cfg.field_bits(s)).collect();
    let paprs_db: Vec<f64> = (0..n_symbols as u64)
        .into_par_iter()
        .map_init(
            || (Modulator::new(*cfg), vec![Complex64::default(); cfg.m()]),
            |(modulator, buf), t| {
                let mut stream = derive_stream(seed, &[t]);
                let fields: Vec<usize> = widths.iter().map(|&w| stream.bits(w) as usize).collect();
                modulator.modulate_fields_into(&fields, buf);
                papr_of(buf).map(|p| 10.0 * p.log10())
            },
        )
        .collect::<Result<_>>()?;
    let exceed_prob = thresholds_db
        .iter()
        .map(|&th| paprs_db.iter().filter(|&&p| p > th).count() as f64 / n_symbols as f64)
        .collect();
    Ok(CcdfCurve {
        thresholds_db: thresholds_db.to_vec(),
        exceed_prob,
    })
}
