//! Closed forms against direct evaluation, plus behavioural checks.

use lcss_core::analytics::oracle::inner_product_direct;
use lcss_core::analytics::{
    gauss_sum_brute, gauss_sum_closed, inner_product_closed, interference_profile, theoretical_ber_ebn0, BerVariant,
    GaussSumParams, TheoryMode,
};
use lcss_core::detectors::dechirp;
use lcss_core::numeric::dft;
use lcss_core::{derive_stream, Complex64, Demodulator, DetectionMode, ModulationConfig, Modulator, Scheme, SymbolIndices};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub cases: u64,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            cases: 0,
            max_residual: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        // NaN residuals must fail the check
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = if residual.is_nan() { f64::INFINITY } else { residual };
        }
    }

    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

fn cfg(scheme: Scheme, sf: u32, layers: usize) -> ModulationConfig {
    ModulationConfig::new(scheme, sf, layers).expect("fixed validation configuration")
}

fn every_symbol(cfg: &ModulationConfig) -> Vec<SymbolIndices> {
    let mut all = vec![vec![]];
    for slot in cfg.slots() {
        let card = slot.bins.cardinality(cfg.m());
        all = all
            .into_iter()
            .flat_map(|prefix: Vec<usize>| {
                (0..card).map(move |k| {
                    let mut f = prefix.clone();
                    f.push(k);
                    f
                })
            })
            .collect();
    }
    all.iter()
        .map(|f| SymbolIndices::from_fields(cfg, f).expect("in-range fields"))
        .collect()
}

fn random_symbol(cfg: &ModulationConfig, seed: u64, path: &[u64]) -> SymbolIndices {
    let mut s = derive_stream(seed, path);
    let fields: Vec<usize> = cfg.slots().iter().map(|sl| s.bits(cfg.field_bits(sl)) as usize).collect();
    SymbolIndices::from_fields(cfg, &fields).expect("in-range fields")
}

fn rel(closed: Complex64, direct: Complex64) -> f64 {
    (closed - direct).norm() / direct.norm().max(1.0)
}

fn gauss_check() -> Result<Check, CliError> {
    let mut c = Check::new("gauss_sum_closed_vs_brute", 1e-9);
    for m in [8usize, 16, 32, 64] {
        let mi = m as i64;
        for alpha in (-7i64..=7).filter(|&a| a != 0) {
            for kappa in -mi..=mi {
                let p = GaussSumParams::new(m, kappa, alpha)?;
                c.record(rel(gauss_sum_closed(p)?, gauss_sum_brute(p)?));
            }
        }
    }
    Ok(c)
}

fn inner_product_check(seed: u64, random_cases: usize) -> Result<Check, CliError> {
    let mut c = Check::new("inner_product_closed_vs_direct", 1e-8);
    let exhaustive = [
        cfg(Scheme::Lora, 3, 1),
        cfg(Scheme::TdmCss, 3, 2),
        cfg(Scheme::DmTdmCss, 3, 2),
        cfg(Scheme::Lcss, 3, 1),
        cfg(Scheme::Lcss, 3, 2),
        cfg(Scheme::Ldmcss, 3, 1),
        cfg(Scheme::Ldmcss, 3, 2),
    ];
    for cfg in exhaustive {
        let symbols = every_symbol(&cfg);
        let modulator = Modulator::new(cfg);
        let waves: Vec<_> = symbols
            .iter()
            .map(|s| modulator.modulate(s).map(|w| w.samples))
            .collect::<Result<_, _>>()?;
        for (a, wa) in symbols.iter().zip(&waves) {
            for (b, wb) in symbols.iter().zip(&waves) {
                let direct: Complex64 = wa.iter().zip(wb).map(|(x, y)| x * y.conj()).sum();
                c.record(rel(inner_product_closed(&cfg, a, b)?, direct));
            }
        }
    }
    let sampled = [
        cfg(Scheme::IqTdmCss, 3, 2),
        cfg(Scheme::Lora, 10, 1),
        cfg(Scheme::TdmCss, 10, 2),
        cfg(Scheme::IqTdmCss, 10, 2),
        cfg(Scheme::DmTdmCss, 10, 2),
        cfg(Scheme::Lcss, 10, 8),
        cfg(Scheme::Ldmcss, 10, 4),
    ];
    for (i, cfg) in sampled.iter().enumerate() {
        for t in 0..random_cases as u64 {
            let a = random_symbol(cfg, seed, &[10, i as u64, t, 0]);
            let b = random_symbol(cfg, seed, &[10, i as u64, t, 1]);
            c.record(rel(inner_product_closed(cfg, &a, &b)?, inner_product_direct(cfg, &a, &b)?));
        }
    }
    Ok(c)
}

fn interference_checks() -> Result<[Check; 2], CliError> {
    let mut residual = Check::new("interference_profile_vs_dft", 1e-8);
    let mut signal = Check::new("signal_term_exact", 0.0);
    let configs = [
        cfg(Scheme::Lora, 4, 1),
        cfg(Scheme::TdmCss, 4, 2),
        cfg(Scheme::IqTdmCss, 4, 2),
        cfg(Scheme::DmTdmCss, 4, 2),
        cfg(Scheme::Lcss, 4, 2),
        cfg(Scheme::Lcss, 4, 3),
        cfg(Scheme::Ldmcss, 4, 2),
    ];
    for cfg in configs {
        let modulator = Modulator::new(cfg);
        let rates = cfg.chirp_rates();
        let slots = cfg.slots();
        for idx in every_symbol(&cfg) {
            let w = modulator.modulate(&idx)?;
            let fields = idx.fields();
            for (layer, &rate) in rates.iter().enumerate() {
                let spectrum = dft(&dechirp(&w.samples, rate, cfg.m())?)?;
                for bin in 0..cfg.m() {
                    let p = interference_profile(&cfg, &idx, layer, bin)?;
                    residual.record((p.total() - spectrum[bin]).norm());
                    let expected: Complex64 = slots
                        .iter()
                        .zip(&fields)
                        .filter(|(s, &k)| s.layer == layer && s.bins.bin(k) == bin)
                        .map(|(s, _)| s.carrier.coefficient() * cfg.m() as f64)
                        .sum();
                    signal.record((p.signal - expected).norm());
                }
            }
        }
    }
    Ok([residual, signal])
}

/// Closed-form residual checks; `random_cases` sets the sampled portion.
pub fn analytic_checks(seed: u64, random_cases: usize) -> Result<Vec<Check>, CliError> {
    let mut checks = vec![gauss_check()?, inner_product_check(seed, random_cases)?];
    checks.extend(interference_checks()?);
    Ok(checks)
}

/// Noiseless round trips at `M = 1024` and monotonicity of the BER theory.
pub fn behavioural_checks(seed: u64, random_cases: usize) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let configs = [
        cfg(Scheme::Lora, 10, 1),
        cfg(Scheme::TdmCss, 10, 2),
        cfg(Scheme::IqTdmCss, 10, 2),
        cfg(Scheme::DmTdmCss, 10, 2),
        cfg(Scheme::Lcss, 10, 8),
        cfg(Scheme::Ldmcss, 10, 4),
    ];
    for (i, cfg) in configs.iter().enumerate() {
        let mut modes = vec![("coherent", DetectionMode::coherent(Complex64::new(1.0, 0.0)))];
        if cfg.scheme().supports_noncoherent() {
            modes.push(("noncoherent", DetectionMode::noncoherent()));
        }
        let modulator = Modulator::new(*cfg);
        let mut demod = Demodulator::new(*cfg);
        for (name, mode) in modes {
            let mut c = Check::new(format!("noiseless_round_trip/{}/{name}", cfg.scheme()), 0.0);
            let mut errors = 0u64;
            for t in 0..random_cases as u64 {
                let idx = random_symbol(cfg, seed, &[20, i as u64, t]);
                let w = modulator.modulate(&idx)?;
                errors += (demod.detect(&w.samples, &mode)? != idx) as u64;
            }
            c.cases = random_cases as u64;
            c.max_residual = errors as f64 / random_cases.max(1) as f64;
            checks.push(c);
        }
    }
    for variant in [BerVariant::PaperExact, BerVariant::Standard] {
        let mut c = Check::new(format!("theory_ber_monotone/{variant}"), 0.0);
        for cfg in [cfg(Scheme::Lcss, 10, 8), cfg(Scheme::Ldmcss, 10, 4)] {
            let interference = (cfg.layers() as f64 - 1.0) / (cfg.layers() as f64 * cfg.m() as f64);
            for mode in [TheoryMode::Noncoherent, TheoryMode::CoherentUpperBound] {
                let mut prev = f64::INFINITY;
                for i in 0..=500 {
                    let x = -5.0 + i as f64 * 0.05;
                    let p = theoretical_ber_ebn0(&cfg, mode, x, interference, variant)?;
                    c.record((p - prev).max(0.0));
                    prev = p;
                }
            }
        }
        checks.push(c);
    }
    Ok(checks)
}
