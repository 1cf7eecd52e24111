//! Subcommand bodies. Each returns a table; the caller handles output.

use log::{info, warn};

use lcss_core::analytics::{
    interference_power, receiver_complexity, spectral_efficiency, theoretical_ber_ebn0, BerVariant, TheoryMode,
};
use lcss_core::simkit::{ber_point, ebn0_for_target_sim, papr_ccdf};
use lcss_core::{derive_stream, BerPointSpec, DetectorKind, ModulationConfig, Scheme};

use crate::config::{channel_label, expand, AnalyzeConfig, RunConfig, ValidateConfig};
use crate::error::CliError;
use crate::table::{db, int, sci, text, Table};
use crate::validate;

pub const BER_SWEEP_HEADER: [&str; 10] = [
    "scheme",
    "detector",
    "channel",
    "M",
    "L",
    "ebn0_db",
    "bits_sent",
    "bit_errors",
    "ber",
    "ci95",
];

fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref()
        .ok_or_else(|| CliError::Config(format!("missing [{name}] section")))
}

fn supported(cfg: &ModulationConfig, detector: DetectorKind) -> bool {
    if detector == DetectorKind::Noncoherent && !cfg.scheme().supports_noncoherent() {
        warn!("skipping {cfg} with {detector} detection: not supported");
        false
    } else {
        true
    }
}

fn m_l(cfg: &ModulationConfig) -> [crate::table::Cell; 2] {
    [int(cfg.m() as u64), int(cfg.layers() as u64)]
}

pub fn ber_sweep(run: &RunConfig, workers: usize) -> Result<Table, CliError> {
    let sweep = section(&run.ber_sweep, "ber_sweep")?;
    let configs = expand(&sweep.schemes, sweep.sf)?;
    if sweep.detectors.is_empty() || sweep.ebn0_db.is_empty() {
        return Err(CliError::Config("detector list and E_b/N_0 grid must be non-empty".into()));
    }
    if sweep.ebn0_db.iter().any(|x| x.is_nan() || *x == f64::NEG_INFINITY) {
        return Err(CliError::Config("E_b/N_0 grid contains NaN or -inf".into()));
    }
    let channel = sweep.channel.spec()?;
    let label = channel_label(&channel);
    let mut table = Table::new(&BER_SWEEP_HEADER);
    for cfg in &configs {
        for &detector in &sweep.detectors {
            if !supported(cfg, detector) {
                continue;
            }
            for (point, &ebn0_db) in sweep.ebn0_db.iter().enumerate() {
                let spec = BerPointSpec {
                    channel,
                    min_bit_errors: sweep.min_bit_errors,
                    min_bits: sweep.min_bits,
                    max_symbols: sweep.max_symbols,
                    point_id: point as u64,
                    workers,
                    ..BerPointSpec::new(*cfg, detector, ebn0_db, run.master_seed)
                };
                let est = ber_point(&spec)?;
                info!(
                    "{cfg} {detector} {label} {ebn0_db:.4} dB: ber {:.5e} ({} bits)",
                    est.ber, est.bits_sent
                );
                let [m, l] = m_l(cfg);
                table.push(vec![
                    text(cfg.scheme().name()),
                    text(detector.name()),
                    text(&label),
                    m,
                    l,
                    db(ebn0_db),
                    int(est.bits_sent),
                    int(est.bit_errors),
                    sci(est.ber),
                    sci(est.ci95_halfwidth),
                ]);
            }
        }
    }
    Ok(table)
}

pub fn se_ee(run: &RunConfig, workers: usize) -> Result<Table, CliError> {
    let se = section(&run.se_ee, "se_ee")?;
    if se.sf.is_empty() {
        return Err(CliError::Config("spreading-factor list is empty".into()));
    }
    if !(se.target_ber > 0.0 && se.target_ber < 0.5) {
        return Err(CliError::Config(format!("target_ber {} outside (0, 0.5)", se.target_ber)));
    }
    let channel = se.channel.spec()?;
    let mut table = Table::new(&["scheme", "detector", "M", "L", "se", "required_ebn0_db"]);
    let mut row = 0u64;
    for &sf in &se.sf {
        for cfg in expand(&se.schemes, sf)? {
            for &detector in &se.detectors {
                if !supported(&cfg, detector) {
                    continue;
                }
                let template = BerPointSpec {
                    channel,
                    min_bit_errors: se.min_bit_errors,
                    max_symbols: se.max_symbols,
                    point_id: row,
                    workers,
                    ..BerPointSpec::new(cfg, detector, 0.0, run.master_seed)
                };
                row += 1;
                let required = ebn0_for_target_sim(&template, se.target_ber, se.tol_db)?;
                info!("{cfg} {detector}: {required:.4} dB for ber {:e}", se.target_ber);
                let [m, l] = m_l(&cfg);
                table.push(vec![
                    text(cfg.scheme().name()),
                    text(detector.name()),
                    m,
                    l,
                    sci(spectral_efficiency(&cfg)),
                    db(required),
                ]);
            }
        }
    }
    Ok(table)
}

pub fn analyze(run: &RunConfig) -> Result<Table, CliError> {
    let default = AnalyzeConfig::default();
    let an = run.analyze.as_ref().unwrap_or(&default);
    if an.interference_samples == 0 {
        return Err(CliError::Config("interference_samples must be at least 1".into()));
    }
    let configs = expand(&an.schemes, an.sf)?;
    let mut table = Table::new(&["section", "scheme", "M", "L", "metric", "value", "status"]);
    let mut push = |section: &str, cfg: Option<&ModulationConfig>, metric: String, value, status: &str| {
        let (scheme, m, l) = match cfg {
            Some(c) => (text(c.scheme().name()), int(c.m() as u64), int(c.layers() as u64)),
            None => (text("-"), text("-"), text("-")),
        };
        table.push(vec![text(section), scheme, m, l, text(metric), value, text(status)]);
    };

    for cfg in &configs {
        push("spectral_efficiency", Some(cfg), "bits_per_s_per_hz".into(), sci(spectral_efficiency(cfg)), "ok");
    }
    for cfg in &configs {
        push("receiver_complexity", Some(cfg), "real_operations".into(), int(receiver_complexity(cfg)), "ok");
    }
    let mut interference = Vec::with_capacity(configs.len());
    for (i, cfg) in configs.iter().enumerate() {
        let seed = derive_stream(run.master_seed, &[1, i as u64]).next_u64();
        let value = interference_power(cfg, an.interference_samples, seed)?;
        info!("{cfg}: interference power {value:.5e}");
        interference.push(value);
        push("interference_power", Some(cfg), "normalized_power".into(), sci(value), "ok");
    }
    for (cfg, &i_power) in configs.iter().zip(&interference) {
        if !matches!(cfg.scheme(), Scheme::Lora | Scheme::Lcss | Scheme::Ldmcss) {
            continue;
        }
        for mode in [TheoryMode::Noncoherent, TheoryMode::CoherentUpperBound] {
            for variant in [BerVariant::PaperExact, BerVariant::Standard] {
                for &x in &an.theory_ebn0_db {
                    let p = theoretical_ber_ebn0(cfg, mode, x, i_power, variant)?;
                    let mode_name = match mode {
                        TheoryMode::Noncoherent => "noncoherent",
                        TheoryMode::CoherentUpperBound => "coherent_bound",
                    };
                    push("theory_ber", Some(cfg), format!("{mode_name}/{variant}/ebn0_db={x:.4}"), sci(p), "ok");
                }
            }
        }
    }
    for check in validate::analytic_checks(run.master_seed, 200)? {
        let status = if check.passed() { "pass" } else { "fail" };
        push("residual", None, check.name.clone(), sci(check.max_residual), status);
    }
    Ok(table)
}

pub fn papr(run: &RunConfig) -> Result<Table, CliError> {
    let pc = section(&run.papr, "papr")?;
    if pc.n_symbols == 0 {
        return Err(CliError::Config("n_symbols must be at least 1".into()));
    }
    if pc.thresholds_db.is_empty() || pc.thresholds_db.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(CliError::Config("thresholds_db must be non-empty and ascending".into()));
    }
    let mut table = Table::new(&["scheme", "M", "L", "threshold_db", "exceed_prob"]);
    for (i, cfg) in expand(&pc.schemes, pc.sf)?.iter().enumerate() {
        let seed = derive_stream(run.master_seed, &[2, i as u64]).next_u64();
        let curve = papr_ccdf(cfg, pc.n_symbols, &pc.thresholds_db, seed)?;
        for (th, p) in curve.thresholds_db.iter().zip(&curve.exceed_prob) {
            let [m, l] = m_l(cfg);
            table.push(vec![text(cfg.scheme().name()), m, l, db(*th), sci(*p)]);
        }
    }
    Ok(table)
}

/// Validation table and whether every check passed.
pub fn validate(run: &RunConfig) -> Result<(Table, bool), CliError> {
    let default = ValidateConfig::default();
    let vc = run.validate.as_ref().unwrap_or(&default);
    let mut checks = validate::analytic_checks(run.master_seed, vc.random_cases)?;
    checks.extend(validate::behavioural_checks(run.master_seed, vc.random_cases)?);
    let mut table = Table::new(&["check", "cases", "max_residual", "tolerance", "status"]);
    let mut all = true;
    for c in &checks {
        all &= c.passed();
        info!("{}: {} cases, max residual {:.5e}", c.name, c.cases, c.max_residual);
        table.push(vec![
            text(&c.name),
            int(c.cases),
            sci(c.max_residual),
            sci(c.tolerance),
            text(if c.passed() { "pass" } else { "fail" }),
        ]);
    }
    Ok((table, all))
}
