//! Shared fixtures for the benchmarks.

use lcss_core::{derive_stream, ModulationConfig, Scheme, SymbolIndices};

/// Configurations exercised by every benchmark group, labelled for reports.
pub fn bench_configs() -> Vec<(String, ModulationConfig)> {
    [(Scheme::Lora, 1), (Scheme::DmTdmCss, 2), (Scheme::Lcss, 4), (Scheme::Lcss, 8), (Scheme::Ldmcss, 4)]
        .into_iter()
        .map(|(s, l)| {
            let cfg = ModulationConfig::new(s, 10, l).expect("valid benchmark config");
            (format!("{}-L{}", s.name(), cfg.layers()), cfg)
        })
        .collect()
}

/// `n` reproducible random symbols for `cfg`.
pub fn random_symbols(cfg: &ModulationConfig, n: usize, seed: u64) -> Vec<SymbolIndices> {
    let mut stream = derive_stream(seed, &[]);
    (0..n)
        .map(|_| {
            let fields: Vec<usize> = cfg
                .slots()
                .iter()
                .map(|s| stream.bits(cfg.field_bits(s)) as usize)
                .collect();
            SymbolIndices::from_fields(cfg, &fields).expect("fields in range")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid_and_reproducible() {
        for (_, cfg) in bench_configs() {
            let a = random_symbols(&cfg, 8, 1);
            assert_eq!(a, random_symbols(&cfg, 8, 1));
            assert!(a.iter().all(|s| s.validate(&cfg).is_ok()));
        }
    }
}
