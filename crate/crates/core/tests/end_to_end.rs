use lcss_core::analytics::{interference_power, theoretical_ber_ebn0, BerVariant, TheoryMode};
use lcss_core::channels::apply_channel;
use lcss_core::simkit::{ber_point, ebn0_for_target, ebn0_for_target_sim};
use lcss_core::waveforms::{bits_to_indices, indices_to_bits};
use lcss_core::{
    derive_stream, BerPointSpec, ChannelSpec, Complex64, Demodulator, DetectionMode, DetectorKind, ModulationConfig,
    Modulator, Scheme,
};

fn configs(sf: u32) -> Vec<ModulationConfig> {
    let mut v = vec![
        ModulationConfig::new(Scheme::Lora, sf, 1).unwrap(),
        ModulationConfig::new(Scheme::TdmCss, sf, 2).unwrap(),
        ModulationConfig::new(Scheme::IqTdmCss, sf, 2).unwrap(),
        ModulationConfig::new(Scheme::DmTdmCss, sf, 2).unwrap(),
    ];
    v.extend([1, 3, 5].map(|l| ModulationConfig::lcss(sf, l).unwrap()));
    v.extend([1, 2, 3].map(|l| ModulationConfig::ldmcss(sf, l).unwrap()));
    v
}

/// Bits in, bits out through gain and phase impairments without noise.
#[test]
fn bit_pipeline_survives_known_impairments() {
    let h = Complex64::new(0.6, -0.45);
    for cfg in configs(8) {
        let modulator = Modulator::new(cfg);
        let mut demod = Demodulator::new(cfg);
        let mut stream = derive_stream(1, &[cfg.layers() as u64]);
        for _ in 0..300 {
            let bits: Vec<bool> = (0..cfg.bits_per_symbol()).map(|_| stream.bits(1) == 1).collect();
            let idx = bits_to_indices(&cfg, &bits).unwrap();
            let w = modulator.modulate(&idx).unwrap();

            let gained = ChannelSpec {
                gain_h: h,
                ..ChannelSpec::default()
            };
            let y = apply_channel(&w.samples, &gained, &mut stream).unwrap();
            let got = demod.detect(&y, &DetectionMode::coherent(h)).unwrap();
            assert_eq!(indices_to_bits(&cfg, &got).unwrap(), bits, "{cfg} coherent");

            if cfg.scheme().supports_noncoherent() {
                let rotated = ChannelSpec {
                    gain_h: h,
                    phase_offset: 2.1,
                    ..ChannelSpec::default()
                };
                let y = apply_channel(&w.samples, &rotated, &mut stream).unwrap();
                let got = demod.detect(&y, &DetectionMode::noncoherent()).unwrap();
                assert_eq!(indices_to_bits(&cfg, &got).unwrap(), bits, "{cfg} noncoherent");
            }
        }
    }
}

/// A single LoRa tone has no inter-layer interference, so simulation must
/// land on the noncoherent approximation.
#[test]
fn lora_noncoherent_simulation_tracks_theory() {
    let cfg = ModulationConfig::lora(6).unwrap();
    let template = BerPointSpec {
        min_bit_errors: 2000,
        ..BerPointSpec::new(cfg, DetectorKind::Noncoherent, 0.0, 42)
    };
    for target in [1e-2, 1e-3] {
        let sim = ebn0_for_target_sim(&template, target, 0.02).unwrap();
        let theory = ebn0_for_target(
            |x| theoretical_ber_ebn0(&cfg, TheoryMode::Noncoherent, x, 0.0, BerVariant::Standard),
            target,
            1e-3,
        )
        .unwrap();
        assert!((sim - theory).abs() < 0.3, "target {target}: sim {sim:.3} dB, theory {theory:.3} dB");
    }
}

/// Coherent LoRa never lies significantly above the union bound. The bound
/// is tight at high SNR, and bit errors come in bursts of one symbol error,
/// so significance is judged on the symbol error count.
#[test]
fn lora_coherent_simulation_respects_union_bound() {
    let cfg = ModulationConfig::lora(6).unwrap();
    for (i, db) in [2.0, 3.0, 4.0, 5.0].into_iter().enumerate() {
        let spec = BerPointSpec {
            point_id: i as u64,
            min_bit_errors: 1000,
            max_symbols: 400_000,
            ..BerPointSpec::new(cfg, DetectorKind::Coherent, db, 5)
        };
        let est = ber_point(&spec).unwrap();
        let bound = theoretical_ber_ebn0(&cfg, TheoryMode::CoherentUpperBound, db, 0.0, BerVariant::Standard).unwrap();
        let lower = est.ber * (1.0 - 1.96 / (est.symbol_errors as f64).sqrt());
        assert!(lower <= bound, "{db} dB: sim {:.3e} bound {bound:.3e}", est.ber);
    }
}

/// Stacking layers costs energy, and at small M the Gaussian treatment of the
/// interference overstates that cost rather than hiding it.
#[test]
fn layering_penalty_is_bounded_by_interference_model() {
    let required = |layers: usize| {
        let cfg = ModulationConfig::lcss(7, layers).unwrap();
        let template = BerPointSpec {
            min_bit_errors: 1000,
            ..BerPointSpec::new(cfg, DetectorKind::Noncoherent, 0.0, 9)
        };
        let sim = ebn0_for_target_sim(&template, 1e-2, 0.02).unwrap();
        let interference = interference_power(&cfg, 20_000, 3).unwrap();
        let theory = ebn0_for_target(
            |x| theoretical_ber_ebn0(&cfg, TheoryMode::Noncoherent, x, interference, BerVariant::Standard),
            1e-2,
            1e-3,
        )
        .unwrap();
        (sim, theory)
    };
    let (sim1, theory1) = required(1);
    let (sim4, theory4) = required(4);
    let (sim_gap, theory_gap) = (sim4 - sim1, theory4 - theory1);
    assert!(sim_gap > 0.3, "simulated penalty {sim_gap:.2} dB");
    assert!(sim_gap < theory_gap + 0.1, "penalty: sim {sim_gap:.2} dB, theory {theory_gap:.2} dB");
}
