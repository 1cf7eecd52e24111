//! Inner products between symbols and the signal/interference split of a
//! de-chirped spectrum bin, both from closed-form Gauss sums.

use rayon::prelude::*;

use super::gauss::gauss_sum_unchecked;
use crate::error::{Error, Result};
use crate::numeric::{derive_stream, Complex64};
use crate::waveforms::{components, ChirpComponent, ModulationConfig, SymbolIndices};

/// Default Monte Carlo sample count for [`interference_power`].
pub const DEFAULT_INTERFERENCE_SAMPLES: usize = 100_000;

/// `<s, s_bar> = sum_n s(n) conj(s_bar(n))`, evaluated pairwise over chirp
/// components. Same-rate pairs contribute plain tone products.
pub fn inner_product_closed(cfg: &ModulationConfig, a: &SymbolIndices, b: &SymbolIndices) -> Result<Complex64> {
    let ca = components(cfg, a)?;
    let cb = components(cfg, b)?;
    Ok(inner_product_components(cfg.m(), &ca, &cb))
}

/// [`inner_product_closed`] on already decomposed symbols.
pub fn inner_product_components(m: usize, a: &[ChirpComponent], b: &[ChirpComponent]) -> Complex64 {
    pairwise(m, a, b, |_, _| true)
}

/// Only the terms between components of different chirp rates.
pub fn cross_rate_inner_product(cfg: &ModulationConfig, a: &SymbolIndices, b: &SymbolIndices) -> Result<Complex64> {
    let ca = components(cfg, a)?;
    let cb = components(cfg, b)?;
    Ok(pairwise(cfg.m(), &ca, &cb, |x, y| x.rate != y.rate))
}

fn pairwise(
    m: usize,
    a: &[ChirpComponent],
    b: &[ChirpComponent],
    keep: impl Fn(&ChirpComponent, &ChirpComponent) -> bool,
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for x in a {
        for y in b.iter().filter(|y| keep(x, y)) {
            acc += x.coef * y.coef.conj() * gauss_sum_unchecked(m, x.bin - y.bin, x.rate - y.rate);
        }
    }
    acc
}

/// Noise-free decomposition of one bin of a de-chirped layer spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceDecomposition {
    /// Contribution of the probed layer's own components: `M` times the
    /// carrier coefficient on an activated bin, 0 elsewhere.
    pub signal: Complex64,
    /// Sum of the other layers' leakage into the bin.
    pub interference: Complex64,
    pub noise_free: bool,
}

impl InterferenceDecomposition {
    pub fn total(&self) -> Complex64 {
        self.signal + self.interference
    }
}

/// Split `DFT(dechirp(modulate(idx), rate_layer))[bin]` into signal and
/// interference.
pub fn interference_profile(
    cfg: &ModulationConfig,
    idx: &SymbolIndices,
    layer: usize,
    bin: usize,
) -> Result<InterferenceDecomposition> {
    let rates = cfg.chirp_rates();
    let Some(&probe) = rates.get(layer) else {
        return Err(Error::invalid(format!("layer {layer} out of range 0..{}", rates.len())));
    };
    if bin >= cfg.m() {
        return Err(Error::invalid(format!("bin {bin} out of range 0..{}", cfg.m())));
    }
    let comps = components(cfg, idx)?;
    Ok(decompose(cfg.m(), &comps, probe, bin as i64))
}

fn decompose(m: usize, comps: &[ChirpComponent], probe: i64, bin: i64) -> InterferenceDecomposition {
    let mut signal = Complex64::new(0.0, 0.0);
    let mut interference = Complex64::new(0.0, 0.0);
    for c in comps {
        let v = c.coef * gauss_sum_unchecked(m, c.bin - bin, c.rate - probe);
        if c.rate == probe {
            signal += v;
        } else {
            interference += v;
        }
    }
    InterferenceDecomposition {
        signal,
        interference,
        noise_free: true,
    }
}

/// Mean interference power at the matched bin, normalized so that
/// `E_s / (T (N0 + E_s I))` equals the per-bin signal-to-interference-plus-noise
/// ratio, `T` being the number of active tones.
///
/// Symbols are drawn uniformly, one derived stream per sample. The average
/// runs over every active tone of every sample.
pub fn interference_power(cfg: &ModulationConfig, n_samples: usize, seed: u64) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::invalid("interference_power needs at least one sample"));
    }
    let slots = cfg.slots();
    let m = cfg.m();
    let per_sample: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = derive_stream(seed, &[i]);
            let fields: Vec<usize> = slots
                .iter()
                .map(|s| stream.bits(cfg.field_bits(s)) as usize)
                .collect();
            let comps: Vec<ChirpComponent> = slots
                .iter()
                .zip(&fields)
                .map(|(s, &k)| ChirpComponent {
                    coef: s.carrier.coefficient(),
                    bin: s.bins.bin(k) as i64,
                    rate: s.rate,
                })
                .collect();
            comps
                .iter()
                .map(|c| decompose(m, &comps, c.rate, c.bin).interference.norm_sqr())
                .sum::<f64>()
        })
        .collect();
    let total: f64 = per_sample.iter().sum();
    let tones = slots.len() as f64;
    let mf = m as f64;
    Ok(total / (n_samples as f64 * tones) / (tones * mf * mf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::oracle::{inner_product_direct, spectrum_bin_direct};
    use crate::waveforms::Scheme;

    fn all_indices(cfg: &ModulationConfig) -> Vec<SymbolIndices> {
        let mut out = vec![vec![]];
        for slot in cfg.slots() {
            let card = slot.bins.cardinality(cfg.m());
            out = out
                .into_iter()
                .flat_map(|p: Vec<usize>| {
                    (0..card).map(move |k| {
                        let mut q = p.clone();
                        q.push(k);
                        q
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(|f| SymbolIndices::from_fields(cfg, &f).unwrap())
            .collect()
    }

    fn random_indices(cfg: &ModulationConfig, seed: u64, t: u64) -> SymbolIndices {
        let mut s = derive_stream(seed, &[t]);
        let f: Vec<usize> = cfg.slots().iter().map(|sl| s.bits(cfg.field_bits(sl)) as usize).collect();
        SymbolIndices::from_fields(cfg, &f).unwrap()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1.0)
    }

    #[test]
    fn inner_products_exhaustive_small() {
        let configs = [
            ModulationConfig::lora(3).unwrap(),
            ModulationConfig::new(Scheme::TdmCss, 3, 0).unwrap(),
            ModulationConfig::lcss(3, 2).unwrap(),
            ModulationConfig::ldmcss(3, 1).unwrap(),
        ];
        for cfg in configs {
            let all = all_indices(&cfg);
            for a in &all {
                for b in &all {
                    let closed = inner_product_closed(&cfg, a, b).unwrap();
                    let direct = inner_product_direct(&cfg, a, b).unwrap();
                    assert!(rel(closed, direct) < 1e-8, "{cfg} {a:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn inner_products_sampled_for_benchmarks_and_large_alphabets() {
        let configs = [
            ModulationConfig::new(Scheme::IqTdmCss, 3, 0).unwrap(),
            ModulationConfig::new(Scheme::DmTdmCss, 4, 0).unwrap(),
            ModulationConfig::ldmcss(4, 3).unwrap(),
            ModulationConfig::lcss(10, 8).unwrap(),
            ModulationConfig::ldmcss(10, 4).unwrap(),
            ModulationConfig::new(Scheme::IqTdmCss, 10, 0).unwrap(),
        ];
        for cfg in configs {
            for t in 0..200 {
                let a = random_indices(&cfg, 1, t);
                let b = random_indices(&cfg, 2, t);
                for (x, y) in [(&a, &b), (&a, &a)] {
                    let closed = inner_product_closed(&cfg, x, y).unwrap();
                    let direct = inner_product_direct(&cfg, x, y).unwrap();
                    assert!(rel(closed, direct) < 1e-8, "{cfg}");
                }
            }
        }
    }

    #[test]
    fn single_layer_tones_are_orthogonal() {
        let cfg = ModulationConfig::lcss(6, 1).unwrap();
        for k in 0..64 {
            for kb in 0..64 {
                let v = inner_product_closed(&cfg, &SymbolIndices::Lcss(vec![k]), &SymbolIndices::Lcss(vec![kb])).unwrap();
                let want = if k == kb { 64.0 } else { 0.0 };
                assert!((v - Complex64::new(want, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn self_product_is_tone_energy_plus_cross_terms() {
        let cfg = ModulationConfig::lcss(8, 3).unwrap();
        for t in 0..50 {
            let a = random_indices(&cfg, 9, t);
            let total = inner_product_closed(&cfg, &a, &a).unwrap();
            let cross = cross_rate_inner_product(&cfg, &a, &a).unwrap();
            assert!((total - cross - Complex64::new(3.0 * 256.0, 0.0)).norm() < 1e-8);
        }
    }

    /// Up- and down-chirp components (rate difference 2) are mutually
    /// orthogonal exactly when the shift difference is odd.
    #[test]
    fn rate_difference_two_orthogonality_criterion() {
        let cfg = ModulationConfig::new(Scheme::TdmCss, 3, 0).unwrap();
        for a in all_indices(&cfg) {
            for b in all_indices(&cfg) {
                let (fa, fb) = (a.fields(), b.fields());
                let k1 = fa[0] as i64 - fb[1] as i64;
                let k2 = fa[1] as i64 - fb[0] as i64;
                let cross = cross_rate_inner_product(&cfg, &a, &b).unwrap();
                if k1 % 2 != 0 && k2 % 2 != 0 {
                    assert!(cross.norm() < 1e-9);
                }
                let g1 = gauss_sum_unchecked(8, k1, 2);
                let g2 = gauss_sum_unchecked(8, k2, -2);
                assert_eq!(g1.norm() < 1e-9, k1 % 2 != 0);
                assert_eq!(g2.norm() < 1e-9, k2 % 2 != 0);
            }
        }
        // odd rate differences never vanish, so two-layer LCSS is never orthogonal across layers
        for kappa in -8..8 {
            assert!((gauss_sum_unchecked(8, kappa, 1).norm() - 8f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn profile_matches_direct_spectrum_ldmcss_exhaustive() {
        let cfg = ModulationConfig::ldmcss(4, 2).unwrap();
        for idx in all_indices(&cfg) {
            for layer in 0..2 {
                for bin in 0..16 {
                    let p = interference_profile(&cfg, &idx, layer, bin).unwrap();
                    let direct = spectrum_bin_direct(&cfg, &idx, layer, bin).unwrap();
                    assert!((p.total() - direct).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn profile_signal_and_bound_lcss() {
        let cfg = ModulationConfig::lcss(10, 8).unwrap();
        let m = 1024.0f64;
        let bound: f64 = (1..8).map(|a| 2.0 * (m / a as f64).sqrt()).sum::<f64>();
        for t in 0..20 {
            let idx = random_indices(&cfg, 3, t);
            let ks = idx.fields();
            for layer in 0..8 {
                let p = interference_profile(&cfg, &idx, layer, ks[layer]).unwrap();
                assert_eq!(p.signal, Complex64::new(1024.0, 0.0));
                assert!(p.interference.norm() <= bound);
                let direct = spectrum_bin_direct(&cfg, &idx, layer, ks[layer]).unwrap();
                assert!((p.total() - direct).norm() < 1e-8);
                let off = (ks[layer] + 1) % 1024;
                if !ks.iter().enumerate().any(|(l, &k)| k == off && cfg.chirp_rates()[l] == cfg.chirp_rates()[layer]) {
                    let q = interference_profile(&cfg, &idx, layer, off).unwrap();
                    assert_eq!(q.signal, Complex64::new(0.0, 0.0));
                }
            }
        }
        let single = ModulationConfig::lcss(6, 1).unwrap();
        for bin in 0..64 {
            let p = interference_profile(&single, &SymbolIndices::Lcss(vec![5]), 0, bin).unwrap();
            assert_eq!(p.interference, Complex64::new(0.0, 0.0));
        }
        assert!(interference_profile(&cfg, &random_indices(&cfg, 3, 0), 8, 0).is_err());
        assert!(interference_profile(&cfg, &random_indices(&cfg, 3, 0), 0, 1024).is_err());
    }

    #[test]
    fn interference_power_properties() {
        assert_eq!(interference_power(&ModulationConfig::lcss(7, 1).unwrap(), 100, 1).unwrap(), 0.0);
        assert_eq!(interference_power(&ModulationConfig::lora(7).unwrap(), 100, 1).unwrap(), 0.0);
        let cfg = ModulationConfig::lcss(8, 4).unwrap();
        assert_eq!(
            interference_power(&cfg, 500, 42).unwrap(),
            interference_power(&cfg, 500, 42).unwrap()
        );
        assert!(interference_power(&cfg, 0, 42).is_err());

        let mut prev = f64::INFINITY;
        for sf in 7..=10 {
            let cfg = ModulationConfig::lcss(sf, 4).unwrap();
            let i = interference_power(&cfg, 4000, 5).unwrap();
            let m = cfg.m() as f64;
            // each foreign layer leaks M on average into the matched bin
            let expect = 3.0 / (4.0 * m);
            assert!((i - expect).abs() / expect < 0.05, "sf={sf} I={i} expect={expect}");
            assert!(i <= prev);
            prev = i;
        }
    }
}
