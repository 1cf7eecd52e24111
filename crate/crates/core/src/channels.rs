//! Channel impairments: 2-tap fading, complex gain, carrier frequency offset,
//! phase offset and AWGN.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{Complex64, ComplexVector, RngStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub gain_h: Complex64,
    /// Power in the delayed tap; 0 disables fading.
    pub tap_rho: f64,
    /// Frequency offset normalized to the bin spacing.
    pub freq_offset: f64,
    /// Phase offset in radians.
    pub phase_offset: f64,
    /// Total noise variance per complex sample.
    pub noise_variance: f64,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec {
            gain_h: Complex64::new(1.0, 0.0),
            tap_rho: 0.0,
            freq_offset: 0.0,
            phase_offset: 0.0,
            noise_variance: 0.0,
        }
    }
}

impl ChannelSpec {
    pub fn awgn(noise_variance: f64) -> Self {
        ChannelSpec {
            noise_variance,
            ..Self::default()
        }
    }

    pub fn with_noise(self, noise_variance: f64) -> Self {
        ChannelSpec {
            noise_variance,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_rho(self.tap_rho)?;
        if !(self.noise_variance >= 0.0) || !self.noise_variance.is_finite() {
            return Err(Error::invalid(format!(
                "noise variance {} must be finite and non-negative",
                self.noise_variance
            )));
        }
        if !self.freq_offset.is_finite() || !self.phase_offset.is_finite() {
            return Err(Error::invalid("offsets must be finite"));
        }
        if !self.gain_h.re.is_finite() || !self.gain_h.im.is_finite() {
            return Err(Error::invalid("channel gain must be finite"));
        }
        Ok(())
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..=1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::invalid(format!("tap split {rho} outside [0, 1]")))
    }
}

/// `out[n] = sqrt(1-rho) x[n] + sqrt(rho) x[n-1]`, zero initial state.
pub fn apply_fading(x: &[Complex64], tap_rho: f64) -> Result<ComplexVector> {
    let mut out = x.to_vec();
    fading_in_place(&mut out, tap_rho)?;
    Ok(out)
}

fn fading_in_place(x: &mut [Complex64], rho: f64) -> Result<()> {
    check_rho(rho)?;
    let (direct, delayed) = ((1.0 - rho).sqrt(), rho.sqrt());
    let mut prev = Complex64::new(0.0, 0.0);
    for v in x.iter_mut() {
        let cur = *v;
        *v = cur * direct + prev * delayed;
        prev = cur;
    }
    Ok(())
}

/// `out[n] = exp{j 2 pi df n / M} x[n]`.
pub fn apply_freq_offset(x: &[Complex64], freq_offset: f64, m: usize) -> ComplexVector {
    let mut out = x.to_vec();
    freq_offset_in_place(&mut out, freq_offset, m);
    out
}

fn freq_offset_in_place(x: &mut [Complex64], df: f64, m: usize) {
    for (n, v) in x.iter_mut().enumerate() {
        // reduce the cycle count first so large offsets keep full precision
        let cycles = (df * n as f64 / m as f64).rem_euclid(1.0);
        *v *= Complex64::from_polar(1.0, 2.0 * PI * cycles);
    }
}

/// `out[n] = exp{j psi} x[n]`.
pub fn apply_phase_offset(x: &[Complex64], psi: f64) -> ComplexVector {
    let rot = Complex64::from_polar(1.0, psi);
    x.iter().map(|v| v * rot).collect()
}

/// Add circularly-symmetric complex Gaussian noise of total variance `variance`.
pub fn add_awgn(x: &[Complex64], variance: f64, stream: &mut RngStream) -> Result<ComplexVector> {
    let mut out = x.to_vec();
    awgn_in_place(&mut out, variance, stream)?;
    Ok(out)
}

fn awgn_in_place(x: &mut [Complex64], variance: f64, stream: &mut RngStream) -> Result<()> {
    if !(variance >= 0.0) {
        return Err(Error::invalid(format!("noise variance {variance} is negative")));
    }
    if variance > 0.0 {
        for v in x.iter_mut() {
            *v += stream.complex_gaussian(variance);
        }
    }
    Ok(())
}

/// Fading, gain, frequency offset, phase offset, then AWGN. Stages at their
/// identity value are skipped and draw nothing from `stream`.
pub fn apply_channel(x: &[Complex64], spec: &ChannelSpec, stream: &mut RngStream) -> Result<ComplexVector> {
    let mut out = x.to_vec();
    apply_channel_in_place(&mut out, spec, stream)?;
    Ok(out)
}

pub fn apply_channel_in_place(x: &mut [Complex64], spec: &ChannelSpec, stream: &mut RngStream) -> Result<()> {
    spec.validate()?;
    if spec.tap_rho != 0.0 {
        fading_in_place(x, spec.tap_rho)?;
    }
    if spec.gain_h != Complex64::new(1.0, 0.0) {
        x.iter_mut().for_each(|v| *v *= spec.gain_h);
    }
    if spec.freq_offset != 0.0 {
        freq_offset_in_place(x, spec.freq_offset, x.len());
    }
    if spec.phase_offset != 0.0 {
        let rot = Complex64::from_polar(1.0, spec.phase_offset);
        x.iter_mut().for_each(|v| *v *= rot);
    }
    awgn_in_place(x, spec.noise_variance, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::derive_stream;
    use crate::waveforms::{modulate, ModulationConfig, SymbolIndices};

    fn random_vec(seed: u64, m: usize) -> ComplexVector {
        let mut s = derive_stream(seed, &[]);
        (0..m).map(|_| s.complex_gaussian(1.0)).collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn fading_examples() {
        let x = random_vec(1, 64);
        assert_eq!(apply_fading(&x, 0.0).unwrap(), x);
        let delayed = apply_fading(&x, 1.0).unwrap();
        assert_eq!(delayed[0], Complex64::new(0.0, 0.0));
        assert_eq!(&delayed[1..], &x[..63]);

        // full linear convolution, truncated
        let taps = [0.8f64.sqrt(), 0.2f64.sqrt()];
        let mut conv = vec![Complex64::new(0.0, 0.0); x.len() + 1];
        for (i, xv) in x.iter().enumerate() {
            for (j, t) in taps.iter().enumerate() {
                conv[i + j] += xv * t;
            }
        }
        assert!(max_diff(&apply_fading(&x, 0.2).unwrap(), &conv[..64]) < 1e-14);
        assert!(apply_fading(&x, -0.1).is_err());
        assert!(apply_fading(&x, 1.5).is_err());
    }

    #[test]
    fn fading_preserves_average_chirp_energy() {
        let cfg = ModulationConfig::lora(10).unwrap();
        let mut s = derive_stream(4, &[]);
        let (mut num, mut den) = (0.0, 0.0);
        for _ in 0..1000 {
            let k = s.bits(10) as usize;
            let w = modulate(&cfg, &SymbolIndices::Lora(k)).unwrap();
            let out = apply_fading(&w.samples, 0.2).unwrap();
            num += out.iter().map(|v| v.norm_sqr()).sum::<f64>();
            den += w.symbol_energy;
        }
        let ratio = num / den;
        assert!((0.9..=1.1).contains(&ratio), "{ratio}");
    }

    #[test]
    fn offsets() {
        let x = random_vec(2, 128);
        assert_eq!(apply_freq_offset(&x, 0.0, 128), x);
        assert!(max_diff(&apply_freq_offset(&x, 128.0, 128), &x) < 1e-12);
        assert_eq!(apply_phase_offset(&x, 0.0), x);
        let neg: Vec<_> = x.iter().map(|v| -v).collect();
        assert!(max_diff(&apply_phase_offset(&x, PI), &neg) < 1e-12);

        let fo = apply_freq_offset(&x, 0.2, 128);
        for n in [0usize, 1, 77] {
            let want = x[n] * Complex64::from_polar(1.0, 2.0 * PI * 0.2 * n as f64 / 128.0);
            assert!((fo[n] - want).norm() < 1e-12);
        }
        let e = |v: &[Complex64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((e(&fo) - e(&x)).abs() < 1e-9);
        assert!((e(&apply_phase_offset(&x, 0.785)) - e(&x)).abs() < 1e-9);
    }

    #[test]
    fn awgn_statistics_and_determinism() {
        let x = vec![Complex64::new(0.0, 0.0); 1_000_000];
        let mut s = derive_stream(8, &[1]);
        assert_eq!(add_awgn(&x[..10], 0.0, &mut s).unwrap(), &x[..10]);
        let y = add_awgn(&x, 2.0, &mut derive_stream(8, &[2])).unwrap();
        let var = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / y.len() as f64;
        assert!((var - 2.0).abs() < 0.02, "{var}");
        let re = y.iter().map(|v| v.re * v.re).sum::<f64>() / y.len() as f64;
        assert!((re - 1.0).abs() < 0.01, "{re}");
        let again = add_awgn(&x, 2.0, &mut derive_stream(8, &[2])).unwrap();
        assert_eq!(y, again);
        assert!(add_awgn(&x[..4], -1.0, &mut s).is_err());
    }

    #[test]
    fn channel_composition() {
        let x = random_vec(3, 256);
        let mut s = derive_stream(0, &[]);
        assert_eq!(apply_channel(&x, &ChannelSpec::default(), &mut s).unwrap(), x);

        let awgn = apply_channel(&x, &ChannelSpec::awgn(0.5), &mut derive_stream(6, &[])).unwrap();
        assert_eq!(awgn, add_awgn(&x, 0.5, &mut derive_stream(6, &[])).unwrap());

        let spec = ChannelSpec {
            gain_h: Complex64::new(0.3, -1.1),
            tap_rho: 0.2,
            freq_offset: 0.2,
            phase_offset: PI / 4.0,
            noise_variance: 0.1,
        };
        let full = apply_channel(&x, &spec, &mut derive_stream(7, &[])).unwrap();
        let mut hand = apply_fading(&x, 0.2).unwrap();
        hand.iter_mut().for_each(|v| *v *= spec.gain_h);
        let hand = apply_freq_offset(&hand, 0.2, 256);
        let hand = apply_phase_offset(&hand, PI / 4.0);
        let hand = add_awgn(&hand, 0.1, &mut derive_stream(7, &[])).unwrap();
        assert_eq!(full, hand);

        let bad = ChannelSpec {
            tap_rho: 2.0,
            ..ChannelSpec::default()
        };
        assert!(apply_channel(&x, &bad, &mut s).is_err());
        assert!(apply_channel(&x, &ChannelSpec::awgn(-1.0), &mut s).is_err());
    }

    #[test]
    fn gain_commutes_with_noiseless_stages() {
        let x = random_vec(9, 64);
        let h = Complex64::new(-0.4, 0.9);
        let scale = |v: &[Complex64]| v.iter().map(|c| c * h).collect::<Vec<_>>();
        let a = apply_phase_offset(&apply_freq_offset(&apply_fading(&scale(&x), 0.2).unwrap(), 0.3, 64), 1.0);
        let b = scale(&apply_phase_offset(&apply_freq_offset(&apply_fading(&x, 0.2).unwrap(), 0.3, 64), 1.0));
        let c = apply_phase_offset(&scale(&apply_freq_offset(&apply_fading(&x, 0.2).unwrap(), 0.3, 64)), 1.0);
        assert!(max_diff(&a, &b) < 1e-12);
        assert!(max_diff(&a, &c) < 1e-12);
    }
}
