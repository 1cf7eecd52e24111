//! Generalized quadratic Gauss sums `G(kappa, alpha) = sum_n exp{j pi/M (2 kappa n + alpha n^2)}`.

use crate::error::{Error, Result};
use crate::numeric::{Complex64, PhaseTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaussSumParams {
    pub m: usize,
    /// Frequency-shift difference.
    pub kappa: i64,
    /// Chirp-rate difference.
    pub alpha: i64,
}

impl GaussSumParams {
    pub fn new(m: usize, kappa: i64, alpha: i64) -> Result<Self> {
        let p = GaussSumParams { m, kappa, alpha };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        if self.alpha == 0 {
            return Err(Error::invalid("chirp-rate difference must be nonzero"));
        }
        if self.m < 2 || !self.m.is_power_of_two() {
            return Err(Error::invalid(format!("M = {} is not a power of two >= 2", self.m)));
        }
        Ok(())
    }
}

/// Direct O(M) summation with exactly reduced phases.
pub fn gauss_sum_brute(p: GaussSumParams) -> Result<Complex64> {
    p.check()?;
    let table = PhaseTable::new(p.m);
    Ok((0..p.m as i64)
        .map(|n| table.phasor(2 * p.kappa * n + p.alpha * n * n))
        .sum())
}

/// `exp{j pi num / den}` with `num` reduced modulo `2 den` before rounding.
fn unit(num: i128, den: i128) -> Complex64 {
    let r = num.rem_euclid(2 * den);
    Complex64::from_polar(1.0, std::f64::consts::PI * r as f64 / den as f64)
}

/// Closed form by quadratic reciprocity: an `|alpha|`-term sum instead of `M` terms.
///
/// `G = sqrt(M/|alpha|) e^{j sgn(alpha) pi/4} e^{-j pi kappa^2/(alpha M)}
///      * sum_{n<|alpha|} e^{-j pi (2 kappa n + M n^2)/alpha}`
pub fn gauss_sum_closed(p: GaussSumParams) -> Result<Complex64> {
    p.check()?;
    Ok(gauss_sum_unchecked(p.m, p.kappa, p.alpha))
}

/// Closed-form sum for any `alpha`, including the `alpha = 0` tone case
/// (`M` when `kappa = 0 mod M`, else 0). `m` must be a power of two.
pub(crate) fn gauss_sum_unchecked(m: usize, kappa: i64, alpha: i64) -> Complex64 {
    if alpha == 0 {
        return if kappa.rem_euclid(m as i64) == 0 {
            Complex64::new(m as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let a = alpha.unsigned_abs();
    let s = alpha.signum();
    let theta = Complex64::from_polar((m as f64 / a as f64).sqrt(), s as f64 * std::f64::consts::FRAC_PI_4);
    // kappa only matters modulo |alpha| M because M is even
    match (a as i64).checked_mul(m as i64).filter(|&am| am < 1 << 20) {
        Some(am) => {
            let k = kappa.rem_euclid(am);
            let a = a as i64;
            let quad = unit64(-s * k * k, am);
            let gamma: Complex64 = (0..a).map(|n| unit64(-s * (2 * k * n + m as i64 * n * n), a)).sum();
            theta * quad * gamma
        }
        None => {
            let (m, kappa, a, s) = (m as i128, kappa as i128, a as i128, s as i128);
            let quad = unit(-s * kappa * kappa, a * m);
            let gamma: Complex64 = (0..a).map(|n| unit(-s * (2 * kappa * n + m * n * n), a)).sum();
            theta * quad * gamma
        }
    }
}

fn unit64(num: i64, den: i64) -> Complex64 {
    let r = num.rem_euclid(2 * den);
    Complex64::from_polar(1.0, std::f64::consts::PI * r as f64 / den as f64)
}

/// `sqrt(M/|alpha|)`, the magnitude of the leading factor of the closed form.
pub fn theta_magnitude(m: usize, alpha: i64) -> f64 {
    (m as f64 / alpha.unsigned_abs() as f64).sqrt()
}
