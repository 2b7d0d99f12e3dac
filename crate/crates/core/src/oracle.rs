//! Closed-form elliptic-curve values used as an independent reference.
//!
//! `ln|Δ(τ)| = ln|q| + 24 Σ_{n≥1} ln|1 − qⁿ|` with `q = e^{2πiτ}`, and the
//! stable Faltings height of `ℂ/(ℤ + τℤ)` is
//! `h(τ) = −(1/12)(12 ln 2π + ln|Δ(τ)| + 6 ln Im τ)`.

use num_traits::Float;

use crate::siegel::reduce_tau;
use crate::{Complex64, Error, Result};

const PI: f64 = core::f64::consts::PI;

/// Below this imaginary part the series is evaluated at the reduced point.
const DIRECT_MIN_IM: f64 = 0.5;

const MAX_TERMS: usize = 100_000;

/// A point of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticTau(Complex64);

impl EllipticTau {
    pub fn new(tau: Complex64) -> Result<Self> {
        if !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(Error::NonFinite);
        }
        if !(tau.im > 0.0) {
            return Err(Error::InvalidParameter("tau must lie in the upper half-plane"));
        }
        Ok(EllipticTau(tau))
    }

    pub fn tau(&self) -> Complex64 {
        self.0
    }
}

/// `ln|Δ(τ)|` by the product expansion at `τ` itself, truncated once the
/// remaining factors change the result by at most `tol`.
pub fn ln_delta_abs_series(tau: EllipticTau, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    let t = tau.0;
    let q = (Complex64::new(0.0, 2.0 * PI) * t).exp();
    let aq = (-2.0 * PI * t.im).exp();
    if aq >= 1.0 {
        return Err(Error::InvalidParameter("imaginary part too small for the series"));
    }
    let denom = (1.0 - aq) * (1.0 - aq);
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut qn = q;
    let mut aqn = aq;
    for _ in 0..MAX_TERMS {
        let term = (Complex64::new(1.0, 0.0) - qn).norm().ln();
        let s = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - s) + term } else { (term - s) + sum };
        sum = s;
        aqn *= aq;
        // |Σ_{k>n} ln|1 − q^k|| ≤ |q|^{n+1}/(1−|q|)²
        if 24.0 * aqn / denom <= tol {
            return Ok(-2.0 * PI * t.im + 24.0 * (sum + comp));
        }
        qn *= q;
    }
    Err(Error::EnumerationLimit { limit: MAX_TERMS })
}

/// `ln|Δ(τ)|`, using `|Δ(γτ)| (Im γτ)⁶ = |Δ(τ)| (Im τ)⁶` to move `τ` into the
/// fundamental domain first when its imaginary part is small.
pub fn ln_delta_abs(tau: EllipticTau, tol: f64) -> Result<f64> {
    let t = tau.0;
    if t.im >= DIRECT_MIN_IM {
        return ln_delta_abs_series(tau, tol);
    }
    let r = reduce_tau(t);
    let v = ln_delta_abs_series(EllipticTau::new(r)?, tol)?;
    Ok(v + 6.0 * (r.im / t.im).ln())
}

/// `|Δ(τ)|`.
pub fn delta_modular(tau: EllipticTau, tol: f64) -> Result<f64> {
    Ok(ln_delta_abs(tau, tol)?.exp())
}

/// Stable Faltings height of the elliptic curve `ℂ/(ℤ + τℤ)`.
pub fn faltings_height_ec(tau: EllipticTau) -> Result<f64> {
    let ld = ln_delta_abs(tau, 1e-16)?;
    Ok(-(12.0 * (2.0 * PI).ln() + ld + 6.0 * tau.0.im.ln()) / 12.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn et(re: f64, im: f64) -> EllipticTau {
        EllipticTau::new(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn delta_at_10i() {
        let d = delta_modular(et(0.0, 10.0), 1e-16).unwrap();
        assert!((d / 5.157_900_062_542_8e-28 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_at_i() {
        // Δ(i) = Γ(1/4)^24 / (2^24 π^18)
        let g14: f64 = 3.625_609_908_221_908;
        let expect = 24.0 * g14.ln() - 24.0 * 2f64.ln() - 18.0 * PI.ln();
        assert!((ln_delta_abs(et(0.0, 1.0), 1e-16).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(EllipticTau::new(Complex64::new(0.0, 0.0)).is_err());
        assert!(EllipticTau::new(Complex64::new(0.0, -1.0)).is_err());
        assert!(EllipticTau::new(Complex64::new(f64::NAN, 1.0)).is_err());
    }

    #[test]
    fn height_asymptotics() {
        for y in [10.0, 20.0, 40.0] {
            let h = faltings_height_ec(et(0.0, y)).unwrap();
            let lead = PI * y / 6.0 - 0.5 * f64::ln(y);
            assert!((h - lead + 1.837_877_066_409_345_5).abs() < 1e-10);
        }
    }

    #[test]
    fn small_imaginary_part_uses_reduction() {
        let tau = et(0.1, 0.05);
        let via = ln_delta_abs(tau, 1e-16).unwrap();
        let r = reduce_tau(tau.tau());
        let direct = ln_delta_abs_series(EllipticTau::new(r).unwrap(), 1e-16).unwrap();
        assert!((via - direct - 6.0 * (r.im / 0.05).ln()).abs() < 1e-12);
    }
}
