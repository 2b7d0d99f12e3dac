//! Gaussian lattice sums with certified truncation.
//!
//! All three sums are evaluated over the lattice points inside an ellipsoid
//! around the Gaussian peak. The omitted mass beyond radius `R` is bounded by
//! counting points per shell: balls of radius `λ₁/2` around the points of a
//! translated lattice are disjoint, so at most `(1 + 2r/λ₁)^g` of them lie
//! within distance `r`. Partial summation against `e^{−a r²}` then gives
//!
//! ```text
//! Σ_{‖v‖ > R} e^{−a‖v‖²} ≤ (1 + 2R/λ₁)^g e^{−aR²} / (1 − g / (2aR²)),   2aR² > g.
//! ```

use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::lattice::{GramMatrix, ENUMERATION_LIMIT};
use crate::linalg::{mat_vec, quad_form};
use crate::siegel::PeriodMatrix;
use crate::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// Default relative truncation tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaValue<T> {
    pub value: T,
    /// Certified bound on the absolute truncation error of `value`.
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// Natural log of the shell bound above; `+∞` where it does not apply.
pub fn ln_gaussian_tail(lambda1: f64, g: usize, a: f64, r: f64) -> f64 {
    let x = a * r * r;
    let gf = g as f64;
    if !(2.0 * x > gf) {
        return f64::INFINITY;
    }
    gf * (1.0 + 2.0 * r / lambda1).ln() - x - (1.0 - gf / (2.0 * x)).ln()
}

/// A radius whose tail bound is at most `e^{ln_target}`.
fn radius_for(lambda1: f64, g: usize, a: f64, ln_target: f64) -> f64 {
    // margin absorbs rounding in the caller's exp and division
    let ln_target = ln_target - 1e-9;
    let tail = |r: f64| ln_gaussian_tail(lambda1, g, a, r);
    let mut lo = (g as f64 / a).sqrt();
    let mut hi = lo;
    while tail(hi) > ln_target {
        lo = hi;
        hi *= 1.25;
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if tail(mid) <= ln_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Compensated running sum.
#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter("tolerance must be positive"));
    }
    Ok(())
}

/// The Gaussian sum `Σ_m exp(−π t ‖x − m‖²_Y)` as `e^{shift} · sum`, with
/// the log of its certified absolute tail.
struct GaussianSum {
    shift: f64,
    sum: f64,
    ln_tail: f64,
    terms: usize,
}

fn gaussian_sum(y: &GramMatrix, t: f64, x: &[f64], tol: f64) -> Result<GaussianSum> {
    y.check_len(x.len())?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter("t must be positive"));
    }
    check_tol(tol)?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let g = y.dim();
    let a = PI * t;
    let frac: Vec<f64> = x.iter().map(|v| v - v.floor()).collect();
    let target = y.to_reduced(&frac);
    let profile = y.profile();

    // The nearest-plane distance bounds ψ from above, so e^{−a·dist²} bounds the
    // sum from below.
    let (_, near_sq) = profile.nearest_plane(&target);
    let r = radius_for(y.lambda1(), g, a, tol.ln() - a * near_sq);

    // Terms are accumulated relative to the smallest distance seen so far.
    let mut best = near_sq;
    let mut sum = Neumaier::default();
    let terms = profile.walk(&target, r * r, ENUMERATION_LIMIT, |_, d2| {
        if d2 < best {
            sum.scale((-a * (best - d2)).exp());
            best = d2;
        }
        sum.add((-a * (d2 - best)).exp());
        None
    })?;
    let shift = -a * best;
    Ok(GaussianSum {
        shift,
        sum: sum.value(),
        ln_tail: ln_gaussian_tail(y.lambda1(), g, a, r),
        terms,
    })
}

/// `f_Y(t; x) = √det(Y) Σ_{m ∈ ℤ^g} exp(−π t ‖x − m‖²_Y)` with certified
/// relative truncation error at most `tol`.
pub fn f_series(y: &GramMatrix, t: f64, x: &[f64], tol: f64) -> Result<ThetaValue<f64>> {
    let s = gaussian_sum(y, t, x, tol)?;
    let root_det = y.det().sqrt();
    Ok(ThetaValue {
        value: root_det * s.shift.exp() * s.sum,
        tail_bound: root_det * s.ln_tail.exp(),
        terms_used: s.terms,
    })
}

/// `ln f_Y(t; x)`, finite even where `f_Y` underflows. `tail_bound` bounds
/// the absolute error of the logarithm.
pub fn ln_f_series(y: &GramMatrix, t: f64, x: &[f64], tol: f64) -> Result<ThetaValue<f64>> {
    let s = gaussian_sum(y, t, x, tol)?;
    Ok(ThetaValue {
        value: 0.5 * y.det().ln() + s.shift + s.sum.ln(),
        tail_bound: (s.ln_tail - s.shift).exp() / s.sum,
        terms_used: s.terms,
    })
}

/// `θ̃(z) = Σ_n exp(−π‖n + c‖²_Y) e^{2πi(nᵀXn/2 + nᵀ Re z)}`, which equals
/// `e^{−π cᵀYc} θ_Ω(z)` for `c = Y⁻¹ Im z`.
///
/// Returns the sum, a bound on its omitted part, and the number of terms.
/// Truncation satisfies `omitted ≤ tol·|θ̃| + tol²·e^{−π cᵀYc}`.
fn normalized_theta(omega: &PeriodMatrix, re_z: &[f64], c: &[f64], tol: f64) -> Result<(Complex64, f64, usize)> {
    let y = omega.im();
    let g = y.dim();
    let profile = y.profile();
    let basis = y.reduced_basis();
    let xr = omega.re_in_reduced();

    let neg_c: Vec<f64> = c.iter().map(|v| -v).collect();
    let target = y.to_reduced(&neg_c);
    let shifted: Vec<f64> = re_z.iter().map(|v| v - v.floor()).collect();
    // Uᵀ Re z
    let re_red: Vec<f64> = (0..g)
        .map(|j| (0..g).map(|i| basis[i * g + j] as f64 * shifted[i]).sum())
        .collect();
    let ln_floor = 2.0 * tol.ln() - PI * quad_form(y.entries(), c, g);

    let sum_to = |r: f64| -> Result<(Complex64, usize)> {
        let mut re = Neumaier::default();
        let mut im = Neumaier::default();
        let terms = profile.walk(&target, r * r, ENUMERATION_LIMIT, |n, d2| {
            let mut phase = 0.0;
            for i in 0..g {
                let ni = n[i] as f64;
                let mut row = 0.0;
                for j in 0..g {
                    row += xr[i * g + j] * n[j] as f64;
                }
                phase += ni * (0.5 * row + re_red[i]);
            }
            let turns = phase - phase.round();
            let (s, co) = (2.0 * PI * turns).sin_cos();
            let amp = (-PI * d2).exp();
            re.add(amp * co);
            im.add(amp * s);
            None
        })?;
        Ok((Complex64::new(re.value(), im.value()), terms))
    };

    let (_, near_sq) = profile.nearest_plane(&target);
    let tail_at = |r: f64| ln_gaussian_tail(y.lambda1(), g, PI, r);

    // First pass assumes |θ̃| is at least half its largest term.
    let r = radius_for(y.lambda1(), g, PI, ln_add(tol.ln() - PI * near_sq + 0.5f64.ln(), ln_floor));
    let (val, terms) = sum_to(r)?;
    let omitted = tail_at(r).exp();
    if omitted <= tol * val.norm() + ln_floor.exp() {
        return Ok((val, omitted, terms));
    }
    // Cancellation: the terms beyond r change |θ̃| by at most `omitted`.
    let floor = (val.norm() - omitted).max(0.0);
    let ln_target = ln_add(if floor > 0.0 { (tol * floor).ln() } else { f64::NEG_INFINITY }, ln_floor);
    let r = radius_for(y.lambda1(), g, PI, ln_target).max(r);
    let (val, terms) = sum_to(r)?;
    Ok((val, tail_at(r).exp(), terms))
}

fn check_point(omega: &PeriodMatrix, z_len: usize) -> Result<()> {
    if z_len != omega.genus() {
        return Err(Error::DimensionMismatch {
            expected: omega.genus(),
            found: z_len,
        });
    }
    Ok(())
}

/// `θ_Ω(z) = Σ_{n ∈ ℤ^g} exp(iπ nᵀΩn + 2iπ nᵀz)` with
/// `|omitted| ≤ tol·(|θ_Ω(z)| + tol)`.
pub fn theta_siegel(omega: &PeriodMatrix, z: &[Complex64], tol: f64) -> Result<ThetaValue<Complex64>> {
    check_point(omega, z.len())?;
    check_tol(tol)?;
    if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let g = omega.genus();
    let re_z: Vec<f64> = z.iter().map(|v| v.re).collect();
    let im_z: Vec<f64> = z.iter().map(|v| v.im).collect();
    let c = mat_vec(omega.im_inv().entries(), &im_z, g);
    let (val, omitted, terms) = normalized_theta(omega, &re_z, &c, tol)?;
    let scale = (PI * quad_form(omega.im().entries(), &c, g)).exp();
    Ok(ThetaValue {
        value: val * scale,
        tail_bound: omitted * scale,
        terms_used: terms,
    })
}

/// `‖s‖(z) = det(Y)^{1/4} exp(−π yᵀY⁻¹y) |θ_Ω(z)|` with `y = Im z`.
pub fn cube_norm_s(omega: &PeriodMatrix, z: &[Complex64], tol: f64) -> Result<f64> {
    check_point(omega, z.len())?;
    check_tol(tol)?;
    if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let g = omega.genus();
    let re_z: Vec<f64> = z.iter().map(|v| v.re).collect();
    let im_z: Vec<f64> = z.iter().map(|v| v.im).collect();
    let c = mat_vec(omega.im_inv().entries(), &im_z, g);
    // yᵀY⁻¹y = cᵀYc, so the exponential prefactor cancels the scaling of θ̃.
    let (val, _, _) = normalized_theta(omega, &re_z, &c, tol)?;
    Ok(omega.im().det().sqrt().sqrt() * val.norm())
}

/// `‖s‖(x + Ω y)` for real `x, y`, the parametrization used for integrals over
/// the torus.
pub fn cube_norm_s_at(omega: &PeriodMatrix, x: &[f64], y: &[f64], tol: f64) -> Result<f64> {
    let g = omega.genus();
    check_point(omega, x.len())?;
    check_point(omega, y.len())?;
    check_tol(tol)?;
    let xy = mat_vec(omega.re(), y, g);
    let re_z: Vec<f64> = x.iter().zip(&xy).map(|(a, b)| a + b).collect();
    let (val, _, _) = normalized_theta(omega, &re_z, y, tol)?;
    Ok(omega.im().det().sqrt().sqrt() * val.norm())
}
