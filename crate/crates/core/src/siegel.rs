//! Period matrices `Ω = X + iY` in the Siegel upper half space.
//!
//! Only a partial reduction is implemented for `g ≥ 2`: LLL on `Y` by a
//! unimodular congruence, then integer translation of `X` into `[-½, ½]`.
//! Genus one gets the exact classical reduction to the standard fundamental
//! domain. The flags on [`PeriodMatrix`] record which reduction conditions
//! hold; the height bounds only rely on the intrinsic injectivity diameter.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Float;

use crate::lattice::lll::is_lll_reduced;
use crate::lattice::GramMatrix;
use crate::linalg::{congruence, quad_form};
use crate::{Error, Result};

/// Relative tolerance for symmetrizing user-supplied matrices.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// `√(π / (3g))`, the saturation point of the clamped minima.
pub fn clamp_radius(g: usize) -> f64 {
    (core::f64::consts::PI / (3.0 * g as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReducedFlags {
    /// `|X_ij| ≤ ½` for all entries.
    pub re_normalized: bool,
    /// `Y` is LLL-reduced (δ = 0.99) in the given basis.
    pub im_lll: bool,
    /// `λ₁(Y)² ≥ √3/2`.
    pub lambda1_ok: bool,
    /// Genus one only: `|τ| ≥ 1`. Always true for `g ≥ 2`.
    pub modulus_ok: bool,
}

#[derive(Debug, Clone)]
pub struct PeriodMatrix {
    g: usize,
    re: Vec<f64>,
    im: GramMatrix,
    im_inv: GramMatrix,
    /// `Uᵀ X U` for the reduced basis `U` of `Y`, used by theta evaluation.
    re_in_reduced: Vec<f64>,
    flags: ReducedFlags,
}

/// Checks and symmetrizes `(X, Y)` and computes the reduction flags. Both
/// inputs are row-major `g × g`.
pub fn validate_period_matrix(g: usize, re: &[f64], im: &[f64]) -> Result<PeriodMatrix> {
    if g == 0 {
        return Err(Error::InvalidParameter("genus must be at least 1"));
    }
    for m in [re, im] {
        if m.len() != g * g {
            return Err(Error::DimensionMismatch {
                expected: g * g,
                found: m.len(),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    let re = symmetrize(re, g)?;
    let im = symmetrize(im, g)?;
    PeriodMatrix::from_parts(g, re, GramMatrix::new(g, im)?)
}

fn symmetrize(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let scale = a.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut out = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            let (p, q) = (a[i * n + j], a[j * n + i]);
            if (p - q).abs() > SYMMETRY_TOL * scale {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
            let avg = 0.5 * (p + q);
            out[i * n + j] = avg;
            out[j * n + i] = avg;
        }
    }
    Ok(out)
}

impl PeriodMatrix {
    fn from_parts(g: usize, re: Vec<f64>, im: GramMatrix) -> Result<Self> {
        let im_inv = im.inverse()?;
        let re_in_reduced = congruence(&re, im.reduced_basis(), g);
        let lambda1 = im.lambda1();
        let flags = ReducedFlags {
            re_normalized: re.iter().all(|v| v.abs() <= 0.5 + 1e-12),
            im_lll: is_lll_reduced(im.entries(), g),
            lambda1_ok: lambda1 * lambda1 >= 3f64.sqrt() / 2.0 - 1e-10,
            modulus_ok: g > 1 || re[0] * re[0] + im.entry(0, 0) * im.entry(0, 0) >= 1.0 - 1e-12,
        };
        Ok(PeriodMatrix {
            g,
            re,
            im,
            im_inv,
            re_in_reduced,
            flags,
        })
    }

    /// Genus one period `τ`.
    pub fn from_tau(tau: Complex64) -> Result<Self> {
        validate_period_matrix(1, &[tau.re], &[tau.im])
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    /// `X = Re Ω`, row-major.
    pub fn re(&self) -> &[f64] {
        &self.re
    }

    /// `Y = Im Ω`.
    pub fn im(&self) -> &GramMatrix {
        &self.im
    }

    /// `Y⁻¹`.
    pub fn im_inv(&self) -> &GramMatrix {
        &self.im_inv
    }

    pub fn flags(&self) -> ReducedFlags {
        self.flags
    }

    /// All reduction conditions the proof chain relies on hold.
    pub fn is_reduced(&self) -> bool {
        let f = self.flags;
        f.re_normalized && f.lambda1_ok && f.modulus_ok
    }

    /// `τ` when `g = 1`.
    pub fn tau(&self) -> Option<Complex64> {
        (self.g == 1).then(|| Complex64::new(self.re[0], self.im.entry(0, 0)))
    }

    pub(crate) fn re_in_reduced(&self) -> &[f64] {
        &self.re_in_reduced
    }
}

/// Moves `Ω` towards a reduced representative of its symplectic orbit.
///
/// `g = 1`: exact reduction into `|Re τ| ≤ ½, |τ| ≥ 1`. `g ≥ 2`: `Ω ↦ UᵀΩU`
/// with `U` the LLL basis of `Y`, followed by `X ↦ X − round(X)` entrywise on
/// entries outside `[-½, ½]`. Both steps are symplectic, so `ρ(A; L)` is
/// preserved.
pub fn reduce(omega: &PeriodMatrix) -> Result<PeriodMatrix> {
    if let Some(tau) = omega.tau() {
        return PeriodMatrix::from_tau(reduce_tau(tau));
    }
    let g = omega.g;
    let mut re = omega.re_in_reduced.clone();
    for v in re.iter_mut() {
        if v.abs() > 0.5 {
            *v -= v.round();
        }
    }
    let im = GramMatrix::new(g, omega.im.reduced_form().to_vec())?;
    PeriodMatrix::from_parts(g, re, im)
}

/// Classical `SL₂(ℤ)` reduction of `τ` in the upper half plane.
pub fn reduce_tau(mut tau: Complex64) -> Complex64 {
    for _ in 0..10_000 {
        if tau.re.abs() > 0.5 {
            tau.re -= tau.re.round();
        }
        if tau.norm_sqr() < 1.0 - 1e-14 {
            tau = -tau.inv();
        } else {
            break;
        }
    }
    tau
}

/// `H_L(γ, γ)` for `γ = m + Ω n`, i.e.
/// `(m + Xn)ᵀ Y⁻¹ (m + Xn) + nᵀ Y n`.
pub fn riemann_form_norm(omega: &PeriodMatrix, m: &[i64], n: &[i64]) -> Result<f64> {
    let g = omega.g;
    for len in [m.len(), n.len()] {
        if len != g {
            return Err(Error::DimensionMismatch { expected: g, found: len });
        }
    }
    let nf: Vec<f64> = n.iter().map(|&v| v as f64).collect();
    let v: Vec<f64> = (0..g)
        .map(|i| m[i] as f64 + (0..g).map(|j| omega.re[i * g + j] * nf[j]).sum::<f64>())
        .collect();
    Ok(quad_form(omega.im_inv.entries(), &v, g) + quad_form(omega.im.entries(), &nf, g))
}

/// The `2g × 2g` Gram matrix of `H_L` on `ℤ^g + Ω ℤ^g` in the basis `(m, n)`:
/// `[[Y⁻¹, Y⁻¹X], [XY⁻¹, XY⁻¹X + Y]]`.
pub fn period_lattice_gram(omega: &PeriodMatrix) -> Result<GramMatrix> {
    let g = omega.g;
    let n = 2 * g;
    let yi = omega.im_inv.entries();
    let x = &omega.re;
    let y = omega.im.entries();
    let mut yix = vec![0.0; g * g];
    for i in 0..g {
        for j in 0..g {
            yix[i * g + j] = (0..g).map(|k| yi[i * g + k] * x[k * g + j]).sum();
        }
    }
    let mut gram = vec![0.0; n * n];
    for i in 0..g {
        for j in 0..g {
            gram[i * n + j] = yi[i * g + j];
            gram[i * n + g + j] = yix[i * g + j];
            gram[(g + j) * n + i] = yix[i * g + j];
            let xyix: f64 = (0..g).map(|k| x[k * g + i] * yix[k * g + j]).sum();
            gram[(g + i) * n + g + j] = xyix + y[i * g + j];
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (gram[i * n + j] + gram[j * n + i]);
            gram[i * n + j] = avg;
            gram[j * n + i] = avg;
        }
    }
    GramMatrix::new(n, gram)
}

/// A shortest nonzero period `m + Ω n` and `ρ(A; L) = √H_L` at it.
pub fn shortest_period(omega: &PeriodMatrix) -> Result<(Vec<i64>, Vec<i64>, f64)> {
    let gram = period_lattice_gram(omega)?;
    let (v, len) = gram.shortest_vector();
    let g = omega.g;
    Ok((v[..g].to_vec(), v[g..].to_vec(), len))
}

/// `ρ(A; L)`, the injectivity diameter.
pub fn injectivity_diameter(omega: &PeriodMatrix) -> Result<f64> {
    shortest_period(omega).map(|(_, _, r)| r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaClamp {
    /// `min(λ₁(Y⁻¹), √(π/3g))`.
    pub lambda: f64,
    /// `ρ(A; L)`.
    pub rho: f64,
    /// `min(ρ(A; L), √(π/3g))`.
    pub rho_clamped: f64,
    /// `|λ − ρ_clamped| ≤ 1e-9`.
    pub lemma32_ok: bool,
}

/// Compares the clamped dual first minimum of `Y` with the clamped
/// injectivity diameter. They agree whenever `Ω` is reduced.
pub fn lambda_clamped(omega: &PeriodMatrix) -> Result<LambdaClamp> {
    let cap = clamp_radius(omega.g);
    let lambda = omega.im_inv.lambda1().min(cap);
    let rho = injectivity_diameter(omega)?;
    let rho_clamped = rho.min(cap);
    Ok(LambdaClamp {
        lambda,
        rho,
        rho_clamped,
        lemma32_ok: (lambda - rho_clamped).abs() <= 1e-9,
    })
}
