//! The height lower bounds and the numerical proof chain behind them.
//!
//! For a principally polarized abelian variety over a number field `K` with
//! archimedean period matrices `Ω_σ`, the bound reads
//!
//! ```text
//! h_Fa(A) ≥ (1/[K:ℚ]) Σ_σ ( π/(6ρ_σ²) + g ln(κ ρ_σ √g) ),   ρ_σ = min(ρ(A_σ; L_σ), √(π/3g)),
//! ```
//!
//! with `κ = √(3 / (2π³e))`. [`verify_chain`] evaluates each intermediate
//! inequality numerically: Parseval for the cube metric, the upper bound on
//! `∫ ln f_Y(2; ·)`, the lower bound on `2 I(A; L)`, and Bost's inequality
//! against the final bound.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;
use num_traits::Float;

use crate::quadrature::{integral_ln_f, integrate_cube, integrate_cube_multi, KroneckerSequence, QuadratureResult, Scheme};
use crate::siegel::{clamp_radius, injectivity_diameter, PeriodMatrix};
use crate::theta::{cube_norm_s_at, f_series, DEFAULT_TOL};
use crate::{Error, Result};

const PI: f64 = core::f64::consts::PI;
const E: f64 = core::f64::consts::E;

pub const DEFAULT_EPSILON: f64 = 0.5;

/// `ln ‖s‖` is clipped from below at this value when integrated.
pub const LN_CLIP: f64 = -40.0;

/// Theta truncation tolerance used inside the torus integrals.
pub const TORUS_THETA_TOL: f64 = 1e-10;

/// `κ = √(3 / (2π³e))`.
pub fn kappa() -> f64 {
    (3.0 / (2.0 * PI.powi(3) * E)).sqrt()
}

fn check_genus(g: usize) -> Result<()> {
    if g == 0 {
        return Err(Error::InvalidParameter("genus must be at least 1"));
    }
    Ok(())
}

/// `π/(6ρ_c²) + g ln(κ ρ_c √g)` with `ρ_c = min(ρ, √(π/3g))`.
pub fn thm11_term(rho: f64, g: usize) -> Result<f64> {
    check_genus(g)?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidParameter("injectivity diameter must be positive"));
    }
    let rc = rho.min(clamp_radius(g));
    let gf = g as f64;
    Ok(PI / (6.0 * rc * rc) + gf * (kappa() * rc * gf.sqrt()).ln())
}

/// One period matrix per complex embedding of `K`.
#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    g: usize,
    degree: usize,
    periods: Vec<PeriodMatrix>,
}

impl EmbeddingSet {
    pub fn new(g: usize, degree: usize, periods: Vec<PeriodMatrix>) -> Result<Self> {
        check_genus(g)?;
        if degree == 0 {
            return Err(Error::InvalidParameter("degree must be at least 1"));
        }
        if periods.is_empty() || periods.len() > degree {
            return Err(Error::IncompleteEmbeddingData {
                degree,
                found: periods.len(),
            });
        }
        if let Some(p) = periods.iter().find(|p| p.genus() != g) {
            return Err(Error::DimensionMismatch {
                expected: g,
                found: p.genus(),
            });
        }
        Ok(EmbeddingSet { g, degree, periods })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn periods(&self) -> &[PeriodMatrix] {
        &self.periods
    }

    fn require_complete(&self) -> Result<()> {
        if self.periods.len() != self.degree {
            return Err(Error::IncompleteEmbeddingData {
                degree: self.degree,
                found: self.periods.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingTerm {
    pub rho: f64,
    pub rho_clamped: f64,
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub g: usize,
    pub degree: usize,
    pub per_embedding: Vec<EmbeddingTerm>,
    pub thm11_total: f64,
    pub epsilon: f64,
    pub cor14_total: f64,
    pub kappa: f64,
    /// Embeddings whose injectivity diameter was clamped.
    pub clamped: usize,
}

/// [`bound_report`] at the default `ε = ½`.
pub fn thm11_bound(set: &EmbeddingSet) -> Result<BoundReport> {
    bound_report(set, DEFAULT_EPSILON)
}

/// Injectivity diameters of every embedding, the main bound, and the
/// simplified bound at `epsilon`.
pub fn bound_report(set: &EmbeddingSet, epsilon: f64) -> Result<BoundReport> {
    set.require_complete()?;
    let rhos = set
        .periods
        .iter()
        .map(injectivity_diameter)
        .collect::<Result<Vec<_>>>()?;
    report_from_rhos(&rhos, set.g, set.degree, epsilon)
}

/// Same as [`bound_report`] from precomputed injectivity diameters.
pub fn report_from_rhos(rhos: &[f64], g: usize, degree: usize, epsilon: f64) -> Result<BoundReport> {
    if rhos.len() != degree || degree == 0 {
        return Err(Error::IncompleteEmbeddingData {
            degree,
            found: rhos.len(),
        });
    }
    let cap = clamp_radius(g);
    let per_embedding = rhos
        .iter()
        .map(|&rho| {
            Ok(EmbeddingTerm {
                rho,
                rho_clamped: rho.min(cap),
                term: thm11_term(rho, g)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let thm11_total = per_embedding.iter().map(|t| t.term).sum::<f64>() / degree as f64;
    Ok(BoundReport {
        g,
        degree,
        thm11_total,
        epsilon,
        cor14_total: cor14_from_rhos(rhos, g, degree, epsilon)?,
        kappa: kappa(),
        clamped: per_embedding.iter().filter(|t| t.rho > cap).count(),
        per_embedding,
    })
}

/// The simplified bound `−(g/2) ln(2π²/ε) + ((1−ε)π/(6d)) Σ 1/ρ_σ²` with
/// unclamped `ρ_σ`.
pub fn cor14_bound(set: &EmbeddingSet, epsilon: f64) -> Result<f64> {
    set.require_complete()?;
    let rhos = set
        .periods
        .iter()
        .map(injectivity_diameter)
        .collect::<Result<Vec<_>>>()?;
    cor14_from_rhos(&rhos, set.g, set.degree, epsilon)
}

pub fn cor14_from_rhos(rhos: &[f64], g: usize, degree: usize, epsilon: f64) -> Result<f64> {
    check_genus(g)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)"));
    }
    if rhos.len() != degree || degree == 0 {
        return Err(Error::IncompleteEmbeddingData {
            degree,
            found: rhos.len(),
        });
    }
    if rhos.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidParameter("injectivity diameter must be positive"));
    }
    let inv_sq: f64 = rhos.iter().map(|r| 1.0 / (r * r)).sum();
    let gf = g as f64;
    Ok(-0.5 * gf * (2.0 * PI * PI / epsilon).ln() + (1.0 - epsilon) * PI / (6.0 * degree as f64) * inv_sq)
}

/// Upper bound for `∫_F ln f_Y(2; x) dx`:
/// `−π/(6λ²) − g ln λ − (g/2) ln(6g/(πe))` for `0 < λ ≤ √(π/3g)`.
pub fn prop24_rhs(lambda: f64, g: usize) -> Result<f64> {
    check_genus(g)?;
    // allow the clamp value itself through rounding
    if !(lambda > 0.0) || lambda > clamp_radius(g) * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter("lambda must lie in (0, sqrt(pi/3g)]"));
    }
    let gf = g as f64;
    Ok(-PI / (6.0 * lambda * lambda) - gf * lambda.ln() - 0.5 * gf * (6.0 * gf / (PI * E)).ln())
}

/// The intermediate bound `−(g/2) ln t − π(2 − t)/(12 λ₁(Y⁻¹)²)`, valid for
/// `t ∈ (0, 2]`; [`prop24_rhs`] is its value at `t = 6gλ²/π`.
pub fn prop24_interpolant(t: f64, dual_lambda1: f64, g: usize) -> f64 {
    let gf = g as f64;
    -0.5 * gf * t.ln() - PI * (2.0 - t) / (12.0 * dual_lambda1 * dual_lambda1)
}

/// `−(g/2) ln(2π²) + (2/d) Σ I_σ`.
pub fn bost_rhs(i_values: &[f64], g: usize, degree: usize) -> Result<f64> {
    check_genus(g)?;
    if i_values.len() != degree || degree == 0 {
        return Err(Error::IncompleteEmbeddingData {
            degree,
            found: i_values.len(),
        });
    }
    Ok(-0.5 * g as f64 * (2.0 * PI * PI).ln() + 2.0 / degree as f64 * i_values.iter().sum::<f64>())
}

/// `π/(6λ²) + g ln λ + (g/2) ln(3g/(πe))`, the lower bound for `2 I(A; L)`.
pub fn archimedean_lower(lambda: f64, g: usize) -> f64 {
    let gf = g as f64;
    PI / (6.0 * lambda * lambda) + gf * lambda.ln() + 0.5 * gf * (3.0 * gf / (PI * E)).ln()
}

/// Numerical value of `I(A; L) = −∫ ln‖s‖ dν₁ + ½ ln ∫ ‖s‖² dν₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantEstimate {
    /// `I(A; L)` with the combined error estimate.
    pub result: QuadratureResult,
    /// `∫ ln‖s‖ dν₁`.
    pub log_norm: QuadratureResult,
    /// `∫ ‖s‖² dν₁`.
    pub sq_norm: QuadratureResult,
}

impl InvariantEstimate {
    /// `½ ln ∫ ‖s‖² dν₁`, which is `−(g/4) ln 2` exactly.
    pub fn half_log_sq(&self) -> f64 {
        0.5 * self.sq_norm.value.ln()
    }
}

/// `I(A; L)` over the parametrization `z = x + Ωy`, `(x, y) ∈ [0,1]^{2g}`.
/// The period matrix must be reduced.
pub fn i_numeric(omega: &PeriodMatrix, scheme: &Scheme) -> Result<InvariantEstimate> {
    if !omega.is_reduced() {
        return Err(Error::NotReduced);
    }
    let g = omega.genus();
    let clipped = Cell::new(0usize);
    let res = integrate_cube_multi(
        |p, v| {
            let s = cube_norm_s_at(omega, &p[..g], &p[g..], TORUS_THETA_TOL)?;
            let ln_s = if s > 0.0 { s.ln() } else { f64::NEG_INFINITY };
            v[0] = if ln_s < LN_CLIP {
                clipped.set(clipped.get() + 1);
                LN_CLIP
            } else {
                ln_s
            };
            v[1] = s * s;
            Ok(())
        },
        2 * g,
        2,
        scheme,
    )?;
    let (mut log_norm, sq_norm) = (res[0], res[1]);
    log_norm.clipped = clipped.get();
    let value = -log_norm.value + 0.5 * sq_norm.value.ln();
    let error = log_norm.error_estimate + 0.5 * sq_norm.error_estimate / sq_norm.value;
    Ok(InvariantEstimate {
        result: QuadratureResult {
            value,
            error_estimate: error,
            clipped: log_norm.clipped,
            ..log_norm
        },
        log_norm,
        sq_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainOptions {
    /// Rule for integrals over `[0,1]^g`; `None` picks [`Scheme::default_for`].
    pub cube_scheme: Option<Scheme>,
    /// Rule for integrals over `[0,1]^{2g}`.
    pub torus_scheme: Option<Scheme>,
    /// Number of `y` samples for the Parseval check.
    pub parseval_samples: usize,
    /// Declared tolerance: an entry passes when `slack ≥ −tolerance`.
    pub tolerance: f64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            cube_scheme: None,
            torus_scheme: None,
            parseval_samples: 4,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainStep {
    /// `∫_F ‖s‖²(x + Ωy) dx = f_Y(2; y)` (worst sampled `y`).
    Parseval,
    /// `∫_F ln f_Y(2; ·) ≤ prop24_rhs(λ, g)`.
    LogThetaUpper,
    /// `2 I(A; L) ≥ π/(6λ²) + g ln λ + (g/2) ln(3g/(πe))`.
    ArchimedeanLower,
    /// Bost's right-hand side `≥` the main bound.
    BostVersusBound,
}

impl ChainStep {
    pub fn name(&self) -> &'static str {
        match self {
            ChainStep::Parseval => "parseval",
            ChainStep::LogThetaUpper => "log_theta_upper",
            ChainStep::ArchimedeanLower => "archimedean_lower",
            ChainStep::BostVersusBound => "bost_vs_bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainEntry {
    pub step: ChainStep,
    /// Embedding index; `None` for the global step.
    pub embedding: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    /// Signed margin of the inequality (`−|lhs − rhs|` for the identity).
    pub slack: f64,
    /// Numerical error estimate attached to the sides.
    pub error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub entries: Vec<ChainEntry>,
    pub invariants: Vec<InvariantEstimate>,
    pub bound: BoundReport,
    pub tolerance: f64,
}

impl ChainReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }
}

/// Evaluates every inequality of the proof chain for each embedding, then
/// Bost's inequality against the main bound.
pub fn verify_chain(set: &EmbeddingSet, opts: &ChainOptions) -> Result<ChainReport> {
    set.require_complete()?;
    if set.periods.iter().any(|p| !p.is_reduced()) {
        return Err(Error::NotReduced);
    }
    let g = set.g;
    let cube = opts.cube_scheme.unwrap_or(Scheme::default_for(g));
    let torus = opts.torus_scheme.unwrap_or(Scheme::default_for(2 * g));
    let tol = opts.tolerance;
    let entry = |step, embedding, lhs: f64, rhs: f64, slack: f64, error: f64| ChainEntry {
        step,
        embedding,
        lhs,
        rhs,
        slack,
        error,
        pass: slack >= -tol,
    };

    let mut entries = Vec::new();
    let mut invariants = Vec::with_capacity(set.degree);
    let seq = KroneckerSequence::new(g);
    let mut y = vec![0.0; g];
    for (idx, omega) in set.periods.iter().enumerate() {
        let im = omega.im();

        // (a) Parseval at a few y.
        let mut worst: Option<ChainEntry> = None;
        for k in 0..opts.parseval_samples.max(1) {
            seq.point(k as u64, None, &mut y);
            let lhs = integrate_cube(
                |x| {
                    cube_norm_s_at(omega, x, &y, TORUS_THETA_TOL)
                        .map(|s| s * s)
                        .unwrap_or(f64::NAN)
                },
                g,
                &cube,
            )?;
            let rhs = f_series(im, 2.0, &y, DEFAULT_TOL)?.value;
            let e = entry(
                ChainStep::Parseval,
                Some(idx),
                lhs.value,
                rhs,
                -(lhs.value - rhs).abs(),
                lhs.error_estimate + 1e-8,
            );
            if worst.map_or(true, |w| e.slack < w.slack) {
                worst = Some(e);
            }
        }
        entries.extend(worst);

        // (b) upper bound on ∫ ln f_Y(2; ·).
        let lambda = omega.im_inv().lambda1().min(clamp_radius(g));
        let lnf = integral_ln_f(im, 2.0, &cube)?;
        let rhs = prop24_rhs(lambda, g)?;
        entries.push(entry(
            ChainStep::LogThetaUpper,
            Some(idx),
            lnf.value,
            rhs,
            rhs - lnf.value,
            lnf.error_estimate,
        ));

        // (c) lower bound on 2 I(A; L).
        let inv = i_numeric(omega, &torus)?;
        let lhs = 2.0 * inv.result.value;
        let rhs = archimedean_lower(lambda, g);
        entries.push(entry(
            ChainStep::ArchimedeanLower,
            Some(idx),
            lhs,
            rhs,
            lhs - rhs,
            2.0 * inv.result.error_estimate,
        ));
        invariants.push(inv);
    }

    // (d) Bost's inequality against the main bound.
    let bound = thm11_bound(set)?;
    let i_values: Vec<f64> = invariants.iter().map(|i| i.result.value).collect();
    let bost = bost_rhs(&i_values, g, set.degree)?;
    let err = 2.0 / set.degree as f64 * invariants.iter().map(|i| i.result.error_estimate).sum::<f64>();
    entries.push(entry(
        ChainStep::BostVersusBound,
        None,
        bost,
        bound.thm11_total,
        bost - bound.thm11_total,
        err,
    ));

    Ok(ChainReport {
        entries,
        invariants,
        bound,
        tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::siegel::validate_period_matrix;
    use crate::Complex64;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn tau_set(taus: &[(f64, f64)], degree: usize) -> EmbeddingSet {
        let periods = taus
            .iter()
            .map(|&(re, im)| PeriodMatrix::from_tau(Complex64::new(re, im)).unwrap())
            .collect();
        EmbeddingSet::new(1, degree, periods).unwrap()
    }

    // Reference values below come from a 30-digit evaluation of the formulas.

    #[test]
    fn kappa_value() {
        assert!(close(kappa(), 0.133_405_452_273_550_04, 1e-16));
        assert!(close(kappa() * kappa() * 2.0 * PI.powi(3) * E, 3.0, 1e-14));
        assert!(kappa() < 1.0);
    }

    #[test]
    fn thm11_term_examples() {
        let at_cap = thm11_term(clamp_radius(1), 1).unwrap();
        assert!(close(at_cap, -1.491_303_476_129_372_8, 1e-13));
        assert!(close(thm11_term(0.5f64.sqrt(), 1).unwrap(), -1.313_738_313_803_393, 1e-13));
        assert_eq!(thm11_term(10.0, 1).unwrap(), at_cap);
        assert!(thm11_term(0.0, 1).is_err());
        assert!(thm11_term(1.0, 0).is_err());
    }

    #[test]
    fn thm11_bound_examples() {
        let r = thm11_bound(&tau_set(&[(0.0, 2.0)], 1)).unwrap();
        assert!(close(r.thm11_total, -1.313_738_313_803_393, 1e-12));
        let r = thm11_bound(&tau_set(&[(0.0, 2.0), (0.0, 2.0)], 2)).unwrap();
        assert!(close(r.thm11_total, -1.313_738_313_803_393, 1e-12));

        let om = validate_period_matrix(2, &[0.0; 4], &[1.0, 0.0, 0.0, 1.0]).unwrap();
        let r = thm11_bound(&EmbeddingSet::new(2, 1, alloc::vec![om]).unwrap()).unwrap();
        assert!(close(r.thm11_total, -2.982_606_952_258_745_7, 1e-12));
        assert_eq!(r.clamped, 1);
    }

    #[test]
    fn incomplete_embeddings_rejected() {
        let set = tau_set(&[(0.0, 2.0)], 2);
        assert_eq!(
            thm11_bound(&set).unwrap_err(),
            Error::IncompleteEmbeddingData { degree: 2, found: 1 }
        );
        assert!(EmbeddingSet::new(1, 1, Vec::new()).is_err());
    }

    #[test]
    fn cor14_examples() {
        let set = tau_set(&[(0.0, 2.0)], 1);
        let v = cor14_bound(&set, 0.5).unwrap();
        assert!(close(v, -1.314_278_290_811_046_6, 1e-12));
        assert!(v <= thm11_bound(&set).unwrap().thm11_total);
        let near_one = cor14_bound(&set, 1.0 - 1e-12).unwrap();
        assert!(close(near_one, -0.5 * (2.0 * PI * PI).ln(), 1e-10));
        assert!(cor14_bound(&set, 1.0).is_err());
        assert!(cor14_bound(&set, 0.0).is_err());
    }

    #[test]
    fn prop24_examples() {
        assert!(close(prop24_rhs(1.0, 1).unwrap(), -0.347_113_567_287_626_3, 1e-14));
        assert!(close(prop24_rhs(clamp_radius(1), 1).unwrap(), -0.5 * 2f64.ln(), 1e-14));
        assert!(close(prop24_rhs(0.5, 2).unwrap(), -1.048_277_505_211_905, 1e-13));
        assert!(prop24_rhs(1.1, 1).is_err());
        assert!(prop24_rhs(0.0, 1).is_err());
    }

    #[test]
    fn bost_examples() {
        assert!(close(bost_rhs(&[0.0], 1, 1).unwrap(), -1.491_303_476_129_372_8, 1e-14));
        assert!(close(bost_rhs(&[0.5, 0.5], 1, 2).unwrap(), -0.491_303_476_129_372_8, 1e-14));
        assert!(close(bost_rhs(&[1.0], 2, 1).unwrap(), -0.982_606_952_258_745_7, 1e-14));
        assert!(bost_rhs(&[1.0], 1, 2).is_err());
    }

    #[test]
    fn bost_at_zero_equals_clamp_term() {
        // ½ + ln(κ√(π/3)) = −½ ln(2π²)
        assert!(close(
            bost_rhs(&[0.0], 1, 1).unwrap(),
            thm11_term(clamp_radius(1), 1).unwrap(),
            1e-14
        ));
    }

    #[test]
    fn i_numeric_requires_reduction() {
        let om = PeriodMatrix::from_tau(Complex64::new(0.7, 2.0)).unwrap();
        assert_eq!(
            i_numeric(&om, &Scheme::tensor_default()).unwrap_err(),
            Error::NotReduced
        );
    }

    #[test]
    fn invariant_genus_one() {
        let scheme = Scheme::tensor_default();
        for (re, im, two_i) in [(0.0, 1.0, 0.180_770_553), (0.5, 1.0, 0.173_300_750), (0.0, 2.0, 0.354_057_346)] {
            let om = PeriodMatrix::from_tau(Complex64::new(re, im)).unwrap();
            let inv = i_numeric(&om, &scheme).unwrap();
            assert!(close(2.0 * inv.result.value, two_i, 1e-8), "{}", inv.result.value);
            assert!(close(inv.half_log_sq(), -0.25 * 2f64.ln(), 1e-12));
            assert_eq!(inv.result.clipped, 0);
        }
    }

    #[test]
    fn chain_passes_genus_one() {
        let set = tau_set(&[(0.0, 1.0), (0.5, 1.0)], 2);
        let rep = verify_chain(&set, &ChainOptions::default()).unwrap();
        assert_eq!(rep.entries.len(), 7);
        for e in &rep.entries {
            assert!(e.pass && e.slack >= -1e-6, "{e:?}");
        }
    }
}
