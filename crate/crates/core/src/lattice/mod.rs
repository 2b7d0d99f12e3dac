//! Lattice computations for `ℤ^g` under a positive-definite quadratic form.
//!
//! [`GramMatrix`] validates the form once and caches an LLL-reduced basis; all
//! enumeration runs in reduced coordinates and maps results back. Shortest and
//! closest vectors are exact (exhaustive ellipsoid enumeration), the covering
//! radius is only enclosed.

mod enumerate;
pub(crate) mod lll;

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::linalg::{
    cholesky, congruence, int_mat_int_vec, int_mat_vec, inverse_from_cholesky, quad_form,
    symmetric_eigenvalues,
};
use crate::quadrature::KroneckerSequence;
use crate::{Error, Result};

pub(crate) use enumerate::Profile;

/// Forms with a larger spectral condition number are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Default cap on the number of lattice points any single enumeration visits.
pub const ENUMERATION_LIMIT: usize = 20_000_000;

/// A symmetric positive-definite `g × g` real matrix `Y`, defining
/// `‖x‖_Y = √(xᵀ Y x)` on `ℝ^g`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    dim: usize,
    entries: Vec<f64>,
    chol: Vec<f64>,
    det: f64,
    basis: Vec<i64>,
    basis_inv: Vec<i64>,
    reduced: Vec<f64>,
    profile: Profile,
    shortest: Vec<i64>,
    lambda1: f64,
}

impl GramMatrix {
    /// Builds a form from row-major entries. The input must be symmetric
    /// bit for bit, positive definite, and have condition number at most
    /// [`MAX_CONDITION`].
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1"));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        for i in 0..dim {
            for j in 0..i {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        let chol = cholesky(&entries, dim).ok_or(Error::NotPositiveDefinite)?;
        let eig = symmetric_eigenvalues(&entries, dim);
        let lo = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.iter().cloned().fold(0.0, f64::max);
        if !(lo > 0.0) {
            return Err(Error::NotPositiveDefinite);
        }
        if hi / lo > MAX_CONDITION {
            return Err(Error::IllConditioned { condition: hi / lo });
        }
        let det = (0..dim).map(|i| chol[i * dim + i]).product::<f64>().powi(2);

        let red = lll::lll_gram(&entries, dim);
        let reduced = congruence(&entries, &red.basis, dim);
        let profile = Profile::new(&reduced, dim).ok_or(Error::NotPositiveDefinite)?;

        let mut gram = GramMatrix {
            dim,
            entries,
            chol,
            det,
            basis: red.basis,
            basis_inv: red.basis_inv,
            reduced,
            profile,
            shortest: Vec::new(),
            lambda1: 0.0,
        };
        let (shortest, lambda1) = gram.search_shortest();
        gram.shortest = shortest;
        gram.lambda1 = lambda1;
        Ok(gram)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut e = vec![0.0; dim * dim];
        for i in 0..dim {
            e[i * dim + i] = 1.0;
        }
        Self::new(dim, e)
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut e = vec![0.0; n * n];
        for (i, v) in diag.iter().enumerate() {
            e[i * n + i] = *v;
        }
        Self::new(n, e)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    /// Lower-triangular `L` with `Y = L Lᵀ`, row-major.
    pub fn cholesky_factor(&self) -> &[f64] {
        &self.chol
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    /// Columns of the unimodular `U` making `Uᵀ Y U` LLL-reduced.
    pub fn reduced_basis(&self) -> &[i64] {
        &self.basis
    }

    /// The LLL-reduced form `Uᵀ Y U`.
    pub fn reduced_form(&self) -> &[f64] {
        &self.reduced
    }

    /// Squared lengths of the Gram–Schmidt vectors of the reduced basis.
    pub fn gram_schmidt_norms_sq(&self) -> &[f64] {
        self.profile.gram_schmidt_norms_sq()
    }

    /// `c · Y`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidParameter("scale must be positive"));
        }
        Self::new(self.dim, self.entries.iter().map(|v| v * c).collect())
    }

    /// `Y⁻¹`, exactly symmetrized.
    pub fn inverse(&self) -> Result<Self> {
        Self::new(self.dim, inverse_from_cholesky(&self.chol, self.dim))
    }

    /// `‖x‖_Y`.
    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(quad_form(&self.entries, x, self.dim).max(0.0).sqrt())
    }

    /// A nonzero integer vector of minimal `‖·‖_Y` and its length `λ₁(Y)`.
    /// Ties are broken arbitrarily.
    pub fn shortest_vector(&self) -> (Vec<i64>, f64) {
        (self.shortest.clone(), self.lambda1)
    }

    /// `λ₁(Y)`.
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// An integer vector `m` minimizing `‖x − m‖_Y` and the distance `ψ_Y(x)`.
    pub fn closest_vector(&self, x: &[f64]) -> Result<(Vec<i64>, f64)> {
        self.check_len(x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        // Work with the fractional part so ψ is periodic up to rounding of x itself.
        let base: Vec<f64> = x.iter().map(|v| v.floor()).collect();
        let frac: Vec<f64> = x.iter().zip(&base).map(|(v, b)| v - b).collect();
        let target = int_mat_vec(&self.basis_inv, &frac, self.dim);

        let (seed, seed_dist) = self.profile.nearest_plane(&target);
        let mut best = seed;
        let mut best_dist = seed_dist;
        let radius = seed_dist * (1.0 + 1e-12) + 1e-300;
        self.profile.walk(&target, radius, ENUMERATION_LIMIT, |m, d| {
            if d < best_dist {
                best_dist = d;
                best.copy_from_slice(m);
                Some(d)
            } else {
                None
            }
        })?;

        let near = int_mat_int_vec(&self.basis, &best, self.dim);
        let diff: Vec<f64> = frac.iter().zip(&near).map(|(f, m)| f - *m as f64).collect();
        let psi = quad_form(&self.entries, &diff, self.dim).max(0.0).sqrt();
        let m = near
            .iter()
            .zip(&base)
            .map(|(m, b)| m + *b as i64)
            .collect();
        Ok((m, psi))
    }

    /// `ψ_Y(x)` alone.
    pub fn distance_to_lattice(&self, x: &[f64]) -> Result<f64> {
        self.closest_vector(x).map(|(_, d)| d)
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: len,
            });
        }
        Ok(())
    }

    pub(crate) fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Coordinates of a real vector in the reduced basis: `U⁻¹ x`.
    pub(crate) fn to_reduced(&self, x: &[f64]) -> Vec<f64> {
        int_mat_vec(&self.basis_inv, x, self.dim)
    }

    fn search_shortest(&self) -> (Vec<i64>, f64) {
        let n = self.dim;
        let (k, _) = (0..n)
            .map(|i| (i, self.reduced[i * n + i]))
            .fold((0, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc });
        let mut best = vec![0i64; n];
        best[k] = 1;
        let mut best_dist = self.reduced[k * n + k];
        let origin = vec![0.0; n];
        // The first-minimum search always terminates well below the limit on
        // an LLL-reduced form; an overflow would leave the basis vector in place.
        let _ = self
            .profile
            .walk(&origin, best_dist * (1.0 + 1e-12), ENUMERATION_LIMIT, |m, d| {
                if d < best_dist && m.iter().any(|&v| v != 0) {
                    best_dist = d;
                    best.copy_from_slice(m);
                    Some(d)
                } else {
                    None
                }
            });
        let m = int_mat_int_vec(&self.basis, &best, n);
        let mf: Vec<f64> = m.iter().map(|&v| v as f64).collect();
        let len = quad_form(&self.entries, &mf, n).max(0.0).sqrt();
        (m, len)
    }
}

/// A certified enclosure `lo ≤ value ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEstimate {
    pub lo: f64,
    pub hi: f64,
}

impl IntervalEstimate {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite);
        }
        if lo > hi {
            return Err(Error::InvalidParameter("interval with lo > hi"));
        }
        Ok(IntervalEstimate { lo, hi })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Output of [`bezout_deep_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeepPoint {
    /// `x = m / 2`.
    pub point: Vec<f64>,
    /// `m` with `γᵀ m = 1`.
    pub bezout: Vec<i64>,
    /// `γ`, a shortest vector of `Y⁻¹`.
    pub dual_shortest: Vec<i64>,
    /// `λ₁(Y⁻¹)`.
    pub dual_lambda1: f64,
    /// `1 / (2 λ₁(Y⁻¹))`, a lower bound for `ψ_Y(point)`.
    pub certified_lo: f64,
}

/// A point far from the lattice: take a shortest vector `γ` of `Y⁻¹`, solve
/// `γᵀ m = 1` over the integers and return `m / 2`. For every integer `n`,
/// `1 ≤ |1 − 2γᵀn| = 2|γᵀ(x − n)| ≤ 2 λ₁(Y⁻¹) ‖x − n‖_Y`, hence
/// `ψ_Y(x) ≥ 1 / (2 λ₁(Y⁻¹))`.
pub fn bezout_deep_point(y: &GramMatrix) -> Result<DeepPoint> {
    let dual = y.inverse()?;
    let (gamma, dual_lambda1) = dual.shortest_vector();
    let bezout = bezout_solve(&gamma).ok_or(Error::InvalidParameter(
        "dual shortest vector is not primitive",
    ))?;
    Ok(DeepPoint {
        point: bezout.iter().map(|&v| v as f64 / 2.0).collect(),
        bezout,
        dual_shortest: gamma,
        dual_lambda1,
        certified_lo: 1.0 / (2.0 * dual_lambda1),
    })
}

/// `(d, a, b)` with `a·p + b·q = d = gcd(p, q)` up to sign.
fn extended_gcd(p: i64, q: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (p, q);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (s0, s1) = (s1, s0 - quot * s1);
        (t0, t1) = (t1, t0 - quot * t1);
    }
    (r0, s0, t0)
}

/// Integer `m` with `γᵀ m = 1`, or `None` if the coordinates are not coprime.
pub(crate) fn bezout_solve(gamma: &[i64]) -> Option<Vec<i64>> {
    let n = gamma.len();
    let mut m = vec![0i64; n];
    let mut acc = 0i64;
    for (i, &c) in gamma.iter().enumerate() {
        if i == 0 {
            acc = c;
            m[0] = 1;
            continue;
        }
        let (d, a, b) = extended_gcd(acc, c);
        for v in m.iter_mut().take(i) {
            *v *= a;
        }
        m[i] = b;
        acc = d;
    }
    match acc {
        1 => Some(m),
        -1 => Some(m.into_iter().map(|v| -v).collect()),
        _ => None,
    }
}

/// Enclosure of the inhomogeneous minimum `μ(Y) = max_x ψ_Y(x)`.
///
/// `lo` is the best `ψ_Y` found among the Bézout deep point, the half-integer
/// corners (for `g ≤ 4`) and `budget` points of a Kronecker sequence. `hi` is
/// the nearest-plane covering bound `½ √(Σ ‖b*ᵢ‖²)` of the reduced basis.
pub fn mu_interval(y: &GramMatrix, budget: usize) -> Result<IntervalEstimate> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1"));
    }
    let g = y.dim();
    let deep = bezout_deep_point(y)?;
    let mut lo = y.distance_to_lattice(&deep.point)?;

    if g <= 4 {
        let mut corner = vec![0.0; g];
        for mask in 1u32..(1 << g) {
            for (i, c) in corner.iter_mut().enumerate() {
                *c = if mask & (1 << i) != 0 { 0.5 } else { 0.0 };
            }
            lo = lo.max(y.distance_to_lattice(&corner)?);
        }
    }

    let seq = KroneckerSequence::new(g);
    let mut p = vec![0.0; g];
    for k in 0..budget {
        seq.point(k as u64, None, &mut p);
        lo = lo.max(y.distance_to_lattice(&p)?);
    }

    let hi = 0.5 * y.gram_schmidt_norms_sq().iter().sum::<f64>().sqrt();
    // lo ≤ μ ≤ hi holds exactly; only rounding can invert them in tight cases.
    let hi = (hi * (1.0 + 4.0 * f64::EPSILON)).max(lo);
    IntervalEstimate::new(lo, hi)
}
