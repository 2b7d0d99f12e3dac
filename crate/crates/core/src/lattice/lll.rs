//! LLL reduction of a quadratic form, tracking the unimodular change of basis
//! and its inverse. The Gram matrix is recomputed from the integer basis at
//! every step so rounding never accumulates across swaps.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::linalg::{congruence, identity_i64};

pub(crate) const LOVASZ_DELTA: f64 = 0.99;

const MAX_STEPS: usize = 100_000;

pub(crate) struct Reduction {
    /// Columns are the reduced basis vectors: the reduced form is `Uᵀ Y U`.
    pub basis: Vec<i64>,
    pub basis_inv: Vec<i64>,
}

/// Gram–Schmidt data of a Gram matrix: `mu` (unit lower triangular) and the
/// squared lengths `b` of the orthogonalized vectors.
pub(crate) fn gram_schmidt(g: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut mu = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i * n + j];
            for l in 0..j {
                s -= mu[j * n + l] * mu[i * n + l] * b[l];
            }
            mu[i * n + j] = s / b[j];
        }
        let mut s = g[i * n + i];
        for l in 0..i {
            s -= mu[i * n + l] * mu[i * n + l] * b[l];
        }
        b[i] = s;
        mu[i * n + i] = 1.0;
    }
    (mu, b)
}

pub(crate) fn lll_gram(y: &[f64], n: usize) -> Reduction {
    let mut u = identity_i64(n);
    let mut uinv = identity_i64(n);
    let mut k = 1;
    let mut steps = 0;
    while k < n && steps < MAX_STEPS {
        steps += 1;
        let g = congruence(y, &u, n);
        let (mut mu, b) = gram_schmidt(&g, n);
        for j in (0..k).rev() {
            let r = mu[k * n + j].round();
            if r == 0.0 {
                continue;
            }
            let ri = r as i64;
            for row in 0..n {
                u[row * n + k] -= ri * u[row * n + j];
            }
            for col in 0..n {
                uinv[j * n + col] += ri * uinv[k * n + col];
            }
            for l in 0..j {
                mu[k * n + l] -= r * mu[j * n + l];
            }
            mu[k * n + j] -= r;
        }
        let m = mu[k * n + k - 1];
        if b[k] >= (LOVASZ_DELTA - m * m) * b[k - 1] {
            k += 1;
        } else {
            for row in 0..n {
                u.swap(row * n + k, row * n + k - 1);
            }
            for col in 0..n {
                uinv.swap(k * n + col, (k - 1) * n + col);
            }
            k = (k - 1).max(1);
        }
    }
    Reduction {
        basis: u,
        basis_inv: uinv,
    }
}

/// Size and Lovász conditions on the given basis, with a little rounding slack.
pub(crate) fn is_lll_reduced(g: &[f64], n: usize) -> bool {
    let (mu, b) = gram_schmidt(g, n);
    for i in 0..n {
        for j in 0..i {
            if mu[i * n + j].abs() > 0.5 + 1e-9 {
                return false;
            }
        }
    }
    (1..n).all(|k| {
        let m = mu[k * n + k - 1];
        b[k] >= (LOVASZ_DELTA - m * m) * b[k - 1] * (1.0 - 1e-12)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_mat_int_vec;

    #[test]
    fn inverse_tracks_basis() {
        let y = [10.0, 7.3, 2.1, 7.3, 6.0, 1.5, 2.1, 1.5, 1.0];
        let red = lll_gram(&y, 3);
        for c in 0..3 {
            let col: Vec<i64> = (0..3).map(|r| red.basis[r * 3 + c]).collect();
            let back = int_mat_int_vec(&red.basis_inv, &col, 3);
            for (r, v) in back.iter().enumerate() {
                assert_eq!(*v, i64::from(r == c));
            }
        }
        assert!(is_lll_reduced(&congruence(&y, &red.basis, 3), 3));
    }

    #[test]
    fn diagonal_untouched() {
        let red = lll_gram(&[3.0, 0.0, 0.0, 5.0], 2);
        assert_eq!(red.basis, vec![1, 0, 0, 1]);
    }
}
