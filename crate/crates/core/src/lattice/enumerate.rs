//! Fincke–Pohst enumeration with Schnorr–Euchner zig-zag ordering.
//!
//! The form is written as `Q(x) = Σᵢ dᵢ (xᵢ + Σ_{j>i} μᵢⱼ xⱼ)²` from its
//! Cholesky factor and integer points are visited from the last coordinate
//! down. Within a level candidates come in non-decreasing distance from the
//! projected center, so a level is abandoned at the first candidate outside the
//! current radius.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

use crate::linalg::cholesky;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub(crate) struct Profile {
    n: usize,
    /// Squared Gram–Schmidt lengths.
    d: Vec<f64>,
    /// Strictly upper part: `mu[i*n + j]` for `j > i`.
    mu: Vec<f64>,
}

impl Profile {
    pub(crate) fn new(gram: &[f64], n: usize) -> Option<Self> {
        let l = cholesky(gram, n)?;
        let mut d = vec![0.0; n];
        let mut mu = vec![0.0; n * n];
        for i in 0..n {
            let lii = l[i * n + i];
            d[i] = lii * lii;
            for j in (i + 1)..n {
                mu[i * n + j] = l[j * n + i] / lii;
            }
        }
        Some(Profile { n, d, mu })
    }

    pub(crate) fn gram_schmidt_norms_sq(&self) -> &[f64] {
        &self.d
    }

    /// Nearest-plane rounding; returns the point and its squared distance.
    pub(crate) fn nearest_plane(&self, target: &[f64]) -> (Vec<i64>, f64) {
        let n = self.n;
        let mut x = vec![0i64; n];
        let mut dist = 0.0;
        for i in (0..n).rev() {
            let c = self.center(i, target, &x);
            let xi = c.round();
            x[i] = xi as i64;
            dist += self.d[i] * (xi - c) * (xi - c);
        }
        (x, dist)
    }

    fn center(&self, i: usize, target: &[f64], x: &[i64]) -> f64 {
        let n = self.n;
        let mut c = target[i];
        for j in (i + 1)..n {
            c -= self.mu[i * n + j] * (x[j] as f64 - target[j]);
        }
        c
    }

    /// Visits every integer `x` with `Q(x − target) ≤ radius_sq`. The visitor
    /// receives the point and its squared distance and may return a smaller
    /// radius for the remainder of the search.
    pub(crate) fn walk<F>(&self, target: &[f64], radius_sq: f64, limit: usize, visit: F) -> Result<usize>
    where
        F: FnMut(&[i64], f64) -> Option<f64>,
    {
        if self.n == 0 {
            return Ok(0);
        }
        let mut w = Walker {
            p: self,
            target,
            x: vec![0; self.n],
            radius_sq,
            visit,
            count: 0,
            limit,
            overflow: false,
        };
        w.descend(self.n - 1, 0.0);
        if w.overflow {
            return Err(Error::EnumerationLimit { limit });
        }
        Ok(w.count)
    }
}

struct Walker<'a, F> {
    p: &'a Profile,
    target: &'a [f64],
    x: Vec<i64>,
    radius_sq: f64,
    visit: F,
    count: usize,
    limit: usize,
    overflow: bool,
}

impl<F> Walker<'_, F>
where
    F: FnMut(&[i64], f64) -> Option<f64>,
{
    fn descend(&mut self, i: usize, partial: f64) {
        let c = self.p.center(i, self.target, &self.x);
        let di = self.p.d[i];
        let x0 = c.round();
        let step = if c >= x0 { 1.0 } else { -1.0 };
        let mut k: i64 = 0;
        loop {
            // 0, +1, -1, +2, -2, ... in the direction of the center first
            let offset = if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) };
            let xi = x0 + step * offset as f64;
            let diff = xi - c;
            let val = partial + di * diff * diff;
            if !(val <= self.radius_sq) {
                break;
            }
            self.x[i] = xi as i64;
            if i == 0 {
                self.count += 1;
                if self.count > self.limit {
                    self.overflow = true;
                    return;
                }
                if let Some(r) = (self.visit)(&self.x, val) {
                    self.radius_sq = r;
                }
            } else {
                self.descend(i - 1, val);
                if self.overflow {
                    return;
                }
            }
            k += 1;
        }
    }
}
