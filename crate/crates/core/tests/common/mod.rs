#![allow(dead_code)]

use mlk_core::lattice::GramMatrix;
use mlk_core::sampling::{random_reduced_period_matrix, random_spd};
use mlk_core::PeriodMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spd(seed: u64, g: usize, cond: f64) -> GramMatrix {
    random_spd(&mut rng(seed), g, cond).unwrap()
}

pub fn reduced(seed: u64, g: usize) -> PeriodMatrix {
    random_reduced_period_matrix(&mut rng(seed), g).unwrap()
}

/// Calls `f` on every integer vector with entries in `[-bound, bound]`.
pub fn for_each_box(g: usize, bound: i64, mut f: impl FnMut(&[i64])) {
    let mut v = vec![-bound; g];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == g {
                return;
            }
            if v[i] < bound {
                v[i] += 1;
                break;
            }
            v[i] = -bound;
            i += 1;
        }
    }
}

pub fn quad(y: &GramMatrix, x: &[f64]) -> f64 {
    let g = y.dim();
    let mut s = 0.0;
    for i in 0..g {
        for j in 0..g {
            s += x[i] * y.entry(i, j) * x[j];
        }
    }
    s
}

/// Brute-force `λ₁` over the box `‖m‖∞ ≤ bound`.
pub fn brute_lambda1(y: &GramMatrix, bound: i64) -> f64 {
    let mut best = f64::INFINITY;
    for_each_box(y.dim(), bound, |m| {
        if m.iter().any(|&v| v != 0) {
            let x: Vec<f64> = m.iter().map(|&v| v as f64).collect();
            best = best.min(quad(y, &x));
        }
    });
    best.sqrt()
}

/// Brute-force `ψ_Y(x)` over integer vectors within `bound` of `round(x)`.
pub fn brute_psi(y: &GramMatrix, x: &[f64], bound: i64) -> f64 {
    let mut best = f64::INFINITY;
    let base: Vec<f64> = x.iter().map(|v| v.round()).collect();
    let mut d = vec![0.0; x.len()];
    for_each_box(y.dim(), bound, |m| {
        for i in 0..x.len() {
            d[i] = x[i] - base[i] - m[i] as f64;
        }
        best = best.min(quad(y, &d));
    });
    best.sqrt()
}
