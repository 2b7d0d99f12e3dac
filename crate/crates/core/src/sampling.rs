//! Random inputs for property tests and the CLI `--random` mode.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;
use rand::Rng;

use crate::lattice::GramMatrix;
use crate::siegel::{reduce_tau, validate_period_matrix, PeriodMatrix};
use crate::{Complex64, Result};

/// A random `g × g` orthogonal matrix (row major).
fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, g: usize) -> Vec<f64> {
    loop {
        let mut q: Vec<f64> = (0..g * g).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut ok = true;
        for i in 0..g {
            for j in 0..i {
                let dot: f64 = (0..g).map(|k| q[i * g + k] * q[j * g + k]).sum();
                for k in 0..g {
                    q[i * g + k] -= dot * q[j * g + k];
                }
            }
            let n = (0..g).map(|k| q[i * g + k] * q[i * g + k]).sum::<f64>().sqrt();
            if n < 1e-3 {
                ok = false;
                break;
            }
            for k in 0..g {
                q[i * g + k] /= n;
            }
        }
        if ok {
            return q;
        }
    }
}

/// Random symmetric positive definite matrix with condition number at most
/// `max_condition` and log-uniform spectrum.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, g: usize, max_condition: f64) -> Result<GramMatrix> {
    let spread = max_condition.max(1.0).ln();
    loop {
        let q = random_orthogonal(rng, g);
        let scale = rng.random_range(-1.0f64..1.0).exp();
        let eig: Vec<f64> = (0..g).map(|_| scale * (spread * rng.random::<f64>()).exp()).collect();
        let mut y = vec![0.0; g * g];
        for i in 0..g {
            for j in i..g {
                let v: f64 = (0..g).map(|k| q[k * g + i] * eig[k] * q[k * g + j]).sum();
                y[i * g + j] = v;
                y[j * g + i] = v;
            }
        }
        if let Ok(m) = GramMatrix::new(g, y) {
            return Ok(m);
        }
    }
}

/// Random period matrix with `|Re Ω| ≤ ½` entrywise and Minkowski/LLL-reduced
/// imaginary part with `λ₁(Y)² ≥ √3/2`; for `g = 1` a point of the standard
/// fundamental domain.
pub fn random_reduced_period_matrix<R: Rng + ?Sized>(rng: &mut R, g: usize) -> Result<PeriodMatrix> {
    if g == 1 {
        let tau = Complex64::new(rng.random_range(-0.5..0.5), (rng.random_range(-1.2f64..1.6)).exp());
        return PeriodMatrix::from_tau(reduce_tau(tau));
    }
    let floor = 3f64.sqrt() / 2.0;
    loop {
        let y = random_spd(rng, g, 1e2)?;
        let mut form = y.reduced_form().to_vec();
        let l2 = y.lambda1() * y.lambda1();
        let scale = (floor / l2).max(1.0) * (1.0 + 2.0 * rng.random::<f64>());
        for v in &mut form {
            *v *= scale;
        }
        let mut x = vec![0.0; g * g];
        for i in 0..g {
            for j in i..g {
                let v = rng.random_range(-0.5..0.5);
                x[i * g + j] = v;
                x[j * g + i] = v;
            }
        }
        let om = validate_period_matrix(g, &x, &form)?;
        if om.is_reduced() {
            return Ok(om);
        }
    }
}
