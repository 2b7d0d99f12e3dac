mod common;

use common::*;
use mlk_core::quadrature::{integrate_cube, Scheme};
use mlk_core::siegel::validate_period_matrix;
use mlk_core::theta::{cube_norm_s, cube_norm_s_at, f_series, ln_f_series, theta_siegel, DEFAULT_TOL};
use mlk_core::{Complex64, PeriodMatrix};
use proptest::prelude::*;
use rand::Rng;

/// θ_Ω(z) by brute force over `‖n‖∞ ≤ bound`.
fn brute_theta(om: &PeriodMatrix, z: &[Complex64], bound: i64) -> Complex64 {
    let g = om.genus();
    let (x, y) = (om.re(), om.im());
    let mut sum = Complex64::new(0.0, 0.0);
    for_each_box(g, bound, |n| {
        let mut ph = Complex64::new(0.0, 0.0);
        for i in 0..g {
            for j in 0..g {
                let nn = (n[i] * n[j]) as f64;
                ph += Complex64::new(x[i * g + j], y.entry(i, j)) * nn * 0.5;
            }
            ph += z[i] * n[i] as f64;
        }
        sum += (Complex64::new(0.0, 2.0 * std::f64::consts::PI) * ph).exp();
    });
    sum
}

#[test]
fn theta_matches_brute_force() {
    let mut r = rng(3);
    for g in 1..=3 {
        for seed in 0..10 {
            let om = reduced(400 + seed, g);
            let z: Vec<Complex64> = (0..g)
                .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-0.5..0.5)))
                .collect();
            let t = theta_siegel(&om, &z, 1e-13).unwrap();
            let b = brute_theta(&om, &z, if g == 3 { 6 } else { 9 });
            assert!((t.value - b).norm() <= 1e-11 * (1.0 + b.norm()), "{} vs {}", t.value, b);
        }
    }
}

#[test]
fn theta_handles_non_lll_basis() {
    // A skewed basis of the same form as diag(1, 2).
    let u = [1.0, 3.0, 0.0, 1.0];
    let d = [1.0, 2.0];
    let mut y = [0.0; 4];
    for i in 0..2 {
        for j in 0..2 {
            y[i * 2 + j] = (0..2).map(|k| u[k * 2 + i] * d[k] * u[k * 2 + j]).sum();
        }
    }
    let om = validate_period_matrix(2, &[0.1, 0.2, 0.2, -0.3], &y).unwrap();
    let z = [Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)];
    let t = theta_siegel(&om, &z, 1e-13).unwrap();
    let b = brute_theta(&om, &z, 12);
    assert!((t.value - b).norm() <= 1e-11 * (1.0 + b.norm()));
}

#[test]
fn parseval_genus_one() {
    let scheme = Scheme::tensor_default();
    for (re, im) in [(0.0, 1.0), (0.5, 1.0), (0.0, 2.0), (-0.3, 1.2), (0.0, 3.0)] {
        let om = PeriodMatrix::from_tau(Complex64::new(re, im)).unwrap();
        for yv in [0.0, 0.17, 0.5, 0.83] {
            let q = integrate_cube(|x| cube_norm_s_at(&om, x, &[yv], 1e-12).unwrap().powi(2), 1, &scheme).unwrap();
            let f = f_series(om.im(), 2.0, &[yv], DEFAULT_TOL).unwrap().value;
            assert!((q.value - f).abs() <= 1e-8, "tau={re}+{im}i y={yv}: {} vs {f}", q.value);
        }
    }
}

#[test]
fn cube_norm_is_periodic_in_x() {
    let om = reduced(9, 2);
    let z = [Complex64::new(0.2, 0.3), Complex64::new(0.7, -0.1)];
    let zs = [Complex64::new(3.2, 0.3), Complex64::new(-4.3, -0.1)];
    let a = cube_norm_s(&om, &z, 1e-12).unwrap();
    let b = cube_norm_s(&om, &zs, 1e-12).unwrap();
    assert!((a - b).abs() <= 1e-11 * a);
}

fn dim_seed() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=3, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_symmetry((g, seed) in dim_seed(), t in 0.1f64..5.0, shift in prop::collection::vec(-20i64..20, 3)) {
        let y = spd(seed, g, 1e3);
        let mut r = rng(seed ^ 1);
        // dyadic so that the shifted point is exact
        let x: Vec<f64> = (0..g).map(|_| r.random_range(-(1i64 << 20)..(1i64 << 20)) as f64 / (1u64 << 20) as f64).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let sh: Vec<f64> = x.iter().zip(&shift).map(|(a, s)| a + *s as f64).collect();
        let a = ln_f_series(&y, t, &x, DEFAULT_TOL).unwrap();
        let b = ln_f_series(&y, t, &neg, DEFAULT_TOL).unwrap();
        let c = ln_f_series(&y, t, &sh, DEFAULT_TOL).unwrap();
        prop_assert!(a.tail_bound >= 0.0 && a.tail_bound <= DEFAULT_TOL, "{:?}", a);
        prop_assert!((a.value - b.value).abs() <= 1e-12 * a.value.abs().max(1.0));
        prop_assert!((a.value - c.value).abs() <= 1e-12 * a.value.abs().max(1.0));
        if a.value > -700.0 {
            let f = f_series(&y, t, &x, DEFAULT_TOL).unwrap();
            prop_assert!(f.value > 0.0 && f.tail_bound <= DEFAULT_TOL * f.value);
        }
    }

    #[test]
    fn gaussian_sum_times_distance_weight_is_nonincreasing((g, seed) in dim_seed()) {
        let y = spd(seed, g, 1e3);
        let mut r = rng(seed ^ 2);
        for _ in 0..5 {
            let x: Vec<f64> = (0..g).map(|_| r.random::<f64>()).collect();
            let psi = y.distance_to_lattice(&x).unwrap();
            let mut prev = f64::INFINITY;
            for k in 0..=8 {
                let t = 0.1 * f64::powi(2.0, k);
                // logarithm of f_Y(t; x) e^{π t ψ²}
                let v = ln_f_series(&y, t, &x, DEFAULT_TOL).unwrap().value + std::f64::consts::PI * t * psi * psi;
                prop_assert!(v <= prev + 1e-9, "t={} {} > {}", t, v, prev);
                prev = v;
            }
        }
    }

    #[test]
    fn halving_tolerance_stays_within_tail((g, seed) in dim_seed(), t in 0.2f64..4.0, tol_exp in 3i32..12) {
        let y = spd(seed, g, 1e2);
        let mut r = rng(seed ^ 3);
        let x: Vec<f64> = (0..g).map(|_| r.random::<f64>()).collect();
        let tol = 10f64.powi(-tol_exp);
        let a = f_series(&y, t, &x, tol).unwrap();
        let b = f_series(&y, t, &x, tol / 2.0).unwrap();
        prop_assert!((a.value - b.value).abs() <= a.tail_bound + 1e-15 * a.value);
    }

    #[test]
    fn theta_is_periodic((g, seed) in dim_seed(), shift in prop::collection::vec(-20i64..20, 3)) {
        let om = reduced(seed, g);
        let mut r = rng(seed ^ 4);
        let z: Vec<Complex64> = (0..g).map(|_| Complex64::new(r.random::<f64>(), r.random_range(-0.5..0.5))).collect();
        let zs: Vec<Complex64> = z.iter().zip(&shift).map(|(a, s)| a + *s as f64).collect();
        let a = theta_siegel(&om, &z, 1e-12).unwrap().value;
        let b = theta_siegel(&om, &zs, 1e-12).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
    }
}
