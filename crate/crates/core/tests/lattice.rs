mod common;

use common::*;
use mlk_core::lattice::{bezout_deep_point, mu_interval, GramMatrix};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn svp_matches_brute_force() {
    for g in 1..=4 {
        let bound = if g == 4 { 6 } else { 10 };
        for seed in 0..25 {
            let y = spd(1000 * g as u64 + seed, g, 1e3);
            let (m, l) = y.shortest_vector();
            let x: Vec<f64> = m.iter().map(|&v| v as f64).collect();
            assert!((y.norm(&x).unwrap() - l).abs() <= 1e-12 * l);
            let b = brute_lambda1(&y, bound);
            assert!((l - b).abs() <= 1e-10 * b, "g={g} seed={seed}: {l} vs {b}");
        }
    }
}

#[test]
fn cvp_matches_brute_force() {
    let mut r = rng(5);
    for g in 1..=3 {
        for seed in 0..20 {
            let y = spd(77 * g as u64 + seed, g, 1e3);
            for _ in 0..10 {
                let x: Vec<f64> = (0..g).map(|_| r.random_range(-3.0..3.0)).collect();
                let (m, psi) = y.closest_vector(&x).unwrap();
                let d: Vec<f64> = x.iter().zip(&m).map(|(a, b)| a - *b as f64).collect();
                assert!((y.norm(&d).unwrap() - psi).abs() <= 1e-12 * (1.0 + psi));
                let b = brute_psi(&y, &x, 6);
                assert!((psi - b).abs() <= 1e-10 * (1.0 + b), "{psi} vs {b}");
            }
        }
    }
}

#[test]
fn deep_point_on_hexagonal_form() {
    let y = GramMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
    let dp = bezout_deep_point(&y).unwrap();
    assert!((dp.dual_lambda1 - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
    assert!((dp.certified_lo - 0.5 * 1.5f64.sqrt()).abs() < 1e-14);
    let psi = brute_psi(&y, &dp.point, 3);
    assert!(psi >= dp.certified_lo - 1e-12);
}

#[test]
fn mu_interval_encloses_dense_grid_maximum() {
    // μ of the hexagonal form is √(2/3), attained at the deep holes (1/3, 1/3) and (2/3, 2/3).
    let y = GramMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
    let iv = mu_interval(&y, 4096).unwrap();
    let n = 1000;
    let mut grid_max = 0.0f64;
    for i in 0..=n {
        for j in 0..=n {
            let x = [i as f64 / n as f64, j as f64 / n as f64];
            grid_max = grid_max.max(y.distance_to_lattice(&x).unwrap());
        }
    }
    let mu = (2.0f64 / 3.0).sqrt();
    assert!(grid_max <= mu + 1e-12);
    assert!(mu - grid_max < 1e-3);
    assert!(iv.lo <= mu + 1e-12 && mu <= iv.hi, "{iv:?}");
    assert!(iv.lo >= grid_max - 0.05, "{iv:?}");
}

#[test]
fn mu_interval_exact_cases() {
    let iv = mu_interval(&GramMatrix::identity(2).unwrap(), 16).unwrap();
    assert!((iv.lo - 0.5f64.sqrt()).abs() < 1e-15 && (iv.hi - 0.5f64.sqrt()).abs() < 1e-12);
    let iv = mu_interval(&GramMatrix::new(1, vec![9.0]).unwrap(), 1).unwrap();
    assert!((iv.lo - 1.5).abs() < 1e-15 && (iv.hi - 1.5).abs() < 1e-12);
    assert!(mu_interval(&GramMatrix::identity(2).unwrap(), 0).is_err());
}

fn dim_seed() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=5, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn constructive_deep_point((g, seed) in dim_seed()) {
        let y = spd(seed, g, 1e3);
        let dp = bezout_deep_point(&y).unwrap();
        let dot: i64 = dp.dual_shortest.iter().zip(&dp.bezout).map(|(a, b)| a * b).sum();
        prop_assert_eq!(dot, 1);
        let psi = y.distance_to_lattice(&dp.point).unwrap();
        let dual = y.inverse().unwrap().lambda1();
        prop_assert!(2.0 * psi * dual >= 1.0 - 1e-10);
    }

    #[test]
    fn interval_form_and_enclosure((g, seed) in dim_seed()) {
        let y = spd(seed, g, 1e3);
        let iv = mu_interval(&y, 64).unwrap();
        prop_assert!(iv.lo <= iv.hi);
        prop_assert!(iv.lo.is_finite() && iv.hi.is_finite());
        prop_assert!(2.0 * iv.lo * y.inverse().unwrap().lambda1() >= 1.0 - 1e-10);
    }

    #[test]
    fn psi_is_periodic((g, seed) in dim_seed(), shift in prop::collection::vec(-50i64..50, 5)) {
        let y = spd(seed, g, 1e3);
        let mut r = rng(seed ^ 0x5eed);
        let x: Vec<f64> = (0..g).map(|_| r.random::<f64>()).collect();
        let xs: Vec<f64> = x.iter().zip(&shift).map(|(a, s)| a + *s as f64).collect();
        let a = y.distance_to_lattice(&x).unwrap();
        let b = y.distance_to_lattice(&xs).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300) + 1e-13, "{} {}", a, b);
    }

    #[test]
    fn scaling_covariance((g, seed) in dim_seed(), c in 0.01f64..100.0) {
        let y = spd(seed, g, 1e3);
        let cy = y.scaled(c).unwrap();
        prop_assert!((cy.lambda1() - c.sqrt() * y.lambda1()).abs() <= 1e-12 * cy.lambda1());
        let mut r = rng(seed ^ 0xc0);
        let x: Vec<f64> = (0..g).map(|_| r.random::<f64>()).collect();
        let a = cy.distance_to_lattice(&x).unwrap();
        let b = c.sqrt() * y.distance_to_lattice(&x).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300), "{} {}", a, b);
    }
}
