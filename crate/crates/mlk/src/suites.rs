//! Invariant suites run by `mlk verify`.

use mlk_core::bounds::{kappa, prop24_rhs, thm11_term, verify_chain, ChainOptions, EmbeddingSet};
use mlk_core::lattice::{bezout_deep_point, mu_interval, GramMatrix};
use mlk_core::oracle::{faltings_height_ec, ln_delta_abs_series, EllipticTau};
use mlk_core::quadrature::{integral_ln_f, integral_psi_sq};
use mlk_core::siegel::{clamp_radius, injectivity_diameter};
use mlk_core::theta::{ln_f_series, DEFAULT_TOL};
use mlk_core::{Complex64, PeriodMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::document::{scheme_for, CheckOut, Options};
use crate::error::CliError;
use crate::parallel;

const PI: f64 = std::f64::consts::PI;

/// Samples drawn by `mu_interval` inside the suites.
const MU_BUDGET: usize = 256;

fn rng_for(seed: u64, index: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index as u64 + 1);
    r
}

fn quad(y: &GramMatrix, x: &[f64]) -> f64 {
    let g = y.dim();
    (0..g)
        .map(|i| (0..g).map(|j| x[i] * y.entry(i, j) * x[j]).sum::<f64>())
        .sum()
}

/// `λ₁` by exhaustive search over `‖m‖∞ ≤ bound`.
fn brute_lambda1(y: &GramMatrix, bound: i64) -> f64 {
    let g = y.dim();
    let mut m = vec![-bound; g];
    let mut x = vec![0.0; g];
    let mut best = f64::INFINITY;
    loop {
        if m.iter().any(|&v| v != 0) {
            for (xi, mi) in x.iter_mut().zip(&m) {
                *xi = *mi as f64;
            }
            best = best.min(quad(y, &x));
        }
        let mut i = 0;
        loop {
            if i == g {
                return best.sqrt();
            }
            if m[i] < bound {
                m[i] += 1;
                break;
            }
            m[i] = -bound;
            i += 1;
        }
    }
}

fn embed(index: usize) -> Option<usize> {
    Some(index)
}

fn lattice_checks(index: usize, y: &GramMatrix, seed: u64) -> Result<Vec<CheckOut>, CliError> {
    const S: &str = "lattice";
    let err = |source| CliError::Embedding { index, source };
    let g = y.dim();
    let mut r = rng_for(seed, index);
    let mut out = Vec::new();

    let dual = y.inverse().map_err(err)?.lambda1();
    let dp = bezout_deep_point(y).map_err(err)?;
    let psi = y.distance_to_lattice(&dp.point).map_err(err)?;
    out.push(CheckOut::at_least(S, "deep_point", embed(index), 2.0 * psi * dual, 1.0, 1e-10));

    let iv = mu_interval(y, MU_BUDGET).map_err(err)?;
    out.push(CheckOut::at_least(S, "mu_enclosure", embed(index), iv.hi, iv.lo, 0.0));
    out.push(CheckOut::at_least(S, "mu_lower_interval_form", embed(index), 2.0 * iv.lo * dual, 1.0, 1e-10));

    // dyadic point so that the shifted copy is exact
    let x: Vec<f64> = (0..g).map(|_| r.random_range(0..1u64 << 20) as f64 / (1u64 << 20) as f64).collect();
    let xs: Vec<f64> = x.iter().map(|v| v + r.random_range(-50i64..=50) as f64).collect();
    let a = y.distance_to_lattice(&x).map_err(err)?;
    let b = y.distance_to_lattice(&xs).map_err(err)?;
    out.push(CheckOut::equal(S, "psi_periodicity", embed(index), a, b, 1e-12 * a.max(1e-12)));

    let c = r.random_range(0.1..10.0f64);
    let scaled = y.scaled(c).map_err(err)?.lambda1();
    let expect = c.sqrt() * y.lambda1();
    out.push(CheckOut::equal(S, "lambda1_scaling", embed(index), scaled, expect, 1e-12 * expect));

    if g <= 4 {
        let brute = brute_lambda1(y, 10);
        out.push(CheckOut::equal(S, "svp_brute_force", embed(index), y.lambda1(), brute, 1e-10 * brute));
    }
    Ok(out)
}

fn integral_checks(index: usize, y: &GramMatrix, opts: &Options, seed: u64) -> Result<Vec<CheckOut>, CliError> {
    const S: &str = "integrals";
    let err = |source| CliError::Embedding { index, source };
    let g = y.dim();
    let gf = g as f64;
    let scheme = scheme_for(opts, g, seed);
    let mut out = Vec::new();

    let psi_sq = integral_psi_sq(y, &scheme).map_err(err)?;
    let lo = mu_interval(y, MU_BUDGET).map_err(err)?.lo;
    out.push(CheckOut::at_least(
        S,
        "psi_sq_lower",
        embed(index),
        psi_sq.value + psi_sq.error_estimate,
        lo * lo / 3.0,
        0.0,
    ));

    for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let q = integral_ln_f(y, t, &scheme).map_err(err)?;
        out.push(CheckOut::at_least(
            S,
            &format!("ln_f_upper[t={t}]"),
            embed(index),
            -0.5 * gf * t.ln(),
            q.value - q.error_estimate,
            0.0,
        ));
        if t == 2.0 {
            let lambda = y.inverse().map_err(err)?.lambda1().min(clamp_radius(g));
            out.push(CheckOut::at_least(
                S,
                "prop24_upper",
                embed(index),
                prop24_rhs(lambda, g).map_err(err)?,
                q.value - q.error_estimate,
                0.0,
            ));
        }
    }

    // t ↦ ln f_Y(t; x) + π t ψ(x)² never increases
    let mut r = rng_for(seed, index);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: Vec<f64> = (0..g).map(|_| r.random::<f64>()).collect();
        let psi = y.distance_to_lattice(&x).map_err(err)?;
        let mut prev = f64::INFINITY;
        for k in 0..=8 {
            let t = 0.1 * f64::from(1u32 << k);
            let v = ln_f_series(y, t, &x, DEFAULT_TOL).map_err(err)?.value + PI * t * psi * psi;
            worst = worst.max(v - prev);
            prev = v;
        }
    }
    out.push(CheckOut::with_slack(S, "gaussian_monotone", embed(index), worst, 0.0, -worst, 1e-9));
    Ok(out)
}

fn chain_checks(set: &EmbeddingSet, opts: &Options, seed: u64, offset: usize) -> Result<Vec<CheckOut>, CliError> {
    let g = set.genus();
    if let Some(index) = set.periods().iter().position(|p| !p.is_reduced()) {
        return Err(CliError::Embedding {
            index: offset + index,
            source: mlk_core::Error::NotReduced,
        });
    }
    let chain = ChainOptions {
        cube_scheme: Some(scheme_for(opts, g, seed)),
        torus_scheme: Some(scheme_for(opts, 2 * g, seed)),
        ..ChainOptions::default()
    };
    let rep = verify_chain(set, &chain)?;
    Ok(rep
        .entries
        .iter()
        .map(|e| {
            CheckOut::with_slack(
                "chain",
                e.step.name(),
                e.embedding.map(|i| offset + i),
                e.lhs,
                e.rhs,
                e.slack,
                rep.tolerance,
            )
        })
        .collect())
}

fn oracle_gap(tau: Complex64) -> Result<f64, CliError> {
    let om = PeriodMatrix::from_tau(tau)?;
    let rho = injectivity_diameter(&om)?;
    Ok(faltings_height_ec(EllipticTau::new(tau)?)? - thm11_term(rho, 1)?)
}

fn oracle_checks(taus: &[Complex64], transforms: usize, seed: u64) -> Result<Vec<CheckOut>, CliError> {
    const S: &str = "oracle";
    let mut out = Vec::new();
    for y in [1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
        let gap = oracle_gap(Complex64::new(0.0, y))?;
        out.push(CheckOut::at_least(S, &format!("gap_nonnegative[y={y}]"), None, gap, 0.0, 0.0));
        out.push(CheckOut::at_least(S, &format!("gap_bounded[y={y}]"), None, 1.0, gap, 0.0));
    }
    let limit = -(2.0 * PI).ln() - kappa().ln();
    out.push(CheckOut::equal(S, "gap_limit[y=100]", None, oracle_gap(Complex64::new(0.0, 100.0))?, limit, 1e-3));

    let y = 20.0f64;
    let h = faltings_height_ec(EllipticTau::new(Complex64::new(0.0, y))?)?;
    out.push(CheckOut::equal(
        S,
        "height_asymptotic[y=20]",
        None,
        h - (PI * y / 6.0 - 0.5 * y.ln()),
        -(2.0 * PI).ln(),
        1e-10,
    ));

    let t = Complex64::new(0.3, 1.7);
    let s = -Complex64::new(1.0, 0.0) / t;
    let lhs = ln_delta_abs_series(EllipticTau::new(t)?, 1e-16)? + 6.0 * t.im.ln();
    let rhs = ln_delta_abs_series(EllipticTau::new(s)?, 1e-16)? + 6.0 * s.im.ln();
    out.push(CheckOut::equal(S, "weight12_law", None, lhs, rhs, 1e-10));

    let mut r = rng_for(seed, 0);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < transforms {
        let (a, b, c) = (
            r.random_range(-20i64..=20),
            r.random_range(-20i64..=20),
            r.random_range(-20i64..=20),
        );
        if a == 0 || (1 + b * c) % a != 0 || ((1 + b * c) / a).abs() > 20 {
            continue;
        }
        let d = (1 + b * c) / a;
        let t = Complex64::new(r.random_range(-0.5..0.5), r.random_range(0.9..3.0));
        let img = (t * a as f64 + b as f64) / (t * c as f64 + d as f64);
        let h0 = faltings_height_ec(EllipticTau::new(t)?)?;
        let h1 = faltings_height_ec(EllipticTau::new(img)?)?;
        worst = worst.max((h0 - h1).abs());
        done += 1;
    }
    out.push(CheckOut::with_slack(S, "modular_invariance", None, worst, 0.0, -worst, 1e-10));

    for (i, &tau) in taus.iter().enumerate() {
        out.push(CheckOut::at_least(S, "gap_nonnegative", embed(i), oracle_gap(tau)?, 0.0, 0.0));
    }
    Ok(out)
}

/// Matrices a suite runs on.
#[derive(Debug, Clone)]
pub enum Subjects {
    /// The embeddings of an input document.
    Input { set: EmbeddingSet },
    /// `count` random matrices of dimension `dim`.
    Random { count: usize, dim: usize },
    /// No matrices (the oracle suite only).
    Builtin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lattice,
    Integrals,
    Chain,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Lattice, Suite::Integrals, Suite::Chain, Suite::Oracle];
}

fn random_grams(count: usize, dim: usize, seed: u64, reduced: bool) -> Vec<GramMatrix> {
    (0..count)
        .map(|i| {
            let mut r = rng_for(seed, i);
            if reduced {
                mlk_core::sampling::random_reduced_period_matrix(&mut r, dim)
                    .expect("random period matrix")
                    .im()
                    .clone()
            } else {
                mlk_core::sampling::random_spd(&mut r, dim, 1e3).expect("random SPD matrix")
            }
        })
        .collect()
}

fn flatten(parts: Vec<Result<Vec<CheckOut>, CliError>>) -> Result<Vec<CheckOut>, CliError> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

pub fn run(suite: Suite, subjects: &Subjects, opts: &Options, seed: u64) -> Result<Vec<CheckOut>, CliError> {
    match (suite, subjects) {
        (Suite::Lattice | Suite::Integrals, Subjects::Builtin) => Err(CliError::Parse(
            "this suite needs an input file or --random".into(),
        )),
        (Suite::Lattice | Suite::Integrals, _) => {
            let grams: Vec<GramMatrix> = match subjects {
                Subjects::Input { set } => set.periods().iter().map(|p| p.im().clone()).collect(),
                Subjects::Random { count, dim } => random_grams(*count, *dim, seed, suite == Suite::Integrals),
                Subjects::Builtin => unreachable!(),
            };
            flatten(parallel::map(&grams, |i, y| match suite {
                Suite::Lattice => lattice_checks(i, y, seed),
                _ => integral_checks(i, y, opts, seed),
            }))
        }
        (Suite::Chain, Subjects::Input { set }) => chain_checks(set, opts, seed, 0),
        (Suite::Chain, Subjects::Random { count, dim }) => {
            let sets: Vec<EmbeddingSet> = (0..*count)
                .map(|i| {
                    let om = mlk_core::sampling::random_reduced_period_matrix(&mut rng_for(seed, i), *dim)?;
                    Ok(EmbeddingSet::new(*dim, 1, vec![om])?)
                })
                .collect::<Result<_, CliError>>()?;
            flatten(parallel::map(&sets, |i, s| chain_checks(s, opts, seed, i)))
        }
        (Suite::Chain, Subjects::Builtin) => Err(CliError::Parse(
            "the chain suite needs an input file or --random".into(),
        )),
        (Suite::Oracle, _) => {
            let taus: Vec<Complex64> = match subjects {
                Subjects::Input { set } if set.genus() == 1 => set.periods().iter().filter_map(|p| p.tau()).collect(),
                _ => Vec::new(),
            };
            let transforms = match subjects {
                Subjects::Random { count, .. } => *count,
                _ => 100,
            };
            oracle_checks(&taus, transforms, seed)
        }
    }
}
