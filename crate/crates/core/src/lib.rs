//! Geometry-of-numbers and theta-function kernels behind an effective lower
//! bound for the stable Faltings height of a principally polarized abelian
//! variety in terms of its archimedean injectivity diameters.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs; IO, file formats and the command-line front end
//! live in the `mlk` crate.
//!
//! Module map:
//!
//! * [`lattice`]: quadratic forms, exact shortest/closest vector enumeration,
//!   the Bézout deep point and covering-radius enclosures.
//! * [`theta`]: Gaussian lattice sums, the Siegel theta function and the cube
//!   metric, each with a certified truncation bound.
//! * [`quadrature`]: tensor Gauss–Legendre and shifted quasi-Monte Carlo rules
//!   on the unit cube.
//! * [`siegel`]: period matrices, partial reduction, the Riemann form and the
//!   injectivity diameter.
//! * [`bounds`]: the height bounds themselves and the numeric proof chain.
//! * [`oracle`]: the genus one Faltings height through the modular
//!   discriminant.
//! * [`sampling`]: random reduced inputs for tests and the CLI.

#![no_std]
// `num_traits::Float` supplies libm math where `core` has no float methods.
#![allow(unused_imports)]
// `!(a > b)` comparisons are meant to be true for NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
mod error;
pub mod lattice;
mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod sampling;
pub mod siegel;
pub mod theta;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use bounds::{BoundReport, ChainEntry, ChainOptions, ChainReport, EmbeddingSet};
pub use lattice::{GramMatrix, IntervalEstimate};
pub use quadrature::{QuadratureResult, Scheme};
pub use siegel::{PeriodMatrix, ReducedFlags};
pub use theta::ThetaValue;
