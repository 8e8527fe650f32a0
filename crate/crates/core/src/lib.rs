//! Exact calculus on bivariate polynomial × complex-Gaussian functions and
//! first-order affine differential operators, with verification suites for
//! two-mode pseudo-bosonic algebras.
//!
//! The building blocks are [`PolyGauss`] (a finite complex polynomial in
//! `x, y` times `exp` of a complex quadratic form) and [`AffineOp`]
//! (`c0 + cx·x + cy·y + cdx·∂x + cdy·∂y`). Every ladder operator used here is
//! affine, so the function class is closed under their action and all inner
//! products reduce to Gaussian moments evaluated in closed form.
//!
//! On top of that sit the model-specific modules:
//!
//! - [`gll`]: generalized Landau levels, biorthogonal families, metric and
//!   intertwining operators, Riesz-growth diagnostics.
//! - [`bicoherent`]: closed-form bicoherent states, truncated series states
//!   and the weak resolution-of-identity quadrature.
//! - [`dho`]: the quantized damped harmonic oscillator and its vacuum
//!   normalizability obstruction.
//! - [`cli`] / [`report`]: the command-line front end and JSON/CSV reports.

pub mod affine;
pub mod bicoherent;
pub mod cli;
pub mod dho;
mod error;
pub mod exec;
pub mod gauss;
pub mod gll;
pub mod poly;
pub mod quadrature;
pub mod report;

pub use affine::{AffineOp, CommutationEntry, CommutationTable};
pub use error::{Error, Result};
pub use exec::Exec;
pub use gauss::{PolyGauss, Primitive, QuadExponent};
pub use num_complex::Complex64;
pub use poly::Poly2;

/// Shorthand for `Complex64::new`.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The imaginary unit.
pub const I: Complex64 = Complex64::new(0.0, 1.0);
