//! Finite-volume Eberlein convolutions of translation-bounded measures on
//! the real line, Fourier-Bohr coefficients, pure-point diffraction
//! amplitudes and almost-periodicity diagnostics.
//!
//! The building blocks:
//!
//! * [`measure`] — atoms + piecewise-constant densities, restriction,
//!   reflection, translation and finite convolution
//! * [`vanhove`] — families of averaging intervals with closed-form boundary
//!   ratios
//! * [`probe`] — tent-function probes standing in for the vague topology
//! * [`eberlein`] — finite-volume (twisted) Eberlein convolution stages and
//!   the convergence-controlled limit loop
//! * [`fourier`] — Fourier-Bohr coefficients, the character identity, the
//!   consistent phase property and diffraction line extraction
//! * [`apdiag`] — Besicovitch seminorms, K-norm distances and
//!   epsilon-almost-period scans
//! * [`generators`] — lattices, Bernoulli combs, the Fibonacci chain and the
//!   example densities
//! * [`oracle`] — naive reference implementations for validation
//!
//! Everything is generic over the floating-point scalar via [`scalar::Scalar`];
//! the `*64` / `*32` aliases below pin the common concrete choices.

pub mod apdiag;
pub mod eberlein;
pub mod error;
pub mod fourier;
pub mod generators;
pub mod measure;
pub mod oracle;
pub mod probe;
pub mod scalar;
pub mod vanhove;

pub use error::{Error, Result};
pub use scalar::{Cplx, Scalar};

pub type Measure64 = measure::Measure<f64>;
pub type Window64 = measure::Window<f64>;
pub type Atom64 = measure::Atom<f64>;
pub type DensitySegment64 = measure::DensitySegment<f64>;
pub type ProbeSeminorm64 = probe::ProbeSeminorm<f64>;
pub type Character64 = fourier::Character<f64>;
pub type TrigPolynomial64 = fourier::TrigPolynomial<f64>;

pub type Measure32 = measure::Measure<f32>;
pub type Window32 = measure::Window<f32>;
