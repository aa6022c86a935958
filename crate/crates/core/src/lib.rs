//! Numerical laboratory for extended CMV matrices with dynamically defined
//! Verblunsky coefficients.
//!
//! A CMV matrix is the pentadiagonal unitary representation of
//! multiplication by `z` on `L^2` of the unit circle; its entries are built
//! from a sequence of Verblunsky coefficients `alpha_n` in the open unit
//! disk. Sampling the coefficients along orbits of an ergodic base system
//! (`alpha_n = f(T^n omega)`) produces operator families whose spectral
//! theory this crate makes computable at finite scale:
//!
//! - [`verblunsky`]: coefficient sequences and banded matrix assembly for
//!   standard and extended CMV matrices, with modulus-one boundary
//!   decoupling for unitary truncations.
//! - [`dynamics`]: substitution subshifts, irrational rotations, Bernoulli
//!   shifts, sampling functions, and Boshernitzan-condition diagnostics.
//! - [`cocycle`]: Szego transfer matrices, overflow-safe cocycle products,
//!   and Lyapunov exponents in both normalization conventions.
//! - [`schur`]: Schur and Caratheodory functions, orthogonal polynomial
//!   recurrences, and the `m^+` function.
//! - [`spectral`]: eigenphases of unitary truncations, density of states,
//!   the Thouless formula, spectrum arc approximations, Kotani zero-set
//!   measure, and a singular-part estimator.
//! - [`perturb`]: operator-norm perturbation bounds for coefficient
//!   perturbations and Hausdorff distances between spectra.
//! - [`conformal`]: the Schwarz-Christoffel equilateral triangle map, the
//!   Moebius map to a circular-arc region avoiding the origin, and
//!   mean-value checks for harmonic functions.
//!
//! The crate is `no_std`-compatible (with `alloc`); all IO, parallel
//! drivers and file formats live in the companion `cmv-lab` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod band;
pub mod cocycle;
pub mod conformal;
pub mod dynamics;
mod error;
pub mod mat2;
pub mod perturb;
pub mod schur;
pub mod spectral;
pub mod verblunsky;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
