//! Exact symbolic computation in the coordinate *-algebras of quantum
//! odd-dimensional spheres and of quantum SU(2).
//!
//! The crate provides, over the field ℚ(q) (optionally extended by a Gaussian
//! imaginary unit for unit scalars):
//!
//! - [`coeffq`] — arbitrary-precision rationals, polynomials in `q`, and the
//!   canonical rational-function scalars used everywhere else;
//! - [`ncpoly`] — noncommutative *-polynomials in generators `z0..zn` and
//!   their adjoints;
//! - [`parser`] — a text grammar for those polynomials with deterministic,
//!   round-tripping formatting;
//! - [`rewrite`] — the terminating rewrite system that brings every element
//!   of the sphere algebra to a canonical normal form, together with a
//!   machine-checked termination measure and a local-confluence audit;
//! - [`suq2`] — the weighted-monomial basis `e(j,k,l)` of quantum SU(2),
//!   native basis arithmetic, and the filtration by total β-degree;
//! - [`quotients`] — commutator-ideal membership certificates, the projection
//!   onto the circle algebra, Laurent unitarity decisions, homomorphism
//!   checking, and circle characters;
//! - [`descent`] — the filtration-descent argument: decomposition of a
//!   candidate unitary-generator image, per-degree vanishing conditions, and
//!   the full obstruction pipeline for maps between algebras with different
//!   deformation parameters.
//!
//! The crate is `no_std` (with `alloc`); everything is exact — no floating
//! point enters any computation.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coeffq;
pub mod descent;
mod error;
pub mod ncpoly;
pub mod parser;
pub mod quotients;
pub mod rewrite;
pub mod suq2;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
