//! Exact and numeric kernels for the Ramanujan and Chazy systems and their
//! geometric origin on the moduli of elliptic curves with a symplectic-Hodge
//! basis.
//!
//! The crate is `no_std` (with `alloc`). Everything in [`arith`],
//! [`qseries`], [`symplectic`], [`gauss_manin`], [`vector_field`] and
//! [`formal`] is exact; [`flow`] integrates the fields numerically in complex
//! double precision and checks against truncated q-series.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod arith;
pub mod flow;
pub mod formal;
pub mod gauss_manin;
pub mod linalg;
pub mod qseries;
pub mod symplectic;
pub mod vector_field;

pub use arith::{MultiPoly, RatFunc, Rational};
