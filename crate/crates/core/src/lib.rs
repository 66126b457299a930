//! Exact verification kernel for Lie algebroids, their crossed modules,
//! matched pairs, bialgebroids and Courant doubles.
//!
//! Smooth functions on the base are modeled by polynomials with rational
//! coefficients, bundles by free modules with a fixed frame. Every identity is
//! therefore decided exactly; checkers return a [`report::CheckReport`]
//! listing each law, the violating basis tuple and the nonzero residual.

// Tables are indexed by basis position throughout.
#![allow(clippy::needless_range_loop)]

pub mod algebroid;
pub mod bicrossed;
pub mod cli;
pub mod crossmod;
pub mod doubles;
pub mod error;
pub mod exterior;
pub mod fixtures;
pub mod report;
pub mod ring;
pub mod sdl;

pub use error::{Error, Result};
