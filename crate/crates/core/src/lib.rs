//! Explicit Taylor-domination and valency bounds for power series and their
//! Borel transforms, together with the numerical machinery used to check them:
//! overflow-free truncated series, log-space bound formulas and
//! argument-principle zero counting on disks.
//!
//! The crate is organised bottom-up:
//!
//! * [`scaled`] – complex numbers stored as mantissa plus binary exponent.
//! * [`series`] – truncated power series, evaluation, products, tail estimates.
//! * [`borel`] – the Borel transform, its coefficient inverse and the
//!   Laplace-type integral inverse.
//! * [`domination`] – testing and fitting `(N, R, S(k))` domination properties.
//! * [`bounds`] – the valency bound for Borel transforms of `p`-valent
//!   functions and all of its intermediate quantities.
//! * [`valency`] – winding numbers, zero counts and valency lower bounds.
//! * [`examples`] – the reference example families and their root oracles.
//! * [`verify`] – self-check suites used by the `tdom verify` command.
//!
//! Data-parallel loops go through [`parallel`], which uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

pub mod borel;
pub mod bounds;
pub mod domination;
mod error;
pub mod examples;
pub mod json;
pub mod parallel;
pub mod scaled;
pub mod series;
pub mod special;
pub mod valency;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scaled::ScaledComplex;
pub use series::PowerSeries;
