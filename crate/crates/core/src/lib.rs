//! Coverage analysis for UAV networks whose ground projections form a Poisson
//! point process, with per-UAV elevation or altitude marks, line-of-sight
//! thinning and multi-antenna ground users.
//!
//! The analytic layer evaluates closed forms and Laplace-transform based
//! coverage expressions; the Monte Carlo layer simulates the same model and
//! serves as the oracle for every analytic quantity.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod config;
pub mod coverage;
pub mod error;
pub mod inversion;
pub mod model;
pub mod montecarlo;
pub mod quadrature;
pub mod sampler;
pub mod selftest;
pub mod sweep;
pub mod validation;

pub use error::{Error, Result};
