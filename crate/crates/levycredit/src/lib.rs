//! Structural credit risk under pure-jump Levy dynamics.
//!
//! Equity is a European call on firm assets struck at the debt face value.
//! Four dynamics are supported for the asset log returns: a Merton
//! (Black–Scholes) diffusion baseline, two spectrally negative pure jump
//! processes (NegGamma, NegIG) with closed-form prices and default
//! probabilities, and a symmetric Variance Gamma process priced by series
//! expansion. Model parameters are calibrated from observed equity series by
//! a moment-matching fixed point, and risk-neutral or actual default metrics
//! are reported per horizon. A quadrature pricer and a seeded Monte Carlo
//! engine serve as internal oracles.

// reference constants keep their full published digits, and `!(x > 0.0)`
// style comparisons reject NaN on purpose
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod cli;
pub mod error;
pub mod io;
pub mod mc;
pub mod metrics;
pub mod models;
pub mod pricing;
pub mod special;

mod quad;

pub use error::{Error, Result};
pub use models::{ModelKind, ModelMoments, ModelParams};
pub use pricing::{DebtSpec, SeriesControl};
