//! Multiscaling proxies of stock log-returns, average cross-correlation
//! with the rest of the market, and the association between the two.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! - [`panel`]: load `ticker,date,close` records, fill gaps, form demeaned
//!   log-returns, take median capitalizations;
//! - [`scaling`]: structure functions, scaling exponents ζ(q) and the
//!   proxies Â, B̂ of the fit `ζ(q) = A·q + B·q²`;
//! - [`crosscorr`]: Pearson matrix, p-values and average correlation ρ̄;
//! - [`association`]: Kendall τ, Pearson against log-capitalization,
//!   partial correlation and R²;
//! - [`surrogates`]: synchronous shuffles and marginal Gaussianization;
//! - [`synth`]: synthetic markets with known answers;
//! - [`pipeline`]: configuration, full runs and report comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod association;
pub mod crosscorr;
pub mod error;
pub mod format;
pub mod panel;
pub mod pipeline;
pub mod scaling;
pub mod seed;
pub mod stats;
pub mod surrogates;
pub mod synth;

pub use error::{Error, Result};
