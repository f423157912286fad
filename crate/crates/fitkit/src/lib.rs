//! Numerical fitting for TCSPC and spectroscopy data.
//!
//! The central piece is a Poisson maximum-likelihood fitter for
//! multi-exponential decay curves with an optional Gaussian instrument
//! response and a constant-plus-exponential background. Peak fitting
//! (Lorentzian), saturation curves, and bootstrap uncertainties share the
//! same damped-Newton optimizer.
//!
//! This crate never interprets physics: it consumes histograms and spectra
//! and returns parameters with uncertainties.

pub mod bootstrap;
pub mod curves;
pub mod decay;
pub mod error;
pub mod optimize;
pub mod peaks;
pub mod result;
pub mod special;

pub use bootstrap::{bootstrap_uncertainty, Resample};
pub use curves::{fit_exp_offset, fit_saturation, ExpOffsetFit, SaturationFit};
pub use decay::{fit_decay, BackgroundMode, DecayFitOptions, DecayShape};
pub use error::FitError;
pub use optimize::{ParamSpace, Transform};
pub use peaks::{find_and_fit_peaks, PeakFit};
pub use result::FitResult;
