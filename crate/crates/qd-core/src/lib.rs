//! Domain types and rate arithmetic for a single quantum emitter coupled to a
//! photonic-crystal waveguide.
//!
//! The crate models the lowest exciton manifold as a five-level system (ground
//! state, two bright states, two dark states), solves the bright/dark rate
//! equations in closed form, and provides the bookkeeping that turns measured
//! or tabulated rates into beta-factors, cooperativities, and channel splits.
//!
//! All rates are in ns^-1 and all times in ns. Every type is an immutable
//! value and every operation is a pure function.

pub mod beta;
pub mod dynamics;
pub mod error;
pub mod hist;
pub mod mode_table;
pub mod rates;

pub use beta::{
    beta_from_channels, beta_from_measured, eta_from_beta, purcell_scale, radiative_rate_from_fit,
    rates_from_mode_data, BetaResult, Measurement,
};
pub use dynamics::{solve_level_dynamics, BranchDynamics, ExpTerm};
pub use error::CoreError;
pub use hist::{CoincidenceHistogram, DecayHistogram, Spectrum};
pub use mode_table::{ModeDataEntry, ModeDataTable};
pub use rates::{
    composite_rates, Background, CompositeRates, DecayComponent, DecayModel, DipoleAxis,
    EmissionChannelSplit, RateSet,
};
