//! Rate sets for the five-level exciton model and derived composites.
//!
//! The manifold consists of the crystal ground state, the bright excitons
//! |X_b>, |Y_b> and the dark excitons |X_d>, |Y_d>. Bright states decay
//! radiatively or non-radiatively to the ground state, or spin-flip into the
//! dark state of the same axis; dark states decay non-radiatively or flip
//! back. Bright-bright flips are neglected, so the X and Y branches evolve
//! independently.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Orientation of an exciton dipole within the photonic-crystal lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DipoleAxis {
    X,
    Y,
}

impl std::fmt::Display for DipoleAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DipoleAxis::X => write!(f, "X"),
            DipoleAxis::Y => write!(f, "Y"),
        }
    }
}

impl std::str::FromStr for DipoleAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" | "x" => Ok(DipoleAxis::X),
            "Y" | "y" => Ok(DipoleAxis::Y),
            other => Err(format!("dipole axis must be X or Y, got `{other}`")),
        }
    }
}

/// Full set of microscopic decay and spin-flip rates, all in ns^-1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    /// Radiative decay rate of the bright X exciton.
    pub gamma_rad_bright_x: f64,
    /// Radiative decay rate of the bright Y exciton.
    pub gamma_rad_bright_y: f64,
    /// Non-radiative decay rate of the bright states.
    pub gamma_nr_bright: f64,
    /// Non-radiative decay rate of the dark states.
    pub gamma_nr_dark: f64,
    /// Bright-to-dark spin-flip rate.
    pub gamma_bd: f64,
    /// Dark-to-bright spin-flip rate.
    pub gamma_db: f64,
}

impl RateSet {
    pub fn validate(&self) -> Result<(), CoreError> {
        let fields = [
            ("gamma_rad_bright_x", self.gamma_rad_bright_x),
            ("gamma_rad_bright_y", self.gamma_rad_bright_y),
            ("gamma_nr_bright", self.gamma_nr_bright),
            ("gamma_nr_dark", self.gamma_nr_dark),
            ("gamma_bd", self.gamma_bd),
            ("gamma_db", self.gamma_db),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(CoreError::InvalidRate { name, value });
            }
        }
        Ok(())
    }

    /// Radiative rate of the bright state for one dipole axis.
    pub fn gamma_rad_bright(&self, axis: DipoleAxis) -> f64 {
        match axis {
            DipoleAxis::X => self.gamma_rad_bright_x,
            DipoleAxis::Y => self.gamma_rad_bright_y,
        }
    }

    /// Total decay rate of the bright state for one axis.
    pub fn gamma_fast(&self, axis: DipoleAxis) -> f64 {
        self.gamma_rad_bright(axis) + self.gamma_nr_bright + self.gamma_bd
    }

    /// Total decay rate of the dark states.
    pub fn gamma_slow(&self) -> f64 {
        self.gamma_nr_dark + self.gamma_db
    }
}

/// Composite fast/slow rates derived from a [`RateSet`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositeRates {
    pub gamma_f_x: f64,
    pub gamma_f_y: f64,
    pub gamma_s: f64,
}

/// Fast and slow composite rates: the bright state decays with
/// `gamma_f = gamma_rad_bright + gamma_nr_bright + gamma_bd`, the dark state
/// with `gamma_s = gamma_nr_dark + gamma_db`.
pub fn composite_rates(rates: &RateSet) -> CompositeRates {
    CompositeRates {
        gamma_f_x: rates.gamma_fast(DipoleAxis::X),
        gamma_f_y: rates.gamma_fast(DipoleAxis::Y),
        gamma_s: rates.gamma_slow(),
    }
}

/// Decomposition of an exciton's total decay into waveguide, radiation-mode,
/// and non-radiative channels (ns^-1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmissionChannelSplit {
    pub gamma_wg: f64,
    pub gamma_rad: f64,
    pub gamma_nr: f64,
}

impl EmissionChannelSplit {
    pub fn new(gamma_wg: f64, gamma_rad: f64, gamma_nr: f64) -> Result<Self, CoreError> {
        let split = Self { gamma_wg, gamma_rad, gamma_nr };
        split.validate()?;
        Ok(split)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        for (name, value) in [
            ("gamma_wg", self.gamma_wg),
            ("gamma_rad", self.gamma_rad),
            ("gamma_nr", self.gamma_nr),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(CoreError::InvalidRate { name, value });
            }
        }
        Ok(())
    }

    /// Total decay rate over all channels.
    pub fn total(&self) -> f64 {
        self.gamma_wg + self.gamma_rad + self.gamma_nr
    }

    /// Radiative part (waveguide plus radiation modes).
    pub fn radiative(&self) -> f64 {
        self.gamma_wg + self.gamma_rad
    }
}

/// One exponential component of a fitted decay curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayComponent {
    /// Amplitude in counts per bin at t = 0.
    pub amplitude: f64,
    /// Decay rate in ns^-1.
    pub rate: f64,
}

/// Constant-plus-exponential background, `B(t) = b0 + b1 exp(-gamma_b t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Background {
    pub b0: f64,
    pub b1: f64,
    pub gamma_b: f64,
}

impl Background {
    pub fn none() -> Self {
        Background { b0: 0.0, b1: 0.0, gamma_b: 0.0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.b1 == 0.0 {
            self.b0
        } else {
            self.b0 + self.b1 * (-self.gamma_b * t).exp()
        }
    }
}

/// Multi-exponential decay model with up to three components.
///
/// Components are kept in strictly decreasing rate order; ties are broken by
/// descending amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    pub components: Vec<DecayComponent>,
    pub background: Background,
}

impl DecayModel {
    /// Builds a model, sorting components into canonical order.
    pub fn new(
        mut components: Vec<DecayComponent>,
        background: Background,
    ) -> Result<Self, CoreError> {
        if components.is_empty() || components.len() > 3 {
            return Err(CoreError::InvalidDecayModel);
        }
        for c in &components {
            if !(c.amplitude.is_finite() && c.amplitude >= 0.0 && c.rate.is_finite() && c.rate > 0.0)
            {
                return Err(CoreError::InvalidDecayModel);
            }
        }
        components.sort_by(|a, b| {
            b.rate
                .partial_cmp(&a.rate)
                .unwrap()
                .then(b.amplitude.partial_cmp(&a.amplitude).unwrap())
        });
        Ok(DecayModel { components, background })
    }

    /// Model intensity at time `t` (counts per bin, before bin-width scaling).
    pub fn eval(&self, t: f64) -> f64 {
        let signal: f64 = self
            .components
            .iter()
            .map(|c| c.amplitude * (-c.rate * t).exp())
            .sum();
        signal + self.background.eval(t)
    }

    /// Fastest component rate (ns^-1).
    pub fn fastest_rate(&self) -> f64 {
        self.components[0].rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composite_rates_match_paper_scale() {
        let rates = RateSet {
            gamma_rad_bright_x: 6.15,
            gamma_rad_bright_y: 0.0,
            gamma_nr_bright: 0.03,
            gamma_nr_dark: 0.0,
            gamma_bd: 0.1,
            gamma_db: 0.0,
        };
        let c = composite_rates(&rates);
        assert!((c.gamma_f_x - 6.28).abs() < 1e-12);
    }

    #[test]
    fn composite_slow_rate_is_sum_of_dark_terms() {
        let rates = RateSet {
            gamma_rad_bright_x: 0.0,
            gamma_rad_bright_y: 0.0,
            gamma_nr_bright: 0.0,
            gamma_nr_dark: 0.02,
            gamma_bd: 0.0,
            gamma_db: 0.01,
        };
        let c = composite_rates(&rates);
        assert!((c.gamma_s - 0.03).abs() < 1e-15);
    }

    #[test]
    fn composite_rates_all_zero() {
        let rates = RateSet {
            gamma_rad_bright_x: 0.0,
            gamma_rad_bright_y: 0.0,
            gamma_nr_bright: 0.0,
            gamma_nr_dark: 0.0,
            gamma_bd: 0.0,
            gamma_db: 0.0,
        };
        let c = composite_rates(&rates);
        assert_eq!((c.gamma_f_x, c.gamma_f_y, c.gamma_s), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rate_set_rejects_negative_and_non_finite() {
        let mut rates = RateSet {
            gamma_rad_bright_x: 1.0,
            gamma_rad_bright_y: 1.0,
            gamma_nr_bright: 0.0,
            gamma_nr_dark: 0.0,
            gamma_bd: 0.0,
            gamma_db: 0.0,
        };
        assert!(rates.validate().is_ok());
        rates.gamma_bd = -0.1;
        assert!(rates.validate().is_err());
        rates.gamma_bd = f64::NAN;
        assert!(rates.validate().is_err());
    }

    #[test]
    fn decay_model_orders_components_by_rate_then_amplitude() {
        let model = DecayModel::new(
            vec![
                DecayComponent { amplitude: 1.0, rate: 0.098 },
                DecayComponent { amplitude: 5.0, rate: 6.28 },
                DecayComponent { amplitude: 2.0, rate: 2.0 },
            ],
            Background::none(),
        )
        .unwrap();
        let rates: Vec<f64> = model.components.iter().map(|c| c.rate).collect();
        assert_eq!(rates, vec![6.28, 2.0, 0.098]);
    }

    #[test]
    fn decay_model_rejects_non_positive_rates() {
        let bad = DecayModel::new(
            vec![DecayComponent { amplitude: 1.0, rate: 0.0 }],
            Background::none(),
        );
        assert!(bad.is_err());
    }
}
