//! Closed-form solution of the bright/dark rate equations for one exciton
//! branch.
//!
//! With `rho_b' = -gamma_f rho_b + gamma_db rho_d` and
//! `rho_d' = gamma_bd rho_b - gamma_s rho_d`, the populations are sums of two
//! exponentials whose rates are the exact eigenvalues of the 2x2 system. The
//! defective case (equal eigenvalues with a one-sided spin flip) picks up a
//! secular `t exp(-gamma t)` term and is handled explicitly.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::rates::{DipoleAxis, RateSet};

/// One exponential term, `amplitude * exp(-rate * t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub amplitude: f64,
    pub rate: f64,
}

impl ExpTerm {
    fn eval(&self, t: f64) -> f64 {
        self.amplitude * (-self.rate * t).exp()
    }

    /// Integral of the term from 0 to `t`.
    fn integral(&self, t: f64) -> f64 {
        if self.rate == 0.0 {
            self.amplitude * t
        } else {
            self.amplitude * (1.0 - (-self.rate * t).exp()) / self.rate
        }
    }

    /// Integral of the term from 0 to infinity.
    fn integral_inf(&self) -> f64 {
        if self.amplitude == 0.0 {
            0.0
        } else {
            self.amplitude / self.rate
        }
    }
}

/// Exact populations of one exciton branch after pulsed preparation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDynamics {
    pub axis: DipoleAxis,
    /// Faster eigenrate of the 2x2 system (ns^-1).
    pub eigenrate_fast: f64,
    /// Slower eigenrate (ns^-1).
    pub eigenrate_slow: f64,
    /// Bright population terms on (fast, slow) eigenrates.
    pub bright: [ExpTerm; 2],
    /// Dark population terms on (fast, slow) eigenrates.
    pub dark: [ExpTerm; 2],
    /// Coefficient of `t exp(-eigenrate_fast t)` in the bright population;
    /// nonzero only for a defective (degenerate) system.
    pub bright_secular: f64,
    /// Secular coefficient for the dark population.
    pub dark_secular: f64,
    gamma_rad_bright: f64,
    gamma_nr_bright: f64,
    gamma_nr_dark: f64,
}

impl BranchDynamics {
    /// Bright-state population at time `t`.
    pub fn bright_population(&self, t: f64) -> f64 {
        let mut p = self.bright[0].eval(t) + self.bright[1].eval(t);
        if self.bright_secular != 0.0 {
            p += self.bright_secular * t * (-self.eigenrate_fast * t).exp();
        }
        p
    }

    /// Dark-state population at time `t`.
    pub fn dark_population(&self, t: f64) -> f64 {
        let mut p = self.dark[0].eval(t) + self.dark[1].eval(t);
        if self.dark_secular != 0.0 {
            p += self.dark_secular * t * (-self.eigenrate_fast * t).exp();
        }
        p
    }

    /// Photon emission rate density at time `t` (radiative flux out of the
    /// bright state, both waveguide and radiation channels).
    pub fn emission_density(&self, t: f64) -> f64 {
        self.gamma_rad_bright * self.bright_population(t)
    }

    /// Probability that the branch has emitted a photon by time `t`.
    pub fn emission_cdf(&self, t: f64) -> f64 {
        let mut acc = self.bright[0].integral(t) + self.bright[1].integral(t);
        if self.bright_secular != 0.0 {
            acc += secular_integral(self.bright_secular, self.eigenrate_fast, t);
        }
        self.gamma_rad_bright * acc
    }

    /// Total probability of ever emitting a photon.
    pub fn emission_probability(&self) -> f64 {
        let mut acc = self.bright[0].integral_inf() + self.bright[1].integral_inf();
        if self.bright_secular != 0.0 {
            acc += self.bright_secular / (self.eigenrate_fast * self.eigenrate_fast);
        }
        self.gamma_rad_bright * acc
    }

    /// Population that has decayed to the ground state by time `t` through
    /// any channel (radiative or non-radiative).
    pub fn decayed_population(&self, t: f64) -> f64 {
        let bright_loss = self.gamma_rad_bright + self.gamma_nr_bright;
        let mut acc_b = self.bright[0].integral(t) + self.bright[1].integral(t);
        let mut acc_d = self.dark[0].integral(t) + self.dark[1].integral(t);
        if self.bright_secular != 0.0 {
            acc_b += secular_integral(self.bright_secular, self.eigenrate_fast, t);
        }
        if self.dark_secular != 0.0 {
            acc_d += secular_integral(self.dark_secular, self.eigenrate_fast, t);
        }
        bright_loss * acc_b + self.gamma_nr_dark * acc_d
    }
}

/// Integral of `c * u * exp(-g u)` from 0 to `t`.
fn secular_integral(c: f64, g: f64, t: f64) -> f64 {
    if g == 0.0 {
        c * t * t / 2.0
    } else {
        c * (1.0 - (1.0 + g * t) * (-g * t).exp()) / (g * g)
    }
}

/// Solves the bright/dark rate equations for one branch.
///
/// `initial_bright` and `initial_dark` are the populations right after the
/// excitation pulse; they must be non-negative and sum to at most 1.
pub fn solve_level_dynamics(
    rates: &RateSet,
    initial_bright: f64,
    initial_dark: f64,
    axis: DipoleAxis,
) -> Result<BranchDynamics, CoreError> {
    rates.validate()?;
    if initial_bright < 0.0 || initial_dark < 0.0 {
        return Err(CoreError::NegativePopulation {
            bright: initial_bright,
            dark: initial_dark,
        });
    }
    let sum = initial_bright + initial_dark;
    if sum > 1.0 + 1e-12 {
        return Err(CoreError::PopulationOverflow { sum });
    }

    let gamma_f = rates.gamma_fast(axis);
    let gamma_s = rates.gamma_slow();
    let gamma_bd = rates.gamma_bd;
    let gamma_db = rates.gamma_db;

    let mean = 0.5 * (gamma_f + gamma_s);
    let disc = 0.25 * (gamma_f - gamma_s) * (gamma_f - gamma_s) + gamma_bd * gamma_db;
    let root = disc.sqrt();
    let fast = mean + root;
    let slow = mean - root;

    let (b0, d0) = (initial_bright, initial_dark);

    if root == 0.0 {
        // Defective or diagonal-degenerate system: gamma_f == gamma_s and at
        // least one spin-flip rate zero.
        return Ok(BranchDynamics {
            axis,
            eigenrate_fast: fast,
            eigenrate_slow: slow,
            bright: [ExpTerm { amplitude: b0, rate: fast }, ExpTerm { amplitude: 0.0, rate: slow }],
            dark: [ExpTerm { amplitude: d0, rate: fast }, ExpTerm { amplitude: 0.0, rate: slow }],
            bright_secular: gamma_db * d0,
            dark_secular: gamma_bd * b0,
            gamma_rad_bright: rates.gamma_rad_bright(axis),
            gamma_nr_bright: rates.gamma_nr_bright,
            gamma_nr_dark: rates.gamma_nr_dark,
        });
    }

    // rho_b(0) and rho_b'(0) = -gamma_f b0 + gamma_db d0 pin the amplitudes.
    let denom = fast - slow;
    let a_fast = ((gamma_f - slow) * b0 - gamma_db * d0) / denom;
    let a_slow = b0 - a_fast;
    let d_fast = ((gamma_s - slow) * d0 - gamma_bd * b0) / denom;
    let d_slow = d0 - d_fast;

    Ok(BranchDynamics {
        axis,
        eigenrate_fast: fast,
        eigenrate_slow: slow,
        bright: [
            ExpTerm { amplitude: a_fast, rate: fast },
            ExpTerm { amplitude: a_slow, rate: slow },
        ],
        dark: [
            ExpTerm { amplitude: d_fast, rate: fast },
            ExpTerm { amplitude: d_slow, rate: slow },
        ],
        bright_secular: 0.0,
        dark_secular: 0.0,
        gamma_rad_bright: rates.gamma_rad_bright(axis),
        gamma_nr_bright: rates.gamma_nr_bright,
        gamma_nr_dark: rates.gamma_nr_dark,
    })
}
