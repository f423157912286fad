//! Experiment configuration: laser, rate model, channel splits, blinking,
//! and the detection chain. Serializes to/from JSON.

use serde::{Deserialize, Serialize};

use qd_core::{DipoleAxis, EmissionChannelSplit, RateSet};

use crate::error::SimError;

/// Probabilities of the four exciton levels populated by one excitation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preparation {
    pub p_bright_x: f64,
    pub p_dark_x: f64,
    pub p_bright_y: f64,
    pub p_dark_y: f64,
}

impl Default for Preparation {
    /// X/Y and bright/dark equally likely.
    fn default() -> Self {
        Preparation { p_bright_x: 0.25, p_dark_x: 0.25, p_bright_y: 0.25, p_dark_y: 0.25 }
    }
}

/// Telegraph blinking rates in inverse microseconds. `k_off` switches the
/// emitter from ON to OFF, `k_on` back. Both zero disables blinking.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct BlinkConfig {
    pub k_off_per_us: f64,
    pub k_on_per_us: f64,
}

impl BlinkConfig {
    pub fn is_off(&self) -> bool {
        self.k_off_per_us == 0.0 && self.k_on_per_us == 0.0
    }

    /// Stationary ON probability.
    pub fn duty_cycle(&self) -> f64 {
        if self.is_off() {
            1.0
        } else {
            self.k_on_per_us / (self.k_on_per_us + self.k_off_per_us)
        }
    }

    /// Blinking correlation time in ns.
    pub fn correlation_time_ns(&self) -> f64 {
        if self.is_off() {
            f64::INFINITY
        } else {
            1000.0 / (self.k_on_per_us + self.k_off_per_us)
        }
    }
}

/// Detector model: binomial thinning, Gaussian IRF jitter, and the TCSPC bin
/// width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    pub efficiency: f64,
    pub irf_fwhm_ps: f64,
    pub time_bin_ps: f64,
}

/// Waveguide/radiation/non-radiative split per bright state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitPair {
    pub x: EmissionChannelSplit,
    pub y: EmissionChannelSplit,
}

impl SplitPair {
    pub fn get(&self, axis: DipoleAxis) -> &EmissionChannelSplit {
        match axis {
            DipoleAxis::X => &self.x,
            DipoleAxis::Y => &self.y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Laser repetition rate in MHz.
    pub rep_rate_mhz: f64,
    pub n_pulses: u64,
    /// Excitation power over saturation power; the excitation probability is
    /// `1 - exp(-ratio)`.
    pub excitation_power_ratio: f64,
    pub rates: RateSet,
    pub split: SplitPair,
    #[serde(default)]
    pub preparation: Preparation,
    #[serde(default)]
    pub blink: BlinkConfig,
    pub detection: DetectionConfig,
    /// Uncorrelated background, in detected counts per second.
    #[serde(default)]
    pub background_rate_cps: f64,
    pub rng_seed: u64,
}

impl ExperimentConfig {
    /// Repetition period in ns.
    pub fn rep_period_ns(&self) -> f64 {
        1000.0 / self.rep_rate_mhz
    }

    /// Excitation probability per ON pulse.
    pub fn excitation_probability(&self) -> f64 {
        1.0 - (-self.excitation_power_ratio).exp()
    }

    /// Total simulated duration in ns.
    pub fn duration_ns(&self) -> f64 {
        self.n_pulses as f64 * self.rep_period_ns()
    }

    /// Validates the configuration, returning non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>, SimError> {
        if !(self.rep_rate_mhz.is_finite() && self.rep_rate_mhz > 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "repetition rate must be positive, got {} MHz",
                self.rep_rate_mhz
            )));
        }
        if self.n_pulses == 0 {
            return Err(SimError::InvalidConfig("n_pulses must be nonzero".into()));
        }
        if !(self.excitation_power_ratio.is_finite() && self.excitation_power_ratio >= 0.0) {
            return Err(SimError::InvalidConfig(format!(
                "excitation power ratio must be non-negative, got {}",
                self.excitation_power_ratio
            )));
        }
        self.rates.validate()?;
        self.split.x.validate()?;
        self.split.y.validate()?;

        // The split must describe the same physics as the rate set: the
        // radiative channels sum to the bright radiative rate and the
        // non-radiative channel matches.
        for (axis, split) in [(DipoleAxis::X, &self.split.x), (DipoleAxis::Y, &self.split.y)] {
            let radiative = self.rates.gamma_rad_bright(axis);
            let tol = 1e-6 * radiative.max(1.0);
            if (split.radiative() - radiative).abs() > tol {
                return Err(SimError::InvalidConfig(format!(
                    "split for {axis} sums to {} ns^-1 but gamma_rad_bright is {} ns^-1",
                    split.radiative(),
                    radiative
                )));
            }
            let tol = 1e-6 * self.rates.gamma_nr_bright.max(1.0);
            if (split.gamma_nr - self.rates.gamma_nr_bright).abs() > tol {
                return Err(SimError::InvalidConfig(format!(
                    "split gamma_nr {} differs from gamma_nr_bright {}",
                    split.gamma_nr, self.rates.gamma_nr_bright
                )));
            }
        }

        let p = &self.preparation;
        for (name, v) in [
            ("p_bright_x", p.p_bright_x),
            ("p_dark_x", p.p_dark_x),
            ("p_bright_y", p.p_bright_y),
            ("p_dark_y", p.p_dark_y),
        ] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(SimError::InvalidConfig(format!(
                    "preparation probability {name} must be in [0,1], got {v}"
                )));
            }
        }
        let sum = p.p_bright_x + p.p_dark_x + p.p_bright_y + p.p_dark_y;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SimError::InvalidConfig(format!(
                "preparation probabilities sum to {sum}, expected 1"
            )));
        }

        if self.blink.k_off_per_us < 0.0 || self.blink.k_on_per_us < 0.0 {
            return Err(SimError::InvalidConfig("blink rates must be non-negative".into()));
        }
        let d = &self.detection;
        if !(0.0..=1.0).contains(&d.efficiency) {
            return Err(SimError::InvalidConfig(format!(
                "detection efficiency must be in [0,1], got {}",
                d.efficiency
            )));
        }
        if d.irf_fwhm_ps < 0.0 || d.time_bin_ps <= 0.0 {
            return Err(SimError::InvalidConfig(
                "IRF FWHM must be >= 0 and time bin > 0".into(),
            ));
        }
        if self.background_rate_cps < 0.0 {
            return Err(SimError::InvalidConfig("background rate must be non-negative".into()));
        }

        let mut warnings = Vec::new();
        let gamma_f_min = self
            .rates
            .gamma_fast(DipoleAxis::X)
            .min(self.rates.gamma_fast(DipoleAxis::Y));
        if gamma_f_min > 0.0 && self.rep_period_ns() < 3.0 / gamma_f_min {
            warnings.push(format!(
                "repetition period {:.2} ns is below 3/gamma_f = {:.2} ns; decay histograms will fold strongly",
                self.rep_period_ns(),
                3.0 / gamma_f_min
            ));
        }
        if !self.blink.is_off() && self.blink.correlation_time_ns() < 4.0 * self.rep_period_ns() {
            warnings.push(
                "blink correlation time is within a few pulses; per-pulse telegraph sampling \
                 is coarse"
                    .into(),
            );
        }
        Ok(warnings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn simple_config() -> ExperimentConfig {
        ExperimentConfig {
            rep_rate_mhz: 76.0,
            n_pulses: 1000,
            excitation_power_ratio: 1.0,
            rates: RateSet {
                gamma_rad_bright_x: 6.25,
                gamma_rad_bright_y: 6.25,
                gamma_nr_bright: 0.03,
                gamma_nr_dark: 0.03,
                gamma_bd: 0.0,
                gamma_db: 0.0,
            },
            split: SplitPair {
                x: EmissionChannelSplit { gamma_wg: 6.182, gamma_rad: 0.068, gamma_nr: 0.03 },
                y: EmissionChannelSplit { gamma_wg: 6.182, gamma_rad: 0.068, gamma_nr: 0.03 },
            },
            preparation: Preparation::default(),
            blink: BlinkConfig::default(),
            detection: DetectionConfig { efficiency: 1.0, irf_fwhm_ps: 0.0, time_bin_ps: 50.0 },
            background_rate_cps: 0.0,
            rng_seed: 1,
        }
    }

    #[test]
    fn valid_config_passes() {
        assert!(simple_config().validate().unwrap().is_empty());
    }

    #[test]
    fn split_mismatch_is_rejected() {
        let mut cfg = simple_config();
        cfg.split.x.gamma_wg = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn preparation_must_sum_to_one() {
        let mut cfg = simple_config();
        cfg.preparation.p_bright_x = 0.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn short_rep_period_warns() {
        let mut cfg = simple_config();
        cfg.rep_rate_mhz = 4000.0; // 0.25 ns period vs 3/6.28 = 0.48 ns
        let warnings = cfg.validate().unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn blink_duty_cycle_and_correlation_time() {
        let blink = BlinkConfig { k_off_per_us: 3.0, k_on_per_us: 2.0 };
        assert!((blink.duty_cycle() - 0.4).abs() < 1e-15);
        assert!((blink.correlation_time_ns() - 200.0).abs() < 1e-12);
        assert_eq!(BlinkConfig::default().duty_cycle(), 1.0);
    }
}
