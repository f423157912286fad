//! Beta-factor, cooperativity, and Purcell bookkeeping.
//!
//! The beta-factor is the probability that a recombining exciton emits its
//! photon into the guided mode: `beta = gamma_wg / (gamma_wg + gamma_rad +
//! gamma_nr)`. Experimentally it is obtained from the decay rates of a
//! coupled and an uncoupled emitter as `beta = (gamma_c - gamma_uc) /
//! gamma_c`, and maps to the single-emitter cooperativity
//! `eta = beta / (1 - beta)`.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::mode_table::ModeDataEntry;
use crate::rates::EmissionChannelSplit;

/// A scalar with a one-sigma Gaussian uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value: f64,
    pub sigma: f64,
}

impl Measurement {
    pub fn new(value: f64, sigma: f64) -> Result<Self, CoreError> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(CoreError::InvalidSigma { value: sigma });
        }
        Ok(Measurement { value, sigma })
    }
}

/// Beta-factor and cooperativity with propagated uncertainties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaResult {
    pub beta: f64,
    pub beta_sigma: f64,
    /// Cooperativity `eta = beta / (1 - beta)`.
    pub eta: f64,
    pub eta_sigma: f64,
    pub gamma_c: f64,
    pub gamma_c_sigma: f64,
    pub gamma_uc: f64,
    pub gamma_uc_sigma: f64,
}

/// Beta-factor from an explicit channel split.
pub fn beta_from_channels(split: &EmissionChannelSplit) -> Result<f64, CoreError> {
    split.validate()?;
    let total = split.total();
    if total <= 0.0 {
        return Err(CoreError::EmptySplit);
    }
    Ok(split.gamma_wg / total)
}

/// Cooperativity from a beta-factor.
pub fn eta_from_beta(beta: f64) -> f64 {
    beta / (1.0 - beta)
}

/// Beta-factor and cooperativity from measured coupled/uncoupled decay rates,
/// with first-order Gaussian error propagation.
pub fn beta_from_measured(
    gamma_c: Measurement,
    gamma_uc: Measurement,
) -> Result<BetaResult, CoreError> {
    if !(gamma_c.value.is_finite() && gamma_c.value > 0.0) {
        return Err(CoreError::NonPositiveRate { value: gamma_c.value });
    }
    if !(gamma_uc.value.is_finite() && gamma_uc.value > 0.0) {
        return Err(CoreError::NonPositiveRate { value: gamma_uc.value });
    }
    if gamma_uc.value >= gamma_c.value {
        return Err(CoreError::RateOrdering {
            gamma_c: gamma_c.value,
            gamma_uc: gamma_uc.value,
        });
    }
    for m in [gamma_c, gamma_uc] {
        if !m.sigma.is_finite() || m.sigma < 0.0 {
            return Err(CoreError::InvalidSigma { value: m.sigma });
        }
    }

    let gc = gamma_c.value;
    let guc = gamma_uc.value;
    let beta = (gc - guc) / gc;
    // d(beta)/d(gc) = guc / gc^2, d(beta)/d(guc) = -1 / gc.
    let d_gc = guc / (gc * gc);
    let d_guc = 1.0 / gc;
    let beta_sigma = (d_gc * d_gc * gamma_c.sigma * gamma_c.sigma
        + d_guc * d_guc * gamma_uc.sigma * gamma_uc.sigma)
        .sqrt();

    let one_minus = 1.0 - beta;
    let eta = beta / one_minus;
    let eta_sigma = beta_sigma / (one_minus * one_minus);

    Ok(BetaResult {
        beta,
        beta_sigma,
        eta,
        eta_sigma,
        gamma_c: gc,
        gamma_c_sigma: gamma_c.sigma,
        gamma_uc: guc,
        gamma_uc_sigma: gamma_uc.sigma,
    })
}

/// Converts a tabulated mode-data row into an emission channel split.
///
/// The table stores emitted powers relative to a homogeneous-medium emitter,
/// so `gamma_wg = (P_wg / P_hom) * gamma_hom` and likewise for the radiation
/// channel; the non-radiative rate is intrinsic and passes through.
pub fn rates_from_mode_data(
    entry: &ModeDataEntry,
    gamma_hom: f64,
    gamma_nr: f64,
) -> Result<EmissionChannelSplit, CoreError> {
    if !(gamma_hom.is_finite() && gamma_hom > 0.0) {
        return Err(CoreError::NonPositiveRate { value: gamma_hom });
    }
    if !gamma_nr.is_finite() || gamma_nr < 0.0 {
        return Err(CoreError::InvalidRate { name: "gamma_nr", value: gamma_nr });
    }
    EmissionChannelSplit::new(
        entry.p_wg_over_p_hom * gamma_hom,
        entry.p_rad_over_p_hom * gamma_hom,
        gamma_nr,
    )
}

/// Scales a waveguide coupling rate to a different group index.
///
/// The Purcell enhancement of the guided channel is proportional to the group
/// index; the radiation and non-radiative channels are unaffected.
pub fn purcell_scale(
    n_g_target: f64,
    n_g_ref: f64,
    gamma_wg_ref: f64,
) -> Result<f64, CoreError> {
    for n_g in [n_g_target, n_g_ref] {
        if !n_g.is_finite() || n_g < 1.0 {
            return Err(CoreError::InvalidGroupIndex { value: n_g });
        }
    }
    if !gamma_wg_ref.is_finite() || gamma_wg_ref < 0.0 {
        return Err(CoreError::InvalidRate { name: "gamma_wg_ref", value: gamma_wg_ref });
    }
    Ok(gamma_wg_ref * n_g_target / n_g_ref)
}

/// Radiative rate from fitted fast and slow composite rates.
///
/// Valid because the bright and dark non-radiative rates coincide and the two
/// spin-flip rates are equal at the relevant temperatures, so the difference
/// `gamma_f - gamma_s` isolates the radiative part.
pub fn radiative_rate_from_fit(gamma_f: f64, gamma_s: f64) -> Result<f64, CoreError> {
    if !gamma_f.is_finite() || !gamma_s.is_finite() || gamma_s < 0.0 {
        return Err(CoreError::InvalidRate { name: "gamma_s", value: gamma_s });
    }
    if gamma_f <= gamma_s {
        return Err(CoreError::RateOrdering { gamma_c: gamma_f, gamma_uc: gamma_s });
    }
    Ok(gamma_f - gamma_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::DipoleAxis;

    #[test]
    fn beta_from_channels_paper_scale() {
        // Components consistent with gamma_c = 6.28, gamma_uc = 0.098.
        let split = EmissionChannelSplit::new(6.182, 0.068, 0.030).unwrap();
        let beta = beta_from_channels(&split).unwrap();
        let oracle = (6.28 - 0.098) / 6.28;
        assert!((beta - oracle).abs() < 1e-12);
        assert!((beta - 0.9843).abs() < 1e-3);
    }

    #[test]
    fn beta_from_channels_limits() {
        let lossless = EmissionChannelSplit::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(beta_from_channels(&lossless).unwrap(), 1.0);
        let uncoupled = EmissionChannelSplit::new(0.0, 1.0, 1.0).unwrap();
        assert_eq!(beta_from_channels(&uncoupled).unwrap(), 0.0);
        let empty = EmissionChannelSplit::new(0.0, 0.0, 0.0).unwrap();
        assert!(beta_from_channels(&empty).is_err());
    }

    #[test]
    fn beta_from_measured_paper_headline() {
        let result = beta_from_measured(
            Measurement::new(6.28, 0.15).unwrap(),
            Measurement::new(0.098, 0.001).unwrap(),
        )
        .unwrap();
        assert!((result.beta * 100.0 - 98.43).abs() < 0.01);
        assert!((result.beta_sigma * 100.0 - 0.04).abs() < 0.01);
        assert!(result.eta > 61.2 && result.eta < 64.2);
        assert!(result.eta_sigma > 1.2 && result.eta_sigma < 1.9);
    }

    #[test]
    fn beta_from_measured_halving() {
        let result = beta_from_measured(
            Measurement::new(2.0, 0.0).unwrap(),
            Measurement::new(1.0, 0.0).unwrap(),
        )
        .unwrap();
        assert_eq!(result.beta, 0.5);
        assert_eq!(result.beta_sigma, 0.0);
        assert_eq!(result.eta, 1.0);
    }

    #[test]
    fn beta_from_measured_rejects_inverted_rates() {
        let equal = beta_from_measured(
            Measurement::new(1.0, 0.0).unwrap(),
            Measurement::new(1.0, 0.0).unwrap(),
        );
        assert!(equal.is_err());
        let zero = beta_from_measured(
            Measurement::new(0.0, 0.0).unwrap(),
            Measurement::new(0.0, 0.0).unwrap(),
        );
        assert!(zero.is_err());
    }

    #[test]
    fn mode_data_to_rates_no_coupling() {
        let entry = ModeDataEntry {
            x_nm: 0.0,
            y_nm: 0.0,
            dipole_axis: DipoleAxis::Y,
            n_g: 5.0,
            p_wg_over_p_hom: 0.0,
            p_rad_over_p_hom: 1.0,
        };
        let split = rates_from_mode_data(&entry, 0.91, 0.03).unwrap();
        assert!((split.gamma_rad - 0.91).abs() < 1e-15);
        assert_eq!(split.gamma_wg, 0.0);
        assert_eq!(beta_from_channels(&split).unwrap(), 0.0);
    }

    #[test]
    fn mode_data_to_rates_slow_light() {
        let entry = ModeDataEntry {
            x_nm: 60.0,
            y_nm: 0.0,
            dipole_axis: DipoleAxis::Y,
            n_g: 58.0,
            p_wg_over_p_hom: 9.86,
            p_rad_over_p_hom: 0.05,
        };
        let split = rates_from_mode_data(&entry, 0.91, 0.030).unwrap();
        let total = split.total();
        let oracle = 9.86 * 0.91 + 0.05 * 0.91 + 0.030;
        assert!((total - oracle).abs() < 1e-12);
        assert!((total - 9.05).abs() < 0.01);
        let beta = beta_from_channels(&split).unwrap();
        let beta_oracle = (9.86 * 0.91) / oracle;
        assert!((beta - beta_oracle).abs() < 1e-12);
        assert!((beta - 0.991).abs() < 1e-3);
    }

    #[test]
    fn purcell_scaling() {
        assert_eq!(purcell_scale(58.0, 58.0, 5.0).unwrap(), 5.0);
        assert!((purcell_scale(58.0, 5.0, 0.5).unwrap() - 5.8).abs() < 1e-12);
        assert!(purcell_scale(58.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn beta_increases_with_group_index() {
        let gamma_rad = 0.068;
        let gamma_nr = 0.030;
        let wg_lo = purcell_scale(5.0, 5.0, 0.5).unwrap();
        let wg_hi = purcell_scale(58.0, 5.0, 0.5).unwrap();
        let beta_lo =
            beta_from_channels(&EmissionChannelSplit::new(wg_lo, gamma_rad, gamma_nr).unwrap())
                .unwrap();
        let beta_hi =
            beta_from_channels(&EmissionChannelSplit::new(wg_hi, gamma_rad, gamma_nr).unwrap())
                .unwrap();
        assert!(beta_hi > beta_lo);
    }

    #[test]
    fn radiative_rate_difference() {
        assert!((radiative_rate_from_fit(6.28, 0.098).unwrap() - 6.182).abs() < 1e-12);
        assert_eq!(radiative_rate_from_fit(1.0, 0.0).unwrap(), 1.0);
        assert!(radiative_rate_from_fit(0.5, 0.5).is_err());
    }

    #[test]
    fn eta_of_half_is_one() {
        assert!((eta_from_beta(0.5) - 1.0).abs() < 1e-15);
    }
}
