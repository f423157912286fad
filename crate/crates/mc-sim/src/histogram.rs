//! TCSPC decay-histogram builder: fold, jitter, thin, add background, bin.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use qd_core::DecayHistogram;

use crate::config::ExperimentConfig;
use crate::error::SimError;
use crate::pulse::PhotonRecord;
use crate::rng::{substream, DECAY_DETECTION_STREAM};

const FWHM_TO_SIGMA: f64 = 2.354_820_045_030_949;

/// Builds the decay histogram over one repetition period.
///
/// Arrival times are taken modulo the repetition period (wrapped tails fold
/// back), jittered by the Gaussian IRF, thinned by the detection efficiency,
/// and mixed with uniform background counts at the configured rate. Counts
/// falling into the sliver between the last full bin and the period edge are
/// dropped.
pub fn build_decay_histogram(
    photons: &[PhotonRecord],
    cfg: &ExperimentConfig,
) -> Result<DecayHistogram, SimError> {
    let period = cfg.rep_period_ns();
    let bin = cfg.detection.time_bin_ps / 1000.0;
    if bin <= 0.0 {
        return Err(SimError::InvalidConfig(format!("bin width must be positive, got {bin} ns")));
    }
    let n_bins = (period / bin + 1e-9).floor() as usize;
    if n_bins == 0 {
        return Err(SimError::InvalidConfig(
            "bin width exceeds the repetition period".into(),
        ));
    }
    let span = n_bins as f64 * bin;

    let mut rng = substream(cfg.rng_seed, DECAY_DETECTION_STREAM);
    let sigma = cfg.detection.irf_fwhm_ps / 1000.0 / FWHM_TO_SIGMA;
    let irf = (sigma > 0.0).then(|| Normal::new(0.0, sigma).unwrap());

    let mut counts = vec![0u64; n_bins];
    for photon in photons {
        if cfg.detection.efficiency < 1.0 && rng.random::<f64>() >= cfg.detection.efficiency {
            continue;
        }
        let mut t = photon.time_ns;
        if let Some(irf) = &irf {
            t += irf.sample(&mut rng);
        }
        let folded = t.rem_euclid(period);
        if folded < span {
            let idx = ((folded / bin) as usize).min(n_bins - 1);
            counts[idx] += 1;
        }
    }

    // Uncorrelated background, uniform over the period.
    let expected_bg = cfg.background_rate_cps * cfg.duration_ns() * 1e-9;
    if expected_bg > 0.0 {
        let n_bg = Poisson::new(expected_bg)
            .map(|p| p.sample(&mut rng) as u64)
            .unwrap_or(0);
        for _ in 0..n_bg {
            let t: f64 = rng.random::<f64>() * period;
            if t < span {
                counts[((t / bin) as usize).min(n_bins - 1)] += 1;
            }
        }
    }

    let edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 * bin).collect();
    Ok(DecayHistogram::new(edges, counts, period, cfg.n_pulses)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{DetectionConfig, Preparation, SplitPair};
    use crate::pulse::simulate_pulse_train;
    use qd_core::{EmissionChannelSplit, RateSet};

    fn config(n_pulses: u64, efficiency: f64) -> ExperimentConfig {
        ExperimentConfig {
            rep_rate_mhz: 76.0,
            n_pulses,
            excitation_power_ratio: 2.0,
            rates: RateSet {
                gamma_rad_bright_x: 2.0,
                gamma_rad_bright_y: 2.0,
                gamma_nr_bright: 0.0,
                gamma_nr_dark: 0.0,
                gamma_bd: 0.0,
                gamma_db: 0.0,
            },
            split: SplitPair {
                x: EmissionChannelSplit { gamma_wg: 2.0, gamma_rad: 0.0, gamma_nr: 0.0 },
                y: EmissionChannelSplit { gamma_wg: 2.0, gamma_rad: 0.0, gamma_nr: 0.0 },
            },
            preparation: Preparation {
                p_bright_x: 0.5,
                p_dark_x: 0.0,
                p_bright_y: 0.5,
                p_dark_y: 0.0,
            },
            blink: Default::default(),
            detection: DetectionConfig { efficiency, irf_fwhm_ps: 0.0, time_bin_ps: 50.0 },
            background_rate_cps: 0.0,
            rng_seed: 3,
        }
    }

    #[test]
    fn no_photons_gives_all_zero_histogram() {
        let cfg = config(100, 1.0);
        let hist = build_decay_histogram(&[], &cfg).unwrap();
        assert!(hist.counts.iter().all(|&c| c == 0));
        assert_eq!(hist.total_pulses, 100);
    }

    #[test]
    fn efficiency_halves_counts_within_binomial_error() {
        let cfg_full = config(400_000, 1.0);
        let photons = simulate_pulse_train(&cfg_full).unwrap();
        let n = photons.len() as f64;
        let cfg_half = config(400_000, 0.5);
        let hist = build_decay_histogram(&photons, &cfg_half).unwrap();
        let detected = hist.total_counts() as f64;
        // Folding drop-off is negligible here (span covers the period).
        let sigma = (n * 0.5 * 0.5).sqrt();
        assert!(
            (detected - 0.5 * n).abs() < 3.0 * sigma,
            "detected {detected} of {n}"
        );
    }

    #[test]
    fn peak_bin_is_first_for_single_exponential() {
        let cfg = config(200_000, 1.0);
        let photons = simulate_pulse_train(&cfg).unwrap();
        let hist = build_decay_histogram(&photons, &cfg).unwrap();
        let max_idx = hist
            .counts
            .iter()
            .enumerate()
            .max_by_key(|(_, &c)| c)
            .unwrap()
            .0;
        assert_eq!(max_idx, 0);
    }

    #[test]
    fn background_rate_adds_uniform_counts() {
        let mut cfg = config(100_000, 1.0);
        cfg.background_rate_cps = 1.0e6;
        let hist = build_decay_histogram(&[], &cfg).unwrap();
        let expected = 1.0e6 * cfg.duration_ns() * 1e-9;
        let total = hist.total_counts() as f64;
        assert!((total - expected).abs() < 4.0 * expected.sqrt());
        // Uniformity: first and last quarter agree within noise.
        let q = hist.counts.len() / 4;
        let head: u64 = hist.counts[..q].iter().sum();
        let tail: u64 = hist.counts[hist.counts.len() - q..].iter().sum();
        let sigma = ((head + tail) as f64).sqrt();
        assert!((head as f64 - tail as f64).abs() < 5.0 * sigma);
    }
}
