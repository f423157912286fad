//! HBT coincidence-histogram builder.
//!
//! Detected photons (thinned, jittered, merged with uniform background) are
//! split 50/50 between two virtual detectors; all inter-detector time
//! differences within the window are binned.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use qd_core::CoincidenceHistogram;

use crate::config::ExperimentConfig;
use crate::error::SimError;
use crate::pulse::PhotonRecord;
use crate::rng::{substream, HBT_DETECTION_STREAM};

const FWHM_TO_SIGMA: f64 = 2.354_820_045_030_949;

/// Builds the coincidence histogram over `[-window_ns, +window_ns]` with
/// `bin_ns` wide bins. The window must cover at least one repetition period.
pub fn build_coincidence_histogram(
    photons: &[PhotonRecord],
    cfg: &ExperimentConfig,
    window_ns: f64,
    bin_ns: f64,
) -> Result<CoincidenceHistogram, SimError> {
    let period = cfg.rep_period_ns();
    if window_ns < period {
        return Err(SimError::WindowTooShort { window_ns, rep_period_ns: period });
    }
    if !(bin_ns > 0.0 && bin_ns.is_finite()) {
        return Err(SimError::InvalidConfig(format!("bin width must be positive, got {bin_ns} ns")));
    }

    let mut rng = substream(cfg.rng_seed, HBT_DETECTION_STREAM);
    let sigma = cfg.detection.irf_fwhm_ps / 1000.0 / FWHM_TO_SIGMA;
    let irf = (sigma > 0.0).then(|| Normal::new(0.0, sigma).unwrap());

    // Detected events: (time, detector-is-a).
    let mut events: Vec<(f64, bool)> = Vec::new();
    for photon in photons {
        if cfg.detection.efficiency < 1.0 && rng.random::<f64>() >= cfg.detection.efficiency {
            continue;
        }
        let mut t = photon.time_ns;
        if let Some(irf) = &irf {
            t += irf.sample(&mut rng);
        }
        events.push((t, rng.random::<bool>()));
    }

    let duration = cfg.duration_ns();
    let expected_bg = cfg.background_rate_cps * duration * 1e-9;
    if expected_bg > 0.0 {
        let n_bg = Poisson::new(expected_bg)
            .map(|p| p.sample(&mut rng) as u64)
            .unwrap_or(0);
        for _ in 0..n_bg {
            let t: f64 = rng.random::<f64>() * duration;
            events.push((t, rng.random::<bool>()));
        }
    }

    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n_side = (window_ns / bin_ns).ceil() as usize;
    let half_span = n_side as f64 * bin_ns;
    let n_bins = 2 * n_side;
    let mut counts = vec![0u64; n_bins];

    // Two-pointer sweep over start-stop pairs within the window.
    for i in 0..events.len() {
        let (t_i, det_i) = events[i];
        for &(t_j, det_j) in events.iter().skip(i + 1) {
            let delta = t_j - t_i;
            if delta > half_span {
                break;
            }
            if det_i == det_j {
                continue;
            }
            // Positive delay when detector A fires before detector B.
            let tau = if det_i { delta } else { -delta };
            let idx = ((tau + half_span) / bin_ns).floor() as isize;
            if (0..n_bins as isize).contains(&idx) {
                counts[idx as usize] += 1;
            }
        }
    }

    let edges: Vec<f64> = (0..=n_bins)
        .map(|i| -half_span + i as f64 * bin_ns)
        .collect();
    Ok(CoincidenceHistogram::new(edges, counts, period)?)
}
