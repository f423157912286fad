//! Lorentzian peak detection and fitting for Fabry-Perot spectra.

use serde::{Deserialize, Serialize};

use qd_core::Spectrum;

use crate::error::FitError;
use crate::optimize::{
    covariance_from_hessian, minimize, observed_hessian, Objective, OptimOptions, PredictiveModel,
    Transform,
};

/// A fitted Lorentzian line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakFit {
    pub center_nm: f64,
    pub fwhm_nm: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub center_sigma_nm: f64,
}

/// One or two Lorentzians plus a shared constant offset.
///
/// Parameter layout: `[center, fwhm, amplitude] x n_peaks, offset`.
struct LorentzianModel {
    x: Vec<f64>,
    n_peaks: usize,
}

impl PredictiveModel for LorentzianModel {
    fn n_params(&self) -> usize {
        3 * self.n_peaks + 1
    }

    fn n_points(&self) -> usize {
        self.x.len()
    }

    fn eval(&self, theta: &[f64], mu: &mut [f64], jac: Option<&mut [f64]>) {
        let np = self.n_params();
        let mut jac = jac;
        for (i, &x) in self.x.iter().enumerate() {
            let mut m = theta[np - 1];
            let row = jac.as_deref_mut().map(|j| &mut j[i * np..(i + 1) * np]);
            let mut row = row;
            if let Some(r) = row.as_deref_mut() {
                r[np - 1] = 1.0;
            }
            for p in 0..self.n_peaks {
                let (c, fwhm, a) = (theta[3 * p], theta[3 * p + 1], theta[3 * p + 2]);
                let h = 0.5 * fwhm;
                let dx = x - c;
                let denom = dx * dx + h * h;
                let shape = h * h / denom;
                m += a * shape;
                if let Some(r) = row.as_deref_mut() {
                    r[3 * p] = a * h * h * 2.0 * dx / (denom * denom);
                    // d/d(fwhm) = 0.5 d/dh; d shape/dh = 2 h dx^2 / denom^2.
                    r[3 * p + 1] = 0.5 * a * 2.0 * h * dx * dx / (denom * denom);
                    r[3 * p + 2] = shape;
                }
            }
            mu[i] = m;
        }
    }
}

/// Median of a slice (copying); empty input yields 0.
fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = v.len() / 2;
    if v.len() % 2 == 0 {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    }
}

fn fit_window(
    spectrum: &Spectrum,
    centers: &[f64],
    lo: f64,
    hi: f64,
) -> Result<Vec<PeakFit>, FitError> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 0..spectrum.len() {
        let w = spectrum.wavelength_nm[i];
        if w >= lo && w <= hi {
            x.push(w);
            y.push(spectrum.counts[i]);
        }
    }
    let n_peaks = centers.len();
    if x.len() < 3 * n_peaks + 2 {
        return Err(FitError::TooFewPoints { needed: 3 * n_peaks + 2, got: x.len() });
    }

    let offset0 = y.iter().cloned().fold(f64::MAX, f64::min);
    let step = x[1] - x[0];
    let mut theta0 = Vec::with_capacity(3 * n_peaks + 1);
    for &c in centers {
        // Half-max crossing scan for the width seed.
        let ci = x
            .iter()
            .position(|&w| (w - c).abs() < 0.5 * step)
            .unwrap_or(x.len() / 2);
        let peak_y = y[ci];
        let half = offset0 + 0.5 * (peak_y - offset0);
        let mut left = ci;
        while left > 0 && y[left] > half {
            left -= 1;
        }
        let mut right = ci;
        while right + 1 < y.len() && y[right] > half {
            right += 1;
        }
        let fwhm0 = ((x[right] - x[left]).abs()).max(2.0 * step);
        theta0.extend_from_slice(&[c, fwhm0, (peak_y - offset0).max(1e-9)]);
    }
    theta0.push(offset0);

    let model = LorentzianModel { x: x.clone(), n_peaks };
    let weights = vec![1.0; y.len()];
    let objective = Objective::WeightedLsq { y: &y, weights: &weights };
    let mut transforms = Vec::new();
    for _ in 0..n_peaks {
        transforms.extend_from_slice(&[Transform::Identity, Transform::Log, Transform::Log]);
    }
    transforms.push(Transform::Identity);

    let outcome = minimize(&model, &objective, &transforms, &theta0, &OptimOptions::default())
        .ok_or(FitError::NonConvergence { n_starts: 1 })?;
    if !outcome.converged {
        return Err(FitError::NonConvergence { n_starts: 1 });
    }
    let theta = outcome.theta;

    let hessian =
        observed_hessian(&model, &objective, &theta).ok_or(FitError::SingularCurvature)?;
    let (covariance, _) =
        covariance_from_hessian(&hessian).ok_or(FitError::SingularCurvature)?;
    let mut mu = vec![0.0; y.len()];
    model.eval(&theta, &mut mu, None);
    let dof = (y.len().saturating_sub(model.n_params())).max(1);
    let s2: f64 = y
        .iter()
        .zip(mu.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / dof as f64;

    let offset = theta[3 * n_peaks];
    let mut fits = Vec::with_capacity(n_peaks);
    for p in 0..n_peaks {
        let center = theta[3 * p];
        let fwhm = theta[3 * p + 1];
        let amplitude = theta[3 * p + 2];
        if !(center >= lo && center <= hi) || !(fwhm > 0.0) || !(amplitude > 0.0) {
            return Err(FitError::InvalidInput(format!(
                "fitted peak left the window: center={center}, fwhm={fwhm}, amplitude={amplitude}"
            )));
        }
        fits.push(PeakFit {
            center_nm: center,
            fwhm_nm: fwhm,
            amplitude,
            offset,
            center_sigma_nm: (covariance[(3 * p, 3 * p)] * s2).max(0.0).sqrt(),
        });
    }
    Ok(fits)
}

/// Detects local maxima above `prominence_threshold` times the local median
/// inside `wavelength_filter` and fits each with a Lorentzian plus constant
/// offset over `+-window_nm`. Peaks whose windows overlap are fitted jointly
/// as a two-peak model. Failed single fits are logged and omitted.
pub fn find_and_fit_peaks(
    spectrum: &Spectrum,
    prominence_threshold: f64,
    window_nm: f64,
    wavelength_filter: (f64, f64),
) -> Result<Vec<PeakFit>, FitError> {
    if !(prominence_threshold > 0.0) {
        return Err(FitError::InvalidInput("prominence threshold must be positive".into()));
    }
    if !(window_nm > 0.0) {
        return Err(FitError::InvalidInput("window must be positive".into()));
    }
    let (f_lo, f_hi) = wavelength_filter;
    if !(f_lo < f_hi) {
        return Err(FitError::InvalidInput("wavelength filter must satisfy min < max".into()));
    }

    let wl = &spectrum.wavelength_nm;
    let counts = &spectrum.counts;
    let n = spectrum.len();

    // Candidate local maxima above the prominence threshold.
    let mut candidates: Vec<usize> = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if wl[i] < f_lo || wl[i] > f_hi {
            continue;
        }
        if counts[i] < counts[i - 1] || counts[i] < counts[i + 1] {
            continue;
        }
        if counts[i] == counts[i - 1] && counts[i] == counts[i + 1] {
            continue;
        }
        // Local median over +-4 windows around the sample.
        let lo = wl[i] - 4.0 * window_nm;
        let hi = wl[i] + 4.0 * window_nm;
        let neighborhood: Vec<f64> = (0..n)
            .filter(|&k| wl[k] >= lo && wl[k] <= hi)
            .map(|k| counts[k])
            .collect();
        let local_median = median(&neighborhood);
        if counts[i] > prominence_threshold * local_median.max(1e-12) {
            candidates.push(i);
        }
    }

    // Non-maximum suppression at a fraction of the window, keeping the
    // stronger sample; genuine neighbors within one window survive for the
    // joint fit.
    let suppress_radius = window_nm / 5.0;
    candidates.sort_by(|&a, &b| counts[b].partial_cmp(&counts[a]).unwrap());
    let mut kept: Vec<usize> = Vec::new();
    for &c in &candidates {
        if kept.iter().all(|&k| (wl[k] - wl[c]).abs() > suppress_radius) {
            kept.push(c);
        }
    }
    kept.sort_unstable();

    // Cluster candidates closer than one window for joint fitting.
    let mut fits: Vec<PeakFit> = Vec::new();
    let mut i = 0;
    while i < kept.len() {
        let mut cluster = vec![kept[i]];
        while i + 1 < kept.len() && wl[kept[i + 1]] - wl[*cluster.last().unwrap()] < window_nm {
            i += 1;
            cluster.push(kept[i]);
        }
        i += 1;

        let centers: Vec<f64> = cluster.iter().map(|&k| wl[k]).collect();
        let lo = centers[0] - window_nm;
        let hi = centers[centers.len() - 1] + window_nm;
        let result = if centers.len() == 1 {
            fit_window(spectrum, &centers, lo, hi)
        } else if centers.len() == 2 {
            fit_window(spectrum, &centers, lo, hi)
        } else {
            // More than two overlapping peaks: fit the strongest two jointly
            // and drop the rest.
            let mut by_height = cluster.clone();
            by_height.sort_by(|&a, &b| counts[b].partial_cmp(&counts[a]).unwrap());
            let mut two: Vec<f64> = by_height[..2].iter().map(|&k| wl[k]).collect();
            two.sort_by(|a, b| a.partial_cmp(b).unwrap());
            log::warn!(
                "cluster of {} overlapping peaks near {:.3} nm; fitting strongest two",
                centers.len(),
                centers[0]
            );
            fit_window(spectrum, &two, lo, hi)
        };
        match result {
            Ok(mut peak_fits) => fits.append(&mut peak_fits),
            Err(err) => {
                log::warn!("peak fit near {:.3} nm failed: {err}", centers[0]);
            }
        }
    }

    fits.sort_by(|a, b| a.center_nm.partial_cmp(&b.center_nm).unwrap());
    Ok(fits)
}
