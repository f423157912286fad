//! Bootstrap parameter uncertainties by resampling and refitting.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::FitError;

/// Resampling scheme.
///
/// Histogram counts are Poisson, so `PoissonCounts` redraws each bin from its
/// observed value. `GaussianResiduals` perturbs a fitted prediction by the
/// empirical residual scale, which degenerates to zero spread on noiseless
/// data.
pub enum Resample {
    PoissonCounts,
    GaussianResiduals { fitted: Vec<f64> },
}

/// Per-parameter empirical standard deviations over `n_resamples` refits of
/// resampled data. `refit` returns `None` when a resample fails to fit;
/// more than 20% failures aborts.
pub fn bootstrap_uncertainty<F>(
    data: &[f64],
    scheme: &Resample,
    n_resamples: usize,
    seed: u64,
    refit: F,
) -> Result<Vec<f64>, FitError>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    if n_resamples < 100 {
        return Err(FitError::InvalidInput(format!(
            "need at least 100 resamples, got {n_resamples}"
        )));
    }
    if let Resample::GaussianResiduals { fitted } = scheme {
        if fitted.len() != data.len() {
            return Err(FitError::InvalidInput(
                "fitted prediction length does not match data".into(),
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let residual_sd = match scheme {
        Resample::PoissonCounts => 0.0,
        Resample::GaussianResiduals { fitted } => {
            let ss: f64 = data
                .iter()
                .zip(fitted.iter())
                .map(|(d, f)| (d - f) * (d - f))
                .sum();
            (ss / data.len() as f64).sqrt()
        }
    };

    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(n_resamples);
    let mut failed = 0usize;
    let mut resampled = vec![0.0; data.len()];
    for _ in 0..n_resamples {
        match scheme {
            Resample::PoissonCounts => {
                for (slot, &c) in resampled.iter_mut().zip(data.iter()) {
                    *slot = if c > 0.0 {
                        Poisson::new(c).map(|p| p.sample(&mut rng)).unwrap_or(0.0)
                    } else {
                        0.0
                    };
                }
            }
            Resample::GaussianResiduals { fitted } => {
                if residual_sd > 0.0 {
                    let normal = Normal::new(0.0, residual_sd).unwrap();
                    for (slot, &f) in resampled.iter_mut().zip(fitted.iter()) {
                        *slot = f + normal.sample(&mut rng);
                    }
                } else {
                    resampled.copy_from_slice(fitted);
                }
            }
        }
        match refit(&resampled) {
            Some(params) => samples.push(params),
            None => failed += 1,
        }
    }

    if failed * 5 > n_resamples {
        return Err(FitError::TooManyResampleFailures { failed, total: n_resamples });
    }
    let n_ok = samples.len();
    if n_ok < 2 {
        return Err(FitError::TooManyResampleFailures { failed, total: n_resamples });
    }
    let n_params = samples[0].len();
    if samples.iter().any(|s| s.len() != n_params) {
        return Err(FitError::InvalidInput("refit returned inconsistent parameter counts".into()));
    }

    let mut sigmas = vec![0.0; n_params];
    for k in 0..n_params {
        let mean: f64 = samples.iter().map(|s| s[k]).sum::<f64>() / n_ok as f64;
        let var: f64 = samples.iter().map(|s| (s[k] - mean) * (s[k] - mean)).sum::<f64>()
            / (n_ok - 1) as f64;
        sigmas[k] = var.sqrt();
    }
    Ok(sigmas)
}
