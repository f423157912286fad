//! Small least-squares curve fits: saturation curves and exponential-plus-
//! offset envelopes.

use crate::error::FitError;
use crate::optimize::{
    covariance_from_hessian, minimize, observed_hessian, Objective, OptimOptions, PredictiveModel,
    Transform,
};

/// `I(P) = i_inf (1 - exp(-P / p_sat))`.
struct SaturationModel {
    p: Vec<f64>,
}

impl PredictiveModel for SaturationModel {
    fn n_params(&self) -> usize {
        2
    }

    fn n_points(&self) -> usize {
        self.p.len()
    }

    fn eval(&self, theta: &[f64], mu: &mut [f64], jac: Option<&mut [f64]>) {
        let (i_inf, p_sat) = (theta[0], theta[1]);
        let mut jac = jac;
        for (i, &p) in self.p.iter().enumerate() {
            let e = (-p / p_sat).exp();
            mu[i] = i_inf * (1.0 - e);
            if let Some(j) = jac.as_deref_mut() {
                j[2 * i] = 1.0 - e;
                j[2 * i + 1] = -i_inf * e * p / (p_sat * p_sat);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaturationFit {
    pub p_sat: f64,
    pub p_sat_sigma: f64,
    pub i_inf: f64,
    pub i_inf_sigma: f64,
    /// Set when the data decrease with power beyond the noise level.
    pub nonmonotone_warning: bool,
}

/// Fits the pulsed saturation model `I = i_inf (1 - exp(-P/p_sat))`.
pub fn fit_saturation(powers: &[f64], intensities: &[f64]) -> Result<SaturationFit, FitError> {
    if powers.len() != intensities.len() {
        return Err(FitError::InvalidInput("powers and intensities differ in length".into()));
    }
    if powers.len() < 4 {
        return Err(FitError::TooFewPoints { needed: 4, got: powers.len() });
    }
    let mut order: Vec<usize> = (0..powers.len()).collect();
    order.sort_by(|&a, &b| powers[a].partial_cmp(&powers[b]).unwrap());
    let p: Vec<f64> = order.iter().map(|&i| powers[i]).collect();
    let y: Vec<f64> = order.iter().map(|&i| intensities[i]).collect();
    if p[0] <= 0.0 {
        return Err(FitError::InvalidInput("powers must be positive".into()));
    }

    let i_max = y.iter().cloned().fold(f64::MIN, f64::max);
    if !(i_max > 0.0) {
        return Err(FitError::InvalidInput("intensities must contain positive values".into()));
    }
    // Knee guess: first power where I crosses (1 - 1/e) of the plateau.
    let knee_level = (1.0 - (-1.0_f64).exp()) * i_max;
    let p_sat0 = p
        .iter()
        .zip(y.iter())
        .find(|(_, &yi)| yi >= knee_level)
        .map(|(&pi, _)| pi)
        .unwrap_or(p[p.len() / 2]);

    let model = SaturationModel { p: p.clone() };
    let weights = vec![1.0; y.len()];
    let objective = Objective::WeightedLsq { y: &y, weights: &weights };
    let transforms = [Transform::Log, Transform::Log];
    let outcome = minimize(
        &model,
        &objective,
        &transforms,
        &[i_max * 1.05, p_sat0],
        &OptimOptions::default(),
    )
    .ok_or(FitError::NonConvergence { n_starts: 1 })?;
    if !outcome.converged {
        return Err(FitError::NonConvergence { n_starts: 1 });
    }

    let hessian =
        observed_hessian(&model, &objective, &outcome.theta).ok_or(FitError::SingularCurvature)?;
    let (covariance, _) =
        covariance_from_hessian(&hessian).ok_or(FitError::SingularCurvature)?;
    // Scale by the residual variance: the LSQ objective carries unit weights.
    let mut mu = vec![0.0; y.len()];
    model.eval(&outcome.theta, &mut mu, None);
    let dof = (y.len() - 2).max(1);
    let s2: f64 = y
        .iter()
        .zip(mu.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / dof as f64;

    let noise = s2.sqrt();
    let nonmonotone_warning = y
        .windows(2)
        .any(|w| w[1] < w[0] - 3.0 * noise.max(1e-12));

    Ok(SaturationFit {
        i_inf: outcome.theta[0],
        i_inf_sigma: (covariance[(0, 0)] * s2).max(0.0).sqrt(),
        p_sat: outcome.theta[1],
        p_sat_sigma: (covariance[(1, 1)] * s2).max(0.0).sqrt(),
        nonmonotone_warning,
    })
}

/// `f(x) = a exp(-x / tau) + c`.
struct ExpOffsetModel {
    x: Vec<f64>,
}

impl PredictiveModel for ExpOffsetModel {
    fn n_params(&self) -> usize {
        3
    }

    fn n_points(&self) -> usize {
        self.x.len()
    }

    fn eval(&self, theta: &[f64], mu: &mut [f64], jac: Option<&mut [f64]>) {
        let (a, tau, c) = (theta[0], theta[1], theta[2]);
        let mut jac = jac;
        for (i, &x) in self.x.iter().enumerate() {
            let e = (-x / tau).exp();
            mu[i] = a * e + c;
            if let Some(j) = jac.as_deref_mut() {
                j[3 * i] = e;
                j[3 * i + 1] = a * e * x / (tau * tau);
                j[3 * i + 2] = 1.0;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpOffsetFit {
    pub amplitude: f64,
    pub amplitude_sigma: f64,
    pub tau: f64,
    pub tau_sigma: f64,
    pub offset: f64,
    pub offset_sigma: f64,
}

/// Least-squares fit of `a exp(-x/tau) + c` with `a, tau > 0`.
pub fn fit_exp_offset(x: &[f64], y: &[f64]) -> Result<ExpOffsetFit, FitError> {
    if x.len() != y.len() {
        return Err(FitError::InvalidInput("x and y differ in length".into()));
    }
    if x.len() < 4 {
        return Err(FitError::TooFewPoints { needed: 4, got: x.len() });
    }

    // Initial guesses: offset from the far tail, amplitude from the head.
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let tail = ys.len() * 3 / 4;
    let c0 = ys[tail..].iter().sum::<f64>() / (ys.len() - tail) as f64;
    let a0 = (ys[0] - c0).max(c0.abs() * 0.05).max(1e-9);
    let span = xs[xs.len() - 1] - xs[0];
    let tau0 = (span / 4.0).max(1e-9);

    let model = ExpOffsetModel { x: xs.clone() };
    let weights = vec![1.0; ys.len()];
    let objective = Objective::WeightedLsq { y: &ys, weights: &weights };
    let transforms = [Transform::Log, Transform::Log, Transform::Identity];

    let mut best: Option<(f64, Vec<f64>)> = None;
    for tau_scale in [0.25, 1.0, 4.0] {
        let start = [a0, tau0 * tau_scale, c0];
        if let Some(outcome) = minimize(&model, &objective, &transforms, &start, &OptimOptions::default())
        {
            if outcome.converged {
                let better = match &best {
                    None => true,
                    Some((v, _)) => outcome.value < *v,
                };
                if better {
                    best = Some((outcome.value, outcome.theta));
                }
            }
        }
    }
    let (_, theta) = best.ok_or(FitError::NonConvergence { n_starts: 3 })?;

    let hessian =
        observed_hessian(&model, &objective, &theta).ok_or(FitError::SingularCurvature)?;
    let (covariance, _) =
        covariance_from_hessian(&hessian).ok_or(FitError::SingularCurvature)?;
    let mut mu = vec![0.0; ys.len()];
    model.eval(&theta, &mut mu, None);
    let dof = (ys.len() - 3).max(1);
    let s2: f64 = ys
        .iter()
        .zip(mu.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / dof as f64;

    Ok(ExpOffsetFit {
        amplitude: theta[0],
        amplitude_sigma: (covariance[(0, 0)] * s2).max(0.0).sqrt(),
        tau: theta[1],
        tau_sigma: (covariance[(1, 1)] * s2).max(0.0).sqrt(),
        offset: theta[2],
        offset_sigma: (covariance[(2, 2)] * s2).max(0.0).sqrt(),
    })
}
