//! Damped-Newton minimizer shared by the Poisson and least-squares fits.
//!
//! Models expose predicted values and an analytic Jacobian; the engine runs
//! Fisher scoring with Levenberg-style damping. Parameters may be optimized
//! in linear or log coordinates; results and curvatures are always reported
//! in linear (physical) coordinates.

use nalgebra::{Cholesky, DMatrix, DVector};

/// One parameter's internal coordinate mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    /// Optimize the logarithm; keeps the physical parameter positive.
    Log,
}

impl Transform {
    fn to_internal(self, theta: f64) -> f64 {
        match self {
            Transform::Identity => theta,
            Transform::Log => theta.ln(),
        }
    }

    fn to_physical(self, x: f64) -> f64 {
        match self {
            Transform::Identity => x,
            Transform::Log => x.exp(),
        }
    }

    /// d theta / d x at the internal coordinate `x`.
    fn jacobian(self, x: f64) -> f64 {
        match self {
            Transform::Identity => 1.0,
            Transform::Log => x.exp(),
        }
    }
}

/// Uniform coordinate choice for a whole fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamSpace {
    Linear,
    Log,
}

impl ParamSpace {
    pub fn transforms(self, n: usize) -> Vec<Transform> {
        let t = match self {
            ParamSpace::Linear => Transform::Identity,
            ParamSpace::Log => Transform::Log,
        };
        vec![t; n]
    }
}

/// A parametric prediction with analytic Jacobian.
pub trait PredictiveModel {
    fn n_params(&self) -> usize;
    fn n_points(&self) -> usize;
    /// Fills `mu` with predictions for physical parameters `theta`. When
    /// `jac` is given it receives the row-major `n_points x n_params` matrix
    /// of partial derivatives.
    fn eval(&self, theta: &[f64], mu: &mut [f64], jac: Option<&mut [f64]>);
}

/// Objective to minimize over a [`PredictiveModel`].
pub enum Objective<'a> {
    /// Negative Poisson log-likelihood (up to a data-only constant).
    Poisson { counts: &'a [f64] },
    /// Half weighted sum of squared residuals.
    WeightedLsq { y: &'a [f64], weights: &'a [f64] },
}

impl Objective<'_> {
    /// Objective value; `None` when the prediction is outside the domain
    /// (negative Poisson intensity).
    fn value(&self, mu: &[f64]) -> Option<f64> {
        match self {
            Objective::Poisson { counts } => {
                let mut acc = 0.0;
                for (&m, &c) in mu.iter().zip(counts.iter()) {
                    if m < 0.0 || !m.is_finite() {
                        return None;
                    }
                    if c > 0.0 {
                        if m <= 0.0 {
                            return None;
                        }
                        acc += m - c * m.ln();
                    } else {
                        acc += m;
                    }
                }
                Some(acc)
            }
            Objective::WeightedLsq { y, weights } => {
                let mut acc = 0.0;
                for i in 0..mu.len() {
                    if !mu[i].is_finite() {
                        return None;
                    }
                    let r = y[i] - mu[i];
                    acc += 0.5 * weights[i] * r * r;
                }
                Some(acc)
            }
        }
    }

    /// d value / d mu_i and the scoring weight for the normal matrix.
    fn residual_terms(&self, mu: &[f64], i: usize) -> (f64, f64) {
        match self {
            Objective::Poisson { counts } => {
                let m = mu[i];
                if m <= 0.0 {
                    (1.0, 0.0)
                } else {
                    (1.0 - counts[i] / m, 1.0 / m)
                }
            }
            Objective::WeightedLsq { y, weights } => {
                (-weights[i] * (y[i] - mu[i]), weights[i])
            }
        }
    }
}

pub struct OptimOptions {
    pub max_iter: usize,
    /// Convergence threshold on the expected Newton improvement, relative to
    /// `1 + |value|`.
    pub tol_improvement: f64,
    pub init_lambda: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions { max_iter: 300, tol_improvement: 1e-11, init_lambda: 1e-3 }
    }
}

pub struct OptimOutcome {
    pub theta: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub n_iter: usize,
}

struct Point {
    value: f64,
    grad: DVector<f64>,
    normal: DMatrix<f64>,
}

fn eval_point(
    model: &dyn PredictiveModel,
    objective: &Objective<'_>,
    transforms: &[Transform],
    x: &[f64],
) -> Option<Point> {
    let np = model.n_params();
    let ni = model.n_points();
    let theta: Vec<f64> = x
        .iter()
        .zip(transforms)
        .map(|(&xi, t)| t.to_physical(xi))
        .collect();
    if theta.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut mu = vec![0.0; ni];
    let mut jac = vec![0.0; ni * np];
    model.eval(&theta, &mut mu, Some(&mut jac));
    let value = objective.value(&mu)?;
    if !value.is_finite() {
        return None;
    }

    // Chain rule into internal coordinates.
    let scale: Vec<f64> = x
        .iter()
        .zip(transforms)
        .map(|(&xi, t)| t.jacobian(xi))
        .collect();

    let mut grad = DVector::zeros(np);
    let mut normal = DMatrix::zeros(np, np);
    for i in 0..ni {
        let (dv, w) = objective.residual_terms(&mu, i);
        let row = &jac[i * np..(i + 1) * np];
        for k in 0..np {
            let jk = row[k] * scale[k];
            grad[k] += dv * jk;
            for l in k..np {
                normal[(k, l)] += w * jk * row[l] * scale[l];
            }
        }
    }
    for k in 0..np {
        for l in 0..k {
            normal[(k, l)] = normal[(l, k)];
        }
    }
    Some(Point { value, grad, normal })
}

fn solve_spd(m: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    Cholesky::new(m.clone()).map(|ch| ch.solve(b))
}

/// Expected improvement of the undamped Newton step, `0.5 g^T N^-1 g`.
fn expected_improvement(p: &Point) -> Option<f64> {
    let delta = solve_spd(&p.normal, &p.grad)?;
    Some(0.5 * p.grad.dot(&delta))
}

/// Damped scoring loop from a physical-space initial guess.
pub fn minimize(
    model: &dyn PredictiveModel,
    objective: &Objective<'_>,
    transforms: &[Transform],
    theta0: &[f64],
    opts: &OptimOptions,
) -> Option<OptimOutcome> {
    let mut x: Vec<f64> = theta0
        .iter()
        .zip(transforms)
        .map(|(&t, tr)| tr.to_internal(t))
        .collect();
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut current = eval_point(model, objective, transforms, &x)?;
    let mut lambda = opts.init_lambda;
    let mut converged = false;
    let mut n_iter = 0;
    // Boundary drifts (a rate running to zero in log space) keep promising
    // Newton gains forever; treat sustained value stagnation as terminal so
    // the multistart likelihood comparison can discard such plateaus.
    let mut stagnant = 0usize;

    for _ in 0..opts.max_iter {
        n_iter += 1;
        if let Some(e) = expected_improvement(&current) {
            if e.abs() <= opts.tol_improvement * (1.0 + current.value.abs()) {
                converged = true;
                break;
            }
        }
        if stagnant >= 5 {
            converged = true;
            break;
        }

        let mut accepted = false;
        for _ in 0..40 {
            let mut damped = current.normal.clone();
            for k in 0..damped.nrows() {
                let d = damped[(k, k)].max(1e-12);
                damped[(k, k)] += lambda * d;
            }
            let step = match solve_spd(&damped, &(-&current.grad)) {
                Some(s) => s,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let x_try: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            if let Some(next) = eval_point(model, objective, transforms, &x_try) {
                if next.value <= current.value {
                    let decrease = current.value - next.value;
                    if decrease <= 1e-13 * (1.0 + next.value.abs()) {
                        stagnant += 1;
                    } else {
                        stagnant = 0;
                    }
                    x = x_try;
                    current = next;
                    lambda = (lambda * 0.3).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
            if lambda > 1e14 {
                break;
            }
        }
        if !accepted {
            // Stalled: no downhill step representable at any damping.
            if let Some(e) = expected_improvement(&current) {
                converged = stagnant >= 1
                    || e.abs() <= 1e3 * opts.tol_improvement * (1.0 + current.value.abs());
            } else {
                converged = stagnant >= 1;
            }
            break;
        }
    }

    // Undamped polish: zero-residual problems converge quadratically here,
    // pushing the optimum to machine precision.
    for _ in 0..4 {
        let Some(delta) = solve_spd(&current.normal, &(-&current.grad)) else { break };
        let x_try: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
        let Some(next) = eval_point(model, objective, transforms, &x_try) else { break };
        if next.value <= current.value + 1e-12 * (1.0 + current.value.abs()) {
            x = x_try;
            current = next;
        } else {
            break;
        }
    }

    if !converged {
        if let Some(e) = expected_improvement(&current) {
            converged = e.abs() <= opts.tol_improvement * (1.0 + current.value.abs());
        }
    }

    let theta: Vec<f64> = x
        .iter()
        .zip(transforms)
        .map(|(&xi, t)| t.to_physical(xi))
        .collect();
    Some(OptimOutcome { theta, value: current.value, converged, n_iter })
}

/// Analytic gradient of the objective in physical coordinates.
pub fn gradient_physical(
    model: &dyn PredictiveModel,
    objective: &Objective<'_>,
    theta: &[f64],
) -> Option<Vec<f64>> {
    let transforms = vec![Transform::Identity; model.n_params()];
    let p = eval_point(model, objective, &transforms, theta)?;
    Some(p.grad.iter().copied().collect())
}

/// Objective value in physical coordinates.
pub fn value_physical(
    model: &dyn PredictiveModel,
    objective: &Objective<'_>,
    theta: &[f64],
) -> Option<f64> {
    let mut mu = vec![0.0; model.n_points()];
    model.eval(theta, &mut mu, None);
    objective.value(&mu)
}

/// Observed Hessian at `theta` by central differences of the analytic
/// gradient; falls back to one-sided steps at positivity boundaries.
pub fn observed_hessian(
    model: &dyn PredictiveModel,
    objective: &Objective<'_>,
    theta: &[f64],
) -> Option<DMatrix<f64>> {
    let np = model.n_params();
    let mut h = DMatrix::zeros(np, np);
    for k in 0..np {
        let step = 1e-6 * theta[k].abs().max(1e-9);
        let mut hi = theta.to_vec();
        let mut lo = theta.to_vec();
        hi[k] += step;
        lo[k] -= step;
        let (g_hi, g_lo, denom) = if lo[k] > 0.0 || theta[k] < 0.0 {
            (
                gradient_physical(model, objective, &hi)?,
                gradient_physical(model, objective, &lo)?,
                2.0 * step,
            )
        } else {
            (
                gradient_physical(model, objective, &hi)?,
                gradient_physical(model, objective, theta)?,
                step,
            )
        };
        for l in 0..np {
            h[(l, k)] = (g_hi[l] - g_lo[l]) / denom;
        }
    }
    // Symmetrize away finite-difference noise.
    let ht = h.transpose();
    Some((h + ht) * 0.5)
}

/// Covariance as the inverse observed Hessian.
///
/// Ill-conditioned curvatures (flat likelihood directions) fall back to an
/// eigenvalue-floored pseudo-inverse; the boolean reports that repair, which
/// inflates the sigmas of the unidentifiable directions. Returns `None` only
/// when no direction carries positive curvature.
pub fn covariance_from_hessian(hessian: &DMatrix<f64>) -> Option<(DMatrix<f64>, bool)> {
    let n = hessian.nrows();
    if let Some(ch) = Cholesky::new(hessian.clone()) {
        return Some((ch.solve(&DMatrix::identity(n, n)), false));
    }
    let eigen = hessian.clone().symmetric_eigen();
    let lambda_max = eigen.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    if !(lambda_max > 0.0) {
        return None;
    }
    let floor = 1e-12 * lambda_max;
    let mut inv = DMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = eigen.eigenvalues[k].max(floor);
        let v = eigen.eigenvectors.column(k);
        inv += v * v.transpose() / lambda;
    }
    Some((inv, true))
}
