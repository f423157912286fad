//! Poisson maximum-likelihood fitting of multi-exponential decay histograms.
//!
//! The model for the expected counts in a bin centered at `t` is
//!
//! ```text
//! mu(t) = sum_j a_j E(t; gamma_j) + b0 + b1 exp(-gamma_b t)
//! ```
//!
//! with up to three components, an optional constant-plus-exponential
//! background, and `E` either a plain exponential or an exponential convolved
//! with a Gaussian instrument response. Counts are Poisson, so the fit
//! minimizes the negative Poisson log-likelihood rather than least squares;
//! this matters in the low-count tails where the slow rates live.
//!
//! The likelihood is invariant under swapping the background exponential with
//! any decay component, so fitted models are relabeled to a canonical
//! convention: the background exponential is the slowest exponential in the
//! model. Exponentials that degenerate during optimization (rates outside the
//! resolvable band, vanishing amplitudes, or nearly equal rate pairs) are
//! eliminated by refitting a reduced model, with a warning flag on the
//! result.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use qd_core::{Background, DecayComponent, DecayHistogram, DecayModel};

use crate::error::FitError;
use crate::optimize::{
    self, covariance_from_hessian, minimize, Objective, OptimOptions, ParamSpace, PredictiveModel,
};
use crate::result::FitResult;
use crate::special::{smeared_exp, smeared_exp_drate};

/// Background term included in the fit model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackgroundMode {
    None,
    Constant,
    ConstantPlusExp,
}

impl BackgroundMode {
    fn n_params(self) -> usize {
        match self {
            BackgroundMode::None => 0,
            BackgroundMode::Constant => 1,
            BackgroundMode::ConstantPlusExp => 3,
        }
    }
}

/// Fixed structure of a decay fit: bin centers, component count, background
/// shape, and IRF width.
#[derive(Debug, Clone)]
pub struct DecayShape {
    pub t: Vec<f64>,
    pub n_components: usize,
    pub background: BackgroundMode,
    /// Gaussian IRF standard deviation in ns; 0 disables convolution.
    pub irf_sigma_ns: f64,
}

impl DecayShape {
    pub fn n_params(&self) -> usize {
        2 * self.n_components + self.background.n_params()
    }

    /// Parameter names in layout order `a1, gamma1, ..., [b0, [b1, gamma_b]]`.
    pub fn parameter_names(&self) -> Vec<String> {
        let mut names = Vec::with_capacity(self.n_params());
        for j in 1..=self.n_components {
            names.push(format!("a{j}"));
            names.push(format!("gamma{j}"));
        }
        match self.background {
            BackgroundMode::None => {}
            BackgroundMode::Constant => names.push("b0".into()),
            BackgroundMode::ConstantPlusExp => {
                names.push("b0".into());
                names.push("b1".into());
                names.push("gamma_b".into());
            }
        }
        names
    }
}

impl PredictiveModel for DecayShape {
    fn n_params(&self) -> usize {
        self.n_params()
    }

    fn n_points(&self) -> usize {
        self.t.len()
    }

    fn eval(&self, theta: &[f64], mu: &mut [f64], jac: Option<&mut [f64]>) {
        let np = self.n_params();
        let sigma = self.irf_sigma_ns;
        let mut jac = jac;
        for (i, &t) in self.t.iter().enumerate() {
            let mut m = 0.0;
            let row = jac.as_deref_mut().map(|j| &mut j[i * np..(i + 1) * np]);
            let mut row = row;
            for j in 0..self.n_components {
                let a = theta[2 * j];
                let g = theta[2 * j + 1];
                let e = smeared_exp(t, g, sigma);
                m += a * e;
                if let Some(r) = row.as_deref_mut() {
                    r[2 * j] = e;
                    r[2 * j + 1] = a * smeared_exp_drate(t, g, sigma);
                }
            }
            let base = 2 * self.n_components;
            match self.background {
                BackgroundMode::None => {}
                BackgroundMode::Constant => {
                    m += theta[base];
                    if let Some(r) = row.as_deref_mut() {
                        r[base] = 1.0;
                    }
                }
                BackgroundMode::ConstantPlusExp => {
                    let b0 = theta[base];
                    let b1 = theta[base + 1];
                    let gb = theta[base + 2];
                    let e = (-gb * t).exp();
                    m += b0 + b1 * e;
                    if let Some(r) = row.as_deref_mut() {
                        r[base] = 1.0;
                        r[base + 1] = e;
                        r[base + 2] = -b1 * t * e;
                    }
                }
            }
            mu[i] = m;
        }
    }
}

/// Negative Poisson log-likelihood of a decay shape at `theta`.
pub fn nll(shape: &DecayShape, counts: &[f64], theta: &[f64]) -> Option<f64> {
    optimize::value_physical(shape, &Objective::Poisson { counts }, theta)
}

/// Analytic gradient of the negative Poisson log-likelihood.
pub fn nll_gradient(shape: &DecayShape, counts: &[f64], theta: &[f64]) -> Option<Vec<f64>> {
    optimize::gradient_physical(shape, &Objective::Poisson { counts }, theta)
}

#[derive(Debug, Clone)]
pub struct DecayFitOptions {
    /// Multi-start count; rate seeds are log-spaced over the resolvable band.
    pub n_starts: usize,
    pub param_space: ParamSpace,
    /// IRF FWHM in ps; 0 fits plain exponentials.
    pub irf_fwhm_ps: f64,
    pub background: BackgroundMode,
    /// When set, the component count is chosen by likelihood-ratio tests up
    /// to the requested maximum.
    pub auto_components: bool,
    pub lrt_significance: f64,
    /// Adjacent rates closer than this ratio are collapsed into one
    /// component.
    pub collapse_ratio: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for DecayFitOptions {
    fn default() -> Self {
        DecayFitOptions {
            n_starts: 8,
            param_space: ParamSpace::Log,
            irf_fwhm_ps: 0.0,
            background: BackgroundMode::None,
            auto_components: false,
            lrt_significance: 0.01,
            collapse_ratio: 1.05,
            seed: 0,
            max_iter: 300,
        }
    }
}

const FWHM_TO_SIGMA: f64 = 2.354_820_045_030_949; // 2 sqrt(2 ln 2)

struct BestFit {
    theta: Vec<f64>,
    value: f64,
    n_starts_used: usize,
}

/// Log-spaced rate seeds between `1/t_max` and `1/t_bin`. Even starts walk a
/// staggered ladder; odd starts draw stratified random positions, one per
/// sub-band, so the seed space is explored off the ladder diagonal too.
fn rate_seeds(
    n_components: usize,
    start: usize,
    n_starts: usize,
    t_span: f64,
    t_bin: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let ln_lo = (1.0 / t_span).ln();
    let ln_hi = (1.0 / t_bin).ln();
    (0..n_components)
        .map(|j| {
            let u = if start % 2 == 0 {
                let stagger = (start as f64 + 0.5) / n_starts as f64;
                let jitter: f64 = 0.02 * (rng.random::<f64>() - 0.5);
                (j as f64 + stagger) / n_components as f64 + jitter
            } else {
                (j as f64 + rng.random::<f64>()) / n_components as f64
            };
            (ln_lo + u * (ln_hi - ln_lo)).exp()
        })
        .collect()
}

/// Midpoint (in log space) of the widest gap in a sorted rate set, bounded by
/// the resolvable band; used to seed the extra component of a cascade start.
fn widest_gap_seed(rates_sorted: &[f64], t_span: f64, t_bin: f64) -> f64 {
    let mut knots = vec![1.0 / t_span];
    knots.extend_from_slice(rates_sorted);
    knots.push(1.0 / t_bin);
    let mut best = (0.0, knots[0].ln() + 0.5);
    for w in knots.windows(2) {
        let gap = (w[1] / w[0]).ln();
        if gap > best.0 {
            best = (gap, 0.5 * (w[0].ln() + w[1].ln()));
        }
    }
    best.1.exp()
}

/// Ridge-regularized linear least squares for the amplitudes given rate
/// seeds, clipped to positive values.
fn amplitude_init(
    shape: &DecayShape,
    counts: &[f64],
    rates: &[f64],
    gamma_b_seed: f64,
) -> Vec<f64> {
    use nalgebra::{DMatrix, DVector};
    let n = shape.t.len();
    let nb = shape.background.n_params();
    let ncols = shape.n_components + nb.min(2); // amplitudes, b0, b1 are linear
    let mut basis = DMatrix::zeros(n, ncols);
    for (i, &t) in shape.t.iter().enumerate() {
        for (j, &g) in rates.iter().enumerate() {
            basis[(i, j)] = smeared_exp(t, g, shape.irf_sigma_ns);
        }
        if nb >= 1 {
            basis[(i, shape.n_components)] = 1.0;
        }
        if nb >= 2 {
            basis[(i, shape.n_components + 1)] = (-gamma_b_seed * t).exp();
        }
    }
    let y = DVector::from_iterator(n, counts.iter().copied());
    let mut normal = basis.transpose() * &basis;
    let rhs = basis.transpose() * y;
    let ridge = 1e-8 * normal.trace().max(1e-12);
    for k in 0..ncols {
        normal[(k, k)] += ridge;
    }
    let solution = nalgebra::Cholesky::new(normal)
        .map(|ch| ch.solve(&rhs))
        .unwrap_or_else(|| DVector::zeros(ncols));

    let c_max = counts.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
    let floor = c_max * 1e-4;
    let mut theta = Vec::with_capacity(shape.n_params());
    for (j, &g) in rates.iter().enumerate() {
        let a = solution[j];
        theta.push(if a > floor { a } else { floor });
        theta.push(g);
    }
    if nb >= 1 {
        let b0 = solution[shape.n_components];
        theta.push(if b0 > floor { b0 } else { floor });
    }
    if nb >= 2 {
        let b1 = solution[shape.n_components + 1];
        theta.push(if b1 > floor { b1 } else { floor });
        theta.push(gamma_b_seed);
    }
    theta
}

/// A warm start carried between cascade levels: component rate seeds and,
/// when known, the previous background-exponential rate.
struct WarmStart {
    rates: Vec<f64>,
    gamma_b: Option<f64>,
}

/// Runs the multi-start ladder (plus any warm starts) for a fixed component
/// count. Returns the best converged optimum by (value, lexicographic
/// parameters).
fn multistart(
    shape: &DecayShape,
    counts: &[f64],
    t_span: f64,
    t_bin: f64,
    options: &DecayFitOptions,
    warm_starts: &[WarmStart],
) -> Result<BestFit, FitError> {
    let objective = Objective::Poisson { counts };
    let transforms = options.param_space.transforms(shape.n_params());
    let opt_opts = OptimOptions { max_iter: options.max_iter, ..Default::default() };

    let n_starts = options.n_starts.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut starts: Vec<WarmStart> = (0..n_starts)
        .map(|start| WarmStart {
            rates: rate_seeds(shape.n_components, start, n_starts, t_span, t_bin, &mut rng),
            gamma_b: None,
        })
        .collect();
    starts.extend(warm_starts.iter().map(|w| WarmStart {
        rates: w.rates.clone(),
        gamma_b: w.gamma_b,
    }));

    let mut best: Option<BestFit> = None;
    for (start, warm) in starts.iter().enumerate() {
        let mut rates = warm.rates.clone();
        rates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Rotate the background-rate seed across decades unless the warm
        // start pins it.
        let gamma_b_seed = warm
            .gamma_b
            .unwrap_or_else(|| (1u32 << (2 * (start % 3))) as f64 / t_span);
        let theta0 = amplitude_init(shape, counts, &rates, gamma_b_seed);
        let Some(outcome) = minimize(shape, &objective, &transforms, &theta0, &opt_opts) else {
            continue;
        };
        if !outcome.converged {
            continue;
        }
        let candidate = BestFit {
            theta: outcome.theta,
            value: outcome.value,
            n_starts_used: starts.len(),
        };
        // Total order for reproducibility: likelihood first, then
        // lexicographic parameter comparison.
        best = Some(match best.take() {
            None => candidate,
            Some(prev) => {
                if candidate.value < prev.value
                    || (candidate.value == prev.value
                        && lexicographic_less(&candidate.theta, &prev.theta))
                {
                    candidate
                } else {
                    prev
                }
            }
        });
    }
    best.ok_or(FitError::NonConvergence { n_starts: options.n_starts.max(1) })
}

/// Swaps the background exponential with the slowest decay component when
/// the component is slower; the likelihood is invariant, the labeling is not.
fn relabel_background(theta: &mut [f64], shape: &DecayShape) {
    if shape.background != BackgroundMode::ConstantPlusExp {
        return;
    }
    let n = shape.n_components;
    let mut j_min = 0;
    for j in 1..n {
        if theta[2 * j + 1] < theta[2 * j_min + 1] {
            j_min = j;
        }
    }
    if theta[2 * j_min + 1] < theta[2 * n + 2] {
        theta.swap(2 * j_min, 2 * n + 1);
        theta.swap(2 * j_min + 1, 2 * n + 2);
    }
}

fn lexicographic_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Reduced Poisson deviance, `2 sum[c ln(c/mu) - (c - mu)] / dof`.
fn reduced_deviance(mu: &[f64], counts: &[f64], n_params: usize) -> f64 {
    let mut d = 0.0;
    for (&m, &c) in mu.iter().zip(counts.iter()) {
        if c > 0.0 {
            d += 2.0 * (c * (c / m).ln() - (c - m));
        } else {
            d += 2.0 * m;
        }
    }
    let dof = mu.len().saturating_sub(n_params).max(1);
    d / dof as f64
}

/// Fits a multi-exponential decay model to a histogram over `fit_range`.
///
/// Returns the fitted model with components in decreasing-rate order plus the
/// full fit report. Fails explicitly when no start converges; nearly
/// degenerate rate pairs (ratio below `options.collapse_ratio`) are collapsed
/// into a single component and flagged.
pub fn fit_decay(
    hist: &DecayHistogram,
    n_components: usize,
    fit_range: (f64, f64),
    options: &DecayFitOptions,
) -> Result<(DecayModel, FitResult), FitError> {
    if !(1..=3).contains(&n_components) {
        return Err(FitError::InvalidInput(format!(
            "component count must be 1..=3, got {n_components}"
        )));
    }
    let (lo, hi) = fit_range;
    let first = hist.bin_edges[0];
    let last = *hist.bin_edges.last().unwrap();
    if !(lo < hi) || lo < first - 1e-9 || hi > last + 1e-9 {
        return Err(FitError::InvalidRange {
            msg: format!("[{lo}, {hi}] ns not within histogram [{first}, {last}] ns"),
        });
    }

    let mut t = Vec::new();
    let mut counts = Vec::new();
    for i in 0..hist.counts.len() {
        let c = hist.bin_center(i);
        if c >= lo && c <= hi {
            t.push(c);
            counts.push(hist.counts[i] as f64);
        }
    }
    let t_span = hi - lo;
    let t_bin = hist.bin_width();

    // Fits cascade from one component upward: each level warm-starts the
    // next with its fitted rates plus a seed in the widest log-gap. The
    // cascade then serves both fixed component counts and likelihood-ratio
    // selection.
    let run = |n: usize, background: BackgroundMode| -> Result<(DecayShape, BestFit), FitError> {
        let nonzero = counts.iter().filter(|&&c| c > 0.0).count();
        let mut level: Option<(DecayShape, BestFit)> = None;
        for k in 1..=n {
            let shape = DecayShape {
                t: t.clone(),
                n_components: k,
                background,
                irf_sigma_ns: options.irf_fwhm_ps / 1000.0 / FWHM_TO_SIGMA,
            };
            if nonzero < 10 * shape.n_params() {
                return Err(FitError::TooFewPoints {
                    needed: 10 * shape.n_params(),
                    got: nonzero,
                });
            }
            let mut warm: Vec<WarmStart> = Vec::new();
            if let Some((prev_shape, prev_best)) = level.as_ref() {
                let prev_rates: Vec<f64> = (0..prev_shape.n_components)
                    .map(|j| prev_best.theta[2 * j + 1])
                    .collect();
                let prev_gb = (prev_shape.background == BackgroundMode::ConstantPlusExp)
                    .then(|| prev_best.theta[2 * prev_shape.n_components + 2]);
                // Variant 1: keep the previous background, add a component in
                // the widest rate gap.
                let mut rates = prev_rates.clone();
                rates.sort_by(|a, b| a.partial_cmp(b).unwrap());
                rates.push(widest_gap_seed(&rates, t_span, t_bin));
                warm.push(WarmStart { rates, gamma_b: prev_gb });
                // Variant 2: promote the previous background exponential into
                // the new component and reseed the background.
                if let Some(gb) = prev_gb {
                    let mut rates = prev_rates.clone();
                    rates.push(gb);
                    warm.push(WarmStart { rates, gamma_b: None });
                }
                // Variant 3: split each previous component into a bracketing
                // pair; unresolved doubles hide inside single components.
                for j in 0..prev_rates.len() {
                    let mut rates = prev_rates.clone();
                    let r = rates[j];
                    rates[j] = r * 2.5;
                    rates.push(r / 2.5);
                    warm.push(WarmStart { rates, gamma_b: prev_gb });
                }
            }
            let best = multistart(&shape, &counts, t_span, t_bin, options, &warm)?;
            level = Some((shape, best));
        }
        Ok(level.expect("n >= 1"))
    };

    let (mut shape, mut best) = if options.auto_components {
        let quantile = ChiSquared::new(2.0)
            .unwrap()
            .inverse_cdf(1.0 - options.lrt_significance);
        let mut current = run(1, options.background)?;
        for n in 2..=n_components {
            let Ok(trial) = run(n, options.background) else { break };
            let stat = 2.0 * (current.1.value - trial.1.value);
            if stat > quantile {
                current = trial;
            } else {
                break;
            }
        }
        current
    } else {
        run(n_components, options.background)?
    };

    // Canonicalize and simplify until the model is identifiable: relabel the
    // slowest exponential into the background slot, drop exponentials outside
    // the resolvable rate band or with vanishing amplitudes, and collapse
    // nearly equal rate pairs.
    let mut collapsed = false;
    let c_max = counts.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
    let rate_ceiling = 10.0 / t_bin;
    let rate_floor = 0.25 / t_span;
    let amp_floor = 1e-8 * c_max;
    loop {
        relabel_background(&mut best.theta, &shape);
        let n = shape.n_components;
        let comp_amp = |j: usize| best.theta[2 * j];
        let comp_rate = |j: usize| best.theta[2 * j + 1];

        // Unresolvable or empty decay component: refit with one fewer.
        let dead_component = (0..n).any(|j| {
            comp_rate(j) > rate_ceiling || comp_amp(j) < amp_floor
        });
        if dead_component && n > 1 {
            log::warn!("dropping a degenerate decay component and refitting");
            collapsed = true;
            let reduced = run(n - 1, shape.background)?;
            shape = reduced.0;
            best = reduced.1;
            continue;
        }

        // Degenerate background exponential: flat, unresolvable, empty, or
        // indistinguishable from the slowest component.
        if shape.background == BackgroundMode::ConstantPlusExp {
            let b1 = best.theta[2 * n + 1];
            let gb = best.theta[2 * n + 2];
            let slowest = (0..n).map(comp_rate).fold(f64::MAX, f64::min);
            let degenerate_bg = gb < rate_floor
                || gb > rate_ceiling
                || b1 < amp_floor
                || slowest / gb < options.collapse_ratio;
            if degenerate_bg {
                log::warn!(
                    "background exponential degenerated (b1={b1:.3}, gamma_b={gb:.5}); \
                     refitting with a constant background"
                );
                collapsed = true;
                let reduced = run(n, BackgroundMode::Constant)?;
                shape = reduced.0;
                best = reduced.1;
                continue;
            }
        }

        // Nearly equal component rates are unidentifiable: collapse.
        let mut rates: Vec<f64> = (0..n).map(comp_rate).collect();
        rates.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let degenerate_pair = rates.windows(2).any(|w| w[0] / w[1] < options.collapse_ratio);
        if degenerate_pair && n > 1 {
            log::warn!(
                "collapsing nearly degenerate rates {:?} (ratio threshold {})",
                rates,
                options.collapse_ratio
            );
            collapsed = true;
            let reduced = run(n - 1, shape.background)?;
            shape = reduced.0;
            best = reduced.1;
            continue;
        }
        break;
    }

    // Curvature-based uncertainties in physical coordinates.
    let objective = Objective::Poisson { counts: &counts };
    let hessian = optimize::observed_hessian(&shape, &objective, &best.theta)
        .ok_or(FitError::SingularCurvature)?;
    let (covariance, repaired) =
        covariance_from_hessian(&hessian).ok_or(FitError::SingularCurvature)?;
    if repaired {
        log::warn!("curvature is ill-conditioned; sigmas of flat directions are inflated");
    }

    // Sort components by decreasing rate and permute everything to match.
    let np = shape.n_params();
    let mut order: Vec<usize> = (0..shape.n_components).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (best.theta[2 * a + 1], best.theta[2 * b + 1]);
        rb.partial_cmp(&ra)
            .unwrap()
            .then_with(|| best.theta[2 * b].partial_cmp(&best.theta[2 * a]).unwrap())
    });
    let mut perm: Vec<usize> = Vec::with_capacity(np);
    for &j in &order {
        perm.push(2 * j);
        perm.push(2 * j + 1);
    }
    for k in 2 * shape.n_components..np {
        perm.push(k);
    }

    let parameters: Vec<f64> = perm.iter().map(|&k| best.theta[k]).collect();
    let mut cov = vec![vec![0.0; np]; np];
    for (r, &pr) in perm.iter().enumerate() {
        for (c, &pc) in perm.iter().enumerate() {
            cov[r][c] = covariance[(pr, pc)];
        }
    }
    let sigmas: Vec<f64> = (0..np).map(|k| cov[k][k].max(0.0).sqrt()).collect();

    let mut mu = vec![0.0; shape.t.len()];
    shape.eval(&best.theta, &mut mu, None);
    let goodness = reduced_deviance(&mu, &counts, np);

    let components: Vec<DecayComponent> = order
        .iter()
        .map(|&j| DecayComponent {
            amplitude: best.theta[2 * j],
            rate: best.theta[2 * j + 1],
        })
        .collect();
    let base = 2 * shape.n_components;
    let background = match shape.background {
        BackgroundMode::None => Background::none(),
        BackgroundMode::Constant => Background { b0: best.theta[base], b1: 0.0, gamma_b: 0.0 },
        BackgroundMode::ConstantPlusExp => Background {
            b0: best.theta[base],
            b1: best.theta[base + 1],
            gamma_b: best.theta[base + 2],
        },
    };
    let model = DecayModel::new(components, background)
        .map_err(|e| FitError::InvalidInput(e.to_string()))?;

    let result = FitResult {
        parameter_names: shape.parameter_names(),
        parameters,
        sigmas,
        covariance: cov,
        goodness,
        n_points: shape.t.len(),
        converged: true,
        n_starts_used: best.n_starts_used,
        degenerate_collapsed: collapsed,
    };
    Ok((model, result))
}

/// Generates Poisson-distributed synthetic counts from a decay shape; test
/// and simulation helper kept here so generators and fitters share one model
/// definition.
pub fn synthetic_counts(shape: &DecayShape, theta: &[f64], seed: u64) -> Vec<u64> {
    use rand_distr::{Distribution, Poisson};
    let mut mu = vec![0.0; shape.t.len()];
    shape.eval(theta, &mut mu, None);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    mu.iter()
        .map(|&m| {
            if m <= 0.0 {
                0
            } else {
                Poisson::new(m).map(|p| p.sample(&mut rng) as u64).unwrap_or(0)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn histogram_from_counts(counts: Vec<u64>, bin: f64, rep: f64) -> DecayHistogram {
        let edges: Vec<f64> = (0..=counts.len()).map(|i| i as f64 * bin).collect();
        DecayHistogram::new(edges, counts, rep, 1_000_000).unwrap()
    }

    #[test]
    fn recovers_single_exponential_rate() {
        let bin = 0.05;
        let n_bins = 200;
        let t: Vec<f64> = (0..n_bins).map(|i| (i as f64 + 0.5) * bin).collect();
        let shape = DecayShape {
            t,
            n_components: 1,
            background: BackgroundMode::None,
            irf_sigma_ns: 0.0,
        };
        // ~1e6 total counts.
        let theta = [2.6e4, 1.0];
        let counts = synthetic_counts(&shape, &theta, 42);
        let hist = histogram_from_counts(counts, bin, 13.16);
        let (model, result) =
            fit_decay(&hist, 1, (0.0, 10.0), &DecayFitOptions::default()).unwrap();
        let (gamma, sigma) = result.parameter("gamma1").unwrap();
        assert!((gamma - 1.0).abs() < 0.005, "gamma={gamma} sigma={sigma}");
        assert!(sigma < 0.005);
        assert!(result.converged);
        assert!((model.fastest_rate() - gamma).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_ranges_and_component_counts() {
        let hist = histogram_from_counts(vec![5; 100], 0.05, 13.16);
        assert!(matches!(
            fit_decay(&hist, 0, (0.0, 5.0), &DecayFitOptions::default()),
            Err(FitError::InvalidInput(_))
        ));
        assert!(matches!(
            fit_decay(&hist, 1, (0.0, 50.0), &DecayFitOptions::default()),
            Err(FitError::InvalidRange { .. })
        ));
    }

    #[test]
    fn too_few_nonzero_bins_is_an_error() {
        let mut counts = vec![0u64; 100];
        counts[0] = 10;
        counts[1] = 5;
        let hist = histogram_from_counts(counts, 0.05, 13.16);
        assert!(matches!(
            fit_decay(&hist, 1, (0.0, 5.0), &DecayFitOptions::default()),
            Err(FitError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn collapses_degenerate_pair_with_flag() {
        let bin = 0.05;
        let n_bins = 260;
        let t: Vec<f64> = (0..n_bins).map(|i| (i as f64 + 0.5) * bin).collect();
        let shape = DecayShape {
            t,
            n_components: 2,
            background: BackgroundMode::None,
            irf_sigma_ns: 0.0,
        };
        let counts = synthetic_counts(&shape, &[1.5e4, 6.28, 8.0e3, 2.0], 7);
        let hist = histogram_from_counts(counts, bin, 13.16);
        // A collapse threshold above the true rate ratio forces the
        // degenerate path deterministically.
        let options = DecayFitOptions { collapse_ratio: 10.0, ..Default::default() };
        let (model, result) = fit_decay(&hist, 2, (0.0, 13.0), &options).unwrap();
        assert!(result.degenerate_collapsed);
        assert_eq!(model.components.len(), 1);
    }

    #[test]
    fn auto_component_selection_prefers_one_for_single_exp() {
        let bin = 0.05;
        let t: Vec<f64> = (0..200).map(|i| (i as f64 + 0.5) * bin).collect();
        let shape = DecayShape {
            t,
            n_components: 1,
            background: BackgroundMode::None,
            irf_sigma_ns: 0.0,
        };
        let counts = synthetic_counts(&shape, &[1.0e4, 1.5], 3);
        let hist = histogram_from_counts(counts, bin, 13.16);
        let options = DecayFitOptions { auto_components: true, ..Default::default() };
        let (model, _) = fit_decay(&hist, 3, (0.0, 10.0), &options).unwrap();
        assert_eq!(model.components.len(), 1);
    }
}
