//! Temporary diagnostic probe (removed before release).

use fitkit::decay::{synthetic_counts, BackgroundMode, DecayShape};
use fitkit::optimize::{minimize, Objective, OptimOptions, ParamSpace};

#[test]
#[ignore]
fn probe_triple_exp_from_truth() {
    let bin = 0.02;
    let n_bins = 2400;
    let shape = DecayShape {
        t: (0..n_bins).map(|i| (i as f64 + 0.5) * bin).collect(),
        n_components: 3,
        background: BackgroundMode::ConstantPlusExp,
        irf_sigma_ns: 0.0,
    };
    let truth = [4.0e4, 6.28, 6.0e3, 2.0, 400.0, 0.098, 30.0, 150.0, 0.35];
    let counts: Vec<f64> = synthetic_counts(&shape, &truth, 12)
        .into_iter()
        .map(|c| c as f64)
        .collect();
    let objective = Objective::Poisson { counts: &counts };
    let transforms = ParamSpace::Log.transforms(9);
    for max_iter in [300, 2000] {
        let outcome = minimize(
            &shape,
            &objective,
            &transforms,
            &truth,
            &OptimOptions { max_iter, ..Default::default() },
        )
        .unwrap();
        eprintln!(
            "max_iter={max_iter}: converged={} n_iter={} value={:.6} theta={:?}",
            outcome.converged, outcome.n_iter, outcome.value, outcome.theta
        );
    }
}

#[test]
#[ignore]
fn probe_triple_exp_multistart() {
    use fitkit::{fit_decay, DecayFitOptions};
    use qd_core::DecayHistogram;
    let bin = 0.02;
    let n_bins = 2400;
    let shape = DecayShape {
        t: (0..n_bins).map(|i| (i as f64 + 0.5) * bin).collect(),
        n_components: 3,
        background: BackgroundMode::ConstantPlusExp,
        irf_sigma_ns: 0.0,
    };
    let truth = [4.0e4, 6.28, 6.0e3, 2.0, 400.0, 0.098, 30.0, 150.0, 0.35];
    let counts = synthetic_counts(&shape, &truth, 12);
    let edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 * bin).collect();
    let hist = DecayHistogram::new(edges, counts, 50.0, 10_000_000).unwrap();
    for (starts, iters) in [(10usize, 300usize), (10, 1500), (16, 1500)] {
        let options = DecayFitOptions {
            background: BackgroundMode::ConstantPlusExp,
            n_starts: starts,
            max_iter: iters,
            ..Default::default()
        };
        match fit_decay(&hist, 3, (0.0, 47.0), &options) {
            Ok((model, fit)) => eprintln!(
                "starts={starts} iters={iters}: OK rates={:?} goodness={:.3}",
                model.components.iter().map(|c| c.rate).collect::<Vec<_>>(),
                fit.goodness
            ),
            Err(e) => eprintln!("starts={starts} iters={iters}: ERR {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_trajectory_from_ladder_start() {
    let bin = 0.02;
    let n_bins = 2400;
    let shape = DecayShape {
        t: (0..n_bins).map(|i| (i as f64 + 0.5) * bin).collect(),
        n_components: 3,
        background: BackgroundMode::ConstantPlusExp,
        irf_sigma_ns: 0.0,
    };
    let truth = [4.0e4, 6.28, 6.0e3, 2.0, 400.0, 0.098, 30.0, 150.0, 0.35];
    let counts: Vec<f64> = synthetic_counts(&shape, &truth, 12)
        .into_iter()
        .map(|c| c as f64)
        .collect();
    let objective = Objective::Poisson { counts: &counts };
    let transforms = ParamSpace::Log.transforms(9);
    // Ladder-like rate seeds with least-squares-ish amplitudes.
    let start = [5.0e3, 0.0242, 5.0e3, 0.295, 5.0e3, 3.94, 100.0, 100.0, 0.0213];
    for max_iter in [1, 5, 10, 20, 40, 80, 160, 300] {
        let outcome = minimize(
            &shape,
            &objective,
            &transforms,
            &start,
            &OptimOptions { max_iter, ..Default::default() },
        )
        .unwrap();
        eprintln!(
            "iter<={max_iter}: n={} conv={} v={:.3} rates=({:.4},{:.4},{:.4}) gb={:.4}",
            outcome.n_iter, outcome.converged, outcome.value,
            outcome.theta[1], outcome.theta[3], outcome.theta[5], outcome.theta[8]
        );
    }
}

#[test]
#[ignore]
fn probe_each_ladder_start() {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    let bin = 0.02;
    let n_bins = 2400;
    let shape = DecayShape {
        t: (0..n_bins).map(|i| (i as f64 + 0.5) * bin).collect(),
        n_components: 3,
        background: BackgroundMode::ConstantPlusExp,
        irf_sigma_ns: 0.0,
    };
    let truth = [4.0e4, 6.28, 6.0e3, 2.0, 400.0, 0.098, 30.0, 150.0, 0.35];
    let counts: Vec<f64> = synthetic_counts(&shape, &truth, 12)
        .into_iter()
        .map(|c| c as f64)
        .collect();
    let objective = Objective::Poisson { counts: &counts };
    let transforms = ParamSpace::Log.transforms(9);
    let (t_span, t_bin) = (47.0_f64, 0.02_f64);
    let (ln_lo, ln_hi) = ((1.0 / t_span).ln(), (1.0 / t_bin).ln());
    let n_starts = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for start in 0..n_starts {
        let mut rates: Vec<f64> = (0..3)
            .map(|j| {
                let stagger = (start as f64 + 0.5) / n_starts as f64;
                let u = (j as f64 + stagger) / 3.0;
                let jitter: f64 = 0.15 * (rng.random::<f64>() - 0.5);
                (ln_lo + u * (ln_hi - ln_lo) + jitter).exp()
            })
            .collect();
        rates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let gb = (1u32 << (2 * (start % 3))) as f64 / t_span;
        let theta0 = [3e3, rates[0], 3e3, rates[1], 3e3, rates[2], 100.0, 100.0, gb];
        let out = minimize(&shape, &objective, &transforms, &theta0, &OptimOptions { max_iter: 300, ..Default::default() }).unwrap();
        eprintln!(
            "start {start}: conv={} v={:.2} rates=({:.4},{:.4},{:.4}) bg=({:.2},{:.2},{:.4})",
            out.converged, out.value, out.theta[1], out.theta[3], out.theta[5],
            out.theta[6], out.theta[7], out.theta[8]
        );
    }
}

#[test]
#[ignore]
fn probe_winner_hessian() {
    use fitkit::optimize::{gradient_physical, observed_hessian, Objective};
    let bin = 0.02;
    let n_bins = 2400;
    let shape = DecayShape {
        t: (0..n_bins).map(|i| (i as f64 + 0.5) * bin).collect(),
        n_components: 3,
        background: BackgroundMode::ConstantPlusExp,
        irf_sigma_ns: 0.0,
    };
    let truth = [4.0e4, 6.28, 6.0e3, 2.0, 400.0, 0.098, 30.0, 300.0, 0.03];
    let counts: Vec<f64> = synthetic_counts(&shape, &truth, 12)
        .into_iter()
        .map(|c| c as f64)
        .collect();
    let objective = Objective::Poisson { counts: &counts };
    let transforms = ParamSpace::Log.transforms(9);
    let outcome = minimize(&shape, &objective, &transforms, &truth,
        &OptimOptions { max_iter: 300, ..Default::default() }).unwrap();
    eprintln!("from truth: v={:.3} theta={:?}", outcome.value, outcome.theta);
    let g = gradient_physical(&shape, &objective, &outcome.theta).unwrap();
    eprintln!("gradient: {:?}", g);
    let h = observed_hessian(&shape, &objective, &outcome.theta).unwrap();
    let eig = h.symmetric_eigenvalues();
    eprintln!("hessian eigenvalues: {:?}", eig.iter().collect::<Vec<_>>());
}

#[test]
#[ignore]
fn probe_hard_triple_fit_outcome() {
    use fitkit::{fit_decay, DecayFitOptions};
    use qd_core::DecayHistogram;
    let bin = 0.02;
    let n_bins = 2400;
    let shape = DecayShape {
        t: (0..n_bins).map(|i| (i as f64 + 0.5) * bin).collect(),
        n_components: 3,
        background: BackgroundMode::ConstantPlusExp,
        irf_sigma_ns: 0.0,
    };
    let truth = [4.0e4, 6.28, 6.0e3, 2.0, 400.0, 0.098, 30.0, 300.0, 0.03];
    let counts = synthetic_counts(&shape, &truth, 12);
    let edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 * bin).collect();
    let hist = DecayHistogram::new(edges, counts, 50.0, 10_000_000).unwrap();
    for n_starts in [10usize, 16, 24] {
        let options = DecayFitOptions {
            background: BackgroundMode::ConstantPlusExp,
            n_starts,
            ..Default::default()
        };
        match fit_decay(&hist, 3, (0.0, 47.0), &options) {
            Ok((model, fit)) => eprintln!(
                "starts={n_starts}: comps={:?} bg=({:.2},{:.2},{:.4}) collapsed={} goodness={:.3}",
                model.components.iter().map(|c| (c.amplitude.round(), c.rate)).collect::<Vec<_>>(),
                model.background.b0, model.background.b1, model.background.gamma_b,
                fit.degenerate_collapsed, fit.goodness
            ),
            Err(e) => eprintln!("starts={n_starts}: ERR {e}"),
        }
    }
}

#[test]
#[ignore]
fn probe_cascade_levels() {
    use fitkit::{fit_decay, DecayFitOptions};
    use qd_core::DecayHistogram;
    let bin = 0.02;
    let n_bins = 2400;
    let shape = DecayShape {
        t: (0..n_bins).map(|i| (i as f64 + 0.5) * bin).collect(),
        n_components: 3,
        background: BackgroundMode::ConstantPlusExp,
        irf_sigma_ns: 0.0,
    };
    let truth = [4.0e4, 6.28, 6.0e3, 2.0, 400.0, 0.098, 30.0, 300.0, 0.03];
    let counts = synthetic_counts(&shape, &truth, 12);
    let edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 * bin).collect();
    let hist = DecayHistogram::new(edges, counts, 50.0, 10_000_000).unwrap();
    for n in 1..=3usize {
        let options = DecayFitOptions {
            background: BackgroundMode::ConstantPlusExp,
            n_starts: 10,
            ..Default::default()
        };
        match fit_decay(&hist, n, (0.0, 47.0), &options) {
            Ok((model, fit)) => eprintln!(
                "n={n}: comps={:?} bg=({:.2},{:.2},{:.5}) collapsed={} goodness={:.3}",
                model.components.iter().map(|c| (c.amplitude.round(), (c.rate * 1e4).round() / 1e4)).collect::<Vec<_>>(),
                model.background.b0, model.background.b1, model.background.gamma_b,
                fit.degenerate_collapsed, fit.goodness
            ),
            Err(e) => eprintln!("n={n}: ERR {e}"),
        }
    }
}
