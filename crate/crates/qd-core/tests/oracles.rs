//! Independent numerical oracles for the rate model: direct 2x2
//! diagonalization for the eigenrates and Monte Carlo resampling for the
//! propagated beta uncertainty.

use nalgebra::Matrix2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use qd_core::{beta_from_measured, solve_level_dynamics, DipoleAxis, Measurement, RateSet};

#[test]
fn eigenrates_match_numerical_diagonalization() {
    // gamma_f = 6.28 and gamma_s = 0.098 with symmetric weak spin flips.
    let rates = RateSet {
        gamma_rad_bright_x: 6.23,
        gamma_rad_bright_y: 6.23,
        gamma_nr_bright: 0.04,
        gamma_nr_dark: 0.088,
        gamma_bd: 0.01,
        gamma_db: 0.01,
    };
    let gamma_f = rates.gamma_fast(DipoleAxis::X);
    let gamma_s = rates.gamma_slow();
    let m = Matrix2::new(-gamma_f, rates.gamma_db, rates.gamma_bd, -gamma_s);
    let eigenvalues = m.eigenvalues().expect("real spectrum");
    let mut rates_sorted: Vec<f64> = eigenvalues.iter().map(|l| -l).collect();
    rates_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let dynamics = solve_level_dynamics(&rates, 1.0, 0.0, DipoleAxis::X).unwrap();
    assert!((dynamics.eigenrate_fast - rates_sorted[0]).abs() < 1e-10);
    assert!((dynamics.eigenrate_slow - rates_sorted[1]).abs() < 1e-10);
    // Eigenrates stay within 1e-4 of the composite rates for weak flips.
    assert!((dynamics.eigenrate_fast - 6.28).abs() < 1e-4);
    assert!((dynamics.eigenrate_slow - 0.098).abs() < 1e-4);
}

#[test]
fn biexponential_matches_rk4_integration() {
    let rates = RateSet {
        gamma_rad_bright_x: 2.7,
        gamma_rad_bright_y: 1.1,
        gamma_nr_bright: 0.2,
        gamma_nr_dark: 0.12,
        gamma_bd: 0.35,
        gamma_db: 0.18,
    };
    let dynamics = solve_level_dynamics(&rates, 0.25, 0.25, DipoleAxis::Y).unwrap();

    let gamma_f = rates.gamma_fast(DipoleAxis::Y);
    let gamma_s = rates.gamma_slow();
    let deriv = |b: f64, d: f64| -> (f64, f64) {
        (-gamma_f * b + rates.gamma_db * d, rates.gamma_bd * b - gamma_s * d)
    };
    let (mut b, mut d) = (0.25_f64, 0.25_f64);
    let h = 1e-4;
    let mut t = 0.0;
    while t < 3.0 {
        let (k1b, k1d) = deriv(b, d);
        let (k2b, k2d) = deriv(b + 0.5 * h * k1b, d + 0.5 * h * k1d);
        let (k3b, k3d) = deriv(b + 0.5 * h * k2b, d + 0.5 * h * k2d);
        let (k4b, k4d) = deriv(b + h * k3b, d + h * k3d);
        b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        d += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        t += h;
    }
    assert!((dynamics.bright_population(t) - b).abs() < 1e-9);
    assert!((dynamics.dark_population(t) - d).abs() < 1e-9);
}

#[test]
fn beta_sigma_matches_monte_carlo_resampling() {
    let gamma_c = Measurement::new(6.28, 0.15).unwrap();
    let gamma_uc = Measurement::new(0.098, 0.001).unwrap();
    let analytic = beta_from_measured(gamma_c, gamma_uc).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let dist_c = Normal::new(gamma_c.value, gamma_c.sigma).unwrap();
    let dist_uc = Normal::new(gamma_uc.value, gamma_uc.sigma).unwrap();
    let n = 100_000;
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let gc: f64 = dist_c.sample(&mut rng);
        let guc: f64 = dist_uc.sample(&mut rng);
        samples.push((gc - guc) / gc);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|b| (b - mean) * (b - mean)).sum::<f64>() / (n - 1) as f64;
    let mc_sigma = var.sqrt();

    assert!(
        (analytic.beta_sigma - mc_sigma).abs() / mc_sigma < 0.10,
        "first-order sigma {} vs Monte Carlo {}",
        analytic.beta_sigma,
        mc_sigma
    );
    // Frozen from the resampling oracle: sigma_beta ~ 4.0e-4.
    assert!((analytic.beta_sigma - 4.0e-4).abs() < 0.2e-4);
}
