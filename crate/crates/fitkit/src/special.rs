//! Special functions for the IRF-convolved exponential model.

use statrs::function::erf::erfc;

/// Scaled complementary error function `exp(x^2) erfc(x)`, stable for large
/// positive arguments.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        // erfcx(-x) = 2 exp(x^2) - erfcx(x); only safe for moderate |x|.
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x <= 25.0 {
        // erfc(25) ~ 8e-274 is still normal, so the log path is exact enough.
        let e = erfc(x);
        (x * x + e.ln()).exp()
    } else {
        // Asymptotic series: 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - ...).
        let ix2 = 1.0 / (x * x);
        (1.0 - 0.5 * ix2 * (1.0 - 1.5 * ix2 * (1.0 - 2.5 * ix2 * (1.0 - 3.5 * ix2))))
            / (x * std::f64::consts::PI.sqrt())
    }
}

/// Causal exponential `exp(-rate t) theta(t)` convolved with a Gaussian of
/// standard deviation `sigma`, evaluated at `t`.
///
/// Reduces to the plain exponential at `sigma = 0`.
pub fn smeared_exp(t: f64, rate: f64, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return if t >= 0.0 { (-rate * t).exp() } else { 0.0 };
    }
    let v = (rate * sigma * sigma - t) / (sigma * std::f64::consts::SQRT_2);
    if v <= 0.0 {
        let u = 0.5 * rate * rate * sigma * sigma - rate * t;
        0.5 * u.exp() * erfc(v)
    } else {
        0.5 * (-t * t / (2.0 * sigma * sigma)).exp() * erfcx(v)
    }
}

/// Derivative of [`smeared_exp`] with respect to the rate.
pub fn smeared_exp_drate(t: f64, rate: f64, sigma: f64) -> f64 {
    if sigma <= 0.0 {
        return if t >= 0.0 { -t * (-rate * t).exp() } else { 0.0 };
    }
    let gauss = (-t * t / (2.0 * sigma * sigma)).exp();
    (rate * sigma * sigma - t) * smeared_exp(t, rate, sigma)
        - sigma / (2.0 * std::f64::consts::PI).sqrt() * gauss
}
