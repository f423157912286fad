//! Fit report container shared by all fitters.

use serde::{Deserialize, Serialize};

/// Parameters, uncertainties, and diagnostics of a completed fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub parameter_names: Vec<String>,
    pub parameters: Vec<f64>,
    /// Standard errors, `sqrt(diag(covariance))`.
    pub sigmas: Vec<f64>,
    /// Covariance matrix, row-major by parameter order.
    pub covariance: Vec<Vec<f64>>,
    /// Reduced Poisson deviance or reduced chi-squared.
    pub goodness: f64,
    pub n_points: usize,
    pub converged: bool,
    pub n_starts_used: usize,
    /// Set when nearly degenerate rates were collapsed into one component.
    pub degenerate_collapsed: bool,
}

impl FitResult {
    /// Looks up a parameter and its sigma by name.
    pub fn parameter(&self, name: &str) -> Option<(f64, f64)> {
        self.parameter_names
            .iter()
            .position(|n| n == name)
            .map(|i| (self.parameters[i], self.sigmas[i]))
    }
}
