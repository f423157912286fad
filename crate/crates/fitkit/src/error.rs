use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {needed} data points with signal, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("invalid fit range: {msg}")]
    InvalidRange { msg: String },

    #[error("fit did not converge after {n_starts} starts")]
    NonConvergence { n_starts: usize },

    #[error("singular curvature at the optimum; parameter uncertainties are undefined")]
    SingularCurvature,

    #[error("{failed} of {total} bootstrap resamples failed to fit")]
    TooManyResampleFailures { failed: usize, total: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
