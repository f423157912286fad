use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("coincidence window {window_ns} ns must cover at least one repetition period {rep_period_ns} ns")]
    WindowTooShort { window_ns: f64, rep_period_ns: f64 },

    #[error("invalid Fabry-Perot scene: {0}")]
    InvalidScene(String),

    #[error("core error: {0}")]
    Core(#[from] qd_core::CoreError),
}
