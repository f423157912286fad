use thiserror::Error;

/// Errors for rate arithmetic, level dynamics, and mode-table loading.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("rate `{name}` must be finite and non-negative, got {value}")]
    InvalidRate { name: &'static str, value: f64 },

    #[error("emission split has no decay channel (all rates zero)")]
    EmptySplit,

    #[error("initial populations must be non-negative, got bright={bright}, dark={dark}")]
    NegativePopulation { bright: f64, dark: f64 },

    #[error("initial populations sum to {sum}, must not exceed 1")]
    PopulationOverflow { sum: f64 },

    #[error("coupled rate must exceed uncoupled rate, got gamma_c={gamma_c} ns^-1, gamma_uc={gamma_uc} ns^-1")]
    RateOrdering { gamma_c: f64, gamma_uc: f64 },

    #[error("rate must be strictly positive, got {value} ns^-1")]
    NonPositiveRate { value: f64 },

    #[error("uncertainty must be finite and non-negative, got {value}")]
    InvalidSigma { value: f64 },

    #[error("group index must be >= 1, got {value}")]
    InvalidGroupIndex { value: f64 },

    #[error("mode table line {line}: {msg}")]
    ModeTable { line: usize, msg: String },

    #[error("decay model components must have non-negative amplitudes and positive rates")]
    InvalidDecayModel,

    #[error("histogram is malformed: {msg}")]
    InvalidHistogram { msg: String },
}
