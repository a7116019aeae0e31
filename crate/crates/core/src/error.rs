use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cutoff L = {cutoff} is too small for packet width {width} (need L >= {required})")]
    CutoffInsufficient {
        cutoff: usize,
        width: f64,
        required: usize,
    },

    #[error("step size too large: local phase increment {phase:.3e} rad exceeds {limit} rad")]
    StepSize { phase: f64, limit: f64 },

    #[error("imaginary-time relaxation did not converge after {steps} steps (last energy change {last_change:.3e})")]
    Convergence { steps: usize, last_change: f64 },

    #[error("no revival above fidelity {threshold} in window [{lo}, {hi}] (best {best:.4})")]
    RevivalNotFound {
        lo: f64,
        hi: f64,
        best: f64,
        threshold: f64,
    },

    #[error("population imbalance is indeterminate: weighted counts sum to {0:.3e}")]
    IndeterminateImbalance(f64),

    #[error("circular centroid undefined: resultant length {0:.3e}")]
    CentroidUndefined(f64),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
