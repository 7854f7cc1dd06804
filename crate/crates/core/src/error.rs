use thiserror::Error;

/// Errors raised by the circuit, spectral, projection and Monte Carlo layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("{matrix} matrix is not symmetric positive-definite: {reason}")]
    NotPositiveDefinite { matrix: &'static str, reason: String },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("potential minimization did not converge after {iterations} iterations (best value {best_value} GHz at {best_point:?})")]
    MinimizationFailed {
        iterations: usize,
        best_point: Vec<f64>,
        best_value: f64,
    },

    #[error("flux grid too small: minimum at {minimum:?} lies within {margin} of the grid boundary (half-width {half_width})")]
    GridTooSmall {
        minimum: Vec<f64>,
        margin: f64,
        half_width: f64,
    },

    #[error("eigensolver converged {converged} of {requested} requested states")]
    EigenNotConverged { requested: usize, converged: usize },

    #[error("spectrum truncated: highest retained level carries relative Boltzmann weight {weight:e}; roughly {required} levels are needed")]
    Truncated { weight: f64, required: usize },

    #[error("states are not parity-paired: {0}")]
    NotParityPaired(String),

    #[error("unknown operator '{0}'")]
    UnknownOperator(String),

    #[error("series too short for autocorrelation analysis: {len} samples (need at least {min})")]
    SeriesTooShort { len: usize, min: usize },

    #[error("series has zero variance; autocorrelation time is undefined")]
    DegenerateSeries,

    #[error("Markov chain failed to mix: no move accepted during {0} equilibration iterations")]
    MixingFailure(usize),

    #[error("invalid Monte Carlo configuration: {0}")]
    InvalidConfig(String),

    #[error("model is not a transverse-field Ising model: {0}")]
    NotTim(String),

    #[error("config parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
