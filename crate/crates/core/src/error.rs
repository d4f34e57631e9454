use thiserror::Error;

/// Errors raised by the simulation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {left} sites vs {right} sites")]
    LengthMismatch { left: usize, right: usize },

    #[error("site {site} out of range for a {num_sites}-site system")]
    SiteOutOfRange { site: usize, num_sites: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("{requested} sites exceeds the limit of {limit}")]
    TooManySites { requested: usize, limit: usize },

    #[error("operator is not Hermitian")]
    NotHermitian,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite Hamiltonian coefficient at t = {0}")]
    NonFinite(f64),

    #[error("step size underflow: no convergence to tol {tol:e} after {steps} steps")]
    StepUnderflow { tol: f64, steps: usize },

    #[error("norm drift {0:e} exceeds the renormalization limit")]
    NormDrift(f64),

    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("chain unstable: transverse mode {mode} has eigenvalue {eigenvalue:e}; the linear chain buckles into a zig-zag, raise omega_x/omega_z")]
    UnstableChain { mode: usize, eigenvalue: f64 },

    #[error("detuning within {guard:e} rad/s of mode {mode} (denominator {denominator:e} rad/s)")]
    Resonance {
        mode: usize,
        denominator: f64,
        guard: f64,
    },

    #[error("flip probability {probability} > 1 on site {site}; the time slice is too coarse")]
    ProbabilityOutOfRange { site: usize, probability: f64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
