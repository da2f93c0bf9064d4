use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what}: argument {value} is outside the domain")]
    Domain { what: &'static str, value: String },

    #[error("omega = {0} lies on the branch cut (-inf, 0]")]
    BranchCut(String),

    #[error("beta(omega) vanishes at omega = {omega}: |beta| = {magnitude:e}")]
    Pole { omega: String, magnitude: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("decomposition is not in the operator domain: coeff = {coeff}, g(0)/beta = {expected}")]
    DomainMembership { coeff: String, expected: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Picard iteration is not contracting (ratios {ratios:?})")]
    NonContraction { ratios: Vec<f64> },

    #[error("Picard iteration did not reach tolerance {tol:e} in {iterations} iterations (residual {residual:e})")]
    ToleranceNotMet {
        tol: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
