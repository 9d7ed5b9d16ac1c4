use thiserror::Error;

/// Errors raised by the numerical toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {constraint}")]
    InvalidParameter { name: &'static str, constraint: String },

    #[error("hypergeometric series did not converge after {terms} terms (last term {last_term:e}, partial sum {partial_sum:e})")]
    SeriesNonConvergence {
        terms: usize,
        last_term: f64,
        partial_sum: f64,
    },

    #[error("ODE step size underflow at r = {r:e} (step {step:e})")]
    StepUnderflow { r: f64, step: f64 },

    #[error("quadrature did not converge: achieved error estimate {achieved:e}, target {target:e}")]
    QuadratureNonConvergence { achieved: f64, target: f64 },

    #[error("gamma pole proximity at spectral parameter {lambda:e}")]
    GammaPole { lambda: f64 },

    #[error("jacobi index resolution failed: residuals {residuals:?} exceed tolerance {tolerance:e}")]
    JacobiResolution { residuals: Vec<f64>, tolerance: f64 },

    #[error("insufficient spectral decay: {0}")]
    InsufficientDecay(String),

    #[error("divergent modeled tail: {0}")]
    DivergentTail(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("lower bound constant {value:e} is below {floor:e}")]
    DegenerateLowerBound { value: f64, floor: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("profile format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, constraint: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        constraint: constraint.into(),
    }
}
