use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("a(x) must be positive, got {value} at x = {x}")]
    PositivityViolation { x: f64, value: f64 },

    #[error("generator derivative g'(x) vanishes or is not finite at x = {x}")]
    SingularGenerator { x: f64 },

    #[error("{what} = {value:e} at x = {x} exceeds the supported range")]
    Range { what: &'static str, x: f64, value: f64 },

    #[error("omega^2 - 4 alpha beta = {0} is not positive, the harmonic spectrum is not real")]
    NoRealSpectrum(f64),

    #[error("Delta = {0} is not positive, lambda is not real")]
    ComplexLambda(f64),

    #[error("factorization requires alpha = 0 or beta = 0 (alpha = {alpha}, beta = {beta})")]
    NotFactorizable { alpha: f64, beta: f64 },

    #[error("expression error at column {column}: {message}")]
    Expression { column: usize, message: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("requested {k} levels from a matrix of dimension {dim}")]
    LevelOutOfRange { k: usize, dim: usize },

    #[error("matrix dimension {dim} exceeds the dense solver limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("matrix is not {0}")]
    MatrixShape(&'static str),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Numeric failures as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::Range { .. }
                | Error::SingularGenerator { .. }
                | Error::PositivityViolation { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::PositivityViolation { .. } => "positivity_violation",
            Error::SingularGenerator { .. } => "singular_generator",
            Error::Range { .. } => "range",
            Error::NoRealSpectrum(_) => "no_real_spectrum",
            Error::ComplexLambda(_) => "complex_lambda",
            Error::NotFactorizable { .. } => "not_factorizable",
            Error::Expression { .. } => "expression",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::LevelOutOfRange { .. } => "level_out_of_range",
            Error::DimensionTooLarge { .. } => "dimension_too_large",
            Error::MatrixShape(_) => "matrix_shape",
            Error::NoConvergence { .. } => "no_convergence",
        }
    }
}
