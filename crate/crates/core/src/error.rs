//! Error type shared across the crate.

use thiserror::Error;

use crate::fock::Mode;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mode dimension {dim}: every mode needs at least two levels")]
    InvalidDimension { dim: usize },

    #[error("shape mismatch: {context}")]
    ShapeMismatch { context: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{what} must be equal for closed-form expressions (got {left} and {right})")]
    UnsupportedAsymmetry {
        what: &'static str,
        left: f64,
        right: f64,
    },

    #[error("Hamiltonian must be Hermitian (max deviation {max_dev:.3e})")]
    NonHermitianHamiltonian { max_dev: f64 },

    #[error("steady state is not unique: estimated null-space dimension {null_dim}")]
    NonUniqueSteadyState { null_dim: usize },

    #[error("mode {mode} holds no excitation; correlation undefined")]
    EmptyMode { mode: Mode },

    #[error("mode {mode} is decoupled from the drive; analytic correlation undefined")]
    UndefinedCorrelation { mode: Mode },

    #[error("time step {dt:.3e} too large for generator norm {l_norm:.3e}")]
    StepSizeTooLarge { dt: f64, l_norm: f64 },

    #[error("singular {block} block: parameters sit on a resonance")]
    SingularBlock { block: &'static str },

    #[error("denominator {which} vanishes at these parameters")]
    SingularDenominator { which: &'static str },

    #[error("no optimal drive: denominator polynomial vanishes")]
    NoOptimum,

    #[error("linear solver failed: {0}")]
    SolveFailed(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },

    #[error("unknown sweep parameter `{name}`")]
    UnknownParameter { name: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code: 1 for validation problems, 2 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidDimension { .. }
            | Error::ShapeMismatch { .. }
            | Error::InvalidParams(_)
            | Error::UnsupportedAsymmetry { .. }
            | Error::NonHermitianHamiltonian { .. }
            | Error::Config { .. }
            | Error::UnknownKey { .. }
            | Error::UnknownParameter { .. }
            | Error::Io(_) => 1,
            Error::NonUniqueSteadyState { .. }
            | Error::EmptyMode { .. }
            | Error::UndefinedCorrelation { .. }
            | Error::StepSizeTooLarge { .. }
            | Error::SingularBlock { .. }
            | Error::SingularDenominator { .. }
            | Error::NoOptimum
            | Error::SolveFailed(_) => 2,
        }
    }
}
