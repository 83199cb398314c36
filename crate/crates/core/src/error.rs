use thiserror::Error;

use crate::lindblad::Basis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// θ sits on 0 or π, where x = r·cot⁴(θ/2) is singular.
    #[error("degenerate dressing angle θ = {theta}: x diverges or vanishes")]
    DegenerateAngle { theta: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is in the {found:?} basis, expected {expected:?}")]
    WrongBasis { expected: Basis, found: Basis },

    #[error("value out of representable range: {0}")]
    Range(String),

    /// x = 1 is the branch point between the two ergotropy/mean-field branches.
    #[error("x = {x} is at the branch point x = 1")]
    BranchPoint { x: f64 },

    #[error("no sign change of the root function on [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("step size {step:e} underflowed at t = {t}")]
    StepUnderflow { t: f64, step: f64 },

    #[error("density matrix lost positivity at t = {t}: min eigenvalue {min_eigval:e}")]
    PositivityViolation { t: f64, min_eigval: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::PositivityViolation { .. }
                | Error::BracketFailure { .. }
        )
    }
}
