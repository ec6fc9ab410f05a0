use thiserror::Error;

use crate::model::ResonanceReport;

/// Errors produced by the simulator.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    ModelInvalid(String),

    #[error("drives are not resonant (max |detuning| = {:.3e})", .0.max_abs_detuning())]
    NotResonant(ResonanceReport),

    #[error("all couplings are zero")]
    AllZeroCouplings,

    #[error("closed form is singular for these couplings: {0}")]
    DegenerateSpectrum(String),

    #[error("eigensolver did not converge for eigenvalue {index} within {sweeps} sweeps")]
    ConvergenceFailure { index: usize, sweeps: usize },

    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),

    #[error("level index {index} out of range for {dim} levels")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("closed form requires 1 to 4 couplings, got {0}")]
    UnsupportedDimension(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
