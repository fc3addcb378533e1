use crate::classify::PartialMultiplicityFunction;
use crate::matkit::C64;
use crate::models::Corner;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid tolerance policy: {0}")]
    InvalidPolicy(String),

    #[error("eigensolver failed to converge")]
    EigenFailed,

    #[error("dimension {n} exceeds the limit {cap}; pass the force flag to override")]
    TooLarge { n: usize, cap: usize },

    #[error("energy {energy} is numerically an eigenvalue (|q| = {denominator:.3e})")]
    AtResonance { energy: C64, denominator: f64 },

    #[error("energy {energy} is not an eigenvalue: {detail}")]
    NotAnEigenvalue { energy: C64, detail: String },

    #[error("inconsistent ranks: {0}")]
    InconsistentRanks(String),

    #[error("mode ranks and the power-rank oracle disagree: modes {modes}, oracle {oracle}")]
    OracleDisagreement {
        modes: PartialMultiplicityFunction,
        oracle: PartialMultiplicityFunction,
    },

    #[error("window collides with another eigenvalue at distance {distance:.3e}")]
    WindowCollision { distance: f64 },

    #[error("perturbation ladder reaches the collision scale: {0}")]
    LadderCollision(String),

    #[error("{0} is not applicable here")]
    Inapplicable(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no state is localized at corner {0}")]
    NoCornerState(Corner),
}
