use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid operator order m = {0} (must be >= 1)")]
    InvalidOrder(i64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("point {point:?} lies outside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("singular evaluation: x and xi coincide")]
    SingularEvaluation,

    #[error("point {point:?} is within {distance:e} of the boundary (need > {required:e})")]
    BoundaryProximity {
        point: Vec<f64>,
        distance: f64,
        required: f64,
    },

    #[error("potential is not positive at {point:?} (V = {value})")]
    NonPositivePotential { point: Vec<f64>, value: f64 },

    #[error("no standard solution exists for Q = {0} (Q must be positive)")]
    NoStandardSolution(f64),

    #[error("configuration is not in the admissible set M: {0}")]
    NotAdmissible(String),

    #[error("tolerance not met: achieved {achieved:e}, requested {requested:e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("augmented system is rank deficient: {0}")]
    RankDeficient(String),

    #[error("fixed point iteration failed to contract after {iterations} iterations (last norm {last_norm:e})")]
    ContractionFailure { iterations: usize, last_norm: f64 },

    #[error("no critical point found: {0}")]
    NoCriticalPoint(String),

    #[error("multipliers do not vanish: max |c_ij| = {max_abs:e} (tolerance {tolerance:e})")]
    MultipliersNotVanishing { max_abs: f64, tolerance: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidOrder(_)
                | Error::InvalidConfig(_)
                | Error::NotAdmissible(_)
                | Error::NonPositivePotential { .. }
                | Error::Unsupported(_)
                | Error::Parse(_)
                | Error::IndexOutOfRange(_)
                | Error::OutsideDomain { .. }
                | Error::NoStandardSolution(_)
        )
    }
}
