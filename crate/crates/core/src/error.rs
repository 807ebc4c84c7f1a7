use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates one of its invariants.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A state lies outside the domain of a constitutive law.
    #[error("state out of range: {0}")]
    OutOfRange(String),

    /// Gas saturation would reach the residual-liquid cap.
    #[error("liquid depletion: X = {x:e} at p_l = {p_l:e} Pa exceeds the admissible maximum {x_max:e}")]
    LiquidDepletion { p_l: f64, x: f64, x_max: f64 },

    /// A bracketed scalar solve found no sign change.
    #[error("no root in bracket: {0}")]
    NoBracket(String),

    /// The linear system could not be factorized or solved accurately.
    #[error("singular or ill-conditioned linear system: {0}")]
    SingularMatrix(String),

    #[error("Newton iteration did not converge: {0}")]
    NewtonDivergence(String),

    #[error("time step fell below dt_min = {dt_min:e} s at t = {t:e} s: {cause}")]
    TimeStepTooSmall { t: f64, dt_min: f64, cause: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
