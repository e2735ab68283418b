use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("time scale needs at least one segment")]
    EmptyScale,
    #[error("segment [{lo}, {hi}] has lo > hi")]
    BadSegment { lo: f64, hi: f64 },
    #[error("point {0} is not in the time scale")]
    NotInScale(f64),
    #[error("range [{a}, {b}] is empty")]
    EmptyRange { a: f64, b: f64 },
    #[error("delta derivative undefined at left-scattered maximum {0}")]
    DegeneratePoint(f64),
    #[error("h_k recursion depth {0} exceeds the cap of 4")]
    DepthExceeded(u32),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("invalid parameter function: {0}")]
    InvalidParamFunction(String),

    #[error("invalid quadrature config: {0}")]
    InvalidConfig(String),

    #[error("weight derivative {value} at t = {t} is below the positivity floor")]
    NonPositiveWeight { t: f64, value: f64 },
    #[error("point {0} outside the kernel window")]
    OutOfWindow(f64),
    #[error("shift point {0} is not in the time scale")]
    ShiftNotInScale(f64),
    #[error("weight must be the identity w(t) = t for this check")]
    WeightNotIdentity,
    #[error("window is not a single continuous segment")]
    NotContinuousScale,
    #[error("time scale is not a unit-step integer scale on the required range: {0}")]
    NotIntegerScale(String),

    #[error("scenario parse error at {location}: {message}")]
    ScenarioParse { location: String, message: String },
    #[error("scenario validation failed on `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Failures that mean a corollary's side condition does not hold for the
    /// given instance, as opposed to a broken input or a numerical fault.
    pub fn is_hypothesis_gap(&self) -> bool {
        matches!(
            self,
            Error::ShiftNotInScale(_)
                | Error::WeightNotIdentity
                | Error::NotContinuousScale
                | Error::NotIntegerScale(_)
                | Error::DegeneratePoint(_)
                | Error::OutOfWindow(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyScale => "EmptyScale",
            Error::BadSegment { .. } => "BadSegment",
            Error::NotInScale(_) => "NotInScale",
            Error::EmptyRange { .. } => "EmptyRange",
            Error::DegeneratePoint(_) => "DegeneratePoint",
            Error::DepthExceeded(_) => "DepthExceeded",
            Error::Syntax { .. } => "SyntaxError",
            Error::UnknownIdentifier { .. } => "UnknownIdentifier",
            Error::Domain(_) => "DomainError",
            Error::OutOfRange(_) => "OutOfRange",
            Error::InvalidParamFunction(_) => "InvalidParamFunction",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NonPositiveWeight { .. } => "NonPositiveWeight",
            Error::OutOfWindow(_) => "OutOfWindow",
            Error::ShiftNotInScale(_) => "ShiftNotInScale",
            Error::WeightNotIdentity => "WeightNotIdentity",
            Error::NotContinuousScale => "NotContinuousScale",
            Error::NotIntegerScale(_) => "NotIntegerScale",
            Error::ScenarioParse { .. } => "ParseError",
            Error::Validation { .. } => "ValidationError",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
