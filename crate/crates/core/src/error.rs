use crate::ComplexValue;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("evaluation at {z} is within {distance:e} of the pole at {pole}")]
    PoleProximity {
        z: ComplexValue,
        pole: ComplexValue,
        distance: f64,
    },
    #[error("non-finite value at {z}")]
    NonFinite { z: ComplexValue },
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("polynomial degree {degree} exceeds the cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("point {point} lies on the path")]
    PointOnPath { point: ComplexValue },
    #[error("winding number residual {residual} too large at {point}")]
    WindingResidual { point: ComplexValue, residual: f64 },
    #[error("homology basis construction failed for hole {hole}: {msg}")]
    BasisConstruction { hole: usize, msg: String },
    #[error("quadrature budget exhausted after {panels} panels")]
    BudgetExhausted { panels: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("path leaves the domain near {point}")]
    OutsideDomain { point: ComplexValue },
    #[error("pole at {pole} lies inside the domain")]
    PoleInDomain { pole: ComplexValue },
    #[error("no holomorphic extension: moment of degree {degree} on hole {hole} does not vanish")]
    ExtensionRefused { hole: usize, degree: usize },
    #[error("winding precondition violated: {0}")]
    WindingPrecondition(String),
    #[error("insufficient sampling: {got} samples, need at least {need}")]
    InsufficientSampling { got: usize, need: usize },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("point {point} is too close to the curve (distance {distance:e}, need {required:e})")]
    TooCloseToCurve {
        point: ComplexValue,
        distance: f64,
        required: f64,
    },
    #[error("normal estimation failed at corner sample {index}")]
    CornerPoint { index: usize },
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
