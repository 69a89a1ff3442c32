use thiserror::Error;

/// Errors raised by the geometry kernels, the solution catalog and the verification drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector is null or zero and cannot be normalized")]
    NullOrZeroVector,
    #[error("vectors do not form a valid causal pair for a Lorentz angle")]
    InvalidCausalPair,
    #[error("vectors are linearly dependent")]
    DegenerateSpan,
    #[error("polynomial degree {0} exceeds the supported maximum of 4")]
    DegreeTooHigh(usize),
    #[error("tangent plane is degenerate (normal radicand {radicand:e})")]
    DegenerateTangentPlane { radicand: f64 },
    #[error("no second-derivative data available for the field")]
    MissingHessian,
    #[error("no displayed minimality equation for {0}")]
    UnsupportedConfiguration(String),
    #[error("position vector is orthogonal to the direction vector")]
    PositionOrthogonalToV,
    #[error("alpha must be nonzero")]
    AlphaZero,
    #[error("direction vector does not match the case pattern: {0}")]
    InvalidDirectionPattern(String),
    #[error("direction vector is not unit length in the ambient metric (self product {0})")]
    NonUnitDirection(f64),
    #[error("direction vector has the wrong causal character: {0}")]
    WrongCausalCharacter(String),
    #[error("invalid constant: {0}")]
    InvalidConstant(String),
    #[error("neither sign branch satisfies the minimality equation for {subject} (best probe residual {best:e})")]
    NoBranchSatisfiesPde { subject: String, best: f64 },
    #[error("point ({0}, {1}) is outside the family domain")]
    OutOfDomain(f64, f64),
    #[error("value {0} is outside the monotone bracket of the implicit relation")]
    OutOfBracket(f64),
    #[error("implicit relation is not monotone near its anchor")]
    NonMonotoneRelation,
    #[error("state {0} lies in the singular set of the reduced equation")]
    SingularState(f64),
    #[error("first-integral denominator vanishes")]
    ZeroDenominator,
    #[error("invalid ODE parameters: {0}")]
    InvalidOdeParameters(String),
    #[error("invalid integration step {0}")]
    InvalidStep(f64),
    #[error("grid has no in-domain points")]
    EmptyGrid,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
