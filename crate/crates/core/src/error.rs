use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode surfaced by the library.
///
/// Variants split into two groups: contract/validation failures caused by the
/// caller's input, and internal failures (numerical breakdown). The CLI maps
/// them to different exit codes via [`Error::is_validation`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported root system series `{0}` (only type A is implemented)")]
    UnsupportedSeries(String),
    #[error("rank {0} exceeds the supported maximum of {max}", max = crate::rootdata::MAX_RANK)]
    RankTooLarge(usize),
    #[error("rank must be at least 1")]
    RankZero,
    #[error("weight has {got} coordinates, expected {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("weight {0} is not integral")]
    NonIntegralWeight(String),
    #[error("weight {0} is not dominant integral")]
    NotDominant(String),
    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: u64, cap: u64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("point `{0}` occurs in both factors; the tensor product at a single point is reducible")]
    PointCollision(String),
    #[error("duplicate point `{0}` in evaluation data")]
    DuplicatePoint(String),
    #[error("root systems differ: rank {0} vs rank {1}")]
    RankMismatch(usize, usize),
    #[error("joint kernel of the raising operators is empty")]
    EmptyKernel,
    #[error("Cartan action on the highest weight line is not scalar (residual {0:.3e})")]
    NonScalarAction(f64),
    #[error("eigenvalue {0} is not within tolerance of a rational with small denominator")]
    NonRationalEigenvalue(f64),
    #[error("invalid involution: {0}")]
    InvalidInvolution(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vector is not a unit vector (norm {0})")]
    NotUnit(f64),
    #[error("site {0} listed more than once")]
    DuplicateSite(u64),
    #[error("invalid site index {0} (sites are numbered from 1)")]
    InvalidSite(u64),
    #[error("grid has {got} points, at least {needed} are required")]
    GridTooCoarse { needed: usize, got: usize },
    #[error("section does not vanish to order {k} at the boundary (derivative {order} is {value:.3e})")]
    OrderViolation { k: u32, order: u32, value: f64 },
    #[error("point {0} lies outside the sampled grid")]
    OutsideGrid(f64),
    #[error("point `{0}` has no boundary distance")]
    MissingBoundaryDistance(String),
    #[error("functional is not multiplicative: {0}")]
    NotMultiplicative(String),
    #[error("recovered exponents sum to {got}, declared degree is {declared}")]
    InconsistentDegree { declared: u32, got: u32 },
    #[error("coordinate {index}: recovered exponent {value} is not a nonnegative integer")]
    NonIntegerExponent { index: usize, value: f64 },
    #[error("invalid term rule: {0}")]
    InvalidRule(String),
    #[error("norm rule is unbounded: {0}")]
    UnboundedRule(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-contract input.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::NumericalFailure(_) | Error::EmptyKernel)
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedSeries(_) => "UnsupportedSeries",
            Error::RankTooLarge(_) => "RankTooLarge",
            Error::RankZero => "RankZero",
            Error::WeightLength { .. } => "WeightLength",
            Error::NonIntegralWeight(_) => "NonIntegralWeight",
            Error::NotDominant(_) => "NotDominant",
            Error::DimensionCap { .. } => "DimensionCap",
            Error::NumericalFailure(_) => "NumericalFailure",
            Error::PointCollision(_) => "PointCollision",
            Error::DuplicatePoint(_) => "DuplicatePoint",
            Error::RankMismatch(..) => "RankMismatch",
            Error::EmptyKernel => "EmptyKernel",
            Error::NonScalarAction(_) => "NonScalarAction",
            Error::NonRationalEigenvalue(_) => "NonRationalEigenvalue",
            Error::InvalidInvolution(_) => "InvalidInvolution",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NotUnit(_) => "NotUnit",
            Error::DuplicateSite(_) => "DuplicateSite",
            Error::InvalidSite(_) => "InvalidSite",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::OrderViolation { .. } => "OrderViolation",
            Error::OutsideGrid(_) => "OutsideGrid",
            Error::MissingBoundaryDistance(_) => "MissingBoundaryDistance",
            Error::NotMultiplicative(_) => "NotMultiplicative",
            Error::InconsistentDegree { .. } => "InconsistentDegree",
            Error::NonIntegerExponent { .. } => "NonIntegerExponent",
            Error::InvalidRule(_) => "InvalidRule",
            Error::UnboundedRule(_) => "UnboundedRule",
            Error::Invalid(_) => "Invalid",
        }
    }
}
