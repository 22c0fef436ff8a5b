use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `(0, 0)` is not a slope.
    InvalidSlope,
    /// Zero (or non-finite) foliation vector.
    InvalidFoliation,
    /// Determinant of a would-be mapping class is not 1.
    InvalidMappingClass { det: i64 },
    /// Curve family is empty or contains duplicates.
    InvalidFamily(&'static str),
    /// Point outside the upper half-plane.
    InvalidPoint,
    /// Holonomy basis with nonpositive area.
    InvalidBasis { area: f64 },
    /// Unit area was required.
    AreaError { area: f64 },
    /// `z² − xyz + x² + y² = 0` has no real root.
    NotRealizable { discriminant: f64 },
    DegenerateStructure(&'static str),
    NumericalFailure { what: &'static str, residual: f64 },
    /// Every entry of a length functional vanished.
    ZeroFunctional,
    /// Projective vectors over different curve families.
    FamilyError,
    InsufficientData { needed: usize, got: usize },
    DegenerateDenominator,
    Inconclusive(&'static str),
    ConfigError(String),
    /// A flow failed at a specific time.
    AtTime { t: f64, source: Box<Error> },
}

impl Error {
    pub fn at(self, t: f64) -> Error {
        Error::AtTime { t, source: Box::new(self) }
    }

    /// The innermost error, skipping time annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            e => e,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSlope => write!(f, "invalid slope: (0, 0)"),
            Error::InvalidFoliation => write!(f, "invalid foliation vector"),
            Error::InvalidMappingClass { det } => {
                write!(f, "mapping class must have determinant 1, got {det}")
            }
            Error::InvalidFamily(why) => write!(f, "invalid curve family: {why}"),
            Error::InvalidPoint => write!(f, "point is not in the upper half-plane"),
            Error::InvalidBasis { area } => write!(f, "holonomy basis has nonpositive area {area}"),
            Error::AreaError { area } => write!(f, "quadratic differential has area {area}, expected 1"),
            Error::NotRealizable { discriminant } => {
                write!(f, "trace pair not realizable (discriminant {discriminant})")
            }
            Error::DegenerateStructure(why) => write!(f, "degenerate structure: {why}"),
            Error::NumericalFailure { what, residual } => {
                write!(f, "numerical failure in {what} (residual {residual:e})")
            }
            Error::ZeroFunctional => write!(f, "length functional vanishes on the whole family"),
            Error::FamilyError => write!(f, "curve families differ"),
            Error::InsufficientData { needed, got } => {
                write!(f, "insufficient data: need {needed} samples, got {got}")
            }
            Error::DegenerateDenominator => write!(f, "denominator vanishes along the tail"),
            Error::Inconclusive(why) => write!(f, "inconclusive: {why}"),
            Error::ConfigError(why) => write!(f, "config error: {why}"),
            Error::AtTime { t, source } => write!(f, "at t = {t}: {source}"),
        }
    }
}

impl core::error::Error for Error {}
