use thiserror::Error;

use crate::geometry::CPoint;

/// Errors raised by the toolkit.
///
/// Variant names double as the module error names reported by the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {0} is not strictly inside the unit disk")]
    OutsideUnitDisk(CPoint),
    #[error("point {0} is not inside the domain")]
    OutsideDomain(CPoint),
    #[error("point {0} is within 1e-9 of the domain boundary")]
    TooCloseToBoundary(CPoint),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(CPoint),
    #[error("domain is not hyperbolic")]
    NotHyperbolic,
    #[error("domain is not a proper subdomain of the plane")]
    NotProper,
    #[error("no covering map is available for this domain")]
    UnsupportedDomain,
    #[error("no candidate family is available for this basepoint/target pair")]
    UnsupportedPair,
    #[error("metric is not supported on this domain")]
    UnsupportedMetric,
    #[error("density is not available on this domain")]
    UnsupportedDensity,
    #[error("inner domain is not contained in the outer domain")]
    NotNested,
    #[error("domain is not quasi-bounded")]
    NotQuasiBounded,
    #[error("polyline needs at least two vertices with distinct neighbours")]
    DegeneratePolyline,
    #[error("density is infinite at quadrature node {0}")]
    InfiniteDensity(CPoint),
    #[error("endpoints are too close to the boundary for the grid")]
    PointsTooCloseToBoundary,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse {0}")]
    Parse(String),
}

impl Error {
    /// Stable name of the variant, used in machine-readable output.
    pub fn name(&self) -> &'static str {
        match self {
            Error::OutsideUnitDisk(_) => "OutsideUnitDisk",
            Error::OutsideDomain(_) => "OutsideDomain",
            Error::TooCloseToBoundary(_) => "TooCloseToBoundary",
            Error::NonFinite(_) => "NonFinite",
            Error::NotHyperbolic => "NotHyperbolic",
            Error::NotProper => "NotProper",
            Error::UnsupportedDomain => "UnsupportedDomain",
            Error::UnsupportedPair => "UnsupportedPair",
            Error::UnsupportedMetric => "UnsupportedMetric",
            Error::UnsupportedDensity => "UnsupportedDensity",
            Error::NotNested => "NotNested",
            Error::NotQuasiBounded => "NotQuasiBounded",
            Error::DegeneratePolyline => "DegeneratePolyline",
            Error::InfiniteDensity(_) => "InfiniteDensity",
            Error::PointsTooCloseToBoundary => "PointsTooCloseToBoundary",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
