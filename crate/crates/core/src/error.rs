use thiserror::Error;

use crate::geometry::Vec2;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("wind speed {wind} reaches or exceeds the airspeed {airspeed}")]
    WindExceedsAirspeed { wind: f64, airspeed: f64 },

    #[error("wind bound c0 = {c0} reaches or exceeds the airspeed {airspeed}; the error bounds are inapplicable")]
    BoundExceedsAirspeed { c0: f64, airspeed: f64 },

    #[error("simplified alpha coefficients need c0 <= airspeed/sqrt(5), got c0 = {c0}")]
    SimplifiedInapplicable { c0: f64 },

    #[error("degenerate path: {0}")]
    DegeneratePath(String),

    #[error("paths are sampled on different grids ({0} vs {1} samples)")]
    GridMismatch(usize, usize),

    #[error("domain contains no lattice vertex")]
    EmptyDomain,

    #[error("graph would need {needed} vertices, more than the cap of {cap}")]
    ResourceLimit { needed: usize, cap: usize },

    #[error("destination vertex {destination} is unreachable from {origin}")]
    Unreachable { origin: usize, destination: usize },

    #[error("rounded path jumps from {from:?} to {to:?} without an arc")]
    SnapGap { from: Vec2, to: Vec2 },

    #[error("line search found no descent direction (best T = {best})")]
    NoDescent { best: f64 },

    #[error("recovered airspeed {found} deviates from {expected}")]
    AirspeedInconsistency { found: f64, expected: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
