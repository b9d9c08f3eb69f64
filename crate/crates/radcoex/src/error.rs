use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("BS and radar antenna heights are equal; pathloss model is undefined")]
    EqualHeights,
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("series did not converge: {0}")]
    Series(String),
    #[error("voronoi window too small: cell reaches {reach:.1} m with window half-width {window:.1} m")]
    WindowTooSmall { reach: f64, window: f64 },
    #[error("value outside support: {0}")]
    OutOfSupport(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
