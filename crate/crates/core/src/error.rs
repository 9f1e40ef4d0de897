use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A size or shape requirement was not met.
    Dimension(String),
    /// An index fell outside its axis.
    OutOfRange { what: &'static str, index: usize, extent: usize },
    /// Two operands that must agree in length do not.
    Mismatch { what: &'static str, expected: usize, actual: usize },
    /// A parameter is outside its admissible range.
    InvalidParameter(String),
    /// A non-finite value was found.
    NonFinite { what: &'static str, index: usize },
    /// A kernel row sums to zero.
    ZeroRow { pixel: usize },
    /// An iterative solver hit its iteration cap.
    NoConvergence { iterations: usize, worst_residual: f64 },
    /// The spectrum carries no usable information (e.g. a constant eigenvector).
    DegenerateSpectrum(&'static str),
    /// The Jacobian determinant is not positive somewhere.
    InvalidDeformation { x: f64, y: f64, det: f64 },
    /// The quantities fall outside the hypothesis of the stability bound.
    OutOfHypothesis(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(msg) => write!(f, "dimension error: {msg}"),
            Error::OutOfRange { what, index, extent } => {
                write!(f, "{what} index {index} out of range (extent {extent})")
            }
            Error::Mismatch { what, expected, actual } => {
                write!(f, "{what}: expected length {expected}, got {actual}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NonFinite { what, index } => write!(f, "non-finite {what} at index {index}"),
            Error::ZeroRow { pixel } => write!(f, "kernel row of pixel {pixel} sums to zero"),
            Error::NoConvergence { iterations, worst_residual } => write!(
                f,
                "eigensolver did not converge after {iterations} iterations (worst residual {worst_residual:e})"
            ),
            Error::DegenerateSpectrum(msg) => write!(f, "degenerate spectrum: {msg}"),
            Error::InvalidDeformation { x, y, det } => {
                write!(f, "deformation not invertible at ({x}, {y}): det J = {det}")
            }
            Error::OutOfHypothesis(msg) => write!(f, "outside the bound's hypothesis: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
