use thiserror::Error;

/// Failures raised by the spectral and winding-number routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The eigenvector component pinned to 1 by the gauge vanishes.
    #[error("gauge {gauge} is singular at k = {k}: fixed component {magnitude:e} relative to the eigenvector norm")]
    GaugeSingular {
        gauge: &'static str,
        k: f64,
        magnitude: f64,
    },

    /// The transpose of a right eigenvector is only a left eigenvector of a
    /// complex-symmetric matrix.
    #[error("transpose gauge requires H(k) = H(k)^T, asymmetry {asymmetry:e} at k = {k}")]
    TransposeGauge { k: f64, asymmetry: f64 },

    /// Eigenvectors coalesce: the matrix is (numerically) not diagonalizable.
    #[error("defective matrix: eigenvector matrix condition ratio {ratio:e} below {threshold:e}")]
    Defective { ratio: f64, threshold: f64 },

    #[error("ambiguous branch tracking at k = {k}: candidates equidistant within {tolerance:e}")]
    AmbiguousTracking { k: f64, tolerance: f64 },

    #[error("eigenstate did not return to itself after a 4*pi loop (mismatch {mismatch:e})")]
    NoClosure { mismatch: f64 },

    /// The operation needs a 4*pi loop but the bands close after 2*pi.
    #[error("operation requires a 4*pi loop, model closes after 2*pi")]
    NotFourPiLoop,

    #[error("left/right eigenvalue pairing failed: eigenvalue {index} is {distance:e} from its partner (tolerance {tolerance:e})")]
    MatchFailure {
        index: usize,
        distance: f64,
        tolerance: f64,
    },

    #[error("dense eigensolver did not converge for a {dim}x{dim} matrix (norm {norm:e})")]
    SolverFailure { dim: usize, norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
