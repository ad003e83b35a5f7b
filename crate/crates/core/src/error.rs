use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// J = 0 closes the Bogoliubov gap at k = 0 and leaves the phase undefined.
    #[error("degenerate gap: the intra-cell coupling J must be nonzero")]
    DegenerateGap,

    #[error("no gapless points: critical-momentum radicand is negative ({radicand:e})")]
    NoGaplessPoints { radicand: f64 },

    #[error("unsupported coupling: {0}")]
    Unsupported(String),

    #[error("curvature undefined at (h={h}, J3={j3}): metric determinant {det:e}")]
    CurvatureUndefined { h: f64, j3: f64, det: f64 },

    #[error("trajectory is not monotone in h on the queried segment")]
    NonMonotone,

    #[error("h = {0} is outside the range covered by the trajectory")]
    OutOfRange(f64),

    #[error("gapless mode at k = {k} (h = {h}, gamma = {gamma})")]
    GaplessMode { h: f64, gamma: f64, k: f64 },

    #[error("system too large for exact diagonalisation: {spins} spins (max {max})")]
    SizeCap { spins: usize, max: usize },

    #[error("linear algebra failure: {0}")]
    Linalg(String),

    #[error("no convergence: {0}")]
    NotConverged(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}
