use thiserror::Error;

/// Failures reported by the structured factorizations.
///
/// Structural variants carry the measured deviation and the threshold it was
/// compared against, so callers can tell a near miss from garbage input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not quaternionic: |X* - X#| = {deviation:.3e} > {threshold:.3e}")]
    NotQuaternionic { deviation: f64, threshold: f64 },

    #[error("matrix is not self-dual: |X - X#| = {deviation:.3e} > {threshold:.3e}")]
    NotSelfDual { deviation: f64, threshold: f64 },

    #[error("matrix is not symmetric: |X - X^T| = {deviation:.3e} > {threshold:.3e}")]
    NotSymmetric { deviation: f64, threshold: f64 },

    #[error("matrix is not Hermitian: |X - X*| = {deviation:.3e} > {threshold:.3e}")]
    NotHermitian { deviation: f64, threshold: f64 },

    #[error("matrix is not normal: |XX* - X*X| = {deviation:.3e} > {threshold:.3e}")]
    NotNormal { deviation: f64, threshold: f64 },

    #[error("matrix is not a symplectic unitary: deviation {deviation:.3e} > {threshold:.3e}")]
    NotSymplectic { deviation: f64, threshold: f64 },

    #[error("matrices {first} and {second} do not commute: commutator {deviation:.3e} > {threshold:.3e}")]
    NotCommuting {
        first: usize,
        second: usize,
        deviation: f64,
        threshold: f64,
    },

    #[error("not a partial isometry: |(W*W)^2 - W*W| = {deviation:.3e} > {threshold:.3e}")]
    NotPartialIsometry { deviation: f64, threshold: f64 },

    #[error("vector is not a unit vector: norm {norm}")]
    NotUnit { norm: f64 },

    #[error("vectors are not orthogonal: |<v, w>| = {overlap:.3e}")]
    NotOrthogonal { overlap: f64 },

    #[error("kernel of a self-dual partial isometry has odd dimension {dim}")]
    OddKernel { dim: usize },

    #[error("operation requires even dimension, got {0}")]
    OddDimension(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("{value} is not an eigenvalue (generalized eigenspace is trivial)")]
    NotAnEigenvalue { value: num_complex::Complex64 },

    #[error("ill-conditioned spectral structure: {0}")]
    IllConditioned(String),

    #[error("empty matrix family")]
    EmptyFamily,
}

pub type Result<T> = std::result::Result<T, Error>;
