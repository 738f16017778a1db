use thiserror::Error;

/// Failures raised by the cylinder solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CylError {
    #[error("covariance matrix is singular (point set is subdimensional)")]
    SingularCovariance,
    #[error("inertia matrix T is singular (point set is subdimensional)")]
    SingularT,
    #[error("point set is rank deficient (rank {rank}, need 3)")]
    RankDeficient { rank: usize },
    #[error("expected exactly {expected} points, got {got}")]
    WrongPointCount { expected: usize, got: usize },
    #[error(
        "points {first} and {second} are identical; use the 4-point solver on the remaining points"
    )]
    DuplicatePoints { first: usize, second: usize },
    #[error("no start converged ({attempts} attempts)")]
    NoConvergence { attempts: usize },
    #[error("eigenvalues of M are not separated")]
    EigenTies,
    #[error("polynomial is identically zero")]
    AllCoefficientsZero,
    #[error("points are collinear")]
    CollinearPoints,
    #[error("no enclosing candidate found ({examined} candidates examined)")]
    NoCandidateFound { examined: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = CylError> = std::result::Result<T, E>;
