use thiserror::Error;

pub type Result<T> = std::result::Result<T, QeiError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QeiError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// |𝒢(k)| fell below the tolerance, k is numerically characteristic.
    #[error("covector is (numerically) characteristic: |G| = {g:e} <= {tol:e}")]
    NearNullCovector { g: f64, tol: f64 },
    #[error("spatial momentum must be non-zero")]
    ZeroMomentum,
    #[error("poles merged: |omega - omega_tilde| = {gap:e}")]
    PolesMerged { gap: f64 },
    #[error("matrix is not positive semi-definite, eigenvalues {eigenvalues:?}")]
    NotPositive { eigenvalues: [f64; 3] },
    #[error("worldline lies on the extraordinary cone (sinh^2(a) sin^2(b) = xi^-2)")]
    OnExtraordinaryCone,
    #[error("worldline is not subluminal: {criterion}")]
    NotSubluminal { criterion: String },
    #[error("vector is not timelike for the selected metric")]
    NotTimelike,
    #[error("Newton iteration diverged after {iterations} steps (residual {residual:e})")]
    NewtonDiverged {
        last: [f64; 4],
        residual: f64,
        iterations: usize,
    },
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("contour quadrature did not converge (node doubling changed result by {change:e})")]
    NonConvergent { change: f64 },
}

impl QeiError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            QeiError::InvalidInput(_) => 2,
            QeiError::NotSubluminal { .. } => 4,
            _ => 3,
        }
    }
}
