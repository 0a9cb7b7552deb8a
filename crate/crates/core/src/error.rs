use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, QgtError>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QgtError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi diagonalization did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})")]
    NonConvergence { sweeps: usize, residual: f64 },

    #[error("degenerate spectrum at R = {point:?} (gap {gap:.3e})")]
    Degenerate { point: Vec<f64>, gap: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} out of range for {len} levels")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("finite-difference step too large at R = {point:?}: projector overlap {overlap:.3e}")]
    Stencil { point: Vec<f64>, overlap: f64 },

    #[error("adjacent overlap {overlap:.3e} at path step {step} is too small; refine the path")]
    SmallOverlap { step: usize, overlap: f64 },

    #[error("ambiguous level matching (best overlap mass {best:.12}, runner-up {second:.12})")]
    AmbiguousMatching { best: f64, second: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("root finder failed after {iterations} iterations (residual {residual:.3e})")]
    RootFinding { iterations: usize, residual: f64 },
}

impl QgtError {
    pub fn is_degeneracy(&self) -> bool {
        matches!(self, QgtError::Degenerate { .. })
    }
}
