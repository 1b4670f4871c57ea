//! Dense complex linear algebra for Hilbert spaces of up to a few hundred
//! dimensions.

mod eig;
mod matrix;

use thiserror::Error;

pub use eig::{eigh, hermitian_eig, Eigh, SpectralDecomposition, CLUSTER_REL_TOL};
pub use matrix::{commutator, kron, partial_trace, ComplexMatrix, Subsystem, C64, I, ONE, ZERO};

/// Default tolerance for "equal within tol" comparisons (Frobenius norm).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest `‖h − h†‖_F` that is silently symmetrized.
pub const HERMITICITY_TOL: f64 = 1e-8;

/// Smallest eigenvalue still accepted (and clamped to zero) as positive.
pub const PSD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: ‖h − h†‖_F = {residual:.3e} (tolerance {tol:.1e})")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e} (tolerance {tol:.1e})")]
    NotPsd { min_eigenvalue: f64, tol: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
}

/// `e^{−iθh} = Σ_l e^{−iθλ_l} Q^l`
pub fn unitary_from_generator(h: &ComplexMatrix, theta: f64) -> Result<ComplexMatrix, LinalgError> {
    let spec = hermitian_eig(h, HERMITICITY_TOL)?;
    Ok(spec.map_spectrum(|lambda| C64::from_polar(1.0, -theta * lambda)))
}

/// Hermitian positive square root. Eigenvalues in `[−PSD_TOL, 0)` are
/// clamped to zero.
pub fn psd_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let residual = p.hermiticity_residual();
    if residual >= HERMITICITY_TOL {
        return Err(LinalgError::NotHermitian {
            residual,
            tol: HERMITICITY_TOL,
        });
    }
    let Eigh { values, vectors } = eigh(&p.hermitian_part())?;
    if let Some(&min) = values.first() {
        if min < -PSD_TOL {
            return Err(LinalgError::NotPsd {
                min_eigenvalue: min,
                tol: PSD_TOL,
            });
        }
    }
    let n = values.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let col = vectors.column(k);
        out += &ComplexMatrix::outer(&col, &col).scale_real(lambda.max(0.0).sqrt());
    }
    Ok(out.hermitian_part())
}
