//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `h[p,q]` with a diagonal
//! unitary and then applies the real symmetric Jacobi rotation, so the
//! accumulated transform stays unitary. Sweeps visit pivots in row-major
//! order, which pins the eigenvector basis inside degenerate eigenspaces:
//! the same input always yields the same basis.

use super::matrix::{ComplexMatrix, C64};
use super::LinalgError;

const MAX_SWEEPS: usize = 64;

/// Relative off-diagonal Frobenius norm below which sweeps stop.
const CONVERGED: f64 = 1e-17;

/// Relative off-diagonal norm accepted if the sweep budget runs out.
const ACCEPTABLE: f64 = 1e-12;

/// Eigenvalue clustering threshold, relative to `max(1, ‖h‖_op)`.
pub const CLUSTER_REL_TOL: f64 = 1e-9;

/// Eigenvalues (ascending) with unit eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Diagonalizes a matrix that is already Hermitian.
///
/// Only the Hermitian part of `h` is meaningful; callers that accept
/// approximately Hermitian input should go through [`hermitian_eig`].
pub fn eigh(h: &ComplexMatrix) -> Result<Eigh, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let n = h.rows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    if n > 1 && scale > 0.0 {
        let mut sweeps = 0;
        loop {
            let off = off_diagonal_norm(&a);
            if off <= CONVERGED * scale {
                break;
            }
            if sweeps == MAX_SWEEPS {
                if off <= ACCEPTABLE * scale {
                    break;
                }
                return Err(LinalgError::NoConvergence { sweeps });
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
            sweeps += 1;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Eigh { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One two-sided rotation annihilating `a[p,q]`; accumulates into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return;
    }
    let phase = g / g_abs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * g_abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // 2x2 block of V = diag(1, conj(phase)) · [[c, s], [-s, c]]
    let vpp = C64::new(c, 0.0);
    let vpq = C64::new(s, 0.0);
    let vqp = phase.conj() * -s;
    let vqq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * vpp + akq * vqp;
        a[(k, q)] = akp * vpq + akq * vqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = vpp.conj() * apk + vqp.conj() * aqk;
        a[(q, k)] = vpq.conj() * apk + vqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

/// Spectral decomposition with degenerate eigenvalues merged.
///
/// `eigenvalues[l]` belongs to `projectors[l]`. The orthonormal eigenbasis the
/// projectors were built from is kept, together with the cluster index of
/// every basis vector.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<ComplexMatrix>,
    basis: ComplexMatrix,
    cluster_of: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvectors as columns, grouped by cluster in ascending order.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    /// Cluster index of the `k`-th basis column.
    pub fn cluster_of(&self, k: usize) -> usize {
        self.cluster_of[k]
    }

    pub fn cluster_indices(&self) -> &[usize] {
        &self.cluster_of
    }

    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.len()];
        for &c in &self.cluster_of {
            ranks[c] += 1;
        }
        ranks
    }

    /// `Σ_l λ_l Q^l`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for (lambda, q) in self.eigenvalues.iter().zip(&self.projectors) {
            out += &q.scale_real(*lambda);
        }
        out
    }

    /// `Σ_l f(λ_l) Q^l`
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for (lambda, q) in self.eigenvalues.iter().zip(&self.projectors) {
            out += &q.scale(f(*lambda));
        }
        out
    }
}

/// Spectral decomposition of an approximately Hermitian matrix.
///
/// Input within `tol` (Frobenius) of Hermitian is replaced by `(h + h†)/2`;
/// anything further away is rejected.
pub fn hermitian_eig(h: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let residual = h.hermiticity_residual();
    if residual >= tol {
        return Err(LinalgError::NotHermitian { residual, tol });
    }
    let Eigh { values, vectors } = eigh(&h.hermitian_part())?;

    let op_norm = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let cluster_tol = CLUSTER_REL_TOL * op_norm.max(1.0);

    let n = values.len();
    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut cluster_of = vec![0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= cluster_tol {
            end += 1;
        }
        let cluster = eigenvalues.len();
        let mut q = ComplexMatrix::zeros(n, n);
        for (k, slot) in cluster_of.iter_mut().enumerate().take(end).skip(start) {
            let col = vectors.column(k);
            q += &ComplexMatrix::outer(&col, &col);
            *slot = cluster;
        }
        eigenvalues.push(values[start..end].iter().sum::<f64>() / (end - start) as f64);
        projectors.push(q);
        start = end;
    }

    Ok(SpectralDecomposition {
        eigenvalues,
        projectors,
        basis: vectors,
        cluster_of,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{I, ZERO};

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        // small LCG keeps this module's tests free of the random module
        let mut state = seed;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = ComplexMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
        a.hermitian_part()
    }

    #[test]
    fn diagonal_with_degeneracy() {
        let d = ComplexMatrix::from_diagonal(&[0.0, 1.0, 1.0, 2.0]);
        let spec = hermitian_eig(&d, 1e-8).unwrap();
        assert_eq!(spec.eigenvalues, vec![0.0, 1.0, 2.0]);
        assert_eq!(spec.ranks(), vec![1, 2, 1]);
        assert_eq!(spec.basis(), &ComplexMatrix::identity(4));
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let spec = hermitian_eig(&x, 1e-8).unwrap();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-15);
        let minus = ComplexMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]).unwrap();
        let plus = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(spec.projectors[0].distance(&minus) < 1e-15);
        assert!(spec.projectors[1].distance(&plus) < 1e-15);
    }

    #[test]
    fn pauli_y_complex_pivot() {
        let y = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
        let spec = hermitian_eig(&y, 1e-8).unwrap();
        assert_eq!(spec.len(), 2);
        assert!(spec.reconstruct().distance(&y) < 1e-15);
    }

    #[test]
    fn random_hermitian_projector_algebra() {
        for (n, seed) in [(6, 1), (12, 2), (32, 3)] {
            let h = random_hermitian(n, seed);
            let spec = hermitian_eig(&h, 1e-8).unwrap();
            assert!(spec.reconstruct().distance(&h) < 1e-10, "reconstruction n={n}");
            let mut total = ComplexMatrix::zeros(n, n);
            for (i, qi) in spec.projectors.iter().enumerate() {
                assert!(qi.is_hermitian(1e-12));
                assert!(qi.idempotence_residual() < 1e-10);
                for qj in &spec.projectors[i + 1..] {
                    assert!(qi.matmul(qj).frobenius_norm() < 1e-10);
                }
                total += qi;
            }
            assert!(total.distance(&ComplexMatrix::identity(n)) < 1e-10);
            assert!(spec.eigenvalues.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m, 1e-8), Err(LinalgError::NotHermitian { .. })));
    }

    #[test]
    fn symmetrizes_small_asymmetry() {
        let mut m = ComplexMatrix::from_diagonal(&[1.0, 2.0]);
        m[(0, 1)] = C64::new(1e-10, 0.0);
        let spec = hermitian_eig(&m, 1e-8).unwrap();
        assert_eq!(spec.len(), 2);
    }

    #[test]
    fn degenerate_basis_is_deterministic() {
        let h = random_hermitian(5, 9);
        let spec = hermitian_eig(&h, 1e-8).unwrap();
        // rebuild a matrix with a degenerate spectrum in a rotated basis
        let values = [0.0, 1.0, 1.0, 1.0, 3.0];
        let degenerate = spec
            .basis()
            .matmul(&ComplexMatrix::from_diagonal(&values))
            .matmul(&spec.basis().adjoint());
        let first = hermitian_eig(&degenerate, 1e-8).unwrap();
        let second = hermitian_eig(&degenerate, 1e-8).unwrap();
        assert_eq!(first.ranks(), vec![1, 3, 1]);
        assert_eq!(first.basis(), second.basis());
    }
}
