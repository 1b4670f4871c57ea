use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LinalgError;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix stored in row-major order.
///
/// Arithmetic operators panic on shape mismatch, the same way slice indexing
/// panics out of bounds. Operations where a mismatch is a caller-facing
/// condition (partial traces, construction from raw data) return
/// [`LinalgError`] instead.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{} entries for a {rows}x{cols} matrix", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. All rows must have the same length.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self, LinalgError> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n_cols) {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{n_cols} columns in every row"),
                found: format!("{} columns in row {bad}", rows[bad].len()),
            });
        }
        Ok(Self {
            rows: n_rows,
            cols: n_cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Rank-one projector `|k⟩⟨k|` on an `n`-dimensional space.
    pub fn basis_projector(n: usize, k: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(k, k)] = ONE;
        m
    }

    /// `|i⟩⟨j|` on an `n`-dimensional space.
    pub fn matrix_unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn trace(&self) -> C64 {
        assert!(
            self.is_square(),
            "trace of a non-square {}x{} matrix",
            self.rows,
            self.cols
        );
        (0..self.rows).map(|k| self[(k, k)]).sum()
    }

    /// `tr[self · other]` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert!(
            self.cols == other.rows && self.rows == other.cols,
            "trace_product shape mismatch: {:?} vs {:?}",
            self.shape(),
            other.shape()
        );
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(
            self.shape(),
            other.shape(),
            "distance between differently shaped matrices"
        );
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols,
            other.rows,
            "matmul shape mismatch: {:?} x {:?}",
            self.shape(),
            other.shape()
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `self · other · self†`
    pub fn conjugate(&self, other: &Self) -> Self {
        self.matmul(other).matmul(&self.adjoint())
    }

    /// `(self + self†) / 2`
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian part of a non-square matrix");
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `‖self − self†‖_F`, or infinity for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() < tol
    }

    /// `‖self†·self − 1‖_F`, or infinity for non-square input.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).distance(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() < tol
    }

    /// Smallest eigenvalue of the Hermitian part, or `None` when the matrix
    /// is not Hermitian within `tol`.
    pub fn min_eigenvalue(&self, tol: f64) -> Option<f64> {
        if !self.is_hermitian(tol) {
            return None;
        }
        super::eigh(&self.hermitian_part())
            .ok()
            .and_then(|e| e.values.first().copied())
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue(tol).is_some_and(|m| m >= -tol)
    }

    /// `‖self² − self‖_F`
    pub fn idempotence_residual(&self) -> f64 {
        self.matmul(self).distance(self)
    }
}

/// `[a, b] = ab − ba`
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &a.matmul(b) - &b.matmul(a)
}

/// Kronecker product: `(a⊗b)[i·q + k, j·s + l] = a[i,j]·b[k,l]` for `b` of shape `q×s`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, r) = a.shape();
    let (q, s) = b.shape();
    let mut out = ComplexMatrix::zeros(p * q, r * s);
    let out_cols = r * s;
    for i in 0..p {
        for j in 0..r {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..q {
                let base = (i * q + k) * out_cols + j * s;
                for l in 0..s {
                    out.data[base + l] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Factor of a bipartite `S⊗A` space, with `S` the left Kronecker factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    System,
    Apparatus,
}

/// Partial trace of an operator on `S⊗A` over the tagged factor.
pub fn partial_trace(
    x: &ComplexMatrix,
    dim_system: usize,
    dim_apparatus: usize,
    over: Subsystem,
) -> Result<ComplexMatrix, LinalgError> {
    let n = dim_system * dim_apparatus;
    if x.shape() != (n, n) {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("{n}x{n} operator on a {dim_system}x{dim_apparatus} product space"),
            found: format!("{}x{}", x.rows, x.cols),
        });
    }
    let idx = |s: usize, a: usize| s * dim_apparatus + a;
    let out = match over {
        Subsystem::Apparatus => ComplexMatrix::from_fn(dim_system, dim_system, |s, t| {
            (0..dim_apparatus).map(|a| x[(idx(s, a), idx(t, a))]).sum()
        }),
        Subsystem::System => ComplexMatrix::from_fn(dim_apparatus, dim_apparatus, |a, b| {
            (0..dim_system).map(|s| x[(idx(s, a), idx(s, b))]).sum()
        }),
    };
    Ok(out)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "add shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}
