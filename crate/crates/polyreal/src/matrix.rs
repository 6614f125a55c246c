//! Dense complex matrix, the universal carrier for every operator in the
//! library (colligation blocks, decompositions, pencil coefficients,
//! transfer-function values).
//!
//! Entries are `Complex<f64>`. Zero-dimensional matrices (0 rows and/or 0
//! columns) are first class: products involving them yield zero matrices of
//! the right shape, which keeps block formulas valid when a state space
//! collapses.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

/// Dense complex matrix with `f64` real and imaginary parts.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        ComplexMatrix {
            inner: DMatrix::identity(n, n),
        }
    }

    /// 1x1 matrix holding `z`.
    pub fn scalar(z: Complex64) -> Self {
        Self::from_fn(1, 1, |_, _| z)
    }

    /// Build from a function of (row, col).
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        ComplexMatrix {
            inner: DMatrix::from_fn(rows, cols, f),
        }
    }

    /// Build from row-major nested slices.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged row lengths".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Build from real row-major nested slices.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged row lengths".into()));
        }
        Ok(Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    /// Build from a row-major entry slice.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(Self::from_fn(rows, cols, |i, j| entries[i * cols + j]))
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    pub(crate) fn from_na(inner: DMatrix<Complex64>) -> Self {
        ComplexMatrix { inner }
    }

    pub(crate) fn as_na(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// True when either dimension is zero.
    pub fn is_empty(&self) -> bool {
        self.rows() == 0 || self.cols() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.inner[(i, j)] = z;
    }

    /// Entries in row-major order.
    pub fn row_major_entries(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    /// Err if any entry is NaN or infinite.
    pub fn check_finite(&self, what: &str) -> Result<()> {
        for v in self.inner.iter() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite(what.to_string()));
            }
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        ComplexMatrix {
            inner: self.inner.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix {
            inner: self.inner.transpose(),
        }
    }

    pub fn conjugate(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexMatrix {
            inner: self.inner.map(f),
        }
    }

    pub fn scale(&self, z: Complex64) -> Self {
        self.map(|v| v * z)
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.map(|v| v * x)
    }

    /// Hermitian part (M + M*) / 2.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    /// Skew-adjoint part (M - M*) / 2.
    pub fn skew_part(&self) -> Self {
        (self - &self.adjoint()).scale_re(0.5)
    }

    /// Max-norm: largest entry modulus. Zero for empty matrices.
    pub fn max_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Deviation from Hermitian symmetry, `|M - M*|_max`.
    pub fn hermitian_deviation(&self) -> f64 {
        (self - &self.adjoint()).max_norm()
    }

    /// Deviation from skew symmetry, `|M + M*|_max`.
    pub fn skew_deviation(&self) -> f64 {
        (self + &self.adjoint()).max_norm()
    }

    /// Contiguous block of shape `nr x nc` starting at (r0, c0).
    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        assert!(
            r0 + nr <= self.rows() && c0 + nc <= self.cols(),
            "submatrix out of range"
        );
        Self::from_fn(nr, nc, |i, j| self.inner[(r0 + i, c0 + j)])
    }

    /// Horizontal concatenation.
    pub fn hcat(parts: &[&ComplexMatrix]) -> Self {
        assert!(!parts.is_empty(), "hcat of nothing");
        let rows = parts[0].rows();
        assert!(parts.iter().all(|p| p.rows() == rows), "hcat row mismatch");
        let cols: usize = parts.iter().map(|p| p.cols()).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            for i in 0..rows {
                for j in 0..p.cols() {
                    out.inner[(i, c0 + j)] = p.inner[(i, j)];
                }
            }
            c0 += p.cols();
        }
        out
    }

    /// Vertical concatenation.
    pub fn vcat(parts: &[&ComplexMatrix]) -> Self {
        assert!(!parts.is_empty(), "vcat of nothing");
        let cols = parts[0].cols();
        assert!(parts.iter().all(|p| p.cols() == cols), "vcat col mismatch");
        let rows: usize = parts.iter().map(|p| p.rows()).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            for i in 0..p.rows() {
                for j in 0..cols {
                    out.inner[(r0 + i, j)] = p.inner[(i, j)];
                }
            }
            r0 += p.rows();
        }
        out
    }

    /// 2x2 block assembly [[a, b], [c, d]].
    pub fn block_2x2(
        a: &ComplexMatrix,
        b: &ComplexMatrix,
        c: &ComplexMatrix,
        d: &ComplexMatrix,
    ) -> Self {
        let top = Self::hcat(&[a, b]);
        let bottom = Self::hcat(&[c, d]);
        Self::vcat(&[&top, &bottom])
    }

    /// Block diagonal direct sum.
    pub fn direct_sum(parts: &[&ComplexMatrix]) -> Self {
        let rows: usize = parts.iter().map(|p| p.rows()).sum();
        let cols: usize = parts.iter().map(|p| p.cols()).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            for i in 0..p.rows() {
                for j in 0..p.cols() {
                    out.inner[(r0 + i, c0 + j)] = p.inner[(i, j)];
                }
            }
            r0 += p.rows();
            c0 += p.cols();
        }
        out
    }

    /// Kronecker product, row index (i, s) -> i * other.rows() + s.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        ComplexMatrix {
            inner: self.inner.kronecker(&other.inner),
        }
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows()).map(|i| self.inner[(i, i)]).sum()
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{})", self.rows(), self.cols())?;
        if self.rows() * self.cols() <= 36 {
            writeln!(f)?;
            for i in 0..self.rows() {
                write!(f, "  [")?;
                for j in 0..self.cols() {
                    let z = self.inner[(i, j)];
                    write!(f, " {:.4}{:+.4}i", z.re, z.im)?;
                }
                writeln!(f, " ]")?;
            }
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.inner[idx]
    }
}

macro_rules! binop_dim_check {
    ($lhs:expr, $rhs:expr, $what:expr) => {
        assert!(
            $lhs.rows() == $rhs.rows() && $lhs.cols() == $rhs.cols(),
            "{} shape mismatch: {}x{} vs {}x{}",
            $what,
            $lhs.rows(),
            $lhs.cols(),
            $rhs.rows(),
            $rhs.cols()
        );
    };
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        binop_dim_check!(self, rhs, "add");
        ComplexMatrix {
            inner: &self.inner + &rhs.inner,
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        binop_dim_check!(self, rhs, "sub");
        ComplexMatrix {
            inner: &self.inner - &rhs.inner,
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert!(
            self.cols() == rhs.rows(),
            "mul shape mismatch: {}x{} * {}x{}",
            self.rows(),
            self.cols(),
            rhs.rows(),
            rhs.cols()
        );
        ComplexMatrix {
            inner: &self.inner * &rhs.inner,
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix {
            inner: -self.inner.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn row_major_round_trip() {
        let m = ComplexMatrix::from_row_major(2, 3, &[
            c(1.0, 0.0),
            c(2.0, -1.0),
            c(0.0, 3.0),
            c(4.0, 0.0),
            c(5.0, 5.0),
            c(6.0, 0.0),
        ])
        .unwrap();
        assert_eq!(m.get(0, 1), c(2.0, -1.0));
        assert_eq!(m.get(1, 0), c(4.0, 0.0));
        let back = m.row_major_entries();
        assert_eq!(back[1], c(2.0, -1.0));
        assert_eq!(back.len(), 6);
    }

    #[test]
    fn entry_count_mismatch_rejected() {
        assert!(ComplexMatrix::from_row_major(2, 2, &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(3.0, -1.0)]]).unwrap();
        let a = m.adjoint();
        assert_eq!(a.rows(), 2);
        assert_eq!(a.get(0, 0), c(1.0, -2.0));
        assert_eq!(a.get(1, 0), c(3.0, 1.0));
    }

    #[test]
    fn empty_products_are_zero_matrices() {
        // q x 0 times 0 x m must give a q x m zero matrix.
        let a = ComplexMatrix::zeros(2, 0);
        let b = ComplexMatrix::zeros(0, 3);
        let p = &a * &b;
        assert_eq!((p.rows(), p.cols()), (2, 3));
        assert_eq!(p.max_norm(), 0.0);
    }

    #[test]
    fn block_assembly_and_extraction() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::zeros(2, 1);
        let cm = ComplexMatrix::zeros(1, 2);
        let d = ComplexMatrix::scalar(c(7.0, 0.0));
        let m = ComplexMatrix::block_2x2(&a, &b, &cm, &d);
        assert_eq!((m.rows(), m.cols()), (3, 3));
        assert_eq!(m.get(2, 2), c(7.0, 0.0));
        let d_back = m.submatrix(2, 2, 1, 1);
        assert_eq!(d_back.get(0, 0), c(7.0, 0.0));
    }

    #[test]
    fn hermitian_and_skew_parts_sum_back() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(2.0, 0.5)],
            vec![c(0.0, -3.0), c(4.0, 2.0)],
        ])
        .unwrap();
        let back = &m.hermitian_part() + &m.skew_part();
        assert!((&back - &m).max_norm() < 1e-15);
        assert!(m.hermitian_part().hermitian_deviation() < 1e-15);
        assert!(m.skew_part().skew_deviation() < 1e-15);
    }

    #[test]
    fn check_finite_flags_nan() {
        let mut m = ComplexMatrix::identity(2);
        assert!(m.check_finite("m").is_ok());
        m.set(0, 1, c(f64::NAN, 0.0));
        assert!(m.check_finite("m").is_err());
    }
}
