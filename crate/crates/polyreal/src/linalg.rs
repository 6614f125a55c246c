//! Numerical kernels on [`ComplexMatrix`]: linear solves, Hermitian
//! eigendecomposition, SVD-based range/complement computation and PSD tests.
//!
//! All operations are pure functions over immutable inputs. Factorizations
//! are delegated to nalgebra; this module fixes the contracts (condition
//! screening, eigenvalue ordering, orthonormality) the rest of the library
//! relies on.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tol::Tolerances;
use nalgebra::{SymmetricEigen, SVD};
use num_complex::Complex64;

/// Reciprocal condition number sigma_min / sigma_max estimated by SVD.
///
/// Empty matrices report 1.0; a zero matrix reports 0.0.
pub fn rcond(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let sv = singular_values(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);
    if smax == 0.0 {
        0.0
    } else {
        smin / smax
    }
}

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let svd = SVD::try_new(a.as_na().clone(), false, false, f64::EPSILON, 0)
        .expect("SVD iteration failed to converge");
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Operator norm (largest singular value).
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Solve A X = B for square A.
///
/// Refuses systems whose estimated reciprocal condition number falls below
/// `tol.rcond_solve`.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "solve needs a square A, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: A is {}x{} but B has {} rows",
            a.rows(),
            a.cols(),
            b.rows()
        )));
    }
    if a.rows() == 0 {
        return Ok(ComplexMatrix::zeros(0, b.cols()));
    }
    a.check_finite("solve lhs")?;
    b.check_finite("solve rhs")?;
    let rc = rcond(a);
    if rc < tol.rcond_solve {
        return Err(Error::SingularMatrix { rcond: rc });
    }
    let lu = a.as_na().clone().lu();
    match lu.solve(b.as_na()) {
        Some(x) => Ok(ComplexMatrix::from_na(x)),
        None => Err(Error::SingularMatrix { rcond: rc }),
    }
}

/// Solve X A = B for square A, via the adjoint system.
pub fn solve_right(a: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if a.rows() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "solve_right: A is {}x{} but B has {} cols",
            a.rows(),
            a.cols(),
            b.cols()
        )));
    }
    Ok(solve(&a.adjoint(), &b.adjoint(), tol)?.adjoint())
}

/// Matrix inverse, same conditioning screen as [`solve`].
pub fn inverse(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()), tol)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order together with a unitary matrix of
/// eigenvectors (columns), so that `M Q = Q diag(lambda)`. The input must be
/// Hermitian within `tol.tol_herm`; it is symmetrized before factorization.
pub fn hermitian_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_eig needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    m.check_finite("hermitian_eig input")?;
    let dev = m.hermitian_deviation();
    if dev > tol.tol_herm * (1.0 + m.max_norm()) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let sym = m.hermitian_part();
    let eig = SymmetricEigen::try_new(sym.as_na().clone(), f64::EPSILON, 0)
        .expect("Hermitian eigensolver failed to converge");
    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let sorted_vals: Vec<f64> = order.iter().map(|&i| vals[i]).collect();
    let q = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((sorted_vals, q))
}

/// Smallest eigenvalue of a Hermitian matrix. Empty input reports 0.
pub fn min_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    if m.rows() == 0 {
        return Ok(0.0);
    }
    let (vals, _) = hermitian_eig(m, tol)?;
    Ok(vals[0])
}

/// Largest eigenvalue of a Hermitian matrix. Empty input reports 0.
pub fn max_eig(m: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    if m.rows() == 0 {
        return Ok(0.0);
    }
    let (vals, _) = hermitian_eig(m, tol)?;
    Ok(*vals.last().unwrap())
}

/// PSD square root of a Hermitian matrix.
///
/// Eigenvalues in `[-psd_slack, 0)` are clipped to zero; anything below
/// `-psd_slack` is an error, since the input then is not numerically PSD.
pub fn psd_sqrt(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (vals, q) = hermitian_eig(m, tol)?;
    let mut root = Vec::with_capacity(vals.len());
    for &v in &vals {
        if v < -tol.psd_slack {
            return Err(Error::NotDecomposition(format!(
                "matrix is not PSD: eigenvalue {v:.3e} below -psd_slack"
            )));
        }
        root.push(v.max(0.0).sqrt());
    }
    let d = ComplexMatrix::from_real_diagonal(&root);
    Ok(&(&q * &d) * &q.adjoint())
}

/// Thin SVD with singular values in descending order: `A = U diag(s) V*`.
pub fn svd_thin(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let (m, n) = (a.rows(), a.cols());
    let k = m.min(n);
    if k == 0 {
        return (
            ComplexMatrix::zeros(m, 0),
            Vec::new(),
            ComplexMatrix::zeros(n, 0),
        );
    }
    let svd = SVD::try_new(a.as_na().clone(), true, true, f64::EPSILON, 0)
        .expect("SVD iteration failed to converge");
    let u = svd.u.expect("SVD requested U");
    let vt = svd.v_t.expect("SVD requested V*");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap());
    let s: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    let u_s = ComplexMatrix::from_fn(m, k, |i, j| u[(i, order[j])]);
    let v_s = ComplexMatrix::from_fn(n, k, |i, j| vt[(order[j], i)].conj());
    (u_s, s, v_s)
}

/// Orthonormal basis of the range of `a`: columns of U for singular values
/// above `tol.svd_rank_rel * sigma_max`.
pub fn orthonormal_range(a: &ComplexMatrix, tol: &Tolerances) -> ComplexMatrix {
    let (u, s, _) = svd_thin(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let r = s.iter().take_while(|&&x| x > tol.svd_rank_rel * smax && x > 0.0).count();
    u.submatrix(0, 0, u.rows(), r)
}

/// Orthonormal basis of the orthogonal complement of the column span of `q`
/// (`q` is expected to have orthonormal columns).
///
/// Computed from the spectral projector `I - q q*`, which keeps the result
/// deterministic and exactly orthonormal.
pub fn orthonormal_complement(q: &ComplexMatrix, tol: &Tolerances) -> ComplexMatrix {
    let n = q.rows();
    let proj = &ComplexMatrix::identity(n) - &(q * &q.adjoint());
    let (vals, vecs) = hermitian_eig(&proj, tol).expect("projector is Hermitian");
    // eigenvalues ascending; complement directions carry eigenvalue ~1
    let start = vals.iter().take_while(|&&v| v < 0.5).count();
    vecs.submatrix(0, start, n, n - start)
}

/// Residual of unitarity: max of `|U*U - I|_max` and `|U U* - I|_max`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let id = ComplexMatrix::identity(u.rows());
    let a = (&(&u.adjoint() * u) - &id).max_norm();
    let b = (&(u * &u.adjoint()) - &id).max_norm();
    a.max(b)
}

/// Eigendecomposition of a unitary matrix.
///
/// Returns eigenvalues (on the unit circle) and a unitary eigenvector matrix.
/// Uses the joint Hermitian eigenproblem of (U + U*)/2 and (U - U*)/(2i):
/// the first factorization clusters by real part, the second refines each
/// cluster, which separates conjugate pairs. Eigenvalues are recovered by
/// Rayleigh quotients.
pub fn unitary_eig(u: &ComplexMatrix, tol: &Tolerances) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    let res = unitarity_residual(u);
    if res > tol.tol_structure * 10.0 + 1e-12 {
        return Err(Error::NotUnitary { residual: res });
    }
    let n = u.rows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    let h = u.hermitian_part();
    let k = u.skew_part().scale(Complex64::new(0.0, -1.0)); // (U - U*)/(2i), Hermitian
    let (hv, hq) = hermitian_eig(&h, tol)?;

    let cluster_tol = 1e-7;
    let mut q = ComplexMatrix::zeros(n, n);
    let mut col = 0;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && hv[end] - hv[end - 1] <= cluster_tol {
            end += 1;
        }
        let block = hq.submatrix(0, start, n, end - start);
        if end - start == 1 {
            for i in 0..n {
                q.set(i, col, block.get(i, 0));
            }
            col += 1;
        } else {
            // refine the cluster with the imaginary part
            let kc = &(&block.adjoint() * &k) * &block;
            let (_, w) = hermitian_eig(&kc.hermitian_part(), tol)?;
            let refined = &block * &w;
            for j in 0..(end - start) {
                for i in 0..n {
                    q.set(i, col, refined.get(i, j));
                }
                col += 1;
            }
        }
        start = end;
    }

    // Rayleigh quotients give the unitary eigenvalues.
    let uq = u * &q;
    let mut vals = Vec::with_capacity(n);
    for j in 0..n {
        let mut lambda = Complex64::new(0.0, 0.0);
        for i in 0..n {
            lambda += q.get(i, j).conj() * uq.get(i, j);
        }
        vals.push(lambda);
    }
    Ok((vals, q))
}
