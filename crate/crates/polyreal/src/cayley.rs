//! The Cayley-transform lattice.
//!
//! Point maps between the polydisk and the right polyhalfplane, value maps
//! between Herglotz and Schur pictures, the unitary <-> skew-adjoint matrix
//! transform with 1-eigenspace splitting, and the realization-level
//! conversions built from them:
//!
//! * points: `z -> (1+z)/(1-z)` componentwise, inverse `w -> (w-1)/(w+1)`;
//! * values: `F -> (F-I)(F+I)^{-1}`, inverse `S -> (I+S)(I-S)^{-1}`;
//! * matrices: `U -> (I+U)(I-U)^{-1}` maps unitaries without eigenvalue 1
//!   onto skew-adjoints, inverse `Y -> (Y-I)(Y+I)^{-1}`;
//! * realizations: unitary Givone-Roesser colligation -> Herglotz
//!   representation, and colligation -> impedance node on the halfplane.

use crate::classes::{
    HerglotzDiskColligation, HerglotzRepresentation, Metric, NodeFlavor, PiNode,
    SchurGRColligation,
};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::tol::{Tolerances, Validation};
use num_complex::Complex64;

/// Componentwise `w_k = (1 + z_k) / (1 - z_k)`, mapping the polydisk into
/// the right polyhalfplane.
pub fn cayley_point_d2h(zeta: &[Complex64]) -> Result<Vec<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    zeta.iter()
        .map(|&z| {
            let denom = one - z;
            if denom.norm() < 1e-14 {
                Err(Error::PoleAtOne)
            } else {
                Ok((one + z) / denom)
            }
        })
        .collect()
}

/// Componentwise `z_k = (w_k - 1) / (w_k + 1)`, inverse of
/// [`cayley_point_d2h`].
pub fn cayley_point_h2d(w: &[Complex64]) -> Result<Vec<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    w.iter()
        .map(|&x| {
            let denom = x + one;
            if denom.norm() < 1e-14 {
                Err(Error::PoleAtMinusOne)
            } else {
                Ok((x - one) / denom)
            }
        })
        .collect()
}

/// Value map `S = (F - I)(F + I)^{-1}`. If `Re F >= 0` the result is a
/// contraction.
pub fn cayley_value_f_to_s(f: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if !f.is_square() {
        return Err(Error::DimensionMismatch("value Cayley needs a square matrix".into()));
    }
    let id = ComplexMatrix::identity(f.rows());
    let fplus = f + &id;
    let rc = linalg::rcond(&fplus);
    if rc < tol.rcond_cayley {
        return Err(Error::SingularMatrix { rcond: rc });
    }
    linalg::solve_right(&fplus, &(f - &id), tol)
}

/// Value map `F = (I + S)(I - S)^{-1}`, inverse of [`cayley_value_f_to_s`].
pub fn cayley_value_s_to_f(s: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch("value Cayley needs a square matrix".into()));
    }
    let id = ComplexMatrix::identity(s.rows());
    let iminus = &id - s;
    let rc = linalg::rcond(&iminus);
    if rc < tol.rcond_cayley {
        return Err(Error::SingularMatrix { rcond: rc });
    }
    linalg::solve_right(&iminus, &(&id + s), tol)
}

/// `Y = (I + U)(I - U)^{-1}` for unitary `U` with spectrum bounded away
/// from 1. The result is skew-adjoint.
pub fn unitary_to_skew(u: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let res = linalg::unitarity_residual(u);
    if res > tol.tol_structure {
        return Err(Error::NotUnitary { residual: res });
    }
    if u.rows() == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let (vals, _) = linalg::unitary_eig(u, tol)?;
    let one = Complex64::new(1.0, 0.0);
    let closest = vals.iter().map(|v| (v - one).norm()).fold(f64::INFINITY, f64::min);
    if closest <= tol.split_tol {
        return Err(Error::EigenvalueOne { tol: tol.split_tol });
    }
    let id = ComplexMatrix::identity(u.rows());
    linalg::solve_right(&(&id - u), &(&id + u), tol)
}

/// `U = (Y - I)(Y + I)^{-1}` for skew-adjoint `Y`; inverse of
/// [`unitary_to_skew`]. `Y + I` is always invertible for skew `Y`.
pub fn skew_to_unitary(y: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let dev = y.skew_deviation();
    if dev > tol.tol_structure * (1.0 + y.max_norm()) {
        return Err(Error::NotSkewAdjoint { deviation: dev });
    }
    if y.rows() == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let id = ComplexMatrix::identity(y.rows());
    linalg::solve_right(&(y + &id), &(y - &id), tol)
}

/// Orthogonal split of the state space along the 1-eigenspace of a unitary.
#[derive(Clone, Debug)]
pub struct EigenSplit {
    /// Orthonormal columns spanning the eigenspace for eigenvalue 1.
    pub basis1: ComplexMatrix,
    /// Orthonormal columns spanning the orthogonal complement.
    pub basis0: ComplexMatrix,
    /// Compression of U to the complement; unitary without eigenvalue 1.
    pub u00: ComplexMatrix,
}

impl EigenSplit {
    pub fn dim1(&self) -> usize {
        self.basis1.cols()
    }
    pub fn dim0(&self) -> usize {
        self.basis0.cols()
    }
}

/// Split a unitary `U` along its 1-eigenspace: eigenvectors with
/// `|lambda - 1| <= split_tol` span `basis1`, the rest span `basis0`, and
/// `u00 = basis0* U basis0` is unitary with spectrum bounded away from 1.
pub fn split_eigenspace_one(
    u: &ComplexMatrix,
    split_tol: f64,
    tol: &Tolerances,
) -> Result<EigenSplit> {
    let res = linalg::unitarity_residual(u);
    if u.rows() > 0 && res > tol.tol_structure {
        return Err(Error::NotUnitary { residual: res });
    }
    let n = u.rows();
    let (vals, vecs) = linalg::unitary_eig(u, tol)?;
    let one = Complex64::new(1.0, 0.0);
    let mut idx1 = Vec::new();
    let mut idx0 = Vec::new();
    for (j, v) in vals.iter().enumerate() {
        if (v - one).norm() <= split_tol {
            idx1.push(j);
        } else {
            idx0.push(j);
        }
    }
    let pick = |idx: &[usize]| {
        ComplexMatrix::from_fn(n, idx.len(), |i, j| vecs.get(i, idx[j]))
    };
    let basis1 = pick(&idx1);
    let basis0 = pick(&idx0);
    let u00 = &(&basis0.adjoint() * u) * &basis0;
    Ok(EigenSplit {
        basis1,
        basis0,
        u00,
    })
}

/// Which normalization of `V` a colligation-to-representation conversion
/// uses.
///
/// `Derived` takes `V = B (I - D)^{-1}`, which satisfies both the resolvent
/// identity and `V*V = Re F(0)`. `SqrtHalfB` takes `V = B / sqrt(2)`; it is
/// kept selectable for comparison but fails `V*V = Re F(0)` already on the
/// shift colligation, and the constructor records the discrepancy as a
/// warning on the result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VNormalization {
    #[default]
    Derived,
    SqrtHalfB,
}

/// Convert a unitary Givone-Roesser colligation (p = q, `I - D` invertible)
/// into a Herglotz representation of `F = (I + S)(I - S)^{-1}`:
///
/// `U = (A + B (I - D)^{-1} C)*`, `R = skew part of (I + D)(I - D)^{-1}`,
/// and `V` per the chosen normalization, over the same spectral
/// decomposition.
pub fn schur_gr_to_herglotz_rep(
    col: &SchurGRColligation,
    normalization: VNormalization,
    tol: &Tolerances,
) -> Result<HerglotzRepresentation> {
    if col.metric() != Metric::Unitary {
        return Err(Error::NotUnitary {
            residual: linalg::unitarity_residual(&col.assembled()),
        });
    }
    if col.input_dim() != col.output_dim() {
        return Err(Error::DimensionMismatch(
            "conversion needs p = q".into(),
        ));
    }
    let q = col.input_dim();
    let id = ComplexMatrix::identity(q);
    let iminus_d = &id - col.d();
    let rc = linalg::rcond(&iminus_d);
    if rc < tol.rcond_cayley {
        return Err(Error::SingularIminusD { rcond: rc });
    }
    let b_scaled = linalg::solve_right(&iminus_d, col.b(), tol)?; // B (I - D)^{-1}
    let u0 = col.a() + &(&b_scaled * col.c());
    let u = u0.adjoint();
    let f0 = linalg::solve_right(&iminus_d, &(&id + col.d()), tol)?; // (I + D)(I - D)^{-1}
    let r = f0.skew_part();
    let v = match normalization {
        VNormalization::Derived => b_scaled,
        VNormalization::SqrtHalfB => col.b().scale_re(1.0 / 2.0f64.sqrt()),
    };
    let mut rep = HerglotzRepresentation::new(
        r,
        u,
        v.clone(),
        col.dec().clone(),
        tol,
        Validation::Strict,
    )?;
    // Report (not enforce) the V*V = Re F(0) identity for the chosen V.
    let gap = (&(&v.adjoint() * &v) - &f0.hermitian_part()).max_norm();
    if gap > tol.psd_slack {
        rep.push_warning(format!(
            "V*V differs from Re F(0) by {gap:.3e} under normalization {normalization:?}"
        ));
    }
    Ok(rep)
}

/// Cayley transform of a whole unitary colligation into an
/// impedance-conservative node on the halfplane.
///
/// Requires the assembled matrix to have no eigenvalue at 1. With
/// `Ytilde = (I + U)(I - U)^{-1}` (skew), the node is the column flip
/// `[[A, B], [C, D]] = [[-Ytilde_11, Ytilde_12], [-Ytilde_21, Ytilde_22]]`,
/// over the colligation's spectral decomposition reused as a positive one.
/// Its transfer function is the double Cayley transform of `S`:
/// `f(w) = (I + S(z(w)))(I - S(z(w)))^{-1}` with `z(w) = (w-1)/(w+1)`.
pub fn gr_to_pi_impedance(col: &SchurGRColligation, tol: &Tolerances) -> Result<PiNode> {
    if col.metric() != Metric::Unitary {
        return Err(Error::NotUnitary {
            residual: linalg::unitarity_residual(&col.assembled()),
        });
    }
    let n = col.state_dim();
    let q = col.input_dim();
    let assembled = col.assembled();
    let ytilde = unitary_to_skew(&assembled, tol)?;
    let a = ytilde.submatrix(0, 0, n, n).scale_re(-1.0);
    let b = ytilde.submatrix(0, n, n, q);
    let c = ytilde.submatrix(n, 0, q, n).scale_re(-1.0);
    let d = ytilde.submatrix(n, n, q, q);
    PiNode::new(
        a,
        b,
        c,
        d,
        col.dec().clone(),
        NodeFlavor::Impedance,
        tol,
        Validation::Strict,
    )
}

/// Inverse identification: an (id)-constrained Herglotz colligation yields
/// a unitary Givone-Roesser colligation for `S = (F - I)(F + I)^{-1}`:
///
/// `bD = (D - I)(D + I)^{-1}`, `bB = sqrt(2) B (D + I)^{-1}`,
/// `bC = sqrt(2) (D + I)^{-1} C`, `bA = A - B (D + I)^{-1} C`.
pub fn herglotz_colligation_to_schur_gr(
    col: &HerglotzDiskColligation,
    tol: &Tolerances,
) -> Result<SchurGRColligation> {
    let q = col.input_dim();
    let id = ComplexMatrix::identity(q);
    let dplus = col.d() + &id;
    let rc = linalg::rcond(&dplus);
    if rc < tol.rcond_cayley {
        return Err(Error::SingularMatrix { rcond: rc });
    }
    let s2 = 2.0f64.sqrt();
    let b_over = linalg::solve_right(&dplus, col.b(), tol)?; // B (D + I)^{-1}
    let c_over = linalg::solve(&dplus, col.c(), tol)?; // (D + I)^{-1} C
    let big_a = col.a() - &(&b_over * col.c());
    let big_b = b_over.scale_re(s2);
    let big_c = c_over.scale_re(s2);
    let big_d = linalg::solve_right(&dplus, &(col.d() - &id), tol)?;
    SchurGRColligation::new(
        big_a,
        big_b,
        big_c,
        big_d,
        col.dec().clone(),
        Metric::Unitary,
        tol,
        Validation::Strict,
    )
}

/// Forward identification used by the sample-based realization: a unitary
/// colligation for `S` becomes an (id)-satisfying Herglotz colligation for
/// `F = (I + S)(I - S)^{-1}`:
///
/// `A = bA + bB (I - bD)^{-1} bC`, `B = sqrt(2) bB (I - bD)^{-1}`,
/// `C = sqrt(2) (I - bD)^{-1} bC`, `D = (I + bD)(I - bD)^{-1}`.
pub fn schur_gr_to_herglotz_colligation(
    col: &SchurGRColligation,
    tol: &Tolerances,
) -> Result<HerglotzDiskColligation> {
    if col.metric() != Metric::Unitary {
        return Err(Error::NotUnitary {
            residual: linalg::unitarity_residual(&col.assembled()),
        });
    }
    if col.input_dim() != col.output_dim() {
        return Err(Error::DimensionMismatch("conversion needs p = q".into()));
    }
    let q = col.input_dim();
    let id = ComplexMatrix::identity(q);
    let iminus = &id - col.d();
    let rc = linalg::rcond(&iminus);
    if rc < tol.rcond_cayley {
        return Err(Error::SingularIminusD { rcond: rc });
    }
    let s2 = 2.0f64.sqrt();
    let b_over = linalg::solve_right(&iminus, col.b(), tol)?;
    let c_over = linalg::solve(&iminus, col.c(), tol)?;
    let a = col.a() + &(&b_over * col.c());
    let b = b_over.scale_re(s2);
    let c = c_over.scale_re(s2);
    let d = linalg::solve_right(&iminus, &(&id + col.d()), tol)?;
    HerglotzDiskColligation::new(a, b, c, d, col.dec().clone(), tol, Validation::Strict)
}
