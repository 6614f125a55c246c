//! d-fold positive and spectral decompositions of the identity.
//!
//! A positive decomposition is a tuple (Y_1, ..., Y_d) of selfadjoint
//! contractions with 0 <= Y_k <= I summing to the identity; a spectral
//! decomposition additionally consists of orthogonal projections (pairwise
//! orthogonal ranges follow from the sum condition). These feed the linear
//! pencils `Y(w) = w_1 Y_1 + ... + w_d Y_d` appearing in every structured
//! resolvent, and every positive decomposition dilates to a spectral one on
//! a d-fold larger space (Naimark).

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::tol::Tolerances;
use num_complex::Complex64;

/// Whether the parts are merely PSD contractions or orthogonal projections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionKind {
    Positive,
    Spectral,
}

/// A validated d-fold decomposition of the identity.
#[derive(Clone, Debug)]
pub struct DecompositionOfIdentity {
    d: usize,
    dim: usize,
    parts: Vec<ComplexMatrix>,
    kind: DecompositionKind,
}

impl DecompositionOfIdentity {
    /// Validate and build a decomposition. Every invariant is checked; the
    /// error names the first violated one.
    pub fn new(
        parts: Vec<ComplexMatrix>,
        kind: DecompositionKind,
        tol: &Tolerances,
    ) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::NotDecomposition("no parts given".into()));
        }
        let dim = parts[0].rows();
        for (k, y) in parts.iter().enumerate() {
            if !y.is_square() || y.rows() != dim {
                return Err(Error::NotDecomposition(format!(
                    "part {k} has shape {}x{}, expected {dim}x{dim}",
                    y.rows(),
                    y.cols()
                )));
            }
            y.check_finite("decomposition part")?;
            let dev = y.hermitian_deviation();
            if dev > tol.tol_herm * (1.0 + y.max_norm()) {
                return Err(Error::NotDecomposition(format!(
                    "part {k} is not Hermitian (deviation {dev:.3e})"
                )));
            }
            if dim > 0 {
                let lo = linalg::min_eig(y, tol)?;
                if lo < -tol.psd_slack {
                    return Err(Error::NotDecomposition(format!(
                        "part {k} has eigenvalue {lo:.3e} below -psd_slack"
                    )));
                }
                let hi = linalg::max_eig(y, tol)?;
                if hi > 1.0 + tol.psd_slack {
                    return Err(Error::NotDecomposition(format!(
                        "part {k} has eigenvalue {hi:.3e} above 1 + psd_slack"
                    )));
                }
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for y in &parts {
            sum = &sum + y;
        }
        let sum_resid = (&sum - &ComplexMatrix::identity(dim)).max_norm();
        if sum_resid > tol.tol_structure {
            return Err(Error::NotDecomposition(format!(
                "parts sum to identity only within {sum_resid:.3e}"
            )));
        }
        if kind == DecompositionKind::Spectral {
            for (k, y) in parts.iter().enumerate() {
                let idem = (&(y * y) - y).max_norm();
                if idem > tol.tol_structure {
                    return Err(Error::NotDecomposition(format!(
                        "part {k} fails Y^2 = Y by {idem:.3e}, not a projection"
                    )));
                }
            }
        }
        Ok(DecompositionOfIdentity {
            d: parts.len(),
            dim,
            parts,
            kind,
        })
    }

    /// The trivial one-variable spectral decomposition (I) on dimension `dim`.
    pub fn trivial(dim: usize) -> Self {
        DecompositionOfIdentity {
            d: 1,
            dim,
            parts: vec![ComplexMatrix::identity(dim)],
            kind: DecompositionKind::Spectral,
        }
    }

    /// Spectral decomposition with the standard basis split into blocks of
    /// the given sizes (coordinate projections).
    pub fn coordinate_blocks(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::NotDecomposition("no block sizes".into()));
        }
        let dim: usize = sizes.iter().sum();
        let mut parts = Vec::with_capacity(sizes.len());
        let mut offset = 0usize;
        for &s in sizes {
            let mut p = ComplexMatrix::zeros(dim, dim);
            for i in offset..offset + s {
                p.set(i, i, Complex64::new(1.0, 0.0));
            }
            parts.push(p);
            offset += s;
        }
        Ok(DecompositionOfIdentity {
            d: sizes.len(),
            dim,
            parts,
            kind: DecompositionKind::Spectral,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> DecompositionKind {
        self.kind
    }

    pub fn is_spectral(&self) -> bool {
        self.kind == DecompositionKind::Spectral
    }

    pub fn part(&self, k: usize) -> &ComplexMatrix {
        &self.parts[k]
    }

    pub fn parts(&self) -> &[ComplexMatrix] {
        &self.parts
    }

    /// The pencil value `Y(w) = w_1 Y_1 + ... + w_d Y_d`.
    pub fn pencil_at(&self, w: &[Complex64]) -> Result<ComplexMatrix> {
        if w.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "pencil_at: {} coordinates for a {}-variable decomposition",
                w.len(),
                self.d
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (k, y) in self.parts.iter().enumerate() {
            out = &out + &y.scale(w[k]);
        }
        Ok(out)
    }

    /// Naimark dilation: a spectral decomposition (P_1, ..., P_d) on the
    /// d-fold direct sum together with an isometry `iota` such that
    /// `iota* iota = I` and `iota* P_k iota = Y_k`.
    ///
    /// The construction stacks PSD square roots Q_k of the parts,
    /// `iota = col(Q_1, ..., Q_d)`, and takes P_k to be the projection onto
    /// the k-th block. A spectral input is reproduced exactly in the sense
    /// of the compression identity.
    pub fn naimark_dilate(&self, tol: &Tolerances) -> Result<(Self, ComplexMatrix)> {
        let mut roots = Vec::with_capacity(self.d);
        for y in &self.parts {
            roots.push(linalg::psd_sqrt(y, tol)?);
        }
        let refs: Vec<&ComplexMatrix> = roots.iter().collect();
        let iota = ComplexMatrix::vcat(&refs);
        let spectral = Self::coordinate_blocks(&vec![self.dim; self.d])?;
        Ok((spectral, iota))
    }

    /// Extend to a positive decomposition on `dim + extra` dimensions. The
    /// padded directions are assigned entirely to part k = 1 (index 0), so a
    /// spectral decomposition stays spectral.
    pub fn pad(&self, extra: usize) -> Self {
        if extra == 0 {
            return self.clone();
        }
        let id_extra = ComplexMatrix::identity(extra);
        let zero_extra = ComplexMatrix::zeros(extra, extra);
        let parts: Vec<ComplexMatrix> = self
            .parts
            .iter()
            .enumerate()
            .map(|(k, y)| {
                let tail = if k == 0 { &id_extra } else { &zero_extra };
                ComplexMatrix::direct_sum(&[y, tail])
            })
            .collect();
        DecompositionOfIdentity {
            d: self.d,
            dim: self.dim + extra,
            parts,
            kind: self.kind,
        }
    }

    /// Residual of the sum-to-identity condition (diagnostic).
    pub fn sum_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for y in &self.parts {
            sum = &sum + y;
        }
        (&sum - &ComplexMatrix::identity(self.dim)).max_norm()
    }
}
