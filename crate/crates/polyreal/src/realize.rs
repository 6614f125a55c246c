//! Realization from finitely many samples (lurking isometry).
//!
//! Input: samples of a function together with Kolmogorov factors of its
//! Agler kernels, `I - S(y)*S(z) = sum_k (1 - conj(y_k) z_k) H_k(y)* H_k(z)`.
//! Stacking the structured data columns
//!
//! `L(z) = [P(z) H(z); I]`, `R(z) = [H(z); S(z)]`
//!
//! the identity says exactly that Gram(L) = Gram(R), so the map L -> R
//! extends from span(L) to an isometry, and (for p = q) to a unitary
//! colligation `U = [[A, B], [C, D]]` with `U L(z) = R(z)`. Those relations
//! pin `A P H + B = H` and `C P H + D = S`, which makes the reconstruction
//! exact at every sample point. The state decomposition is the coordinate
//! split by factor rows.

use crate::cayley::schur_gr_to_herglotz_colligation;
use crate::classes::{HerglotzDiskColligation, Metric, SchurGRColligation};
use crate::decomp::DecompositionOfIdentity;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::tol::{Tolerances, Validation};
use num_complex::Complex64;

/// One function sample with Kolmogorov factors of its Agler kernels.
#[derive(Clone, Debug)]
pub struct DecompositionSample {
    /// Point in the open polydisk.
    pub point: Vec<Complex64>,
    /// Function value at the point (p x q).
    pub value: ComplexMatrix,
    /// Factors H_k at the point, each m_k x q.
    pub factors: Vec<ComplexMatrix>,
}

impl DecompositionSample {
    /// Stacked factor column H = col(H_1, ..., H_d).
    pub fn stacked_factor(&self) -> ComplexMatrix {
        let refs: Vec<&ComplexMatrix> = self.factors.iter().collect();
        ComplexMatrix::vcat(&refs)
    }

    /// Stacked factor with each block scaled by its coordinate:
    /// `P(z) H(z) = col(z_1 H_1, ..., z_d H_d)`.
    pub fn scaled_factor(&self) -> ComplexMatrix {
        let scaled: Vec<ComplexMatrix> = self
            .factors
            .iter()
            .zip(self.point.iter())
            .map(|(h, &z)| h.scale(z))
            .collect();
        let refs: Vec<&ComplexMatrix> = scaled.iter().collect();
        ComplexMatrix::vcat(&refs)
    }
}

fn check_sample_shapes(samples: &[DecompositionSample]) -> Result<(usize, usize, usize, Vec<usize>)> {
    if samples.is_empty() {
        return Err(Error::BadParams("no samples given".into()));
    }
    let d = samples[0].point.len();
    let p = samples[0].value.rows();
    let q = samples[0].value.cols();
    let block_dims: Vec<usize> = samples[0].factors.iter().map(|h| h.rows()).collect();
    if block_dims.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "{} factors for a {d}-variable sample",
            block_dims.len()
        )));
    }
    for (i, s) in samples.iter().enumerate() {
        if s.point.len() != d || s.value.rows() != p || s.value.cols() != q {
            return Err(Error::DimensionMismatch(format!("sample {i} has inconsistent shape")));
        }
        for (k, h) in s.factors.iter().enumerate() {
            if h.rows() != block_dims[k] || h.cols() != q {
                return Err(Error::DimensionMismatch(format!(
                    "sample {i} factor {k} is {}x{}, expected {}x{q}",
                    h.rows(),
                    h.cols(),
                    block_dims[k]
                )));
            }
        }
        for (k, z) in s.point.iter().enumerate() {
            if z.norm() >= 1.0 {
                return Err(Error::OutsideDomain(format!(
                    "sample {i} coordinate {k} has modulus {:.4} >= 1",
                    z.norm()
                )));
            }
        }
    }
    Ok((d, p, q, block_dims))
}

/// Max pairwise residual of the Schur-flavor Gram identity
/// `I - S(y)*S(z) - sum_k (1 - conj(y_k) z_k) H_k(y)* H_k(z)`.
pub fn schur_gram_residual(samples: &[DecompositionSample]) -> Result<f64> {
    let (_, _, q, _) = check_sample_shapes(samples)?;
    let id = ComplexMatrix::identity(q);
    let mut worst = 0.0f64;
    for sy in samples {
        for sz in samples {
            let mut acc = &id - &(&sy.value.adjoint() * &sz.value);
            for (k, (hy, hz)) in sy.factors.iter().zip(sz.factors.iter()).enumerate() {
                let weight = Complex64::new(1.0, 0.0) - sy.point[k].conj() * sz.point[k];
                acc = &acc - &(&hy.adjoint() * hz).scale(weight);
            }
            worst = worst.max(acc.max_norm());
        }
    }
    Ok(worst)
}

/// Max pairwise residual of the Herglotz-flavor identity
/// `F(y)* + F(z) - sum_k (1 - conj(y_k) z_k) H_k(y)* H_k(z)`.
pub fn herglotz_gram_residual(samples: &[DecompositionSample]) -> Result<f64> {
    check_sample_shapes(samples)?;
    let mut worst = 0.0f64;
    for sy in samples {
        for sz in samples {
            let mut acc = &sy.value.adjoint() + &sz.value;
            for (k, (hy, hz)) in sy.factors.iter().zip(sz.factors.iter()).enumerate() {
                let weight = Complex64::new(1.0, 0.0) - sy.point[k].conj() * sz.point[k];
                acc = &acc - &(&hy.adjoint() * hz).scale(weight);
            }
            worst = worst.max(acc.max_norm());
        }
    }
    Ok(worst)
}

/// Symmetric orthogonalization: the closest matrix with orthonormal columns,
/// `M (M*M)^{-1/2}`.
fn polish_isometry(m: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if m.cols() == 0 {
        return Ok(m.clone());
    }
    let gram = &m.adjoint() * m;
    let (vals, q) = linalg::hermitian_eig(&gram.hermitian_part(), tol)?;
    let inv_sqrt: Vec<f64> = vals
        .iter()
        .map(|&v| if v > 1e-28 { 1.0 / v.sqrt() } else { 0.0 })
        .collect();
    let fix = &(&q * &ComplexMatrix::from_real_diagonal(&inv_sqrt)) * &q.adjoint();
    Ok(m * &fix)
}

struct Completion {
    colligation_matrix: ComplexMatrix,
    metric: Metric,
}

/// Complete the partial isometry span(L) -> span(R) to a full structured
/// matrix. `defect_phase` rotates the codomain defect basis; it gives a
/// deterministic family of completions, all satisfying `U L = R`.
fn complete_isometry(
    l: &ComplexMatrix,
    r: &ComplexMatrix,
    defect_phase: Complex64,
    tol: &Tolerances,
) -> Result<Completion> {
    let dom = l.rows();
    let cod = r.rows();
    let (u_l, s_l, v_l) = linalg::svd_thin(l);
    let smax = s_l.first().copied().unwrap_or(0.0);
    let rank = s_l
        .iter()
        .take_while(|&&s| s > tol.svd_rank_rel * smax && s > 0.0)
        .count();
    let q_l = u_l.submatrix(0, 0, dom, rank);
    let v_r = v_l.submatrix(0, 0, v_l.rows(), rank);
    let sig_inv: Vec<f64> = s_l.iter().take(rank).map(|&s| 1.0 / s).collect();
    let m0 = &(r * &v_r) * &ComplexMatrix::from_real_diagonal(&sig_inv);
    // Gram equality makes m0 orthonormal up to the sample residual; polish
    // it so the completion below is exactly structured.
    let m = polish_isometry(&m0, tol)?;

    let k_l = linalg::orthonormal_complement(&q_l, tol);
    let k_r = linalg::orthonormal_complement(&m, tol).scale(defect_phase);
    let dom_defect = dom - rank;
    let cod_defect = cod - rank;

    if dom_defect <= cod_defect {
        // isometric completion (unitary when the dimensions agree)
        let k_r_sub = k_r.submatrix(0, 0, cod, dom_defect);
        let target = ComplexMatrix::hcat(&[&m, &k_r_sub]);
        let source = ComplexMatrix::hcat(&[&q_l, &k_l]);
        let u = &target * &source.adjoint();
        let metric = if dom == cod { Metric::Unitary } else { Metric::Isometric };
        Ok(Completion {
            colligation_matrix: u,
            metric,
        })
    } else {
        // coisometric completion: build the adjoint direction isometrically
        let k_l_sub = k_l.submatrix(0, 0, dom, cod_defect);
        let target = ComplexMatrix::hcat(&[&q_l, &k_l_sub]);
        let source = ComplexMatrix::hcat(&[&m, &k_r]);
        let v = &target * &source.adjoint();
        Ok(Completion {
            colligation_matrix: v.adjoint(),
            metric: Metric::Coisometric,
        })
    }
}

fn stack_columns(samples: &[DecompositionSample]) -> (ComplexMatrix, ComplexMatrix) {
    let l_parts: Vec<ComplexMatrix> = samples
        .iter()
        .map(|s| {
            let top = s.scaled_factor();
            let bottom = ComplexMatrix::identity(s.value.cols());
            ComplexMatrix::vcat(&[&top, &bottom])
        })
        .collect();
    let r_parts: Vec<ComplexMatrix> = samples
        .iter()
        .map(|s| {
            let top = s.stacked_factor();
            ComplexMatrix::vcat(&[&top, &s.value])
        })
        .collect();
    let l_refs: Vec<&ComplexMatrix> = l_parts.iter().collect();
    let r_refs: Vec<&ComplexMatrix> = r_parts.iter().collect();
    (ComplexMatrix::hcat(&l_refs), ComplexMatrix::hcat(&r_refs))
}

fn realize_schur_with_phase(
    samples: &[DecompositionSample],
    defect_phase: Complex64,
    tol: &Tolerances,
) -> Result<SchurGRColligation> {
    let (_, p, q, block_dims) = check_sample_shapes(samples)?;
    let residual = schur_gram_residual(samples)?;
    if residual > tol.gram_tol {
        return Err(Error::GramMismatch {
            residual,
            tol: tol.gram_tol,
        });
    }
    let n: usize = block_dims.iter().sum();
    let (l, r) = stack_columns(samples);
    let completion = complete_isometry(&l, &r, defect_phase, tol)?;
    let u = completion.colligation_matrix;
    let a = u.submatrix(0, 0, n, n);
    let b = u.submatrix(0, n, n, q);
    let c = u.submatrix(n, 0, p, n);
    let d = u.submatrix(n, n, p, q);
    let dec = DecompositionOfIdentity::coordinate_blocks(&block_dims)?;
    SchurGRColligation::new(a, b, c, d, dec, completion.metric, tol, Validation::Strict)
}

/// Reconstruct a Givone-Roesser colligation from Schur-flavor samples.
///
/// For p = q the completion is unitary; for p > q isometric; for p < q
/// coisometric. Rank-deficient data is handled (the defect spaces are just
/// larger); inconsistent data fails the Gram precheck with
/// [`Error::GramMismatch`]. Deterministic: no randomness enters the
/// completion.
pub fn realize_schur_from_samples(
    samples: &[DecompositionSample],
    tol: &Tolerances,
) -> Result<SchurGRColligation> {
    realize_schur_with_phase(samples, Complex64::new(1.0, 0.0), tol)
}

/// Reconstruct an (id)-constrained Herglotz colligation from samples of
/// `(z, F(z), H_k(z))` satisfying the Herglotz-flavor Gram identity.
///
/// Route: value-Cayley the samples to Schur data
/// `S = (F - I)(F + I)^{-1}`, `H_k^S = sqrt(2) H_k (F + I)^{-1}`,
/// run the Schur reconstruction, and identify the resulting unitary
/// colligation back through the graph relations. When `I - D` of the
/// completed colligation is singular, the codomain defect basis is rotated
/// through a fixed list of phases; that freedom never changes `U L = R`.
///
/// This reuses the single Euclidean isometry completion for both flavors.
/// Completing directly in the indefinite (graph-signature) metric, without
/// the Cayley detour, is a possible extension point: it would need a
/// J-isotropic-to-J-Lagrangian extension step in place of
/// `complete_isometry` and is not implemented.
pub fn realize_herglotz_from_samples(
    samples: &[DecompositionSample],
    tol: &Tolerances,
) -> Result<HerglotzDiskColligation> {
    let (_, p, q, _) = check_sample_shapes(samples)?;
    if p != q {
        return Err(Error::DimensionMismatch(
            "Herglotz samples must be square (p = q)".into(),
        ));
    }
    let residual = herglotz_gram_residual(samples)?;
    if residual > tol.gram_tol {
        return Err(Error::GramMismatch {
            residual,
            tol: tol.gram_tol,
        });
    }
    let id = ComplexMatrix::identity(q);
    let s2 = 2.0f64.sqrt();
    let mut schur_samples = Vec::with_capacity(samples.len());
    for s in samples {
        let fplus = &s.value + &id;
        let rc = linalg::rcond(&fplus);
        if rc < tol.rcond_cayley {
            return Err(Error::SingularMatrix { rcond: rc });
        }
        let value = linalg::solve_right(&fplus, &(&s.value - &id), tol)?;
        let factors: Vec<ComplexMatrix> = s
            .factors
            .iter()
            .map(|h| linalg::solve_right(&fplus, h, tol).map(|x| x.scale_re(s2)))
            .collect::<Result<_>>()?;
        schur_samples.push(DecompositionSample {
            point: s.point.clone(),
            value,
            factors,
        });
    }

    let phases = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::from_polar(1.0, 0.785),
        Complex64::new(-1.0, 0.0),
        Complex64::from_polar(1.0, 2.4),
        Complex64::from_polar(1.0, -1.1),
    ];
    let mut last_err = Error::SingularIminusD { rcond: 0.0 };
    for phase in phases {
        let col = realize_schur_with_phase(&schur_samples, phase, tol)?;
        match schur_gr_to_herglotz_colligation(&col, tol) {
            Ok(hcol) => return Ok(hcol),
            Err(e @ Error::SingularIminusD { .. }) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    /// Samples of the shift colligation: S(z) = z with H(z) = 1.
    fn shift_samples(points: &[f64]) -> Vec<DecompositionSample> {
        points
            .iter()
            .map(|&x| DecompositionSample {
                point: vec![c(x, 0.0)],
                value: ComplexMatrix::scalar(c(x, 0.0)),
                factors: vec![ComplexMatrix::scalar(c(1.0, 0.0))],
            })
            .collect()
    }

    #[test]
    fn shift_reconstructs_from_three_points() {
        let samples = shift_samples(&[0.1, 0.3, -0.4]);
        let col = realize_schur_from_samples(&samples, &tols()).unwrap();
        assert_eq!(col.metric(), Metric::Unitary);
        assert!(linalg::unitarity_residual(&col.assembled()) < 1e-10);
        // exact at samples
        for s in &samples {
            let v = col.eval(&s.point, &tols()).unwrap();
            assert!((&v - &s.value).max_norm() < 1e-9);
        }
        // held-out point
        let v = col.eval(&[c(0.77, 0.0)], &tols()).unwrap();
        assert!((v.get(0, 0) - c(0.77, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn single_sample_at_origin_pins_b_and_d() {
        // At z = 0 the left columns are [0; e_j], so B = H(0) and D = S(0).
        // Consistency forces H(0)*H(0) + S(0)*S(0) = I; take S(0) = 0,
        // H(0) = 1 (the shift data at the origin).
        let samples = vec![DecompositionSample {
            point: vec![c(0.0, 0.0)],
            value: ComplexMatrix::scalar(c(0.0, 0.0)),
            factors: vec![ComplexMatrix::scalar(c(1.0, 0.0))],
        }];
        let col = realize_schur_from_samples(&samples, &tols()).unwrap();
        let v = col.eval(&[c(0.0, 0.0)], &tols()).unwrap();
        assert!(v.max_norm() < 1e-10, "reproduces S(0)");
        assert!((col.b().get(0, 0).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_sample_with_unitary_value_keeps_d() {
        // S(0) unitary forces H(0) = 0; D must come back as S(0).
        let d0 = c(0.6, 0.8); // modulus 1
        let samples = vec![DecompositionSample {
            point: vec![c(0.0, 0.0)],
            value: ComplexMatrix::scalar(d0),
            factors: vec![ComplexMatrix::scalar(c(0.0, 0.0))],
        }];
        let col = realize_schur_from_samples(&samples, &tols()).unwrap();
        let v = col.eval(&[c(0.0, 0.0)], &tols()).unwrap();
        assert!((v.get(0, 0) - d0).norm() < 1e-10);
    }

    #[test]
    fn inconsistent_samples_raise_gram_mismatch() {
        let mut samples = shift_samples(&[0.1, 0.3, -0.4]);
        samples[1].value = ComplexMatrix::scalar(c(0.4, 0.0)); // perturbed by 0.1
        match realize_schur_from_samples(&samples, &tols()) {
            Err(Error::GramMismatch { residual, .. }) => assert!(residual > 1e-3),
            other => panic!("expected GramMismatch, got {other:?}"),
        }
    }

    #[test]
    fn herglotz_scalar_closed_form_reconstruction() {
        // F(z) = (1+z)/(1-z) with factor H(z) = sqrt(2)/(1-z).
        let s2 = 2.0f64.sqrt();
        let points = [c(0.1, 0.0), c(0.3, 0.2), c(-0.4, 0.1)];
        let samples: Vec<DecompositionSample> = points
            .iter()
            .map(|&z| {
                let one = c(1.0, 0.0);
                DecompositionSample {
                    point: vec![z],
                    value: ComplexMatrix::scalar((one + z) / (one - z)),
                    factors: vec![ComplexMatrix::scalar(c(s2, 0.0) / (one - z))],
                }
            })
            .collect();
        assert!(herglotz_gram_residual(&samples).unwrap() < 1e-12);
        let hcol = realize_herglotz_from_samples(&samples, &tols()).unwrap();
        // exactness at samples and a held-out point
        for s in &samples {
            let f = hcol.eval(&s.point, &tols()).unwrap();
            assert!((&f - &s.value).max_norm() < 1e-8);
        }
        let z = c(0.5, 0.0);
        let f = hcol.eval(&[z], &tols()).unwrap();
        let expect = (c(1.0, 0.0) + z) / (c(1.0, 0.0) - z);
        assert!((f.get(0, 0) - expect).norm() < 1e-9);
    }

    #[test]
    fn herglotz_constant_skew_value() {
        // F constant i*rho with zero factors: C = 0 and D = i*rho satisfy
        // the relations (D + D* = 0 = C C*).
        let rho = 1.3;
        let samples: Vec<DecompositionSample> = [c(0.0, 0.0), c(0.2, 0.1)]
            .iter()
            .map(|&z| DecompositionSample {
                point: vec![z],
                value: ComplexMatrix::scalar(c(0.0, rho)),
                factors: vec![ComplexMatrix::zeros(1, 1)],
            })
            .collect();
        let hcol = realize_herglotz_from_samples(&samples, &tols()).unwrap();
        assert!(hcol.c().max_norm() < 1e-9);
        let f = hcol.eval(&[c(0.4, -0.2)], &tols()).unwrap();
        assert!((f.get(0, 0) - c(0.0, rho)).norm() < 1e-9);
    }
}
