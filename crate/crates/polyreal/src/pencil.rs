//! Bessmertnyi linear pencils and their Schur-complement transfer functions.
//!
//! A pencil `V(w) = V_0 + w_1 V_1 + ... + w_d V_d` on `U (+) X` with
//! skew-adjoint `V_0`, PSD coefficients `V_k` and the normalization
//! `sum_k V_k = [[M_11, 0], [0, I]]` realizes the Herglotz-Agler function
//!
//! `f_V(w) = V_11(w) - V_12(w) V_22(w)^{-1} V_21(w)`.
//!
//! This module constructs such a pencil from a Herglotz representation by
//! splitting out the 1-eigenspace of its unitary, normalizes homogeneous
//! pencils, extracts the Nevanlinna data (atoms of the representing
//! measure) in the single-variable scalar case, and produces report-style
//! class checks.

use crate::cayley::{split_eigenspace_one, unitary_to_skew};
use crate::classes::HerglotzRepresentation;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::report::VerificationReport;
use crate::tol::{Tolerances, Validation};
use num_complex::Complex64;

/// Affine matrix pencil with the Herglotz-Agler symmetry and positivity
/// constraints.
#[derive(Clone, Debug)]
pub struct BessmertnyiPencil {
    d: usize,
    q: usize,
    n: usize,
    v0: ComplexMatrix,
    vks: Vec<ComplexMatrix>,
    homogeneous: bool,
    warnings: Vec<String>,
}

impl BessmertnyiPencil {
    /// Validate and build a pencil. `q` is the input block size; the state
    /// block size is inferred from the matrices.
    ///
    /// Checked invariants: `V_0 + V_0* = 0`, each `V_k` Hermitian with
    /// min eigenvalue >= -psd_slack, and the normalization
    /// `sum_k V_k = [[M_11, 0], [0, I]]`. `Validation::Lenient` records
    /// violations as warnings, which [`normalize_homogeneous_pencil`] can
    /// subsequently repair for homogeneous pencils.
    pub fn new(
        q: usize,
        v0: ComplexMatrix,
        vks: Vec<ComplexMatrix>,
        tol: &Tolerances,
        mode: Validation,
    ) -> Result<Self> {
        if vks.is_empty() {
            return Err(Error::InvalidPencil("no coefficient matrices".into()));
        }
        let size = v0.rows();
        if !v0.is_square() || size < q {
            return Err(Error::DimensionMismatch(format!(
                "V_0 is {}x{}, needs square with at least q = {q} rows",
                v0.rows(),
                v0.cols()
            )));
        }
        let n = size - q;
        for (k, vk) in vks.iter().enumerate() {
            if !vk.is_square() || vk.rows() != size {
                return Err(Error::DimensionMismatch(format!(
                    "V_{} is {}x{}, expected {size}x{size}",
                    k + 1,
                    vk.rows(),
                    vk.cols()
                )));
            }
            vk.check_finite("pencil coefficient")?;
        }
        v0.check_finite("pencil constant term")?;

        let mut violations = Vec::new();
        let skew = v0.skew_deviation();
        if skew > tol.tol_structure {
            violations.push(format!("V_0 + V_0* = 0 fails by {skew:.3e}"));
        }
        for (k, vk) in vks.iter().enumerate() {
            let herm = vk.hermitian_deviation();
            if herm > tol.tol_herm * (1.0 + vk.max_norm()) {
                violations.push(format!("V_{} not Hermitian ({herm:.3e})", k + 1));
                continue;
            }
            let lo = linalg::min_eig(&vk.hermitian_part(), tol)?;
            if lo < -tol.psd_slack {
                violations.push(format!("V_{} has eigenvalue {lo:.3e}", k + 1));
            }
        }
        let sum = Self::sum_of(&vks);
        let off = sum.submatrix(0, q, q, n).max_norm().max(sum.submatrix(q, 0, n, q).max_norm());
        let lower = (&sum.submatrix(q, q, n, n) - &ComplexMatrix::identity(n)).max_norm();
        if off.max(lower) > tol.psd_slack {
            violations.push(format!(
                "normalization sum_k V_k = [[M_11, 0], [0, I]] fails by {:.3e}",
                off.max(lower)
            ));
        }

        let homogeneous = v0.max_norm() <= tol.tol_structure;
        let warnings = match (violations.is_empty(), mode) {
            (true, _) => Vec::new(),
            (false, Validation::Strict) => {
                return Err(Error::InvalidPencil(violations[0].clone()))
            }
            (false, Validation::Lenient) => violations,
        };
        Ok(BessmertnyiPencil {
            d: vks.len(),
            q,
            n,
            v0,
            vks,
            homogeneous,
            warnings,
        })
    }

    fn sum_of(vks: &[ComplexMatrix]) -> ComplexMatrix {
        let mut sum = ComplexMatrix::zeros(vks[0].rows(), vks[0].cols());
        for vk in vks {
            sum = &sum + vk;
        }
        sum
    }

    /// The canonical pencil for f(w) = 1/w: `V_0 = [[0, 1], [-1, 0]]`,
    /// `V_1 = [[0, 0], [0, 1]]`.
    pub fn one_over_w(tol: &Tolerances) -> Self {
        let v0 = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let v1 = ComplexMatrix::from_real_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        BessmertnyiPencil::new(1, v0, vec![v1], tol, Validation::Strict)
            .expect("canonical pencil is valid")
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn state_dim(&self) -> usize {
        self.n
    }
    pub fn v0(&self) -> &ComplexMatrix {
        &self.v0
    }
    pub fn vk(&self, k: usize) -> &ComplexMatrix {
        &self.vks[k]
    }
    pub fn vks(&self) -> &[ComplexMatrix] {
        &self.vks
    }
    pub fn is_homogeneous(&self) -> bool {
        self.homogeneous
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Pencil value `V(w) = V_0 + sum_k w_k V_k`.
    pub fn at(&self, w: &[Complex64]) -> Result<ComplexMatrix> {
        if w.len() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a {}-variable pencil",
                w.len(),
                self.d
            )));
        }
        let mut out = self.v0.clone();
        for (k, vk) in self.vks.iter().enumerate() {
            out = &out + &vk.scale(w[k]);
        }
        Ok(out)
    }

    /// Schur-complement transfer function
    /// `f_V(w) = V_11(w) - V_12(w) V_22(w)^{-1} V_21(w)` on the open right
    /// polyhalfplane. A zero-dimensional state block collapses to
    /// `f = V_11(w)`.
    pub fn transfer(&self, w: &[Complex64], tol: &Tolerances) -> Result<ComplexMatrix> {
        for (k, z) in w.iter().enumerate() {
            if z.re <= 0.0 {
                return Err(Error::OutsideDomain(format!(
                    "Re w_{k} = {:.6} <= 0",
                    z.re
                )));
            }
        }
        let v = self.at(w)?;
        let (q, n) = (self.q, self.n);
        let v11 = v.submatrix(0, 0, q, q);
        if n == 0 {
            return Ok(v11);
        }
        let v12 = v.submatrix(0, q, q, n);
        let v21 = v.submatrix(q, 0, n, q);
        let v22 = v.submatrix(q, q, n, n);
        let rc = linalg::rcond(&v22);
        if rc < tol.rcond_solve {
            return Err(Error::SingularBlock { rcond: rc });
        }
        let x = linalg::solve(&v22, &v21, tol).map_err(|e| match e {
            Error::SingularMatrix { rcond } => Error::SingularBlock { rcond },
            other => other,
        })?;
        Ok(&v11 - &(&v12 * &x))
    }
}

/// Build a Herglotz-Agler pencil from a Herglotz representation
/// `F(z) = R + V* (U - P(z))^{-1} (U + P(z)) V`.
///
/// Steps: split the state along the 1-eigenspace of U; take
/// `T = (I + U00)(I - U00)^{-1}` on the complement (bounded, since U00 has
/// no eigenvalue at 1); write `V = [V_1; V_0]` and each projection
/// `P_k = [[P_k11, P_k10], [P_k01, P_k00]]` in the split basis; assemble
///
/// `V_0 = [[R - V_0* T V_0, V_0* (I + T)], [-(I + T)* V_0, -T]]`,
/// `V_k = [[V_1* P_k11 V_1, V_1* P_k10], [P_k01 V_1, P_k00]]`.
///
/// The output satisfies all pencil invariants and its transfer function
/// matches `F` composed with the point Cayley map `w -> (w-1)/(w+1)`.
pub fn build_pencil_from_herglotz_rep(
    rep: &HerglotzRepresentation,
    tol: &Tolerances,
) -> Result<BessmertnyiPencil> {
    let split = split_eigenspace_one(rep.u(), tol.split_tol, tol)?;
    let n0 = split.dim0();
    let q = rep.input_dim();

    let t = unitary_to_skew(&split.u00, tol)?;
    let v1 = &split.basis1.adjoint() * rep.v();
    let v0s = &split.basis0.adjoint() * rep.v();

    let id0 = ComplexMatrix::identity(n0);
    let iplus_t = &id0 + &t;
    // V_0 blocks; (I + T)* = I - T for skew T.
    let b11 = rep.r() - &(&(&v0s.adjoint() * &t) * &v0s);
    let b12 = &v0s.adjoint() * &iplus_t;
    let b21 = (&iplus_t.adjoint() * &v0s).scale_re(-1.0);
    let b22 = t.scale_re(-1.0);
    let v0_pencil = ComplexMatrix::block_2x2(&b11, &b12, &b21, &b22);

    let mut vks = Vec::with_capacity(rep.dec().d());
    for k in 0..rep.dec().d() {
        let pk = rep.dec().part(k);
        let p11 = &(&split.basis1.adjoint() * pk) * &split.basis1;
        let p10 = &(&split.basis1.adjoint() * pk) * &split.basis0;
        let p01 = &(&split.basis0.adjoint() * pk) * &split.basis1;
        let p00 = &(&split.basis0.adjoint() * pk) * &split.basis0;
        let c11 = &(&v1.adjoint() * &p11) * &v1;
        let c12 = &v1.adjoint() * &p10;
        let c21 = &p01 * &v1;
        vks.push(ComplexMatrix::block_2x2(&c11, &c12, &c21, &p00));
    }
    BessmertnyiPencil::new(q, v0_pencil, vks, tol, Validation::Strict)
}

/// Residual of the resolvent identity
/// `(I+T)(P00 - T)^{-1}(I - P00 T)(I+T)^{-1} = -T + (I+T)(P00 - T)^{-1}(I-T)`,
/// which is how the pencil's Schur complement reproduces the
/// impedance-node resolvent. Exact in algebra; the returned number is pure
/// roundoff.
pub fn check_identity_id1(
    t: &ComplexMatrix,
    p00: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<f64> {
    if !t.is_square() || !p00.is_square() || t.rows() != p00.rows() {
        return Err(Error::DimensionMismatch(
            "identity check needs square T and P00 of equal size".into(),
        ));
    }
    let n = t.rows();
    if n == 0 {
        return Ok(0.0);
    }
    let id = ComplexMatrix::identity(n);
    let iplus = &id + t;
    let iminus = &id - t;
    let core = p00 - t;
    let rc = linalg::rcond(&core);
    if rc < tol.rcond_solve {
        return Err(Error::SingularMatrix { rcond: rc });
    }
    // LHS = (I+T) (P00-T)^{-1} (I - P00 T) (I+T)^{-1}
    let inner = linalg::solve(&core, &(&id - &(p00 * t)), tol)?;
    let lhs = linalg::solve_right(&iplus, &(&iplus * &inner), tol)?;
    // RHS = -T + (I+T) (P00-T)^{-1} (I-T)
    let rhs = &t.scale_re(-1.0) + &(&iplus * &linalg::solve(&core, &iminus, tol)?);
    Ok((&lhs - &rhs).max_norm())
}

/// Renormalize a homogeneous pencil so that the coefficient sum takes the
/// form `[[M_11, 0], [0, I]]`.
///
/// Writes `G = V_H,22(e)` (must be invertible), and applies the constant
/// congruence `W = [[I, 0], [-G^{-1} V_H,21(e), G^{-1/2}]]` to every
/// coefficient: the `G^{-1/2}` factor makes the 22-sum the identity, the
/// lower-left entry compensates the 12/21 blocks. A Schur complement is
/// invariant under any such block-triangular congruence, so the transfer
/// function is unchanged.
pub fn normalize_homogeneous_pencil(
    pen: &BessmertnyiPencil,
    tol: &Tolerances,
) -> Result<BessmertnyiPencil> {
    if !pen.is_homogeneous() {
        return Err(Error::InvalidPencil(
            "normalization applies to homogeneous pencils (V_0 = 0)".into(),
        ));
    }
    let (q, n) = (pen.q(), pen.state_dim());
    if n == 0 {
        return BessmertnyiPencil::new(
            q,
            pen.v0().clone(),
            pen.vks().to_vec(),
            tol,
            Validation::Strict,
        );
    }
    let sum = BessmertnyiPencil::sum_of(pen.vks());
    let g = sum.submatrix(q, q, n, n);
    let lo = linalg::min_eig(&g.hermitian_part(), tol)?;
    if lo < 1e-10 {
        return Err(Error::SingularBlock {
            rcond: linalg::rcond(&g),
        });
    }
    let (vals, qv) = linalg::hermitian_eig(&g, tol)?;
    let inv_sqrt: Vec<f64> = vals.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let g_inv_sqrt = &(&qv * &ComplexMatrix::from_real_diagonal(&inv_sqrt)) * &qv.adjoint();
    let s21 = sum.submatrix(q, 0, n, q);
    let x = linalg::solve(&g, &s21, tol)?.scale_re(-1.0); // -G^{-1} V_H,21(e)
    let w = ComplexMatrix::block_2x2(
        &ComplexMatrix::identity(q),
        &ComplexMatrix::zeros(q, n),
        &x,
        &g_inv_sqrt,
    );
    let wh = w.adjoint();
    let vks: Vec<ComplexMatrix> = pen.vks().iter().map(|vk| &(&wh * vk) * &w).collect();
    let v0 = &(&wh * pen.v0()) * &w;
    BessmertnyiPencil::new(q, v0, vks, tol, Validation::Strict)
}

/// One atom of a Nevanlinna measure: a location on the imaginary axis and
/// a positive mass.
#[derive(Clone, Debug)]
pub struct NevanlinnaAtom {
    pub location: Complex64,
    pub mass: f64,
}

/// Atomic Nevanlinna data for a scalar single-variable Herglotz function:
/// `f(w) = alpha w + R + sum_j [ zeta_j / (1 + |zeta_j|^2) + 1 / (zeta_j + w) ] nu_j`.
#[derive(Clone, Debug)]
pub struct NevanlinnaData {
    /// Coefficient of w; nonnegative.
    pub alpha: f64,
    /// Purely imaginary constant.
    pub r: Complex64,
    pub atoms: Vec<NevanlinnaAtom>,
}

impl NevanlinnaData {
    /// Evaluate the closed-form integral representation.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        let mut out = self.r + w * self.alpha;
        for atom in &self.atoms {
            let z = atom.location;
            out += (z / (1.0 + z.norm_sqr()) + (z + w).inv()) * atom.mass;
        }
        out
    }
}

/// Extract atomic Nevanlinna data from single-variable scalar node data
/// `(V_1, R, T, V_0)` with `T` skew-adjoint:
///
/// diagonalize `T = Q diag(i lambda_j) Q*`; the atom locations are
/// `zeta_j = -i lambda_j` and the masses `nu_j = |(Q* V_0)_j|^2 (1 + lambda_j^2)`;
/// `alpha = V_1* V_1`. Atoms whose mass falls below `1e-14` of the total
/// are dropped as numerically invisible.
pub fn nevanlinna_atoms(
    v1: &ComplexMatrix,
    r: &ComplexMatrix,
    t: &ComplexMatrix,
    v0: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<NevanlinnaData> {
    if v1.cols() > 1 || v0.cols() > 1 || r.rows() != 1 || r.cols() != 1 {
        return Err(Error::NotScalar {
            q: v1.cols().max(v0.cols()).max(r.rows()),
        });
    }
    let st = t.skew_deviation();
    if st > tol.tol_structure * (1.0 + t.max_norm()) {
        return Err(Error::NotSkewAdjoint { deviation: st });
    }
    let r_val = r.get(0, 0);
    if r_val.re.abs() > tol.tol_structure {
        return Err(Error::NotSkewAdjoint {
            deviation: r_val.re.abs(),
        });
    }
    let alpha = (&v1.adjoint() * v1).row_major_entries().first().map_or(0.0, |z| z.re);

    // T = i K with K Hermitian; eigenvalues of K are the lambda_j.
    let k = t.scale(Complex64::new(0.0, -1.0)).hermitian_part();
    let n = t.rows();
    let mut atoms = Vec::new();
    if n > 0 && v0.rows() == n {
        let (lambdas, qmat) = linalg::hermitian_eig(&k, tol)?;
        let coords = &qmat.adjoint() * v0; // n x 1
        let mut raw: Vec<NevanlinnaAtom> = Vec::new();
        for (j, &lam) in lambdas.iter().enumerate() {
            let mass = coords.get(j, 0).norm_sqr() * (1.0 + lam * lam);
            raw.push(NevanlinnaAtom {
                location: Complex64::new(0.0, if lam == 0.0 { 0.0 } else { -lam }),
                mass,
            });
        }
        let total: f64 = raw.iter().map(|a| a.mass).sum();
        let floor = 1e-14 * total;
        atoms = raw.into_iter().filter(|a| a.mass > floor).collect();
    } else if v0.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "V0 has {} rows for a {}-dimensional T",
            v0.rows(),
            n
        )));
    }
    Ok(NevanlinnaData {
        alpha,
        r: Complex64::new(0.0, r_val.im),
        atoms,
    })
}

/// Recover the `(V_1* V_1, R, T, V_0)` node data from a single-variable
/// scalar pencil in normalized form and extract its Nevanlinna atoms.
pub fn nevanlinna_from_pencil(
    pen: &BessmertnyiPencil,
    tol: &Tolerances,
) -> Result<NevanlinnaData> {
    if pen.d() != 1 || pen.q() != 1 {
        return Err(Error::NotScalar { q: pen.q().max(pen.d()) });
    }
    let n = pen.state_dim();
    let q = pen.q();
    let t = pen.v0().submatrix(q, q, n, n).scale_re(-1.0);
    let id = ComplexMatrix::identity(n);
    // V0 column from the 12 block: V0* (I + T) => V0 = ((V0_12)(I+T)^{-1})*.
    let b12 = pen.v0().submatrix(0, q, q, n);
    let v0_adj = linalg::solve_right(&(&id + &t), &b12, tol)?;
    let v0 = v0_adj.adjoint();
    let r_scalar = &pen.v0().submatrix(0, 0, q, q) + &(&(&v0.adjoint() * &t) * &v0);
    // alpha from the 11 block of V_1 (normalized pencils have V_1 block diagonal).
    let alpha_mat = pen.vk(0).submatrix(0, 0, q, q);
    let v1 = ComplexMatrix::scalar(Complex64::new(alpha_mat.get(0, 0).re.max(0.0).sqrt(), 0.0));
    nevanlinna_atoms(&v1, &r_scalar, &t, &v0, tol)
}

/// Report of the pencil class membership checks: symmetry and positivity
/// residuals, sampled Herglotz positivity of the transfer function, and,
/// for homogeneous pencils, sampled homogeneity `f(lambda w) = lambda f(w)`
/// over seeded random scalings keeping both points in the halfplane.
pub fn check_pencil_class(
    pen: &BessmertnyiPencil,
    halfplane_samples: &[Vec<Complex64>],
    seed: u64,
    tol: &Tolerances,
) -> VerificationReport {
    let mut report = VerificationReport::new("pencil_class", seed);
    report.add_check("v0_skewness", pen.v0().skew_deviation(), tol.tol_structure);
    for (k, vk) in pen.vks().iter().enumerate() {
        let lo = linalg::min_eig(&vk.hermitian_part(), tol).unwrap_or(f64::NEG_INFINITY);
        report.add_check(format!("v{}_min_eig_above_-psd_slack", k + 1), -lo, tol.psd_slack);
    }
    let (q, n) = (pen.q(), pen.state_dim());
    let sum = BessmertnyiPencil::sum_of(pen.vks());
    if n > 0 {
        let g = sum.submatrix(q, q, n, n);
        let lo = linalg::min_eig(&g.hermitian_part(), tol).unwrap_or(f64::NEG_INFINITY);
        report.add_check("sum_22_block_min_eig_at_least_1e-10", -(lo - 1e-10), 0.0);
    }

    let mut worst_herglotz = 0.0f64;
    let mut eval_failures = 0usize;
    for w in halfplane_samples {
        match pen.transfer(w, tol) {
            Ok(f) => {
                let lo = linalg::min_eig(&(&f + &f.adjoint()), tol).unwrap_or(f64::NEG_INFINITY);
                worst_herglotz = worst_herglotz.max(-lo);
            }
            Err(_) => eval_failures += 1,
        }
    }
    report.add_check("sampled_herglotz_min_eig_f_plus_fstar", worst_herglotz, tol.psd_slack);
    report.add_check("transfer_eval_failures", eval_failures as f64, 0.0);

    if pen.is_homogeneous() {
        // Sampled homogeneity: w near the positive real axis and lambda
        // with small argument, so lambda * w stays in the halfplane.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..8 {
            let lambda = Complex64::from_polar(
                rng.random_range(0.4..2.5),
                rng.random_range(-0.25..0.25),
            );
            let w: Vec<Complex64> = (0..pen.d())
                .map(|_| {
                    Complex64::new(rng.random_range(0.5..3.0), rng.random_range(-0.5..0.5))
                })
                .collect();
            let lw: Vec<Complex64> = w.iter().map(|z| z * lambda).collect();
            if lw.iter().any(|z| z.re <= 0.0) {
                continue;
            }
            if let (Ok(flw), Ok(fw)) = (pen.transfer(&lw, tol), pen.transfer(&w, tol)) {
                worst = worst.max((&flw - &fw.scale(lambda)).max_norm());
            }
        }
        report.add_check("sampled_homogeneity", worst, 1e-9);
    }
    report
}
