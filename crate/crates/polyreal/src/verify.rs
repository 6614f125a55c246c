//! Numerical certification and seeded random generators.
//!
//! Everything needed to check that a realization actually lies in its
//! class: kernel evaluators from realizations, Agler-decomposition
//! residuals, block-Gram positivity, evaluation on commuting operator
//! tuples (structured resolvent and Taylor-series oracle), growth and
//! resolvent bounds, plus deterministic random generators for all object
//! types. Membership checks are sampled, never global: reports state the
//! points they used.

use crate::classes::{HerglotzDiskColligation, PiNode, SchurGRColligation};
use crate::decomp::{DecompositionKind, DecompositionOfIdentity};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::pencil::{build_pencil_from_herglotz_rep, BessmertnyiPencil};
use crate::report::VerificationReport;
use crate::tol::{Tolerances, Validation};
use crate::classes::{HerglotzRepresentation, Metric};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------
// Commuting tuples
// ---------------------------------------------------------------------

/// Domain class of a commuting operator tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleKind {
    /// Each member has norm <= 1 - margin.
    StrictContraction,
    /// Each member has Hermitian part >= margin * I.
    StrictlyAccretive,
}

/// A commuting d-tuple of operators on C^m with a quantified margin from
/// the boundary of its domain class.
#[derive(Clone, Debug)]
pub struct CommutingTuple {
    d: usize,
    m: usize,
    mats: Vec<ComplexMatrix>,
    kind: TupleKind,
    margin: f64,
}

impl CommutingTuple {
    pub fn new(
        mats: Vec<ComplexMatrix>,
        kind: TupleKind,
        margin: f64,
        tol: &Tolerances,
    ) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::BadParams("empty tuple".into()));
        }
        if !(margin > 0.0 && margin < 1.0) {
            return Err(Error::BadParams(format!("margin {margin} not in (0, 1)")));
        }
        let m = mats[0].rows();
        for t in &mats {
            if !t.is_square() || t.rows() != m {
                return Err(Error::DimensionMismatch("tuple members must be square of equal size".into()));
            }
            t.check_finite("tuple member")?;
        }
        for i in 0..mats.len() {
            for j in (i + 1)..mats.len() {
                let comm = (&(&mats[i] * &mats[j]) - &(&mats[j] * &mats[i])).max_norm();
                if comm > tol.tol_structure {
                    return Err(Error::BadParams(format!(
                        "members {i} and {j} fail to commute (residual {comm:.3e})"
                    )));
                }
            }
        }
        match kind {
            TupleKind::StrictContraction => {
                for (k, t) in mats.iter().enumerate() {
                    let norm = linalg::operator_norm(t);
                    if norm > 1.0 - margin + 1e-12 {
                        return Err(Error::BadParams(format!(
                            "member {k} has norm {norm:.6} > 1 - margin"
                        )));
                    }
                }
            }
            TupleKind::StrictlyAccretive => {
                for (k, t) in mats.iter().enumerate() {
                    let lo = linalg::min_eig(&(t + &t.adjoint()).scale_re(0.5), tol)?;
                    if lo < margin - 1e-12 {
                        return Err(Error::BadParams(format!(
                            "member {k} has Hermitian part eigenvalue {lo:.6} < margin"
                        )));
                    }
                }
            }
        }
        Ok(CommutingTuple {
            d: mats.len(),
            m,
            mats,
            kind,
            margin,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn space_dim(&self) -> usize {
        self.m
    }
    pub fn member(&self, k: usize) -> &ComplexMatrix {
        &self.mats[k]
    }
    pub fn kind(&self) -> TupleKind {
        self.kind
    }
    pub fn margin(&self) -> f64 {
        self.margin
    }
}

// ---------------------------------------------------------------------
// Seeded random generators
// ---------------------------------------------------------------------

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random matrix with entries uniform on the unit square.
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

/// Haar-distributed random unitary (QR of a Ginibre matrix with the phase
/// convention fixed by positive R diagonal).
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    if n == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let g = random_matrix(rng, n, n);
    let qr = g.as_na().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let mut fixed = ComplexMatrix::from_na(q);
    for j in 0..n {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            let v = fixed.get(i, j) * phase.conj();
            fixed.set(i, j, v);
        }
    }
    fixed
}

/// Random skew-adjoint matrix.
pub fn random_skew(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    random_matrix(rng, n, n).skew_part()
}

/// Random unitary with eigenvalue phases bounded away from 0 (mod 2 pi),
/// optionally with `ones` eigenvalues pinned exactly at 1. Keeping the
/// spectrum off 1 keeps the Cayley transform of compressions bounded.
pub fn random_unitary_spectrum_off_one(
    rng: &mut ChaCha8Rng,
    n: usize,
    ones: usize,
) -> ComplexMatrix {
    assert!(ones <= n);
    let q = random_unitary(rng, n);
    let mut phases = Vec::with_capacity(n);
    for i in 0..n {
        if i < ones {
            phases.push(Complex64::new(1.0, 0.0));
        } else {
            let theta = rng.random_range(0.35..(2.0 * std::f64::consts::PI - 0.35));
            phases.push(Complex64::from_polar(1.0, theta));
        }
    }
    &(&q * &ComplexMatrix::from_diagonal(&phases)) * &q.adjoint()
}

fn random_block_sizes(rng: &mut ChaCha8Rng, d: usize, dim: usize) -> Vec<usize> {
    let mut sizes = vec![dim / d; d];
    for _ in 0..(dim % d) {
        let k = rng.random_range(0..d);
        sizes[k] += 1;
    }
    sizes
}

/// Random spectral decomposition: a Haar-rotated coordinate split.
pub fn random_spectral_decomposition(
    rng: &mut ChaCha8Rng,
    d: usize,
    dim: usize,
    tol: &Tolerances,
) -> Result<DecompositionOfIdentity> {
    let sizes = random_block_sizes(rng, d, dim);
    let q = random_unitary(rng, dim);
    let mut parts = Vec::with_capacity(d);
    let mut offset = 0usize;
    for &s in &sizes {
        let mut e = ComplexMatrix::zeros(dim, dim);
        for i in offset..offset + s {
            e.set(i, i, Complex64::new(1.0, 0.0));
        }
        parts.push(&(&q * &e) * &q.adjoint());
        offset += s;
    }
    DecompositionOfIdentity::new(parts, DecompositionKind::Spectral, tol)
}

/// Random positive decomposition: random PSD parts whitened so they sum to
/// the identity (each part then automatically satisfies 0 <= Y_k <= I).
pub fn random_positive_decomposition(
    rng: &mut ChaCha8Rng,
    d: usize,
    dim: usize,
    tol: &Tolerances,
) -> Result<DecompositionOfIdentity> {
    let mut raw: Vec<ComplexMatrix> = Vec::with_capacity(d);
    for _ in 0..d {
        let g = random_matrix(rng, dim, dim);
        let psd = &(&g.adjoint() * &g).scale_re(1.0 / dim as f64)
            + &ComplexMatrix::identity(dim).scale_re(0.05);
        raw.push(psd);
    }
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for y in &raw {
        sum = &sum + y;
    }
    let (vals, qv) = linalg::hermitian_eig(&sum, tol)?;
    let inv_sqrt: Vec<f64> = vals.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let w = &(&qv * &ComplexMatrix::from_real_diagonal(&inv_sqrt)) * &qv.adjoint();
    let parts: Vec<ComplexMatrix> = raw
        .iter()
        .map(|y| (&(&w * y) * &w).hermitian_part())
        .collect();
    DecompositionOfIdentity::new(parts, DecompositionKind::Positive, tol)
}

/// Random unitary Givone-Roesser colligation with a coordinate-block
/// spectral decomposition.
pub fn random_schur_gr(
    d: usize,
    n: usize,
    q: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<SchurGRColligation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = random_block_sizes(&mut rng, d, n);
    let u = random_unitary(&mut rng, n + q);
    let a = u.submatrix(0, 0, n, n);
    let b = u.submatrix(0, n, n, q);
    let c = u.submatrix(n, 0, q, n);
    let dmat = u.submatrix(n, n, q, q);
    let dec = DecompositionOfIdentity::coordinate_blocks(&sizes)?;
    SchurGRColligation::new(a, b, c, dmat, dec, Metric::Unitary, tol, Validation::Strict)
}

/// Random (id)-constrained Herglotz colligation, built by identifying a
/// random unitary colligation whose `I - D` is well conditioned.
pub fn random_herglotz_colligation(
    d: usize,
    n: usize,
    q: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<HerglotzDiskColligation> {
    for attempt in 0..32 {
        let col = random_schur_gr(d, n, q, seed.wrapping_add(attempt * 0x9e3779b9), tol)?;
        let iminus = &ComplexMatrix::identity(q) - col.d();
        if linalg::rcond(&iminus) > 1e-4 {
            return crate::cayley::schur_gr_to_herglotz_colligation(&col, tol);
        }
    }
    Err(Error::BadParams(
        "could not draw a colligation with well-conditioned I - D".into(),
    ))
}

/// Random Herglotz representation; `ones` eigenvalues of U are pinned at 1.
pub fn random_herglotz_rep(
    d: usize,
    n: usize,
    q: usize,
    seed: u64,
    ones: usize,
    tol: &Tolerances,
) -> Result<HerglotzRepresentation> {
    random_herglotz_rep_scaled(d, n, q, seed, ones, 0.7, 1.0, tol)
}

/// Like [`random_herglotz_rep`] with explicit scale factors for V and R.
/// Small scales keep the norm of the represented function small, which
/// growth-limit checks at large t rely on.
#[allow(clippy::too_many_arguments)]
pub fn random_herglotz_rep_scaled(
    d: usize,
    n: usize,
    q: usize,
    seed: u64,
    ones: usize,
    v_scale: f64,
    r_scale: f64,
    tol: &Tolerances,
) -> Result<HerglotzRepresentation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary_spectrum_off_one(&mut rng, n, ones);
    let v = random_matrix(&mut rng, n, q).scale_re(v_scale);
    let r = random_skew(&mut rng, q).scale_re(r_scale);
    let dec = random_spectral_decomposition(&mut rng, d, n, tol)?;
    HerglotzRepresentation::new(r, u, v, dec, tol, Validation::Strict)
}

/// Random impedance-conservative node from a random (T, V0, R) triple over
/// a random positive decomposition.
pub fn random_pi_impedance(
    d: usize,
    n: usize,
    q: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<PiNode> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_skew(&mut rng, n);
    let v0 = random_matrix(&mut rng, n, q).scale_re(0.8);
    let r = random_skew(&mut rng, q);
    let dec = random_positive_decomposition(&mut rng, d, n, tol)?;
    PiNode::from_impedance_triple(&t, &v0, &r, dec, tol)
}

/// Random Herglotz-Agler pencil, obtained from a random representation.
/// A share of the spectrum of U is pinned at 1 so both split blocks are
/// exercised.
pub fn random_pencil(
    d: usize,
    n: usize,
    q: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<BessmertnyiPencil> {
    let ones = if n >= 3 { 1 } else { 0 };
    let rep = random_herglotz_rep(d, n, q, seed, ones, tol)?;
    build_pencil_from_herglotz_rep(&rep, tol)
}

/// Random commuting tuple: a jointly diagonalizable (normal) family
/// `T_k = Q D_k Q*` sharing one Haar-random basis, with diagonals drawn in
/// the disk of radius 1 - margin (contractions) or with real part at least
/// `margin` (accretive). Normal families give exact commutation and easy
/// norm control; a non-normal generator (joint upper-triangular families)
/// would slot in here behind the same seed discipline but is not
/// implemented.
pub fn random_commuting_tuple(
    d: usize,
    m: usize,
    kind: TupleKind,
    margin: f64,
    seed: u64,
    tol: &Tolerances,
) -> Result<CommutingTuple> {
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::BadParams(format!("margin {margin} not in (0, 1)")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = random_unitary(&mut rng, m);
    let mut mats = Vec::with_capacity(d);
    for _ in 0..d {
        let diag: Vec<Complex64> = (0..m)
            .map(|_| match kind {
                TupleKind::StrictContraction => {
                    let radius = (1.0 - margin) * rng.random_range(0.0f64..1.0).sqrt();
                    let theta = rng.random_range(0.0..(2.0 * std::f64::consts::PI));
                    Complex64::from_polar(radius, theta)
                }
                TupleKind::StrictlyAccretive => Complex64::new(
                    rng.random_range(margin..(margin + 3.0)),
                    rng.random_range(-3.0..3.0),
                ),
            })
            .collect();
        mats.push(&(&q * &ComplexMatrix::from_diagonal(&diag)) * &q.adjoint());
    }
    CommutingTuple::new(mats, kind, margin, tol)
}

// ---------------------------------------------------------------------
// Kernels from realizations
// ---------------------------------------------------------------------

/// Kernel evaluator derived from a realization. Produces, for a pair of
/// points, the d kernels `K_k` of the corresponding Agler decomposition:
///
/// * disk colligations: `K_k(y, z) = H(y)* P_k H(z)` with
///   `H(z) = (I - A P(z))^{-1} B`;
/// * halfplane nodes: `K_k(y, z) = H(y)* Y_k H(z)` with
///   `H(w) = (Y(w) - A)^{-1} B`;
/// * Herglotz representations: the induced colligation with state matrix
///   `U*` and feed `sqrt(2) V` realizes the same function, so
///   `K_k(y, z) = H(y)* P_k H(z)` with `H(z) = sqrt(2) (I - U* P(z))^{-1} V`.
#[derive(Clone, Debug)]
pub enum KernelEval {
    SchurDisk(SchurGRColligation),
    HerglotzDisk(HerglotzDiskColligation),
    Node(PiNode),
    Rep(HerglotzRepresentation),
}

impl KernelEval {
    pub fn from_gr(col: &SchurGRColligation) -> Self {
        KernelEval::SchurDisk(col.clone())
    }

    pub fn from_herglotz(col: &HerglotzDiskColligation) -> Self {
        KernelEval::HerglotzDisk(col.clone())
    }

    pub fn from_pi_node(node: &PiNode) -> Self {
        KernelEval::Node(node.clone())
    }

    pub fn from_herglotz_rep(rep: &HerglotzRepresentation) -> Self {
        KernelEval::Rep(rep.clone())
    }

    pub fn d(&self) -> usize {
        match self {
            KernelEval::SchurDisk(c) => c.dec().d(),
            KernelEval::HerglotzDisk(c) => c.dec().d(),
            KernelEval::Node(n) => n.dec().d(),
            KernelEval::Rep(r) => r.dec().d(),
        }
    }

    fn factor(&self, point: &[Complex64], tol: &Tolerances) -> Result<ComplexMatrix> {
        match self {
            KernelEval::SchurDisk(c) => c.defect_factor(point, tol),
            KernelEval::HerglotzDisk(c) => c.defect_factor(point, tol),
            KernelEval::Node(n) => n.defect_factor(point, tol),
            KernelEval::Rep(r) => {
                // H(z) = sqrt(2) (I - U* P(z))^{-1} V
                let p = r.dec().pencil_at(point)?;
                let lhs = &ComplexMatrix::identity(r.state_dim()) - &(&r.u().adjoint() * &p);
                Ok(linalg::solve(&lhs, r.v(), tol)?.scale_re(2.0f64.sqrt()))
            }
        }
    }

    fn weights(&self) -> &DecompositionOfIdentity {
        match self {
            KernelEval::SchurDisk(c) => c.dec(),
            KernelEval::HerglotzDisk(c) => c.dec(),
            KernelEval::Node(n) => n.dec(),
            KernelEval::Rep(r) => r.dec(),
        }
    }

    /// All d kernels at the pair (left, right).
    pub fn kernels(
        &self,
        left: &[Complex64],
        right: &[Complex64],
        tol: &Tolerances,
    ) -> Result<Vec<ComplexMatrix>> {
        let hl = self.factor(left, tol)?;
        let hr = self.factor(right, tol)?;
        let dec = self.weights();
        let mut out = Vec::with_capacity(dec.d());
        for k in 0..dec.d() {
            out.push(&(&hl.adjoint() * dec.part(k)) * &hr);
        }
        Ok(out)
    }

    /// The k-th kernel at the pair (left, right).
    pub fn kernel_k(
        &self,
        k: usize,
        left: &[Complex64],
        right: &[Complex64],
        tol: &Tolerances,
    ) -> Result<ComplexMatrix> {
        Ok(self.kernels(left, right, tol)?.swap_remove(k))
    }
}

/// Which Agler decomposition identity a residual check targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AglerFlavor {
    /// `I - S(y)* S(z) = sum (1 - conj(y_k) z_k) K_k` on the polydisk.
    DiskSchur,
    /// `F(y)* + F(z) = sum (1 - conj(y_k) z_k) K_k` on the polydisk.
    DiskHerglotz,
    /// `I - s(y)* s(z) = sum (conj(y_k) + z_k) K_k` on the halfplane.
    PiSchur,
    /// `f(y)* + f(z) = sum (conj(y_k) + z_k) K_k` on the halfplane.
    PiHerglotz,
}

impl AglerFlavor {
    fn is_disk(&self) -> bool {
        matches!(self, AglerFlavor::DiskSchur | AglerFlavor::DiskHerglotz)
    }

    fn check_domain(&self, point: &[Complex64]) -> Result<()> {
        if self.is_disk() {
            if point.iter().any(|z| z.norm() >= 1.0) {
                return Err(Error::DomainMismatch(
                    "disk flavor got a point outside the polydisk".into(),
                ));
            }
        } else if point.iter().any(|z| z.re <= 0.0) {
            return Err(Error::DomainMismatch(
                "halfplane flavor got a point with Re <= 0".into(),
            ));
        }
        Ok(())
    }
}

/// Max residual of the Agler decomposition identity over the given pairs.
pub fn agler_residual<F>(
    values: F,
    kernels: &KernelEval,
    pairs: &[(Vec<Complex64>, Vec<Complex64>)],
    flavor: AglerFlavor,
    tol: &Tolerances,
) -> Result<f64>
where
    F: Fn(&[Complex64]) -> Result<ComplexMatrix>,
{
    let mut worst = 0.0f64;
    for (left, right) in pairs {
        flavor.check_domain(left)?;
        flavor.check_domain(right)?;
        let vl = values(left)?;
        let vr = values(right)?;
        let lhs = match flavor {
            AglerFlavor::DiskSchur | AglerFlavor::PiSchur => {
                &ComplexMatrix::identity(vl.cols()) - &(&vl.adjoint() * &vr)
            }
            AglerFlavor::DiskHerglotz | AglerFlavor::PiHerglotz => &vl.adjoint() + &vr,
        };
        let ks = kernels.kernels(left, right, tol)?;
        let mut rhs = ComplexMatrix::zeros(lhs.rows(), lhs.cols());
        for (k, kk) in ks.iter().enumerate() {
            let weight = if flavor.is_disk() {
                Complex64::new(1.0, 0.0) - left[k].conj() * right[k]
            } else {
                left[k].conj() + right[k]
            };
            rhs = &rhs + &kk.scale(weight);
        }
        worst = worst.max((&lhs - &rhs).max_norm());
    }
    Ok(worst)
}

/// Min eigenvalue of the assembled block Gram `[K(z_i, z_j)]_{i,j}` of a
/// single kernel over the given points. PSD kernels report >= -psd_slack.
pub fn kernel_gram_psd<K>(kernel: K, points: &[Vec<Complex64>], tol: &Tolerances) -> Result<f64>
where
    K: Fn(&[Complex64], &[Complex64]) -> Result<ComplexMatrix>,
{
    if points.is_empty() {
        return Err(Error::BadParams("kernel Gram needs at least one point".into()));
    }
    let probe = kernel(&points[0], &points[0])?;
    let q = probe.rows();
    let npts = points.len();
    let mut gram = ComplexMatrix::zeros(npts * q, npts * q);
    for i in 0..npts {
        for j in 0..npts {
            let kij = kernel(&points[i], &points[j])?;
            for a in 0..q {
                for b in 0..q {
                    gram.set(i * q + a, j * q + b, kij.get(a, b));
                }
            }
        }
    }
    linalg::min_eig(&gram.hermitian_part(), tol)
}

// ---------------------------------------------------------------------
// Functional calculus on commuting tuples
// ---------------------------------------------------------------------

fn structured_tuple_eval(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
    dec: &DecompositionOfIdentity,
    tuple: &CommutingTuple,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    if dec.d() != tuple.d() {
        return Err(Error::DimensionMismatch(format!(
            "{}-variable realization applied to a {}-tuple",
            dec.d(),
            tuple.d()
        )));
    }
    let m = tuple.space_dim();
    let n = dec.dim();
    let id_m = ComplexMatrix::identity(m);
    let mut p_t = ComplexMatrix::zeros(n * m, n * m);
    for k in 0..dec.d() {
        p_t = &p_t + &dec.part(k).kron(tuple.member(k));
    }
    let lhs = &ComplexMatrix::identity(n * m) - &(&p_t * &a.kron(&id_m));
    let rhs = &p_t * &b.kron(&id_m);
    let x = linalg::solve(&lhs, &rhs, tol)?;
    Ok(&d.kron(&id_m) + &(&c.kron(&id_m) * &x))
}

/// Evaluate a Schur colligation on a commuting tuple of strict
/// contractions through the structured resolvent
/// `S(T) = D (x) I + (C (x) I)(I - P(T)(A (x) I))^{-1} P(T) (B (x) I)`
/// with `P(T) = sum_k P_k (x) T_k`.
pub fn eval_schur_on_tuple(
    col: &SchurGRColligation,
    tuple: &CommutingTuple,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    if tuple.kind() != TupleKind::StrictContraction {
        return Err(Error::WrongTupleKind {
            expected: "strict_contraction",
        });
    }
    structured_tuple_eval(col.a(), col.b(), col.c(), col.d(), col.dec(), tuple, tol)
}

/// Evaluate a Herglotz colligation on a commuting tuple of strict
/// contractions.
pub fn eval_herglotz_on_tuple(
    col: &HerglotzDiskColligation,
    tuple: &CommutingTuple,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    if tuple.kind() != TupleKind::StrictContraction {
        return Err(Error::WrongTupleKind {
            expected: "strict_contraction",
        });
    }
    structured_tuple_eval(col.a(), col.b(), col.c(), col.d(), col.dec(), tuple, tol)
}

/// Result of a truncated Taylor evaluation.
#[derive(Clone, Debug)]
pub struct TaylorEval {
    pub value: ComplexMatrix,
    /// Geometric tail bound `|C||B| rho^{deg+1} / (1 - rho)` with
    /// `rho = (1 - margin) |A|`.
    pub tail_bound: f64,
    pub degree: usize,
}

/// Taylor-series oracle for the functional calculus: expands
/// `S(z) = D + sum_m C (P(z) A)^{m-1} P(z) B` over monomials up to total
/// degree `degree` and sums `S_n (x) T^n`.
///
/// Fails with [`Error::DegreeTooSmall`] when the reported tail bound
/// exceeds `requested_tol`.
pub fn taylor_eval_on_tuple(
    col: &SchurGRColligation,
    tuple: &CommutingTuple,
    degree: usize,
    requested_tol: f64,
) -> Result<TaylorEval> {
    if tuple.kind() != TupleKind::StrictContraction {
        return Err(Error::WrongTupleKind {
            expected: "strict_contraction",
        });
    }
    if col.dec().d() != tuple.d() {
        return Err(Error::DimensionMismatch(
            "colligation and tuple have different variable counts".into(),
        ));
    }
    let rho = (1.0 - tuple.margin()) * linalg::operator_norm(col.a());
    let tail_bound = if rho >= 1.0 {
        f64::INFINITY
    } else {
        linalg::operator_norm(col.c()) * linalg::operator_norm(col.b()) * rho.powi(degree as i32 + 1)
            / (1.0 - rho)
    };
    if tail_bound > requested_tol {
        return Err(Error::DegreeTooSmall {
            bound: tail_bound,
            tol: requested_tol,
        });
    }

    let d_vars = tuple.d();
    let m = tuple.space_dim();
    let id_m = ComplexMatrix::identity(m);
    let mut acc = col.d().kron(&id_m);

    // level m coefficients of (P(z) A)^{m-1} P(z), indexed by multi-index
    let mut coeffs: BTreeMap<Vec<usize>, ComplexMatrix> = BTreeMap::new();
    let mut powers: BTreeMap<Vec<usize>, ComplexMatrix> = BTreeMap::new();
    powers.insert(vec![0; d_vars], id_m.clone());
    for k in 0..d_vars {
        let mut idx = vec![0; d_vars];
        idx[k] = 1;
        coeffs.insert(idx, col.dec().part(k).clone());
    }

    for _level in 1..=degree {
        // T^n for this level, reusing the previous level's memo
        let mut new_powers: BTreeMap<Vec<usize>, ComplexMatrix> = BTreeMap::new();
        for idx in coeffs.keys() {
            let j = idx.iter().position(|&e| e > 0).unwrap();
            let mut prev = idx.clone();
            prev[j] -= 1;
            let tn = &powers[&prev] * tuple.member(j);
            new_powers.insert(idx.clone(), tn);
        }
        for (idx, g) in &coeffs {
            let s_n = &(col.c() * g) * col.b();
            acc = &acc + &s_n.kron(&new_powers[idx]);
        }
        // next level: G_{m+1}[n] = sum_k P_k A G_m[n - e_k]
        let mut next: BTreeMap<Vec<usize>, ComplexMatrix> = BTreeMap::new();
        for (idx, g) in &coeffs {
            let ag = col.a() * g;
            for k in 0..d_vars {
                let mut up = idx.clone();
                up[k] += 1;
                let term = col.dec().part(k) * &ag;
                next.entry(up)
                    .and_modify(|acc_m| *acc_m = &*acc_m + &term)
                    .or_insert(term);
            }
        }
        coeffs = next;
        powers = new_powers;
    }

    Ok(TaylorEval {
        value: acc,
        tail_bound,
        degree,
    })
}

// ---------------------------------------------------------------------
// Growth and resolvent bounds
// ---------------------------------------------------------------------

/// Estimate of the linear growth coefficient of a halfplane function along
/// the diagonal ray `t e`.
#[derive(Clone, Debug)]
pub struct GrowthEstimate {
    /// `f(t_max e) / t_max`.
    pub limit: ComplexMatrix,
    /// `(t, |f(t e) / t|_max)` along the grid, for diagnostics.
    pub history: Vec<(f64, f64)>,
}

/// Evaluate `f(t e)/t` along an increasing grid with `t_max >= 1e4`.
pub fn growth_limit<F>(f: F, d: usize, t_grid: &[f64]) -> Result<GrowthEstimate>
where
    F: Fn(&[Complex64]) -> Result<ComplexMatrix>,
{
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadParams("t grid must be strictly increasing".into()));
    }
    let t_max = *t_grid.last().unwrap();
    if t_max < 1e4 {
        return Err(Error::BadParams(format!("t_max {t_max} < 1e4")));
    }
    let mut history = Vec::with_capacity(t_grid.len());
    let mut limit = None;
    for &t in t_grid {
        let w: Vec<Complex64> = (0..d).map(|_| Complex64::new(t, 0.0)).collect();
        let val = f(&w)?.scale_re(1.0 / t);
        history.push((t, val.max_norm()));
        limit = Some(val);
    }
    Ok(GrowthEstimate {
        limit: limit.unwrap(),
        history,
    })
}

/// Check the structured resolvent bound
/// `|(Y(w) - A)^{-1}| <= 1 / min_j Re w_j` for a node with dissipative
/// state operator, over the given halfplane samples.
pub fn resolvent_bound_check(
    node: &PiNode,
    samples: &[Vec<Complex64>],
    seed: u64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let herm = node.a().hermitian_part();
    let hi = linalg::max_eig(&herm, tol)?;
    if hi > tol.psd_slack {
        return Err(Error::NotDissipative { max_eig: hi });
    }
    let mut report = VerificationReport::new("resolvent_bound", seed);
    let mut worst = f64::NEG_INFINITY;
    for w in samples {
        let y = node.dec().pencil_at(w)?;
        let inv = linalg::solve(&(&y - node.a()), &ComplexMatrix::identity(node.state_dim()), tol)?;
        let norm = linalg::operator_norm(&inv);
        let min_re = w.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        worst = worst.max(norm * min_re - 1.0);
    }
    report.add_check("resolvent_norm_times_min_re_minus_1", worst, 1e-9);
    report.note(format!("{} halfplane samples", samples.len()));
    Ok(report)
}

// ---------------------------------------------------------------------
// Quasi-random point grids
// ---------------------------------------------------------------------

const HALTON_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Quasi-random (Halton) points in the polydisk with radii <= 0.9.
pub fn disk_points(d: usize, count: usize, start: u64) -> Vec<Vec<Complex64>> {
    assert!(2 * d <= HALTON_PRIMES.len(), "too many variables for the Halton bases");
    (0..count)
        .map(|i| {
            let idx = start + 1 + i as u64;
            (0..d)
                .map(|k| {
                    let u = halton(idx, HALTON_PRIMES[2 * k]);
                    let v = halton(idx, HALTON_PRIMES[2 * k + 1]);
                    Complex64::from_polar(0.9 * u.sqrt(), 2.0 * std::f64::consts::PI * v)
                })
                .collect()
        })
        .collect()
}

/// Quasi-random (Halton) points in the halfplane box
/// `Re in [0.1, 10], Im in [-10, 10]`.
pub fn halfplane_points(d: usize, count: usize, start: u64) -> Vec<Vec<Complex64>> {
    assert!(2 * d <= HALTON_PRIMES.len(), "too many variables for the Halton bases");
    (0..count)
        .map(|i| {
            let idx = start + 1 + i as u64;
            (0..d)
                .map(|k| {
                    let u = halton(idx, HALTON_PRIMES[2 * k]);
                    let v = halton(idx, HALTON_PRIMES[2 * k + 1]);
                    Complex64::new(0.1 + 9.9 * u, -10.0 + 20.0 * v)
                })
                .collect()
        })
        .collect()
}

/// Pair up consecutive grid points for residual checks.
pub fn point_pairs(points: &[Vec<Complex64>]) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        let j = (i + 1) % points.len();
        pairs.push((points[i].clone(), points[j].clone()));
        pairs.push((points[i].clone(), points[i].clone()));
    }
    pairs
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

    #[test]
    fn generators_are_seed_deterministic() {
        let a = random_schur_gr(2, 4, 2, 99, &tols()).unwrap();
        let b = random_schur_gr(2, 4, 2, 99, &tols()).unwrap();
        assert_eq!(
            a.assembled().row_major_entries(),
            b.assembled().row_major_entries()
        );
        let t1 = random_commuting_tuple(2, 3, TupleKind::StrictContraction, 0.2, 7, &tols()).unwrap();
        let t2 = random_commuting_tuple(2, 3, TupleKind::StrictContraction, 0.2, 7, &tols()).unwrap();
        assert_eq!(
            t1.member(0).row_major_entries(),
            t2.member(0).row_major_entries()
        );
    }

    #[test]
    fn random_tuples_commute_and_respect_margin() {
        let t = random_commuting_tuple(2, 3, TupleKind::StrictContraction, 0.5, 7, &tols()).unwrap();
        for k in 0..2 {
            assert!(linalg::operator_norm(t.member(k)) <= 0.5 + 1e-12);
        }
        let comm = (&(t.member(0) * t.member(1)) - &(t.member(1) * t.member(0))).max_norm();
        assert!(comm < 1e-13);
        let acc = random_commuting_tuple(2, 3, TupleKind::StrictlyAccretive, 0.3, 8, &tols()).unwrap();
        for k in 0..2 {
            let lo = linalg::min_eig(&acc.member(k).hermitian_part(), &tols()).unwrap();
            assert!(lo >= 0.3 - 1e-10);
        }
    }

    #[test]
    fn scalar_tuple_reduces_to_point_evaluation() {
        let col = SchurGRColligation::shift(&tols());
        let z = c(0.3, 0.1);
        let tuple = CommutingTuple::new(
            vec![ComplexMatrix::scalar(z)],
            TupleKind::StrictContraction,
            0.5,
            &tols(),
        )
        .unwrap();
        let st = eval_schur_on_tuple(&col, &tuple, &tols()).unwrap();
        assert!((st.get(0, 0) - z).norm() < 1e-13);
    }

    #[test]
    fn shift_on_tuple_returns_first_member() {
        let col = SchurGRColligation::shift(&tols());
        let tuple = random_commuting_tuple(1, 3, TupleKind::StrictContraction, 0.4, 3, &tols()).unwrap();
        let st = eval_schur_on_tuple(&col, &tuple, &tols()).unwrap();
        assert!((&st - tuple.member(0)).max_norm() < 1e-12);
    }

    #[test]
    fn wrong_tuple_kind_is_rejected() {
        let col = SchurGRColligation::shift(&tols());
        let tuple = random_commuting_tuple(1, 2, TupleKind::StrictlyAccretive, 0.3, 4, &tols()).unwrap();
        assert!(matches!(
            eval_schur_on_tuple(&col, &tuple, &tols()),
            Err(Error::WrongTupleKind { .. })
        ));
    }

    #[test]
    fn taylor_matches_single_variable_powers() {
        // d = 1: S_m = C A^{m-1} B; for the shift, S(T) = T exactly at
        // degree >= 1.
        let col = SchurGRColligation::shift(&tols());
        let tuple = random_commuting_tuple(1, 3, TupleKind::StrictContraction, 0.4, 5, &tols()).unwrap();
        let te = taylor_eval_on_tuple(&col, &tuple, 3, 1e-6).unwrap();
        assert!((&te.value - tuple.member(0)).max_norm() < 1e-12);
    }

    #[test]
    fn taylor_cross_checks_structured_resolvent() {
        let col = random_schur_gr(2, 3, 2, 21, &tols()).unwrap();
        let tuple = random_commuting_tuple(2, 3, TupleKind::StrictContraction, 0.3, 22, &tols()).unwrap();
        let direct = eval_schur_on_tuple(&col, &tuple, &tols()).unwrap();
        // the geometric tail bound is looser than the observed agreement
        let taylor = taylor_eval_on_tuple(&col, &tuple, 40, 5e-6).unwrap();
        assert!(
            (&direct - &taylor.value).max_norm() < 1e-6,
            "cross-oracle gap {}",
            (&direct - &taylor.value).max_norm()
        );
    }

    #[test]
    fn taylor_rejects_insufficient_degree() {
        let col = random_schur_gr(1, 2, 1, 2, &tols()).unwrap();
        let tuple = random_commuting_tuple(1, 2, TupleKind::StrictContraction, 0.1, 2, &tols()).unwrap();
        assert!(matches!(
            taylor_eval_on_tuple(&col, &tuple, 1, 1e-12),
            Err(Error::DegreeTooSmall { .. })
        ));
    }

    #[test]
    fn shift_kernel_identity_is_exact() {
        // Shift: H = 1, K(y, z) = 1, and I - conj(y) z = (1 - conj(y) z) * 1.
        let col = SchurGRColligation::shift(&tols());
        let ke = KernelEval::from_gr(&col);
        let points = disk_points(1, 20, 0);
        let pairs = point_pairs(&points);
        let values = |z: &[Complex64]| col.eval(z, &tols());
        let resid = agler_residual(values, &ke, &pairs, AglerFlavor::DiskSchur, &tols()).unwrap();
        assert!(resid < 1e-12, "residual {resid}");
    }

    #[test]
    fn corrupted_kernel_is_detected() {
        let col = SchurGRColligation::shift(&tols());
        let points = disk_points(1, 10, 3);
        let pairs = point_pairs(&points);
        let values = |z: &[Complex64]| col.eval(z, &tols());
        // scale the kernel by 1.01: residual must be about 0.01 * |K|
        let ke = KernelEval::from_gr(&col);
        let scaled = |l: &[Complex64], r: &[Complex64]| {
            ke.kernel_k(0, l, r, &tols()).map(|k| k.scale_re(1.01))
        };
        let mut worst = 0.0f64;
        for (l, r) in &pairs {
            let vl = values(l).unwrap();
            let vr = values(r).unwrap();
            let lhs = &ComplexMatrix::identity(1) - &(&vl.adjoint() * &vr);
            let w = Complex64::new(1.0, 0.0) - l[0].conj() * r[0];
            let rhs = scaled(l, r).unwrap().scale(w);
            worst = worst.max((&lhs - &rhs).max_norm());
        }
        assert!(worst > 1e-3, "corruption went unnoticed: {worst}");
    }

    #[test]
    fn impedance_scalar_kernel_identity() {
        // Node (T=0, V0=1, R=0): f(w) = 1/w, K(z, w) = 1/(conj(z) w).
        let node = PiNode::from_impedance_triple(
            &ComplexMatrix::zeros(1, 1),
            &ComplexMatrix::scalar(c(1.0, 0.0)),
            &ComplexMatrix::zeros(1, 1),
            DecompositionOfIdentity::trivial(1),
            &tols(),
        )
        .unwrap();
        let ke = KernelEval::from_pi_node(&node);
        let points = halfplane_points(1, 20, 0);
        let pairs = point_pairs(&points);
        let values = |w: &[Complex64]| node.eval(w, &tols());
        let resid = agler_residual(values, &ke, &pairs, AglerFlavor::PiHerglotz, &tols()).unwrap();
        assert!(resid < 1e-12, "residual {resid}");
        // check the closed form of the kernel at one pair
        let k = ke.kernel_k(0, &pairs[0].0, &pairs[0].1, &tols()).unwrap();
        let expect = (pairs[0].0[0].conj() * pairs[0].1[0]).inv();
        assert!((k.get(0, 0) - expect).norm() < 1e-12);
    }

    #[test]
    fn herglotz_rep_kernel_identity() {
        // the representation's own decomposition, checked at random pairs
        let tol = tols();
        for seed in 0..4u64 {
            let rep = random_herglotz_rep(2, 5, 2, 600 + seed, 1, &tol).unwrap();
            let ke = KernelEval::from_herglotz_rep(&rep);
            let pts = disk_points(2, 8, seed);
            let pairs = point_pairs(&pts);
            let resid = agler_residual(
                |z| rep.eval(z, &tol),
                &ke,
                &pairs,
                AglerFlavor::DiskHerglotz,
                &tol,
            )
            .unwrap();
            assert!(resid < 1e-11, "rep kernel residual {resid}");
            for k in 0..2 {
                let lo = kernel_gram_psd(|l, r| ke.kernel_k(k, l, r, &tol), &pts[..5], &tol)
                    .unwrap();
                assert!(lo >= -1e-11, "rep kernel Gram dipped to {lo}");
            }
        }
    }

    #[test]
    fn gram_psd_cases() {
        let pts = disk_points(1, 3, 0);
        // constant kernel 1: Gram of all ones, min eig 0
        let ones = |_: &[Complex64], _: &[Complex64]| Ok(ComplexMatrix::scalar(c(1.0, 0.0)));
        let lo = kernel_gram_psd(ones, &pts, &tols()).unwrap();
        assert!(lo.abs() < 1e-12);
        // negative kernel flagged
        let neg = |_: &[Complex64], _: &[Complex64]| Ok(ComplexMatrix::scalar(c(-1.0, 0.0)));
        let lo = kernel_gram_psd(neg, &pts, &tols()).unwrap();
        assert!(lo < -0.5);
    }

    #[test]
    fn growth_limit_scalar_cases() {
        let grid = [1.0, 10.0, 1e2, 1e4, 1e6];
        // f(w) = 1/w decays
        let inv = |w: &[Complex64]| Ok(ComplexMatrix::scalar(w[0].inv()));
        let est = growth_limit(inv, 1, &grid).unwrap();
        assert!(est.limit.max_norm() < 1e-8);
        // f(w) = w has limit 1
        let lin = |w: &[Complex64]| Ok(ComplexMatrix::scalar(w[0]));
        let est = growth_limit(lin, 1, &grid).unwrap();
        assert!((est.limit.get(0, 0) - c(1.0, 0.0)).norm() < 1e-12);
        // t_max too small rejected
        assert!(growth_limit(lin, 1, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn resolvent_bound_scalar_and_negative_control() {
        // A = 0, Y = w: |(w)^{-1}| * Re w = Re w / |w| <= 1.
        let node = PiNode::from_impedance_triple(
            &ComplexMatrix::zeros(1, 1),
            &ComplexMatrix::scalar(c(1.0, 0.0)),
            &ComplexMatrix::zeros(1, 1),
            DecompositionOfIdentity::trivial(1),
            &tols(),
        )
        .unwrap();
        let samples = halfplane_points(1, 50, 0);
        let report = resolvent_bound_check(&node, &samples, 0, &tols()).unwrap();
        assert!(report.all_pass(), "{}", report.summary());

        // non-dissipative A: build a lenient node with A = +1
        let bad = PiNode::new(
            ComplexMatrix::scalar(c(1.0, 0.0)),
            ComplexMatrix::scalar(c(1.0, 0.0)),
            ComplexMatrix::scalar(c(1.0, 0.0)),
            ComplexMatrix::zeros(1, 1),
            DecompositionOfIdentity::trivial(1),
            crate::classes::NodeFlavor::Impedance,
            &tols(),
            Validation::Lenient,
        )
        .unwrap();
        assert!(matches!(
            resolvent_bound_check(&bad, &samples, 0, &tols()),
            Err(Error::NotDissipative { .. })
        ));
    }

    #[test]
    fn positive_decomposition_generator_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let dec = random_positive_decomposition(&mut rng, 3, 4, &tols()).unwrap();
        assert!(dec.sum_residual() < 1e-12);
        for k in 0..3 {
            let lo = linalg::min_eig(dec.part(k), &tols()).unwrap();
            let hi = linalg::max_eig(dec.part(k), &tols()).unwrap();
            assert!(lo >= -1e-12 && hi <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn halton_points_stay_in_domain() {
        for p in disk_points(2, 50, 0) {
            assert!(p.iter().all(|z| z.norm() <= 0.9 + 1e-12));
        }
        for p in halfplane_points(2, 50, 0) {
            assert!(p.iter().all(|z| z.re >= 0.1 && z.re <= 10.0 && z.im.abs() <= 10.0));
        }
    }
}
