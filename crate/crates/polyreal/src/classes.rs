//! Realization formats and their pointwise evaluators.
//!
//! Four pictures of the same landscape:
//!
//! * [`SchurGRColligation`] - Givone-Roesser colligation `U = [[A,B],[C,D]]`
//!   over a spectral decomposition, realizing
//!   `S(z) = D + C (I - P(z) A)^{-1} P(z) B` on the polydisk;
//! * [`HerglotzDiskColligation`] - the same formula constrained by the
//!   relations `A*A = AA* = I`, `B = A C*`, `D + D* = C C* = B* B`, which
//!   force values with PSD real part;
//! * [`HerglotzRepresentation`] - the resolvent form
//!   `F(z) = R + V* (U - P(z))^{-1} (U + P(z)) V` with unitary `U` and
//!   skew-adjoint `R`;
//! * [`PiNode`] - bounded impedance- or scattering-conservative nodes on the
//!   right polyhalfplane, evaluated through the structured resolvent
//!   `D + C (Y(w) - A)^{-1} B` over a positive decomposition.
//!
//! Invariants are checked at construction; `Validation::Lenient` records
//! violations as warnings instead of rejecting, for experiments with
//! corrupted data. Evaluators solve the structured resolvent by LU rather
//! than forming inverses, for accuracy near the domain boundary.

use crate::decomp::DecompositionOfIdentity;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::tol::{Tolerances, Validation};
use num_complex::Complex64;

/// Metric class of an assembled colligation matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Unitary,
    Isometric,
    Coisometric,
    Contractive,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Unitary => "unitary",
            Metric::Isometric => "isometric",
            Metric::Coisometric => "coisometric",
            Metric::Contractive => "contractive",
        }
    }
}

/// Conservativity flavor of a halfplane node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeFlavor {
    Impedance,
    Scattering,
}

impl NodeFlavor {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodeFlavor::Impedance => "impedance",
            NodeFlavor::Scattering => "scattering",
        }
    }
}

fn require_disk_point(zeta: &[Complex64]) -> Result<()> {
    for (k, z) in zeta.iter().enumerate() {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDomain(format!(
                "|zeta_{k}| = {:.6} >= 1",
                z.norm()
            )));
        }
    }
    Ok(())
}

fn require_halfplane_point(w: &[Complex64]) -> Result<()> {
    for (k, z) in w.iter().enumerate() {
        if z.re <= 0.0 {
            return Err(Error::OutsideDomain(format!(
                "Re w_{k} = {:.6} <= 0",
                z.re
            )));
        }
    }
    Ok(())
}

fn resolve(
    violations: Vec<String>,
    mode: Validation,
    make_err: impl Fn(String) -> Error,
) -> Result<Vec<String>> {
    match (violations.is_empty(), mode) {
        (true, _) => Ok(Vec::new()),
        (false, Validation::Strict) => Err(make_err(violations[0].clone())),
        (false, Validation::Lenient) => Ok(violations),
    }
}

/// Givone-Roesser colligation over the polydisk.
#[derive(Clone, Debug)]
pub struct SchurGRColligation {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
    dec: DecompositionOfIdentity,
    metric: Metric,
    warnings: Vec<String>,
}

impl SchurGRColligation {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
        dec: DecompositionOfIdentity,
        metric: Metric,
        tol: &Tolerances,
        mode: Validation,
    ) -> Result<Self> {
        let n = dec.dim();
        let q = b.cols();
        let p = c.rows();
        if a.rows() != n || a.cols() != n || b.rows() != n || c.cols() != n || d.rows() != p
            || d.cols() != q
        {
            return Err(Error::DimensionMismatch(format!(
                "colligation blocks inconsistent with state dim {n}: A {}x{}, B {}x{}, C {}x{}, D {}x{}",
                a.rows(), a.cols(), b.rows(), b.cols(), c.rows(), c.cols(), d.rows(), d.cols()
            )));
        }
        if !dec.is_spectral() {
            return Err(Error::InvalidColligation(
                "Givone-Roesser colligations need a spectral decomposition".into(),
            ));
        }
        for (m, what) in [(&a, "A"), (&b, "B"), (&c, "C"), (&d, "D")] {
            m.check_finite(what)?;
        }
        let assembled = ComplexMatrix::block_2x2(&a, &b, &c, &d);
        let mut violations = Vec::new();
        match metric {
            Metric::Unitary => {
                if p != q {
                    violations.push(format!("unitary colligation needs p = q, got p={p} q={q}"));
                } else {
                    let r = linalg::unitarity_residual(&assembled);
                    if r > tol.tol_structure {
                        violations.push(format!("unitarity residual {r:.3e}"));
                    }
                }
            }
            Metric::Isometric => {
                let id = ComplexMatrix::identity(n + q);
                let r = (&(&assembled.adjoint() * &assembled) - &id).max_norm();
                if r > tol.tol_structure {
                    violations.push(format!("isometry residual {r:.3e}"));
                }
            }
            Metric::Coisometric => {
                let id = ComplexMatrix::identity(n + p);
                let r = (&(&assembled * &assembled.adjoint()) - &id).max_norm();
                if r > tol.tol_structure {
                    violations.push(format!("coisometry residual {r:.3e}"));
                }
            }
            Metric::Contractive => {
                let norm = linalg::operator_norm(&assembled);
                if norm > 1.0 + tol.psd_slack {
                    violations.push(format!("norm {norm:.6} exceeds 1 + psd_slack"));
                }
            }
        }
        let warnings = resolve(violations, mode, Error::InvalidColligation)?;
        Ok(SchurGRColligation {
            a,
            b,
            c,
            d,
            dec,
            metric,
            warnings,
        })
    }

    /// The canonical one-variable shift: A=0, B=C=1, D=0 realizes S(z) = z.
    pub fn shift(tol: &Tolerances) -> Self {
        let one = ComplexMatrix::scalar(Complex64::new(1.0, 0.0));
        let zero = ComplexMatrix::scalar(Complex64::new(0.0, 0.0));
        SchurGRColligation::new(
            zero.clone(),
            one.clone(),
            one,
            zero,
            DecompositionOfIdentity::trivial(1),
            Metric::Unitary,
            tol,
            Validation::Strict,
        )
        .expect("shift colligation is unitary")
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }
    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }
    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }
    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }
    pub fn dec(&self) -> &DecompositionOfIdentity {
        &self.dec
    }
    pub fn metric(&self) -> Metric {
        self.metric
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
    pub fn state_dim(&self) -> usize {
        self.dec.dim()
    }
    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }
    pub fn output_dim(&self) -> usize {
        self.c.rows()
    }

    /// The block matrix `[[A, B], [C, D]]`.
    pub fn assembled(&self) -> ComplexMatrix {
        ComplexMatrix::block_2x2(&self.a, &self.b, &self.c, &self.d)
    }

    /// `S(z) = D + C (I - P(z) A)^{-1} P(z) B` for z in the open polydisk.
    pub fn eval(&self, zeta: &[Complex64], tol: &Tolerances) -> Result<ComplexMatrix> {
        require_disk_point(zeta)?;
        let p = self.dec.pencil_at(zeta)?;
        let pa = &p * &self.a;
        let lhs = &ComplexMatrix::identity(self.state_dim()) - &pa;
        let x = linalg::solve(&lhs, &(&p * &self.b), tol)?;
        Ok(&self.d + &(&self.c * &x))
    }

    /// The defect factor `H(z) = (I - A P(z))^{-1} B`, whose block rows give
    /// Kolmogorov factors of the Agler kernels.
    pub fn defect_factor(&self, zeta: &[Complex64], tol: &Tolerances) -> Result<ComplexMatrix> {
        require_disk_point(zeta)?;
        let p = self.dec.pencil_at(zeta)?;
        let lhs = &ComplexMatrix::identity(self.state_dim()) - &(&self.a * &p);
        linalg::solve(&lhs, &self.b, tol)
    }
}

/// Colligation for the Herglotz-Agler class over the polydisk, constrained
/// by the relations `A*A = AA* = I`, `B = A C*`, `D + D* = C C* = B* B`.
#[derive(Clone, Debug)]
pub struct HerglotzDiskColligation {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
    dec: DecompositionOfIdentity,
    warnings: Vec<String>,
}

impl HerglotzDiskColligation {
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
        dec: DecompositionOfIdentity,
        tol: &Tolerances,
        mode: Validation,
    ) -> Result<Self> {
        let n = dec.dim();
        let q = b.cols();
        if a.rows() != n || a.cols() != n || b.rows() != n || c.cols() != n || c.rows() != q
            || d.rows() != q || d.cols() != q
        {
            return Err(Error::DimensionMismatch(format!(
                "Herglotz colligation blocks inconsistent (state {n}, input {q})"
            )));
        }
        if !dec.is_spectral() {
            return Err(Error::InvalidColligation(
                "Herglotz colligations need a spectral decomposition".into(),
            ));
        }
        let mut violations = Vec::new();
        let ua = linalg::unitarity_residual(&a);
        if ua > tol.tol_structure {
            violations.push(format!("A*A = AA* = I fails by {ua:.3e}"));
        }
        let rb = (&b - &(&a * &c.adjoint())).max_norm();
        if rb > tol.tol_structure {
            violations.push(format!("B = A C* fails by {rb:.3e}"));
        }
        let cc = &c * &c.adjoint();
        let rd = (&(&d + &d.adjoint()) - &cc).max_norm();
        if rd > tol.tol_structure {
            violations.push(format!("D + D* = C C* fails by {rd:.3e}"));
        }
        let rbb = (&cc - &(&b.adjoint() * &b)).max_norm();
        if rbb > tol.tol_structure {
            violations.push(format!("C C* = B* B fails by {rbb:.3e}"));
        }
        let warnings = resolve(violations, mode, Error::InvalidColligation)?;
        Ok(HerglotzDiskColligation {
            a,
            b,
            c,
            d,
            dec,
            warnings,
        })
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }
    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }
    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }
    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }
    pub fn dec(&self) -> &DecompositionOfIdentity {
        &self.dec
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
    pub fn state_dim(&self) -> usize {
        self.dec.dim()
    }
    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    /// `F(z) = D + C (I - P(z) A)^{-1} P(z) B`; the relations force
    /// `F + F* >= 0` on the polydisk.
    pub fn eval(&self, zeta: &[Complex64], tol: &Tolerances) -> Result<ComplexMatrix> {
        require_disk_point(zeta)?;
        let p = self.dec.pencil_at(zeta)?;
        let lhs = &ComplexMatrix::identity(self.state_dim()) - &(&p * &self.a);
        let x = linalg::solve(&lhs, &(&p * &self.b), tol)?;
        Ok(&self.d + &(&self.c * &x))
    }

    /// `H(z) = (I - A P(z))^{-1} B` (Kolmogorov factor stack).
    pub fn defect_factor(&self, zeta: &[Complex64], tol: &Tolerances) -> Result<ComplexMatrix> {
        require_disk_point(zeta)?;
        let p = self.dec.pencil_at(zeta)?;
        let lhs = &ComplexMatrix::identity(self.state_dim()) - &(&self.a * &p);
        linalg::solve(&lhs, &self.b, tol)
    }
}

/// Resolvent-form representation of a Herglotz-Agler function on the disk:
/// `F(z) = R + V* (U - P(z))^{-1} (U + P(z)) V`.
///
/// `R` skew-adjoint and `U` unitary are enforced. Whether `V* V` equals the
/// Hermitian part of the represented function at 0 depends on the chosen
/// normalization of `V`; constructors that convert colligations report the
/// discrepancy of the unnormalized choice instead of enforcing it.
#[derive(Clone, Debug)]
pub struct HerglotzRepresentation {
    r: ComplexMatrix,
    u: ComplexMatrix,
    v: ComplexMatrix,
    dec: DecompositionOfIdentity,
    warnings: Vec<String>,
}

impl HerglotzRepresentation {
    pub fn new(
        r: ComplexMatrix,
        u: ComplexMatrix,
        v: ComplexMatrix,
        dec: DecompositionOfIdentity,
        tol: &Tolerances,
        mode: Validation,
    ) -> Result<Self> {
        let n = dec.dim();
        let q = r.rows();
        if !r.is_square() || u.rows() != n || u.cols() != n || v.rows() != n || v.cols() != q {
            return Err(Error::DimensionMismatch(format!(
                "representation blocks inconsistent: R {}x{}, U {}x{}, V {}x{}, state {n}",
                r.rows(), r.cols(), u.rows(), u.cols(), v.rows(), v.cols()
            )));
        }
        if !dec.is_spectral() {
            return Err(Error::InvalidColligation(
                "Herglotz representations need a spectral decomposition".into(),
            ));
        }
        let mut violations = Vec::new();
        let sr = r.skew_deviation();
        if sr > tol.tol_structure {
            violations.push(format!("R + R* = 0 fails by {sr:.3e}"));
        }
        let ur = linalg::unitarity_residual(&u);
        if n > 0 && ur > tol.tol_structure {
            violations.push(format!("U unitary fails by {ur:.3e}"));
        }
        let warnings = resolve(violations, mode, Error::InvalidColligation)?;
        Ok(HerglotzRepresentation {
            r,
            u,
            v,
            dec,
            warnings,
        })
    }

    pub fn r(&self) -> &ComplexMatrix {
        &self.r
    }
    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }
    pub fn v(&self) -> &ComplexMatrix {
        &self.v
    }
    pub fn dec(&self) -> &DecompositionOfIdentity {
        &self.dec
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
    pub fn state_dim(&self) -> usize {
        self.dec.dim()
    }
    pub fn input_dim(&self) -> usize {
        self.r.rows()
    }

    pub fn push_warning(&mut self, w: String) {
        self.warnings.push(w);
    }

    /// `F(z) = R + V* (U - P(z))^{-1} (U + P(z)) V`. The resolvent cannot be
    /// singular for unitary U and z in the open polydisk.
    pub fn eval(&self, zeta: &[Complex64], tol: &Tolerances) -> Result<ComplexMatrix> {
        require_disk_point(zeta)?;
        let p = self.dec.pencil_at(zeta)?;
        let lhs = &self.u - &p;
        let rhs = &(&self.u + &p) * &self.v;
        let x = linalg::solve(&lhs, &rhs, tol)?;
        Ok(&self.r + &(&self.v.adjoint() * &x))
    }
}

/// Bounded conservative system node over the right polyhalfplane.
///
/// Impedance flavor: `A = -A*`, `B = C*`, `D = -D*` (the node assembles to a
/// skew-adjoint matrix after the sign flip on the first column block).
/// Scattering flavor: the graph Gram
/// `[[A + A* + C*C, B + C*D], [B* + D*C, D*D - I]]` vanishes, which is
/// isotropy of the graph in the scattering signature. At finite dimension
/// that forces `D*D = I`, so scattering-conservative nodes form the inner
/// subclass; general contractive functions on the halfplane are reached
/// through Cayley transforms of disk realizations instead (see
/// [`crate::cayley`]).
#[derive(Clone, Debug)]
pub struct PiNode {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
    dec: DecompositionOfIdentity,
    flavor: NodeFlavor,
    warnings: Vec<String>,
}

impl PiNode {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: ComplexMatrix,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
        dec: DecompositionOfIdentity,
        flavor: NodeFlavor,
        tol: &Tolerances,
        mode: Validation,
    ) -> Result<Self> {
        let n = dec.dim();
        let q = b.cols();
        let p = c.rows();
        if a.rows() != n || a.cols() != n || b.rows() != n || c.cols() != n || d.rows() != p
            || d.cols() != q
        {
            return Err(Error::DimensionMismatch(format!(
                "node blocks inconsistent with state dim {n}"
            )));
        }
        let mut violations = Vec::new();
        match flavor {
            NodeFlavor::Impedance => {
                if p != q {
                    violations.push(format!("impedance node needs p = q, got p={p} q={q}"));
                }
                let ra = a.skew_deviation();
                if ra > tol.tol_structure {
                    violations.push(format!("A = -A* fails by {ra:.3e}"));
                }
                if p == q {
                    let rb = (&b - &c.adjoint()).max_norm();
                    if rb > tol.tol_structure {
                        violations.push(format!("B = C* fails by {rb:.3e}"));
                    }
                }
                let rd = d.skew_deviation();
                if rd > tol.tol_structure {
                    violations.push(format!("D = -D* fails by {rd:.3e}"));
                }
            }
            NodeFlavor::Scattering => {
                let g11 = &(&a + &a.adjoint()) + &(&c.adjoint() * &c);
                let g12 = &b + &(&c.adjoint() * &d);
                let g21 = g12.adjoint();
                let g22 = &(&d.adjoint() * &d) - &ComplexMatrix::identity(q);
                let gram = ComplexMatrix::block_2x2(&g11, &g12, &g21, &g22);
                let rg = gram.max_norm();
                if rg > tol.tol_structure {
                    violations.push(format!("scattering graph Gram nonzero: {rg:.3e}"));
                }
            }
        }
        let warnings = resolve(violations, mode, Error::InvalidColligation)?;
        Ok(PiNode {
            a,
            b,
            c,
            d,
            dec,
            flavor,
            warnings,
        })
    }

    /// Assemble an impedance-conservative node from a triple: `T` skew on
    /// the state space, a feed `V0`, and a skew constant `R`:
    /// `A = T`, `B = (I - T) V0`, `C = V0* (I + T)`, `D = -V0* T V0 + R`.
    /// The transfer value at `w = e` is `V0* V0 + R`.
    pub fn from_impedance_triple(
        t: &ComplexMatrix,
        v0: &ComplexMatrix,
        r: &ComplexMatrix,
        dec: DecompositionOfIdentity,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = dec.dim();
        if !t.is_square() || t.rows() != n || v0.rows() != n || !r.is_square()
            || r.rows() != v0.cols()
        {
            return Err(Error::DimensionMismatch(format!(
                "triple dims: T {}x{}, V0 {}x{}, R {}x{}, state {n}",
                t.rows(), t.cols(), v0.rows(), v0.cols(), r.rows(), r.cols()
            )));
        }
        let st = t.skew_deviation();
        if st > tol.tol_structure * (1.0 + t.max_norm()) {
            return Err(Error::NotSkewAdjoint { deviation: st });
        }
        let sr = r.skew_deviation();
        if sr > tol.tol_structure * (1.0 + r.max_norm()) {
            return Err(Error::NotSkewAdjoint { deviation: sr });
        }
        let id = ComplexMatrix::identity(n);
        let a = t.clone();
        let b = &(&id - t) * v0;
        let c = &v0.adjoint() * &(&id + t);
        let d = &(&v0.adjoint().scale_re(-1.0) * &(t * v0)) + r;
        PiNode::new(a, b, c, d, dec, NodeFlavor::Impedance, tol, Validation::Strict)
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }
    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }
    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }
    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }
    pub fn dec(&self) -> &DecompositionOfIdentity {
        &self.dec
    }
    pub fn flavor(&self) -> NodeFlavor {
        self.flavor
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
    pub fn state_dim(&self) -> usize {
        self.dec.dim()
    }
    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }
    pub fn output_dim(&self) -> usize {
        self.c.rows()
    }

    /// `f(w) = D + C (Y(w) - A)^{-1} B` for w in the open right polyhalfplane.
    /// Both flavors make A dissipative, so the resolvent exists on all of it.
    pub fn eval(&self, w: &[Complex64], tol: &Tolerances) -> Result<ComplexMatrix> {
        require_halfplane_point(w)?;
        let y = self.dec.pencil_at(w)?;
        let lhs = &y - &self.a;
        let x = linalg::solve(&lhs, &self.b, tol)?;
        Ok(&self.d + &(&self.c * &x))
    }

    /// `H(w) = (Y(w) - A)^{-1} B`.
    pub fn defect_factor(&self, w: &[Complex64], tol: &Tolerances) -> Result<ComplexMatrix> {
        require_halfplane_point(w)?;
        let y = self.dec.pencil_at(w)?;
        linalg::solve(&(&y - &self.a), &self.b, tol)
    }
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
    fn shift_colligation_realizes_identity_function() {
        let col = SchurGRColligation::shift(&tols());
        for z in [c(0.3, 0.2), c(-0.7, 0.1), c(0.0, 0.0), c(0.0, -0.9)] {
            let s = col.eval(&[z], &tols()).unwrap();
            assert!((s.get(0, 0) - z).norm() < 1e-14);
        }
    }

    #[test]
    fn eval_at_zero_returns_d() {
        let col = SchurGRColligation::shift(&tols());
        let s = col.eval(&[c(0.0, 0.0)], &tols()).unwrap();
        assert!(s.get(0, 0).norm() < 1e-15);
    }

    #[test]
    fn unitary_metric_is_verified() {
        // A small non-unitary matrix must be rejected under the unitary flag.
        let half = ComplexMatrix::scalar(c(0.5, 0.0));
        let dec = DecompositionOfIdentity::trivial(1);
        let r = SchurGRColligation::new(
            half.clone(),
            half.clone(),
            half.clone(),
            half.clone(),
            dec.clone(),
            Metric::Unitary,
            &tols(),
            Validation::Strict,
        );
        assert!(matches!(r, Err(Error::InvalidColligation(_))));
        // But it is contractive.
        SchurGRColligation::new(
            half.clone(),
            half.clone(),
            half.clone(),
            half,
            dec,
            Metric::Contractive,
            &tols(),
            Validation::Strict,
        )
        .unwrap();
    }

    #[test]
    fn lenient_mode_records_warnings() {
        let half = ComplexMatrix::scalar(c(0.5, 0.0));
        let dec = DecompositionOfIdentity::trivial(1);
        let col = SchurGRColligation::new(
            half.clone(),
            half.clone(),
            half.clone(),
            half,
            dec,
            Metric::Unitary,
            &tols(),
            Validation::Lenient,
        )
        .unwrap();
        assert!(!col.warnings().is_empty());
    }

    #[test]
    fn outside_domain_is_rejected() {
        let col = SchurGRColligation::shift(&tols());
        assert!(matches!(
            col.eval(&[c(1.5, 0.0)], &tols()),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn herglotz_colligation_relations_enforced() {
        // A = 1, C = 0 forces B = 0 and D skew; F is then constantly D.
        let dec = DecompositionOfIdentity::trivial(1);
        let a = ComplexMatrix::scalar(c(1.0, 0.0));
        let zero = ComplexMatrix::scalar(c(0.0, 0.0));
        let d = ComplexMatrix::scalar(c(0.0, 2.5));
        let col = HerglotzDiskColligation::new(
            a.clone(),
            zero.clone(),
            zero.clone(),
            d,
            dec.clone(),
            &tols(),
            Validation::Strict,
        )
        .unwrap();
        let f = col.eval(&[c(0.5, 0.3)], &tols()).unwrap();
        assert!((f.get(0, 0) - c(0.0, 2.5)).norm() < 1e-14);
        // Violating B = A C* is rejected.
        let bad = HerglotzDiskColligation::new(
            a,
            ComplexMatrix::scalar(c(0.7, 0.0)),
            zero.clone(),
            zero,
            dec,
            &tols(),
            Validation::Strict,
        );
        assert!(matches!(bad, Err(Error::InvalidColligation(_))));
    }

    #[test]
    fn herglotz_rep_scalar_resolvent() {
        // R=0, U=1, V=1 gives F(z) = (1+z)/(1-z); F(0) = 1.
        let dec = DecompositionOfIdentity::trivial(1);
        let rep = HerglotzRepresentation::new(
            ComplexMatrix::scalar(c(0.0, 0.0)),
            ComplexMatrix::scalar(c(1.0, 0.0)),
            ComplexMatrix::scalar(c(1.0, 0.0)),
            dec,
            &tols(),
            Validation::Strict,
        )
        .unwrap();
        let f0 = rep.eval(&[c(0.0, 0.0)], &tols()).unwrap();
        assert!((f0.get(0, 0) - c(1.0, 0.0)).norm() < 1e-14);
        let z = c(0.3, 0.4);
        let f = rep.eval(&[z], &tols()).unwrap();
        let expect = (c(1.0, 0.0) + z) / (c(1.0, 0.0) - z);
        assert!((f.get(0, 0) - expect).norm() < 1e-13);
    }

    #[test]
    fn herglotz_rep_negative_unitary() {
        // R=0, U=-1, V=1 at z = 1/2: (-1 - 1/2)^{-1} (-1 + 1/2) = 1/3.
        let dec = DecompositionOfIdentity::trivial(1);
        let rep = HerglotzRepresentation::new(
            ComplexMatrix::scalar(c(0.0, 0.0)),
            ComplexMatrix::scalar(c(-1.0, 0.0)),
            ComplexMatrix::scalar(c(1.0, 0.0)),
            dec,
            &tols(),
            Validation::Strict,
        )
        .unwrap();
        let f = rep.eval(&[c(0.5, 0.0)], &tols()).unwrap();
        assert!((f.get(0, 0) - c(1.0 / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rep_eval_at_zero_is_r_plus_vv() {
        let dec = DecompositionOfIdentity::trivial(2);
        let u = ComplexMatrix::from_diagonal(&[c(0.0, 1.0), c(-1.0, 0.0)]);
        let v = ComplexMatrix::from_rows(&[vec![c(0.5, 0.1)], vec![c(-0.3, 0.2)]]).unwrap();
        let r = ComplexMatrix::scalar(c(0.0, 0.7));
        let rep =
            HerglotzRepresentation::new(r.clone(), u, v.clone(), dec, &tols(), Validation::Strict)
                .unwrap();
        let f0 = rep.eval(&[c(0.0, 0.0)], &tols()).unwrap();
        let expect = &r + &(&v.adjoint() * &v);
        assert!((&f0 - &expect).max_norm() < 1e-14);
    }

    #[test]
    fn impedance_triple_scalar_one_over_w() {
        // (T=0, V0=1, R=0) gives A=0, B=1, C=1, D=0 and f(w) = 1/w.
        let dec = DecompositionOfIdentity::trivial(1);
        let zero = ComplexMatrix::scalar(c(0.0, 0.0));
        let one = ComplexMatrix::scalar(c(1.0, 0.0));
        let node = PiNode::from_impedance_triple(&zero, &one, &zero, dec, &tols()).unwrap();
        assert!(node.a().get(0, 0).norm() < 1e-15);
        assert!((node.b().get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((node.c().get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(node.d().get(0, 0).norm() < 1e-15);
        for w in [c(1.0, 0.0), c(2.0, 1.0), c(0.2, -3.0)] {
            let f = node.eval(&[w], &tols()).unwrap();
            assert!((f.get(0, 0) - w.inv()).norm() < 1e-13);
        }
    }

    #[test]
    fn impedance_triple_constant_skew() {
        // (T=0, V0=0, R=i rho) gives f identically i rho.
        let dec = DecompositionOfIdentity::trivial(1);
        let zero = ComplexMatrix::scalar(c(0.0, 0.0));
        let r = ComplexMatrix::scalar(c(0.0, 1.7));
        let node = PiNode::from_impedance_triple(&zero, &zero, &r, dec, &tols()).unwrap();
        let f = node.eval(&[c(5.0, 2.0)], &tols()).unwrap();
        assert!((f.get(0, 0) - c(0.0, 1.7)).norm() < 1e-14);
    }

    #[test]
    fn impedance_triple_rejects_non_skew() {
        let dec = DecompositionOfIdentity::trivial(1);
        let one = ComplexMatrix::scalar(c(1.0, 0.0));
        let zero = ComplexMatrix::scalar(c(0.0, 0.0));
        assert!(matches!(
            PiNode::from_impedance_triple(&one, &one, &zero, dec, &tols()),
            Err(Error::NotSkewAdjoint { .. })
        ));
    }

    #[test]
    fn scalar_scattering_node() {
        // A=-1, B=-sqrt2, C=sqrt2, D=1 realizes s(w) = (w-1)/(w+1).
        let s2 = 2.0f64.sqrt();
        let dec = DecompositionOfIdentity::trivial(1);
        let node = PiNode::new(
            ComplexMatrix::scalar(c(-1.0, 0.0)),
            ComplexMatrix::scalar(c(-s2, 0.0)),
            ComplexMatrix::scalar(c(s2, 0.0)),
            ComplexMatrix::scalar(c(1.0, 0.0)),
            dec,
            NodeFlavor::Scattering,
            &tols(),
            Validation::Strict,
        )
        .unwrap();
        for w in [c(1.0, 0.0), c(3.0, 1.0), c(0.4, -0.7)] {
            let s = node.eval(&[w], &tols()).unwrap();
            let expect = (w - 1.0) / (w + 1.0);
            assert!((s.get(0, 0) - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn eval_matches_truncated_neumann_series() {
        // Oracle: S(z) ~ D + sum_{m=1..60} C (P(z) A)^{m-1} P(z) B, tail
        // below 0.5^61 at |z|_inf <= 0.5.
        use rand::Rng;
        use rand::SeedableRng;
        let tol = tols();
        let col = crate::verify::random_schur_gr(2, 4, 2, 345, &tol).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let z: Vec<Complex64> = (0..2)
                .map(|_| {
                    Complex64::from_polar(
                        0.5 * rng.random_range(0.0f64..1.0),
                        rng.random_range(0.0..(2.0 * std::f64::consts::PI)),
                    )
                })
                .collect();
            let p = col.dec().pencil_at(&z).unwrap();
            let pa = &p * col.a();
            let mut term = &p * col.b(); // (P A)^0 P B
            let mut acc = col.d().clone();
            for _ in 0..60 {
                acc = &acc + &(col.c() * &term);
                term = &pa * &term;
            }
            let direct = col.eval(&z, &tol).unwrap();
            assert!(
                (&direct - &acc).max_norm() < 1e-8,
                "Neumann oracle gap {}",
                (&direct - &acc).max_norm()
            );
        }
    }

    #[test]
    fn random_triple_transfer_value_at_e() {
        // f(e) = V0* V0 + R for any bounded triple, here at state dim 5.
        use rand::SeedableRng;
        let tol = tols();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let t = crate::verify::random_matrix(&mut rng, 5, 5).skew_part();
        let v0 = crate::verify::random_matrix(&mut rng, 5, 2);
        let r = crate::verify::random_matrix(&mut rng, 2, 2).skew_part();
        let dec = crate::verify::random_positive_decomposition(&mut rng, 3, 5, &tol).unwrap();
        let node = PiNode::from_impedance_triple(&t, &v0, &r, dec, &tol).unwrap();
        assert!(node.warnings().is_empty(), "impedance invariants hold");
        let e = vec![c(1.0, 0.0); 3];
        let f = node.eval(&e, &tol).unwrap();
        let expect = &(&v0.adjoint() * &v0) + &r;
        assert!((&f - &expect).max_norm() < 1e-10);
    }

    #[test]
    fn node_at_e_uses_unit_pencil() {
        // For any node, Y(e) = I, so f(e) = D + C (I - A)^{-1} B.
        let dec = DecompositionOfIdentity::trivial(2);
        let t = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.5), c(0.3, 0.0)],
            vec![c(-0.3, 0.0), c(0.0, -0.2)],
        ])
        .unwrap();
        let v0 = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]]).unwrap();
        let r = ComplexMatrix::scalar(c(0.0, 0.9));
        let node = PiNode::from_impedance_triple(&t, &v0, &r, dec, &tols()).unwrap();
        let f = node.eval(&[c(1.0, 0.0)], &tols()).unwrap();
        let expect = &(&v0.adjoint() * &v0) + &r;
        assert!((&f - &expect).max_norm() < 1e-12, "f(e) = V0*V0 + R");
    }
}
