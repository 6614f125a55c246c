//! Command implementations: gen, eval, convert, verify, realize.
//!
//! Exit codes: 0 success / all checks pass, 1 verification failure
//! (failing report, failing consistency, inconsistent samples), 2 parse or
//! precondition errors.

use crate::schema::{
    self, file_from_herglotz_colligation, file_from_herglotz_rep, file_from_nevanlinna,
    file_from_pencil, file_from_pi_node, file_from_report, file_from_schur, to_core, to_json_string,
    CoreObject, JsonCheck, JsonMatrix, ObjectFile,
};
use num_complex::Complex64;
use polyreal::cayley::{
    cayley_point_h2d, cayley_value_s_to_f, gr_to_pi_impedance, herglotz_colligation_to_schur_gr,
    schur_gr_to_herglotz_rep, VNormalization,
};
use polyreal::error::Error as CoreError;
use polyreal::linalg;
use polyreal::pencil::{
    build_pencil_from_herglotz_rep, check_pencil_class, nevanlinna_from_pencil, BessmertnyiPencil,
};
use polyreal::realize::{realize_herglotz_from_samples, realize_schur_from_samples};
use polyreal::verify::{
    agler_residual, disk_points, eval_herglotz_on_tuple, eval_schur_on_tuple, growth_limit,
    halfplane_points, kernel_gram_psd, point_pairs, random_commuting_tuple, random_herglotz_colligation,
    random_herglotz_rep, random_pencil, random_pi_impedance, random_schur_gr, resolvent_bound_check,
    taylor_eval_on_tuple, AglerFlavor, KernelEval, TupleKind,
};
use polyreal::{
    ComplexMatrix, SchurGRColligation, Tolerances, Validation, VerificationReport,
};
use std::path::{Path, PathBuf};

/// Map an error to the process exit code: inconsistent sample data is a
/// verification failure (1), anything else at this level is a parse or
/// precondition problem (2).
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(CoreError::GramMismatch { .. }) = cause.downcast_ref::<CoreError>() {
            return 1;
        }
    }
    2
}

fn emit(file: &ObjectFile, out: Option<&Path>) -> anyhow::Result<()> {
    let text = to_json_string(file);
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            eprintln!("wrote {} ({})", path.display(), file.type_name());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn read_file(path: &Path) -> anyhow::Result<ObjectFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    schema::from_json_str(&text).map_err(|e| anyhow::anyhow!("cannot parse {}: {e}", path.display()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "snake_case")]
pub enum GenKind {
    SchurGr,
    HerglotzColligation,
    HerglotzRep,
    PiImpedance,
    Pencil,
    Tuple,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_gen(
    kind: GenKind,
    preset: Option<&str>,
    d: usize,
    n: usize,
    q: usize,
    m: usize,
    margin: f64,
    seed: u64,
    out: Option<&PathBuf>,
    tol: &Tolerances,
) -> anyhow::Result<i32> {
    if d == 0 {
        anyhow::bail!("parameter d must be at least 1");
    }
    let file = match (kind, preset) {
        (GenKind::SchurGr, Some("shift")) => {
            file_from_schur(&SchurGRColligation::shift(tol), seed, tol)
        }
        (GenKind::SchurGr, None) => file_from_schur(&random_schur_gr(d, n, q, seed, tol)?, seed, tol),
        (GenKind::HerglotzColligation, None) => file_from_herglotz_colligation(
            &random_herglotz_colligation(d, n, q, seed, tol)?,
            seed,
            tol,
        ),
        (GenKind::HerglotzRep, None) => {
            file_from_herglotz_rep(&random_herglotz_rep(d, n, q, seed, 0, tol)?, seed, tol)
        }
        (GenKind::PiImpedance, None) => {
            file_from_pi_node(&random_pi_impedance(d, n, q, seed, tol)?, seed, tol)
        }
        (GenKind::Pencil, Some("one-over-w")) => {
            file_from_pencil(&BessmertnyiPencil::one_over_w(tol), seed, tol)
        }
        (GenKind::Pencil, None) => file_from_pencil(&random_pencil(d, n, q, seed, tol)?, seed, tol),
        (GenKind::Tuple, None) => {
            let tuple = random_commuting_tuple(d, m, TupleKind::StrictContraction, margin, seed, tol)?;
            schema::file_from_tuple(&tuple, seed, tol)
        }
        (_, Some(other)) => anyhow::bail!("no preset {other:?} for this kind"),
    };
    emit(&file, out.map(|p| p.as_path()))?;
    Ok(0)
}

fn eval_core(obj: &CoreObject, point: &[Complex64], tol: &Tolerances) -> anyhow::Result<ComplexMatrix> {
    Ok(match obj {
        CoreObject::Schur(c) => c.eval(point, tol)?,
        CoreObject::Herglotz(c) => c.eval(point, tol)?,
        CoreObject::Rep(r) => r.eval(point, tol)?,
        CoreObject::Node(n) => n.eval(point, tol)?,
        CoreObject::Pencil(p) => p.transfer(point, tol)?,
        CoreObject::Tuple(_) => anyhow::bail!("tuples have no pointwise evaluation"),
    })
}

fn object_domain(obj: &CoreObject) -> &'static str {
    match obj {
        CoreObject::Schur(_) | CoreObject::Herglotz(_) | CoreObject::Rep(_) => "disk",
        CoreObject::Node(_) | CoreObject::Pencil(_) => "halfplane",
        CoreObject::Tuple(_) => "none",
    }
}

fn object_d(obj: &CoreObject) -> usize {
    match obj {
        CoreObject::Schur(c) => c.dec().d(),
        CoreObject::Herglotz(c) => c.dec().d(),
        CoreObject::Rep(r) => r.dec().d(),
        CoreObject::Node(n) => n.dec().d(),
        CoreObject::Pencil(p) => p.d(),
        CoreObject::Tuple(t) => t.d(),
    }
}

pub fn cmd_eval(
    object: &Path,
    points: &Path,
    out: Option<&PathBuf>,
    tol: &Tolerances,
) -> anyhow::Result<i32> {
    let obj = to_core(&read_file(object)?, tol, Validation::Strict)?;
    let pts_file = read_file(points)?;
    let (d, domain, pts) = match &pts_file {
        ObjectFile::Points {
            d, domain, points, ..
        } => (*d, domain.clone(), points.clone()),
        other => anyhow::bail!("expected a points file, got {:?}", other.type_name()),
    };
    if d != object_d(&obj) {
        anyhow::bail!(
            "points file has d = {d} but the object has d = {}",
            object_d(&obj)
        );
    }
    if domain != object_domain(&obj) {
        anyhow::bail!(
            "points are for the {domain} but the object lives on the {}",
            object_domain(&obj)
        );
    }
    let mut values = Vec::with_capacity(pts.len());
    for p in &pts {
        let z = schema::point_from_json(p);
        values.push(JsonMatrix::from_matrix(&eval_core(&obj, &z, tol)?));
    }
    emit(&ObjectFile::Results { values }, out.map(|p| p.as_path()))?;
    Ok(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "snake_case")]
pub enum ConvertTarget {
    HerglotzRep,
    PiImpedance,
    Pencil,
    SchurFromHerglotz,
    Nevanlinna,
}

pub fn cmd_convert(
    object: &Path,
    target: ConvertTarget,
    seed: u64,
    out: Option<&PathBuf>,
    tol: &Tolerances,
) -> anyhow::Result<i32> {
    let obj = to_core(&read_file(object)?, tol, Validation::Strict)?;
    let mut checks: Vec<JsonCheck> = Vec::new();
    let mut push = |label: &str, value: f64, threshold: f64| {
        checks.push(JsonCheck {
            label: label.to_string(),
            value,
            threshold,
            pass: value <= threshold,
        });
    };

    let file = match (&obj, target) {
        (CoreObject::Schur(col), ConvertTarget::HerglotzRep) => {
            let rep = schur_gr_to_herglotz_rep(col, VNormalization::Derived, tol)?;
            let d = col.dec().d();
            let mut worst = 0.0f64;
            for z in disk_points(d, 20, seed) {
                let f_path = cayley_value_s_to_f(&col.eval(&z, tol)?, tol)?;
                let f_rep = rep.eval(&z, tol)?;
                worst = worst.max((&f_path - &f_rep).max_norm());
            }
            push("value_cayley_consistency", worst, 1e-9);
            let origin = vec![Complex64::new(0.0, 0.0); d];
            let f0 = cayley_value_s_to_f(&col.eval(&origin, tol)?, tol)?;
            let vv = &rep.v().adjoint() * rep.v();
            push(
                "vstar_v_equals_re_f0",
                (&vv - &f0.hermitian_part()).max_norm(),
                1e-9,
            );
            file_from_herglotz_rep(&rep, seed, tol)
        }
        (CoreObject::Schur(col), ConvertTarget::PiImpedance) => {
            let node = gr_to_pi_impedance(col, tol)?;
            let d = col.dec().d();
            let mut worst = 0.0f64;
            for w in halfplane_points(d, 20, seed) {
                let z = cayley_point_h2d(&w)?;
                let f_path = cayley_value_s_to_f(&col.eval(&z, tol)?, tol)?;
                let f_node = node.eval(&w, tol)?;
                worst = worst.max((&f_path - &f_node).max_norm());
            }
            push("double_cayley_consistency", worst, 1e-9);
            file_from_pi_node(&node, seed, tol)
        }
        (CoreObject::Rep(rep), ConvertTarget::Pencil) => {
            let pen = build_pencil_from_herglotz_rep(rep, tol)?;
            let d = pen.d();
            let mut worst = 0.0f64;
            for w in halfplane_points(d, 20, seed) {
                let z = cayley_point_h2d(&w)?;
                let f_rep = rep.eval(&z, tol)?;
                let f_pen = pen.transfer(&w, tol)?;
                worst = worst.max((&f_rep - &f_pen).max_norm());
            }
            push("double_cayley_consistency", worst, 1e-9);
            push("v0_skewness", pen.v0().skew_deviation(), tol.tol_structure);
            file_from_pencil(&pen, seed, tol)
        }
        (CoreObject::Herglotz(hcol), ConvertTarget::SchurFromHerglotz) => {
            let col = herglotz_colligation_to_schur_gr(hcol, tol)?;
            let d = col.dec().d();
            let mut worst = 0.0f64;
            for z in disk_points(d, 20, seed) {
                let f = hcol.eval(&z, tol)?;
                let s_expect = polyreal::cayley::cayley_value_f_to_s(&f, tol)?;
                let s = col.eval(&z, tol)?;
                worst = worst.max((&s - &s_expect).max_norm());
            }
            push("value_cayley_consistency", worst, 1e-9);
            file_from_schur(&col, seed, tol)
        }
        (CoreObject::Pencil(pen), ConvertTarget::Nevanlinna) => {
            let data = nevanlinna_from_pencil(pen, tol)?;
            let mut worst = 0.0f64;
            for w in halfplane_points(1, 20, seed) {
                let direct = pen.transfer(&w, tol)?;
                let closed = data.eval(w[0]);
                worst = worst.max((direct.get(0, 0) - closed).norm());
            }
            push("closed_form_consistency", worst, 1e-10);
            file_from_nevanlinna(&data, seed, tol)
        }
        (src, tgt) => anyhow::bail!(
            "conversion from {} to {:?} is not defined",
            src.type_name(),
            tgt
        ),
    };
    let all_pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        eprintln!(
            "[{}] {}: {:.3e} (threshold {:.3e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.label,
            c.value,
            c.threshold
        );
    }
    emit(&file.with_consistency(checks), out.map(|p| p.as_path()))?;
    Ok(if all_pass { 0 } else { 1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "snake_case")]
pub enum Suite {
    Kernels,
    Tuples,
    Growth,
    Resolvent,
    PencilClass,
    All,
}

fn suite_kernels(
    obj: &CoreObject,
    report: &mut VerificationReport,
    npoints: usize,
    seed: u64,
    tol: &Tolerances,
) -> anyhow::Result<bool> {
    let d = object_d(obj);
    match obj {
        CoreObject::Schur(col) => {
            let ke = KernelEval::from_gr(col);
            let pts = disk_points(d, npoints.max(4), seed);
            let pairs = point_pairs(&pts);
            let resid = agler_residual(|z| col.eval(z, tol), &ke, &pairs, AglerFlavor::DiskSchur, tol)?;
            report.add_check("agler_residual_disk_schur", resid, 1e-9);
            for k in 0..d {
                let lo = kernel_gram_psd(|l, r| ke.kernel_k(k, l, r, tol), &pts[..pts.len().min(6)], tol)?;
                report.add_check(format!("kernel_{}_gram_min_eig_dip", k + 1), -lo, 1e-9);
            }
            report.add_check(
                "colligation_unitarity",
                linalg::unitarity_residual(&col.assembled()),
                tol.tol_structure,
            );
        }
        CoreObject::Herglotz(col) => {
            let ke = KernelEval::from_herglotz(col);
            let pts = disk_points(d, npoints.max(4), seed);
            let pairs = point_pairs(&pts);
            let resid =
                agler_residual(|z| col.eval(z, tol), &ke, &pairs, AglerFlavor::DiskHerglotz, tol)?;
            report.add_check("agler_residual_disk_herglotz", resid, 1e-9);
            for k in 0..d {
                let lo = kernel_gram_psd(|l, r| ke.kernel_k(k, l, r, tol), &pts[..pts.len().min(6)], tol)?;
                report.add_check(format!("kernel_{}_gram_min_eig_dip", k + 1), -lo, 1e-9);
            }
            let idres = (col.b() - &(col.a() * &col.c().adjoint())).max_norm();
            report.add_check("relation_b_equals_a_cstar", idres, tol.tol_structure);
        }
        CoreObject::Rep(rep) => {
            let ke = KernelEval::from_herglotz_rep(rep);
            let pts = disk_points(d, npoints.max(4), seed);
            let pairs = point_pairs(&pts);
            let resid =
                agler_residual(|z| rep.eval(z, tol), &ke, &pairs, AglerFlavor::DiskHerglotz, tol)?;
            report.add_check("agler_residual_disk_herglotz", resid, 1e-9);
            for k in 0..d {
                let lo = kernel_gram_psd(|l, r| ke.kernel_k(k, l, r, tol), &pts[..pts.len().min(6)], tol)?;
                report.add_check(format!("kernel_{}_gram_min_eig_dip", k + 1), -lo, 1e-9);
            }
            report.add_check(
                "u_unitarity",
                linalg::unitarity_residual(rep.u()),
                tol.tol_structure,
            );
            report.add_check("r_skewness", rep.r().skew_deviation(), tol.tol_structure);
        }
        CoreObject::Node(node) => {
            let ke = KernelEval::from_pi_node(node);
            let pts = halfplane_points(d, npoints.max(4), seed);
            let pairs = point_pairs(&pts);
            let resid =
                agler_residual(|w| node.eval(w, tol), &ke, &pairs, AglerFlavor::PiHerglotz, tol)?;
            report.add_check("agler_residual_pi_herglotz", resid, 1e-9);
            for k in 0..d {
                let lo = kernel_gram_psd(|l, r| ke.kernel_k(k, l, r, tol), &pts[..pts.len().min(6)], tol)?;
                report.add_check(format!("kernel_{}_gram_min_eig_dip", k + 1), -lo, 1e-9);
            }
            report.add_check("node_a_skewness", node.a().skew_deviation(), tol.tol_structure);
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn suite_tuples(
    obj: &CoreObject,
    report: &mut VerificationReport,
    npoints: usize,
    seed: u64,
    tol: &Tolerances,
) -> anyhow::Result<bool> {
    let d = object_d(obj);
    match obj {
        CoreObject::Schur(col) => {
            let mut worst = f64::NEG_INFINITY;
            for i in 0..npoints {
                let tuple = random_commuting_tuple(
                    d,
                    3,
                    TupleKind::StrictContraction,
                    0.2,
                    seed.wrapping_add(i as u64),
                    tol,
                )?;
                let st = eval_schur_on_tuple(col, &tuple, tol)?;
                worst = worst.max(linalg::operator_norm(&st) - 1.0);
            }
            report.add_check("tuple_contraction_slack", worst, 1e-9);
            let tuple = random_commuting_tuple(d, 3, TupleKind::StrictContraction, 0.3, seed, tol)?;
            let direct = eval_schur_on_tuple(col, &tuple, tol)?;
            let taylor = taylor_eval_on_tuple(col, &tuple, 40, 5e-6)?;
            report.add_check(
                "taylor_cross_oracle",
                (&direct - &taylor.value).max_norm(),
                1e-6,
            );
        }
        CoreObject::Herglotz(col) => {
            let mut worst = f64::NEG_INFINITY;
            for i in 0..npoints {
                let tuple = random_commuting_tuple(
                    d,
                    3,
                    TupleKind::StrictContraction,
                    0.2,
                    seed.wrapping_add(i as u64),
                    tol,
                )?;
                let ft = eval_herglotz_on_tuple(col, &tuple, tol)?;
                let lo = linalg::min_eig(&(&ft + &ft.adjoint()), tol)?;
                worst = worst.max(-lo);
            }
            report.add_check("tuple_psd_real_part_dip", worst, 1e-9);
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn suite_growth(
    obj: &CoreObject,
    report: &mut VerificationReport,
    tol: &Tolerances,
) -> anyhow::Result<bool> {
    let grid = [1.0, 1e2, 1e4, 1e6];
    match obj {
        CoreObject::Pencil(pen) => {
            let q = pen.q();
            let mut m11 = ComplexMatrix::zeros(q, q);
            for k in 0..pen.d() {
                m11 = &m11 + &pen.vk(k).submatrix(0, 0, q, q);
            }
            let est = growth_limit(|w| pen.transfer(w, tol), pen.d(), &grid)?;
            report.add_check(
                "growth_limit_matches_coefficient_sum",
                (&est.limit - &m11).max_norm(),
                1e-5,
            );
        }
        CoreObject::Node(node) => {
            let est = growth_limit(|w| node.eval(w, tol), object_d(obj), &grid)?;
            report.add_check("growth_limit_vanishes", est.limit.max_norm(), 1e-5);
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn suite_resolvent(
    obj: &CoreObject,
    report: &mut VerificationReport,
    npoints: usize,
    seed: u64,
    tol: &Tolerances,
) -> anyhow::Result<bool> {
    match obj {
        CoreObject::Node(node) => {
            let samples = halfplane_points(object_d(obj), npoints.max(10), seed);
            let sub = resolvent_bound_check(node, &samples, seed, tol)?;
            for c in sub.checks {
                report.add_check(c.label, c.value, c.threshold);
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

fn suite_pencil_class(
    obj: &CoreObject,
    report: &mut VerificationReport,
    npoints: usize,
    seed: u64,
    tol: &Tolerances,
) -> anyhow::Result<bool> {
    match obj {
        CoreObject::Pencil(pen) => {
            let samples = halfplane_points(pen.d(), npoints.max(10), seed);
            let sub = check_pencil_class(pen, &samples, seed, tol);
            for c in sub.checks {
                report.add_check(c.label, c.value, c.threshold);
            }
        }
        _ => return Ok(false),
    }
    Ok(true)
}

pub fn cmd_verify(
    object: &Path,
    suite: Suite,
    seed: u64,
    npoints: usize,
    out: Option<&PathBuf>,
    tol: &Tolerances,
) -> anyhow::Result<i32> {
    // lenient load: verification is the place where corrupted objects are
    // examined rather than rejected
    let obj = to_core(&read_file(object)?, tol, Validation::Lenient)?;
    let mut report = VerificationReport::new(
        format!("{}:{:?}", obj.type_name(), suite),
        seed,
    );
    let warnings = obj.warnings();
    report.add_check("construction_invariants_violated", warnings.len() as f64, 0.0);
    for w in &warnings {
        report.note(format!("construction: {w}"));
    }

    let mut applicable = false;
    if matches!(suite, Suite::Kernels | Suite::All) {
        applicable |= suite_kernels(&obj, &mut report, npoints, seed, tol)?;
    }
    if matches!(suite, Suite::Tuples | Suite::All) {
        applicable |= suite_tuples(&obj, &mut report, npoints, seed, tol)?;
    }
    if matches!(suite, Suite::Growth | Suite::All) {
        applicable |= suite_growth(&obj, &mut report, tol)?;
    }
    if matches!(suite, Suite::Resolvent | Suite::All) {
        applicable |= suite_resolvent(&obj, &mut report, npoints, seed, tol)?;
    }
    if matches!(suite, Suite::PencilClass | Suite::All) {
        applicable |= suite_pencil_class(&obj, &mut report, npoints, seed, tol)?;
    }
    if !applicable {
        anyhow::bail!(
            "suite {:?} is not applicable to objects of type {}",
            suite,
            obj.type_name()
        );
    }

    print!("{}", report.summary());
    if let Some(path) = out {
        let file = file_from_report(&report);
        std::fs::write(path, to_json_string(&file))?;
        eprintln!("wrote {} (report)", path.display());
    }
    Ok(if report.all_pass() { 0 } else { 1 })
}

pub fn cmd_realize(samples: &Path, out: Option<&PathBuf>, tol: &Tolerances) -> anyhow::Result<i32> {
    let file = read_file(samples)?;
    let (flavor, data) = schema::samples_from_file(&file)?;
    let mut checks: Vec<JsonCheck> = Vec::new();
    let out_file = match flavor.as_str() {
        "schur" => {
            let col = realize_schur_from_samples(&data, tol)?;
            let mut worst = 0.0f64;
            for s in &data {
                worst = worst.max((&col.eval(&s.point, tol)? - &s.value).max_norm());
            }
            checks.push(JsonCheck {
                label: "sample_exactness".into(),
                value: worst,
                threshold: 1e-9,
                pass: worst <= 1e-9,
            });
            checks.push(JsonCheck {
                label: "colligation_unitarity".into(),
                value: linalg::unitarity_residual(&col.assembled()),
                threshold: 1e-10,
                pass: linalg::unitarity_residual(&col.assembled()) <= 1e-10,
            });
            file_from_schur(&col, 0, tol)
        }
        "herglotz" => {
            let col = realize_herglotz_from_samples(&data, tol)?;
            let mut worst = 0.0f64;
            for s in &data {
                worst = worst.max((&col.eval(&s.point, tol)? - &s.value).max_norm());
            }
            checks.push(JsonCheck {
                label: "sample_exactness".into(),
                value: worst,
                threshold: 1e-8,
                pass: worst <= 1e-8,
            });
            file_from_herglotz_colligation(&col, 0, tol)
        }
        other => anyhow::bail!("unknown sample flavor {other:?} (expected schur or herglotz)"),
    };
    for c in &checks {
        eprintln!(
            "[{}] {}: {:.3e} (threshold {:.3e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.label,
            c.value,
            c.threshold
        );
    }
    let all_pass = checks.iter().all(|c| c.pass);
    emit(&out_file.with_consistency(checks), out.map(|p| p.as_path()))?;
    Ok(if all_pass { 0 } else { 1 })
}
