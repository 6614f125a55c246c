//! End-to-end tests of the `polyreal` binary: exit codes, determinism,
//! round-trips, and the documented command chains.

use polyreal_cli::schema::{self, JsonMatrix, Meta, ObjectFile};
use polyreal::Tolerances;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_polyreal")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_points(dir: &Path, name: &str, d: usize, domain: &str, pts: &[Vec<[f64; 2]>]) -> PathBuf {
    let file = ObjectFile::Points {
        d,
        domain: domain.to_string(),
        points: pts.to_vec(),
        meta: Meta::new(0, &Tolerances::default()),
    };
    let path = dir.join(name);
    std::fs::write(&path, schema::to_json_string(&file)).unwrap();
    path
}

fn scalar(re: f64, im: f64) -> JsonMatrix {
    JsonMatrix {
        rows: 1,
        cols: 1,
        data: vec![[re, im]],
    }
}

fn value_at(results: &serde_json::Value, idx: usize) -> (f64, f64) {
    let entry = &results["values"][idx]["data"][0];
    (entry[0].as_f64().unwrap(), entry[1].as_f64().unwrap())
}

#[test]
fn gen_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for kind_args in [
        vec!["gen", "--kind", "schur_gr", "--d", "2", "--n", "4", "--q", "2", "--seed", "7"],
        vec!["gen", "--kind", "tuple", "--d", "2", "--m", "3", "--margin", "0.2", "--seed", "7"],
        vec!["gen", "--kind", "pencil", "--d", "2", "--n", "4", "--q", "1", "--seed", "9"],
    ] {
        let a = run(dir.path(), &kind_args);
        let b = run(dir.path(), &kind_args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "identical seed+params must give identical bytes");
    }
}

#[test]
fn gen_parse_reserialize_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["gen", "--kind", "herglotz_rep", "--d", "2", "--n", "3", "--q", "2", "--seed", "4"],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed = schema::from_json_str(&text).unwrap();
    let again = schema::to_json_string(&parsed);
    assert_eq!(text, again);
}

#[test]
fn shift_preset_evaluates_to_the_identity_function() {
    let dir = tempfile::tempdir().unwrap();
    let shift = dir.path().join("shift.json");
    let out = run(
        dir.path(),
        &["gen", "--kind", "schur_gr", "--preset", "shift", "--out", shift.to_str().unwrap()],
    );
    assert!(out.status.success());
    let pts = write_points(dir.path(), "pts.json", 1, "disk", &[vec![[0.25, 0.0]]]);
    let out = run(
        dir.path(),
        &["eval", "--object", shift.to_str().unwrap(), "--points", pts.to_str().unwrap()],
    );
    let results = stdout_json(&out);
    let (re, im) = value_at(&results, 0);
    assert!((re - 0.25).abs() < 1e-15 && im.abs() < 1e-15);
}

#[test]
fn one_over_w_preset_evaluates_to_half_at_two() {
    let dir = tempfile::tempdir().unwrap();
    let pen = dir.path().join("pow.json");
    run(
        dir.path(),
        &["gen", "--kind", "pencil", "--preset", "one-over-w", "--out", pen.to_str().unwrap()],
    );
    let pts = write_points(dir.path(), "w.json", 1, "halfplane", &[vec![[2.0, 0.0]]]);
    let out = run(
        dir.path(),
        &["eval", "--object", pen.to_str().unwrap(), "--points", pts.to_str().unwrap()],
    );
    let results = stdout_json(&out);
    let (re, im) = value_at(&results, 0);
    assert!((re - 0.5).abs() < 1e-14 && im.abs() < 1e-14);
}

fn write_scalar_rep(dir: &Path, name: &str, u: f64) -> PathBuf {
    let mut dims = BTreeMap::new();
    dims.insert("n".to_string(), 1usize);
    dims.insert("q".to_string(), 1usize);
    let file = ObjectFile::HerglotzRep {
        d: 1,
        dims,
        blocks: schema::RepresentationBlocks {
            r: scalar(0.0, 0.0),
            u: scalar(u, 0.0),
            v: scalar(1.0, 0.0),
            dec: vec![scalar(1.0, 0.0)],
        },
        consistency: None,
        meta: Meta::new(0, &Tolerances::default()),
    };
    let path = dir.join(name);
    std::fs::write(&path, schema::to_json_string(&file)).unwrap();
    path
}

#[test]
fn scalar_rep_evaluates_to_r_plus_vv_at_origin() {
    let dir = tempfile::tempdir().unwrap();
    let rep = write_scalar_rep(dir.path(), "rep.json", 1.0);
    let pts = write_points(dir.path(), "origin.json", 1, "disk", &[vec![[0.0, 0.0]]]);
    let out = run(
        dir.path(),
        &["eval", "--object", rep.to_str().unwrap(), "--points", pts.to_str().unwrap()],
    );
    let results = stdout_json(&out);
    let (re, im) = value_at(&results, 0);
    assert!((re - 1.0).abs() < 1e-14 && im.abs() < 1e-14);
}

#[test]
fn convert_chain_shift_to_rep_to_pencil_is_the_identity_function() {
    let dir = tempfile::tempdir().unwrap();
    let shift = dir.path().join("shift.json");
    run(
        dir.path(),
        &["gen", "--kind", "schur_gr", "--preset", "shift", "--out", shift.to_str().unwrap()],
    );
    let rep = dir.path().join("rep.json");
    let out = run(
        dir.path(),
        &[
            "convert", "--object", shift.to_str().unwrap(), "--target", "herglotz_rep",
            "--out", rep.to_str().unwrap(),
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pen = dir.path().join("pen.json");
    let out = run(
        dir.path(),
        &[
            "convert", "--object", rep.to_str().unwrap(), "--target", "pencil",
            "--out", pen.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let pts = write_points(dir.path(), "w3.json", 1, "halfplane", &[vec![[3.0, 0.0]]]);
    let out = run(
        dir.path(),
        &["eval", "--object", pen.to_str().unwrap(), "--points", pts.to_str().unwrap()],
    );
    let results = stdout_json(&out);
    let (re, im) = value_at(&results, 0);
    assert!((re - 3.0).abs() < 1e-12 && im.abs() < 1e-12, "double Cayley of the shift is w");
}

#[test]
fn convert_pencil_to_nevanlinna_extracts_the_atom() {
    let dir = tempfile::tempdir().unwrap();
    let rep = write_scalar_rep(dir.path(), "rep.json", -1.0);
    let pen = dir.path().join("pen.json");
    let out = run(
        dir.path(),
        &[
            "convert", "--object", rep.to_str().unwrap(), "--target", "pencil",
            "--out", pen.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let out = run(
        dir.path(),
        &["convert", "--object", pen.to_str().unwrap(), "--target", "nevanlinna"],
    );
    let json = stdout_json(&out);
    assert_eq!(json["alpha"].as_f64().unwrap(), 0.0);
    let atoms = json["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 1);
    assert!((atoms[0]["mass"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(atoms[0]["location"][0].as_f64().unwrap(), 0.0);
    assert_eq!(atoms[0]["location"][1].as_f64().unwrap(), 0.0);
}

#[test]
fn convert_with_singular_i_minus_d_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut dims = BTreeMap::new();
    dims.insert("n".to_string(), 1usize);
    dims.insert("p".to_string(), 1usize);
    dims.insert("q".to_string(), 1usize);
    let file = ObjectFile::SchurGr {
        d: 1,
        dims,
        blocks: schema::ColligationBlocks {
            a: scalar(0.0, 1.0),
            b: scalar(0.0, 0.0),
            c: scalar(0.0, 0.0),
            d: scalar(1.0, 0.0),
            dec: vec![scalar(1.0, 0.0)],
            metric: Some("unitary".to_string()),
        },
        consistency: None,
        meta: Meta::new(0, &Tolerances::default()),
    };
    let path = dir.path().join("deqi.json");
    std::fs::write(&path, schema::to_json_string(&file)).unwrap();
    let out = run(
        dir.path(),
        &["convert", "--object", path.to_str().unwrap(), "--target", "herglotz_rep"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("I - D"));
}

#[test]
fn verify_shift_passes_and_corruption_fails() {
    let dir = tempfile::tempdir().unwrap();
    let shift = dir.path().join("shift.json");
    run(
        dir.path(),
        &["gen", "--kind", "schur_gr", "--preset", "shift", "--out", shift.to_str().unwrap()],
    );
    let report = dir.path().join("report.json");
    let out = run(
        dir.path(),
        &[
            "verify", "--object", shift.to_str().unwrap(), "--suite", "all", "--seed", "3",
            "--out", report.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let rep_json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep_json["pass"].as_bool(), Some(true));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS]"));

    // break unitarity: kernels checks must fail with exit 1
    let mut broken: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&shift).unwrap()).unwrap();
    broken["blocks"]["a"]["data"][0][0] = serde_json::json!(0.1);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, serde_json::to_string(&broken).unwrap()).unwrap();
    let out = run(
        dir.path(),
        &["verify", "--object", bad.to_str().unwrap(), "--suite", "kernels"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
}

#[test]
fn verify_random_objects_pass_their_suites() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (vec!["gen", "--kind", "herglotz_colligation", "--d", "2", "--n", "3", "--q", "2", "--seed", "5"], "all"),
        (vec!["gen", "--kind", "herglotz_rep", "--d", "2", "--n", "4", "--q", "2", "--seed", "11"], "kernels"),
        (vec!["gen", "--kind", "pi_impedance", "--d", "2", "--n", "3", "--q", "2", "--seed", "6"], "all"),
        (vec!["gen", "--kind", "pencil", "--d", "2", "--n", "4", "--q", "1", "--seed", "8"], "all"),
    ];
    for (i, (gen_args, suite)) in cases.iter().enumerate() {
        let path = dir.path().join(format!("obj{i}.json"));
        let mut args = gen_args.clone();
        args.push("--out");
        args.push(path.to_str().unwrap());
        let out = run(dir.path(), &args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let out = run(
            dir.path(),
            &["verify", "--object", path.to_str().unwrap(), "--suite", suite, "--seed", "2"],
        );
        assert_eq!(
            out.status.code(),
            Some(0),
            "suite failed for case {i}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

fn shift_samples_file(dir: &Path, name: &str, values: &[(f64, f64)]) -> PathBuf {
    let mut dims = BTreeMap::new();
    dims.insert("p".to_string(), 1usize);
    dims.insert("q".to_string(), 1usize);
    let samples: Vec<schema::SampleEntry> = values
        .iter()
        .map(|&(z, s)| schema::SampleEntry {
            point: vec![[z, 0.0]],
            value: scalar(s, 0.0),
            factors: vec![scalar(1.0, 0.0)],
        })
        .collect();
    let file = ObjectFile::Samples {
        d: 1,
        dims,
        flavor: "schur".to_string(),
        samples,
        meta: Meta::new(0, &Tolerances::default()),
    };
    let path = dir.join(name);
    std::fs::write(&path, schema::to_json_string(&file)).unwrap();
    path
}

#[test]
fn realize_reconstructs_the_shift_and_rejects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let samples = shift_samples_file(
        dir.path(),
        "samples.json",
        &[(0.1, 0.1), (0.3, 0.3), (-0.4, -0.4)],
    );
    let realized = dir.path().join("realized.json");
    let out = run(
        dir.path(),
        &[
            "realize", "--samples", samples.to_str().unwrap(),
            "--out", realized.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let pts = write_points(dir.path(), "p.json", 1, "disk", &[vec![[0.77, 0.0]]]);
    let out = run(
        dir.path(),
        &["eval", "--object", realized.to_str().unwrap(), "--points", pts.to_str().unwrap()],
    );
    let results = stdout_json(&out);
    let (re, im) = value_at(&results, 0);
    assert!((re - 0.77).abs() < 1e-9 && im.abs() < 1e-9);

    // perturbed value: Gram mismatch, exit 1
    let bad = shift_samples_file(
        dir.path(),
        "bad.json",
        &[(0.1, 0.1), (0.3, 0.4), (-0.4, -0.4)],
    );
    let out = run(dir.path(), &["realize", "--samples", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Gram"));

    // single sample at the origin: a valid degenerate realization
    let single = shift_samples_file(dir.path(), "single.json", &[(0.0, 0.0)]);
    let out = run(dir.path(), &["realize", "--samples", single.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn tolerance_overrides_are_respected() {
    let dir = tempfile::tempdir().unwrap();
    // the override lands in the central record written to meta
    let out = run(
        dir.path(),
        &["--tol", "gram_tol=1e-5", "gen", "--kind", "schur_gr", "--preset", "shift"],
    );
    let json = stdout_json(&out);
    assert_eq!(json["meta"]["tolerances"]["gram_tol"].as_f64(), Some(1e-5));

    // slightly inconsistent samples: rejected by the default gram_tol,
    // past the precheck once it is loosened (the exactness report then
    // honestly records the residual instead)
    let bad = shift_samples_file(
        dir.path(),
        "nearbad.json",
        &[(0.1, 0.1), (0.3, 0.3 + 1e-7), (-0.4, -0.4)],
    );
    let out = run(dir.path(), &["realize", "--samples", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "default gram_tol must reject");
    assert!(String::from_utf8_lossy(&out.stderr).contains("Gram"));
    let realized = dir.path().join("loose.json");
    let out = run(
        dir.path(),
        &[
            "--tol", "gram_tol=1e-5", "realize", "--samples", bad.to_str().unwrap(),
            "--out", realized.to_str().unwrap(),
        ],
    );
    assert_ne!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).contains("Gram identity violated"));
    assert!(realized.exists(), "reconstruction is still produced");

    // unknown key is a usage error
    let out = run(dir.path(), &["--tol", "nonsense=1", "gen", "--kind", "schur_gr"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_rejects_domain_and_arity_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let shift = dir.path().join("shift.json");
    run(
        dir.path(),
        &["gen", "--kind", "schur_gr", "--preset", "shift", "--out", shift.to_str().unwrap()],
    );
    // halfplane points against a disk object
    let pts = write_points(dir.path(), "w.json", 1, "halfplane", &[vec![[2.0, 0.0]]]);
    let out = run(
        dir.path(),
        &["eval", "--object", shift.to_str().unwrap(), "--points", pts.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    // point outside the disk
    let pts = write_points(dir.path(), "far.json", 1, "disk", &[vec![[1.5, 0.0]]]);
    let out = run(
        dir.path(),
        &["eval", "--object", shift.to_str().unwrap(), "--points", pts.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    // unparsable file
    std::fs::write(dir.path().join("junk.json"), "{ not json").unwrap();
    let out = run(
        dir.path(),
        &["eval", "--object", "junk.json", "--points", "junk.json"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn herglotz_samples_realize_to_an_id_colligation() {
    let dir = tempfile::tempdir().unwrap();
    // F(z) = (1+z)/(1-z) with factor H(z) = sqrt(2)/(1-z)
    let s2 = std::f64::consts::SQRT_2;
    let mut dims = BTreeMap::new();
    dims.insert("p".to_string(), 1usize);
    dims.insert("q".to_string(), 1usize);
    let mk = |z: f64| schema::SampleEntry {
        point: vec![[z, 0.0]],
        value: scalar((1.0 + z) / (1.0 - z), 0.0),
        factors: vec![scalar(s2 / (1.0 - z), 0.0)],
    };
    let file = ObjectFile::Samples {
        d: 1,
        dims,
        flavor: "herglotz".to_string(),
        samples: vec![mk(0.1), mk(0.3), mk(-0.4)],
        meta: Meta::new(0, &Tolerances::default()),
    };
    let path = dir.path().join("hs.json");
    std::fs::write(&path, schema::to_json_string(&file)).unwrap();
    let realized = dir.path().join("hcol.json");
    let out = run(
        dir.path(),
        &["realize", "--samples", path.to_str().unwrap(), "--out", realized.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let pts = write_points(dir.path(), "half.json", 1, "disk", &[vec![[0.5, 0.0]]]);
    let out = run(
        dir.path(),
        &["eval", "--object", realized.to_str().unwrap(), "--points", pts.to_str().unwrap()],
    );
    let results = stdout_json(&out);
    let (re, im) = value_at(&results, 0);
    assert!((re - 3.0).abs() < 1e-9 && im.abs() < 1e-9, "F(1/2) = 3");
}
