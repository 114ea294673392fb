use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn twistf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing {key} in {v}"))
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn chi_is_a_tight_frame() {
    let dir = tempfile::tempdir().unwrap();
    let (g, r) = (dir.path().join("g.tgf"), dir.path().join("r.json"));
    assert!(twistf(&["synth", "--window", "chi", "--out", p(&g)]).status.success());
    let out = twistf(&["zak", "--in", p(&g), "--report", p(&r)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&r);
    assert!((num(&v, "A_est") - 1.0).abs() < 1e-12);
    assert!((num(&v, "B_est") - 1.0).abs() < 1e-12);
    assert_eq!(v["unitarity.pass"], Value::Bool(true));
}

#[test]
fn prop11_audit_fails_only_on_the_pinned_intertwining() {
    let out = twistf(&["audit", "--suite", "prop11", "--resolution", "16", "--truncation", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    for flag in ["ladder.pass", "commutator.pass", "adjoint.pass"] {
        assert_eq!(v[flag], Value::Bool(true), "{flag}");
    }
    assert_eq!(v["intertwine.phi00.A.pass"], Value::Bool(false));
    assert!(num(&v, "intertwine.phi00.unit.A.relative") < 1e-2);
}

#[test]
fn gaussian_refinement_is_strictly_decreasing() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.tgf");
    let synth = ["synth", "--window", "gaussian", "--resolution", "32", "--truncation", "6", "--out", p(&g)];
    assert!(twistf(&synth).status.success());
    let csv = dir.path().join("h.csv");
    let out = twistf(&["framebounds", "--in", p(&g), "--refine", "3", "--csv", p(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["A_est.strictly_decreasing"], Value::Bool(true));
    assert!(num(&v, "history.0.A_est") > num(&v, "history.2.A_est"));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4);
}

#[test]
fn hermite_00_is_the_gaussian() {
    let dir = tempfile::tempdir().unwrap();
    let (h, g) = (dir.path().join("h.tgf"), dir.path().join("g.tgf"));
    let grid = ["--resolution", "16", "--truncation", "6"];
    let run = |window: &[&str], out: &Path| {
        let mut args = vec!["synth", "--window"];
        args.extend_from_slice(window);
        args.extend_from_slice(&grid);
        args.extend_from_slice(&["--out", p(out)]);
        assert!(twistf(&args).status.success());
    };
    run(&["hermite", "0", "0"], &h);
    run(&["gaussian"], &g);
    let h = twisted_tf::io::read_field(&h).unwrap();
    let g = twisted_tf::io::read_field(&g).unwrap();
    assert!(h.sub(&g).unwrap().max_abs() < 1e-6);
}

#[test]
fn example31_beyond_the_truncation_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = twistf(&["synth", "--window", "example31", "12", "--truncation", "4", "--out", p(&dir.path().join("x"))]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("truncation K = 4"), "{err}");
    assert!(!dir.path().join("x").exists());
}

#[test]
fn reports_are_deterministic_apart_from_wall_time() {
    let args = ["uncertainty", "--caps", "3,3", "--resolution", "16", "--truncation", "8", "--seed", "7"];
    let mut a = stdout_json(&twistf(&args));
    let mut b = stdout_json(&twistf(&args));
    for v in [&mut a, &mut b] {
        v.as_object_mut().unwrap().remove("wall_time_s").expect("wall time present");
    }
    assert_eq!(a, b);
    let mut other = args;
    other[8] = "8";
    assert_ne!(a["functional.coefficients"], stdout_json(&twistf(&other))["functional.coefficients"]);
}

#[test]
fn exit_codes() {
    assert_eq!(twistf(&["zak"]).status.code(), Some(1));
    assert_eq!(twistf(&["zak", "--in", "/nonexistent/field.tgf"]).status.code(), Some(1));
    assert_eq!(twistf(&["zak", "--window", "sinc"]).status.code(), Some(1));
    assert_eq!(twistf(&["zak", "--window", "chi", "--in", "x"]).status.code(), Some(1));
    // the Gaussian's Zak transform vanishes, so there is no exact dual
    let out = twistf(&["dual", "--window", "gaussian", "--wres", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["frame.pass"], Value::Bool(false));
    let out = twistf(&["blt-scan", "--kind", "example31_zbar", "--levels", "8,4"]);
    assert_eq!(out.status.code(), Some(1));
    // the oscillation shift must be a whole number of grid steps
    assert_eq!(twistf(&["oscillation", "--window", "gaussian", "--eps", "0.1,0"]).status.code(), Some(1));
}

#[test]
fn dual_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let (g, d) = (dir.path().join("g.tgf"), dir.path().join("d.tgf"));
    let grid = ["--resolution", "8", "--truncation", "4"];
    let mut synth = vec!["synth", "--window", "perturbed-chi", "0.05", "--out", p(&g)];
    synth.extend_from_slice(&grid);
    assert!(twistf(&synth).status.success());
    let mut dual = vec!["dual", "--in", p(&g), "--out", p(&d)];
    dual.extend_from_slice(&grid);
    assert_eq!(twistf(&dual).status.code(), Some(0));
    let out = twistf(&["biortho", "--in", p(&g), "--dual", p(&d)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(num(&stdout_json(&out), "max_residual") < 1e-12);
}

#[test]
fn winding_around_the_obstruction_loop() {
    let out = twistf(&["winding", "--window", "gaussian", "--expect", "-6.283185307179586"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["closed_form"].as_f64(), Some(1.0));
    let out = twistf(&["winding", "--window", "chi", "--loop", "circle", "--expect", "0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn density_of_a_product_lattice() {
    let out = twistf(&["density", "--spacings", "1,0.5", "--radii", "8,16", "--expect", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!((num(&v, "r16.D_plus") - 2.0).abs() < 0.1);
}

#[test]
fn verbatim_example31_scan_fails_and_squared_passes() {
    let levels = ["--levels", "4,8,16", "--resolution", "16"];
    let mut verbatim = vec!["blt-scan", "--kind", "example31_zbar"];
    verbatim.extend_from_slice(&levels);
    assert_eq!(twistf(&verbatim).status.code(), Some(2));
    let mut squared = verbatim.clone();
    squared.extend_from_slice(&["--comparator", "squared"]);
    assert_eq!(twistf(&squared).status.code(), Some(0));
}

#[test]
fn selftests_pass_except_the_weyl_constant() {
    let subcommands: [&[&str]; 12] = [
        &["synth"],
        &["zak"],
        &["framebounds"],
        &["dual"],
        &["biortho"],
        &["uncertainty"],
        &["blt-scan", "--kind", "example31_zbar", "--levels", "4"],
        &["density"],
        &["audit", "--suite", "zak"],
        &["winding"],
        &["smooth"],
        &["oscillation"],
    ];
    for sub in subcommands {
        let mut args = sub.to_vec();
        args.push("--selftest");
        let out = twistf(&args);
        assert_eq!(out.status.code(), Some(0), "{sub:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v = stdout_json(&out);
        assert!(num(&v, "wall_time_s") < 5.0, "{sub:?}");
    }
    // the Plancherel ratio is 1/√2, not ½
    let out = twistf(&["weyl", "--selftest"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert!((num(&v, "example0.weyl.ratio") - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
}
