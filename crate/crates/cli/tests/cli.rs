use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn invsq(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invsq"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("INVSQ_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("one JSON line on stdout")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("JSON error on stderr")
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = match std::fs::read_dir(dir) {
        Ok(rd) => rd.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect(),
        Err(_) => Vec::new(),
    };
    v.sort();
    v
}

fn write_spec(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn fixed_points_summary() {
    let d = tempfile::tempdir().unwrap();
    let v = stdout_json(&invsq(&["fixed-points", "--alpha", "-0.1875"], d.path()));
    let s = &v["summary"];
    assert!((s["g_plus"].as_f64().unwrap() - 0.7135701978897406).abs() < 1e-13);
    assert!((s["g_minus"].as_f64().unwrap() - 1.9411429858956077).abs() < 1e-13);
    assert!((s["omega"].as_f64().unwrap() - 0.25).abs() < 1e-15);
    assert!(d.path().join("fixed-points.json").exists());
}

#[test]
fn contours_csv_has_units_and_rows() {
    let d = tempfile::tempdir().unwrap();
    let o = invsq(&["contours", "--alpha", "-0.1875", "--ratios", "1,2", "--n_xi", "6"], d.path());
    stdout_json(&o);
    let text = std::fs::read_to_string(d.path().join("contours.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ratio[1],xi[1],g[1]"));
    let rows: Vec<Vec<f64>> =
        lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 12);
    // Along a contour g rises toward g_- as xi shrinks.
    for r in &rows {
        assert!(r[2] > 0.7 && r[2] < 1.9411429858956077, "{r:?}");
    }
    let cells = text.lines().nth(1).unwrap().split(',').nth(2).unwrap();
    assert_eq!(cells.split('e').next().unwrap().len(), 18, "17 significant digits: {cells}");
}

#[test]
fn malformed_spec_exits_2_without_output() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("out");
    let spec = write_spec(d.path(), "bad.json", "{\"command\": \"fixed-points\", \"params\": ");
    let o = invsq(&["--spec", &spec], &out);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "invalid_input");
    assert!(files(&out).is_empty());
}

#[test]
fn unknown_field_rejected() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("out");
    let spec = write_spec(
        d.path(),
        "s.json",
        r#"{"command": "contours", "params": {"alpha": -0.1875}, "n_xii": 4}"#,
    );
    let o = invsq(&["--spec", &spec], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_json(&o)["error"]["message"].as_str().unwrap().contains("n_xii"));
    assert!(files(&out).is_empty());
    let o = invsq(&["contours", "--alpha", "-0.1875", "--n_xii", "4"], &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn domain_error_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let o = invsq(&["bound-state", "--alpha", "0.5", "--kind", "square_well", "--g", "1"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"]["kind"], "domain");
    assert!(files(d.path()).is_empty());
}

#[test]
fn numerical_error_exits_3() {
    let d = tempfile::tempdir().unwrap();
    let args = [
        "scaling-check", "--alpha", "-0.1875", "--method", "monte-carlo", "--sign", "+", "--u", "0", "--b", "0.01",
        "--x", "1", "--y", "1", "--t", "2", "--lambda", "2", "--lambda_prime", "0.5", "--n_steps", "256",
        "--n_samples", "200", "--seed", "1",
    ];
    let o = invsq(&args, d.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"]["kind"], "numerical");
    assert!(files(d.path()).is_empty());
}

#[test]
fn spec_file_matches_flags() {
    let d = tempfile::tempdir().unwrap();
    let a = d.path().join("a");
    let b = d.path().join("b");
    stdout_json(&invsq(
        &["exponent", "--alpha", "-0.1875", "--kind", "linear_well", "--dg_min", "1e-3", "--n_dg", "8"],
        &a,
    ));
    let spec = write_spec(
        d.path(),
        "s.json",
        r#"{"command": "exponent", "params": {"alpha": -0.1875}, "shape": {"kind": "linear_well"},
            "dg_min": 1e-3, "n_dg": 8}"#,
    );
    stdout_json(&invsq(&["--spec", &spec], &b));
    assert_eq!(files(&a), files(&b));
    for f in files(&a) {
        assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap(), "{f}");
    }
}

#[test]
fn output_dir_from_spec_and_env() {
    let d = tempfile::tempdir().unwrap();
    let target = d.path().join("from_spec");
    let body = format!(
        r#"{{"command": "fixed-points", "params": {{"alpha": -0.2}}, "output_dir": {}}}"#,
        serde_json::to_string(&target).unwrap()
    );
    let spec = write_spec(d.path(), "s.json", &body);
    let o = Command::new(env!("CARGO_BIN_EXE_invsq")).args(["--spec", &spec]).output().unwrap();
    stdout_json(&o);
    assert!(target.join("fixed-points.json").exists());

    let env_dir = d.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_invsq"))
        .args(["fixed-points", "--alpha", "-0.2"])
        .env("INVSQ_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    stdout_json(&o);
    assert!(env_dir.join("fixed-points.json").exists());
}

#[test]
fn feynman_kac_is_deterministic_across_threads() {
    let d = tempfile::tempdir().unwrap();
    let args = [
        "feynman-kac", "--alpha", "-0.1875", "--b", "0.2", "--g", "1", "--y", "0.8", "--x", "1", "--t", "1",
        "--n_steps", "128", "--n_samples", "5000", "--seed", "3",
    ];
    let a = d.path().join("a");
    let b = d.path().join("b");
    let mut one = args.to_vec();
    one.extend(["--threads", "1"]);
    let mut two = args.to_vec();
    two.extend(["--threads", "2"]);
    let va = stdout_json(&invsq(&one, &a));
    let vb = stdout_json(&invsq(&two, &b));
    assert_eq!(va["summary"], vb["summary"]);
    assert_eq!(std::fs::read(a.join("feynman_kac.csv")).unwrap(), std::fs::read(b.join("feynman_kac.csv")).unwrap());
    let z = va["summary"]["z"].as_f64().unwrap();
    assert!(z.abs() < 4.0, "z = {z}");
}

#[test]
fn regen_golden_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let a = d.path().join("a");
    let b = d.path().join("b");
    let va = stdout_json(&invsq(&["regen-golden"], &a));
    stdout_json(&invsq(&["regen-golden"], &b));
    assert_eq!(files(&a), ["collapse.csv", "contours.csv", "exponent_fits.csv", "regen-golden.json"]);
    for f in files(&a) {
        assert_eq!(std::fs::read(a.join(&f)).unwrap(), std::fs::read(b.join(&f)).unwrap(), "{f}");
    }
    // Rerunning over its own output is allowed.
    stdout_json(&invsq(&["regen-golden"], &a));

    let fits = std::fs::read_to_string(a.join("exponent_fits.csv")).unwrap();
    assert!(fits.starts_with("# invsq regen-golden\n"));
    assert!(fits.contains("# tolerance rtol="));
    assert!(fits.contains(&format!("# version {}", env!("CARGO_PKG_VERSION"))));
    let mut corrected = 0;
    for line in fits.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let c: Vec<&str> = line.split(',').collect();
        let slope: f64 = c[3].parse().unwrap();
        let tol = if c[1] == "corrected" { 1e-3 } else { 1e-2 };
        assert!((slope - 4.0).abs() < tol, "{line}");
        corrected += (c[1] == "corrected") as usize;
    }
    assert_eq!(corrected, 2);
    let s = &va["summary"]["exponents"][0];
    assert!((s["corrected"].as_f64().unwrap() - 4.0).abs() < 1e-3);
}

#[test]
fn regen_golden_refuses_foreign_files() {
    let d = tempfile::tempdir().unwrap();
    let foreign = d.path().join("contours.csv");
    std::fs::write(&foreign, "ratio,xi,g\n1,1,1\n").unwrap();
    let o = invsq(&["regen-golden"], d.path());
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"]["kind"], "io");
    assert_eq!(std::fs::read_to_string(&foreign).unwrap(), "ratio,xi,g\n1,1,1\n");
    assert_eq!(files(d.path()), ["contours.csv"]);
}

#[test]
fn help_and_version_exit_0() {
    for flag in ["--help", "--version"] {
        let o = Command::new(env!("CARGO_BIN_EXE_invsq")).arg(flag).output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{flag}");
        assert!(!o.stdout.is_empty());
    }
}
