use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn jnr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jnr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = jnr(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schema")
        .join(name);
    let value: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&value).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn fixture_file(dir: &TempDir, name: &str) -> PathBuf {
    let path = dir.path().join(format!("{name}.json"));
    ok(&["fixture", "--name", name, "--out", path.to_str().unwrap()]);
    path
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().next().expect("one error line")).unwrap()
}

#[test]
fn fixture_files_follow_the_schema() {
    let dir = TempDir::new().unwrap();
    let v = schema("operator_file_v1.schema.json");
    for name in [
        "class1",
        "class8",
        "setA",
        "setB",
        "pauli",
        "pauli_pair",
        "reducible",
    ] {
        assert_valid(&v, &read_json(&fixture_file(&dir, name)));
    }
    let list = String::from_utf8(ok(&["fixture", "--list"]).stdout).unwrap();
    assert!(list.lines().any(|l| l == "class5"));
}

#[test]
fn sample_rows_satisfy_the_energy_identity() {
    let dir = TempDir::new().unwrap();
    let input = fixture_file(&dir, "class8");
    let out = dir.path().join("points.csv");
    ok(&[
        "sample",
        "--input",
        input.to_str().unwrap(),
        "--directions",
        "300",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header, ["theta", "phi", "x", "y", "z", "energy", "gap"]);
    assert_eq!(rows.len(), 300);
    for r in rows {
        let v: Vec<f64> = r.iter().map(|s| s.parse().unwrap()).collect();
        let (t, p) = (v[0], v[1]);
        let h = [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()];
        let hp: f64 = h.iter().zip(&v[2..5]).map(|(a, b)| a * b).sum();
        assert!((hp - v[5]).abs() < 1e-10);
    }
}

#[test]
fn sample_grid_counts_and_determinism() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    ok(&[
        "sample",
        "--fixture",
        "class4",
        "--grid",
        "64x128",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert_eq!(csv_rows(&a).1.len(), 8192);
    let out = Command::new(env!("CARGO_BIN_EXE_jnr"))
        .args([
            "sample",
            "--fixture",
            "class4",
            "--grid",
            "64x128",
            "--out",
            b.to_str().unwrap(),
        ])
        .env("JNR_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn qubit_input_needs_the_any_dim_flag() {
    let dir = TempDir::new().unwrap();
    let input = fixture_file(&dir, "pauli");
    let out = jnr(&[
        "sample",
        "--input",
        input.to_str().unwrap(),
        "--directions",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["exit_code"], 2);
    assert!(err["message"].as_str().unwrap().contains("d = 3"));
    let out = ok(&[
        "sample",
        "--input",
        input.to_str().unwrap(),
        "--directions",
        "10",
        "--allow-any-dim",
    ]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 11);
}

#[test]
fn classify_reports_every_class() {
    let dir = TempDir::new().unwrap();
    let v = schema("report_v1.schema.json");
    let names = [
        "s0e0", "s0e1", "s0e2", "s0e3", "s0e4", "s1e0", "s1e1", "s1e2",
    ];
    for (k, want) in (1..=8).zip(names) {
        let path = dir.path().join(format!("r{k}.json"));
        ok(&[
            "classify",
            "--fixture",
            &format!("class{k}"),
            "--out",
            path.to_str().unwrap(),
            "--no-timestamp",
        ]);
        let r = read_json(&path);
        assert_valid(&v, &r);
        assert_eq!(r["class_name"], want);
        assert!(r.get("timestamp_unix").is_none());
    }
}

#[test]
fn classify_set_b_lists_one_point_degeneracy() {
    let out = ok(&["classify", "--fixture", "setB", "--tol-sweep"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid(&schema("report_v1.schema.json"), &r);
    assert_eq!((r["s"].as_u64(), r["e"].as_u64()), (Some(0), Some(0)));
    let dirs = r["degenerate_directions"].as_array().unwrap();
    assert_eq!(dirs.len(), 1);
    assert_eq!(dirs[0]["kind"], "point");
    assert_eq!(r["tolerance_sweep"].as_array().unwrap().len(), 7);
}

#[test]
fn classify_reducible_input_exits_cleanly() {
    let out = ok(&["classify", "--fixture", "reducible"]);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["reducible"], true);
    assert_eq!(r["class_name"], "s_inf_e1");
    assert_eq!(r["planar"]["class"], "triangle");
}

#[test]
fn input_errors_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"dim":3,"operators":[{"re":[[1,0,0],[0,0,0],[0,0,0]],"im":[[0,0,0],[0,0,0.5],[0,0,0]]}]}"#,
    )
    .unwrap();
    let out = jnr(&["classify", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr_json(&out)["message"].as_str().unwrap().to_string();
    assert!(msg.contains("operator 0") && msg.contains("(1,2)"), "{msg}");

    fs::write(&bad, "{\n  \"dim\": 3,\n  \"operators\": [oops]\n}").unwrap();
    let err = stderr_json(&jnr(&[
        "sample",
        "--input",
        bad.to_str().unwrap(),
        "--directions",
        "3",
    ]));
    assert_eq!(err["line"], 3);
    assert!(err["column"].as_u64().is_some());

    let out = jnr(&[
        "classify",
        "--input",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = jnr(&["bands", "--fixture", "pauli"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_jnr"))
        .args(["fixture", "--list"])
        .env("JNR_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(jnr(&["sample", "--bogus"]).status.code(), Some(2));
}

fn ply_counts(text: &str) -> (usize, usize) {
    let count = |key: &str| -> usize {
        text.lines()
            .find_map(|l| l.strip_prefix(key))
            .map(|n| n.trim().parse().unwrap())
            .unwrap()
    };
    (count("element vertex "), count("element face "))
}

#[test]
fn hull_of_cube_corners_has_eight_vertices() {
    let dir = TempDir::new().unwrap();
    let pts = dir.path().join("cube.csv");
    let mut text = String::from("theta,phi,x,y,z,energy,gap\n");
    for k in 0..8 {
        text.push_str(&format!(
            ",,{},{},{},,\n",
            k & 1,
            (k >> 1) & 1,
            (k >> 2) & 1
        ));
    }
    text.push_str(",,0.5,0.5,0.5,,\n");
    fs::write(&pts, text).unwrap();
    let out = String::from_utf8(ok(&["hull", "--points", pts.to_str().unwrap()]).stdout).unwrap();
    assert!(out.starts_with("ply\nformat ascii 1.0\n"));
    assert_eq!(ply_counts(&out), (8, 12));
    let body: Vec<&str> = out.split("end_header\n").nth(1).unwrap().lines().collect();
    assert_eq!(body.len(), 20);
    assert!(body[8..].iter().all(|l| l.starts_with("3 ")));
}

#[test]
fn projection_then_hull_gives_a_triangle() {
    let dir = TempDir::new().unwrap();
    let (pts, proj) = (dir.path().join("p.csv"), dir.path().join("q.csv"));
    ok(&[
        "sample",
        "--fixture",
        "class4",
        "--directions",
        "2000",
        "--lattice",
        "fibonacci",
        "--out",
        pts.to_str().unwrap(),
    ]);
    ok(&[
        "project",
        "--points",
        pts.to_str().unwrap(),
        "--axes",
        "12",
        "--out",
        proj.to_str().unwrap(),
    ]);
    let (header, rows) = csv_rows(&proj);
    assert_eq!(header, ["theta", "phi", "u", "v"]);
    assert_eq!(rows.len(), 2000);
    let ply = String::from_utf8(ok(&["hull", "--points", proj.to_str().unwrap()]).stdout).unwrap();
    assert!(ply.contains("comment affine_rank 2"));
    let (v, f) = ply_counts(&ply);
    assert_eq!(f, v - 2);
}

#[test]
fn noiseless_simulation_matches_theory() {
    let dir = TempDir::new().unwrap();
    let prep = dir.path().join("prep.csv");
    fs::write(
        &prep,
        "theta_a,theta_b,phi1,phi2\n0.3,1.1,0.2,4.0\n1.2,0.4,2.5,0.0\n0.0,0.0,0.0,0.0\n",
    )
    .unwrap();
    let out = dir.path().join("counts.csv");
    ok(&[
        "simulate",
        "--fixture",
        "class7",
        "--states",
        prep.to_str().unwrap(),
        "--shots",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    let (header, rows) = csv_rows(&out);
    assert_eq!(header.len(), 17);
    assert_eq!(rows.len(), 9);
    for r in rows {
        let v: Vec<f64> = r.iter().map(|s| s.parse().unwrap()).collect();
        let (p, q) = (&v[6..9], &v[9..12]);
        let b: f64 = p.iter().zip(q).map(|(a, b)| (a * b).sqrt()).sum();
        assert!((b * b - 1.0).abs() < 1e-12);
        assert!((v[15] - v[16]).abs() < 1e-10);
    }
}

#[test]
fn levels_export_for_a_pair() {
    let out = String::from_utf8(
        ok(&[
            "levels",
            "--fixture",
            "embedded_pauli_pair",
            "--levels",
            "0,1",
            "--angles",
            "8",
        ])
        .stdout,
    )
    .unwrap();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "angle,level,x,y");
    assert_eq!(lines.len(), 17);
}

#[test]
fn reproduce_class4_is_complete_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        ok(&[
            "reproduce",
            "--class",
            "4",
            "--outdir",
            d.to_str().unwrap(),
            "--seed",
            "3",
            "--no-timestamp",
        ]);
    }
    let report = read_json(&a.join("report.json"));
    assert_valid(&schema("report_v1.schema.json"), &report);
    assert_eq!(
        (report["s"].as_u64(), report["e"].as_u64()),
        (Some(0), Some(3))
    );
    for f in [
        "points.csv",
        "mesh.ply",
        "report.json",
        "bands.csv",
        "counts.csv",
        "similarity.csv",
        "prep.csv",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    assert_eq!(csv_rows(&a.join("points.csv")).1.len(), 300);
    assert_eq!(csv_rows(&a.join("bands.csv")).1.len(), 181 * 360);
    let (_, counts) = csv_rows(&a.join("counts.csv"));
    assert_eq!(counts.len(), 900);
    assert!(counts.iter().all(|r| r[2] == "10000"));
    let (_, sims) = csv_rows(&a.join("similarity.csv"));
    let mean = sims
        .iter()
        .map(|r| r[2].parse::<f64>().unwrap())
        .sum::<f64>()
        / sims.len() as f64;
    assert!(mean > 0.999, "{mean}");
    let ply = fs::read_to_string(a.join("mesh.ply")).unwrap();
    assert!(ply_counts(&ply).0 > 100);
}

#[test]
fn reports_differ_only_in_timestamp() {
    let one: Value =
        serde_json::from_slice(&ok(&["classify", "--fixture", "class2"]).stdout).unwrap();
    let two: Value =
        serde_json::from_slice(&ok(&["classify", "--fixture", "class2", "--no-timestamp"]).stdout)
            .unwrap();
    assert!(one.get("timestamp_unix").is_some());
    let mut stripped = one.clone();
    stripped.as_object_mut().unwrap().remove("timestamp_unix");
    assert_eq!(stripped, two);
}
