use std::path::PathBuf;
use std::process::{Command, Output};

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../datasets")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn qrf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrf"))
        .args(args)
        .output()
        .unwrap()
}

fn inputs(key: &str) -> Vec<String> {
    vec![
        "--group".into(),
        data(&format!("groups/{key}.json")),
        "--irreps".into(),
        data(&format!("irreps/{key}.json")),
    ]
}

fn run(cmd: &[&str], key: &str, extra: &[&str]) -> Output {
    let inp = inputs(key);
    let mut args: Vec<&str> = cmd.to_vec();
    args.extend(inp.iter().map(String::as_str));
    args.extend_from_slice(extra);
    qrf(&args)
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn strip_timing(mut v: serde_json::Value) -> serde_json::Value {
    for e in v["entries"].as_array_mut().unwrap() {
        e["wall_time_ms"] = 0.into();
    }
    v
}

#[test]
fn validate_bundled_z6() {
    let out = run(&["validate"], "z6", &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["entries"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["pass"] == true));
}

#[test]
fn validate_detects_perturbed_s3_irrep() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data("irreps/s3.json")).unwrap()).unwrap();
    let entry = &mut doc["irreps"][2]["matrices"][1][0][0][0];
    *entry = (entry.as_f64().unwrap() + 1e-3).into();
    let path = dir.path().join("s3_bad.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let out = qrf(&[
        "validate",
        "--group",
        &data("groups/s3.json"),
        "--irreps",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let schur = r["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == "schur orthogonality")
        .unwrap();
    assert_eq!(schur["pass"], false);
    let residual = schur["residual"].as_f64().unwrap();
    assert!(residual > 1e-5 && residual < 1e-2, "{residual}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("schur orthogonality"));
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    let out = qrf(&[
        "validate",
        "--group",
        "/no/such/file.json",
        "--irreps",
        &data("irreps/z2.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = qrf(&[
        "validate",
        "--group",
        bad.to_str().unwrap(),
        "--irreps",
        &data("irreps/z2.json"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_group_table_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(&g, r#"{"name":"bad","order":2,"mult":[[0,0],[0,0]]}"#).unwrap();
    let out = qrf(&[
        "validate",
        "--group",
        g.to_str().unwrap(),
        "--irreps",
        &data("irreps/z2.json"),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn z2_suite_passes_and_is_reproducible() {
    let sys = data("reps/z2_x.json");
    let start = std::time::Instant::now();
    let a = run(&["suite"], "z2", &["--system", &sys, "--seed", "42"]);
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    let b = run(&["suite"], "z2", &["--system", &sys, "--seed", "42"]);
    assert_eq!(strip_timing(report(&a)), strip_timing(report(&b)));
    let ra = report(&a);
    assert!(ra["entries"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["status"] == "pass"));
}

#[test]
fn s3_suite_passes() {
    let out = run(
        &["suite"],
        "s3",
        &["--system", &data("reps/s3_standard.json"), "--seed", "42"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn heisenberg_suite_skips_two_frame_entries_over_budget() {
    let out = run(
        &["suite"],
        "h3",
        &[
            "--system",
            &data("reps/h3_weyl.json"),
            "--trials",
            "5",
            "--dim-budget",
            "2048",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    let entries = r["entries"].as_array().unwrap();
    let skipped: Vec<_> = entries
        .iter()
        .filter(|e| e["status"] == "skipped")
        .collect();
    assert!(skipped.iter().any(|e| e["name"] == "class 2 closed form"));
    assert!(skipped.iter().all(|e| e["residual"].is_null()));
    assert!(entries
        .iter()
        .any(|e| e["name"] == "gauge image identity" && e["pass"] == true));
}

#[test]
fn budget_below_single_frame_exits_3() {
    let out = run(
        &["suite"],
        "s3",
        &[
            "--system",
            &data("reps/s3_standard.json"),
            "--dim-budget",
            "8",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn suite_writes_report_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(
        &["suite"],
        "z3",
        &[
            "--system",
            &data("reps/z3_qubit.json"),
            "--trials",
            "5",
            "--out",
            path.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let e = &v["entries"][0];
    for key in [
        "name",
        "anchor",
        "residual",
        "tolerance",
        "pass",
        "wall_time_ms",
    ] {
        assert!(e.get(key).is_some(), "{key}");
    }
}

#[test]
fn frame_rotation_demo_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("rot.csv");
    let h = std::f64::consts::FRAC_1_SQRT_2.to_string();
    let phi = format!("{h},{h}");
    let out = run(
        &["demo", "frame-rotation"],
        "z2",
        &[
            "--system",
            &data("reps/z2_x.json"),
            "--phi",
            &phi,
            "--out",
            csv_path.to_str().unwrap(),
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let mut purities = std::collections::HashMap::new();
    let mut state_rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        match &rec[0] {
            "purity" => {
                purities.insert(rec[1].to_string(), rec[4].parse::<f64>().unwrap());
            }
            "reduced_state" => state_rows += 1,
            _ => {}
        }
    }
    assert!((purities["reduced"] - 0.5).abs() < 1e-10);
    assert!((purities["global"] - 1.0).abs() < 1e-10);
    assert_eq!(state_rows, 16);
}

#[test]
fn unnormalised_amplitudes_are_rejected() {
    let out = run(&["demo", "frame-rotation"], "z2", &["--phi", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_charge_demo_residuals() {
    let out = run(&["demo", "zero-charge"], "z3", &["--trials", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "residual").unwrap();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r[col].parse::<f64>().unwrap() < 1e-9));
}

#[test]
fn unknown_demo_exits_2() {
    let out = run(&["demo", "teleport"], "z2", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown demo"));
}
