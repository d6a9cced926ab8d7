use std::process::{Command, Output};

use serde_json::Value;

fn ramanujan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramanujan")).args(args).env_remove("RAMANUJAN_REPORT_DIR").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

fn check_names(r: &Value) -> Vec<String> {
    r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect()
}

fn all_pass(r: &Value) -> bool {
    r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass")
}

#[test]
fn verify_qseries_passes_with_schema() {
    let out = ramanujan(&["verify-qseries", "--order", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["subcommand"], "verify-qseries");
    assert_eq!(r["inputs"]["order"], 60);
    assert!(all_pass(&r));
    let eqs = r["data"]["equations"].as_array().unwrap();
    assert_eq!(eqs.len(), 4);
    for e in eqs {
        assert_eq!(e["residual_zero"], true);
        assert!(e["first_nonzero_index"].is_null());
        assert_eq!(e["order"], 60);
    }
    assert_eq!(eqs[1]["printed_lhs"], "θE3");
    assert_eq!(r["versions"]["printed_connections_sha256"].as_str().unwrap().len(), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("PASS  chazy"));
}

#[test]
fn order_one_is_a_usage_error() {
    let out = ramanujan(&["verify-qseries", "--order", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 2"));
}

#[test]
fn unknown_subcommands_and_bad_numbers_exit_two() {
    let out = ramanujan(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(ramanujan(&["verify-qseries", "--order", "ten"]).status.code(), Some(2));
    assert_eq!(ramanujan(&["flow", "--chart", "e", "--q0", "0.01", "--q1", "1.5"]).status.code(), Some(2));
    assert_eq!(ramanujan(&["flow", "--chart", "x", "--q0", "0.01", "--q1", "0.02"]).status.code(), Some(2));
    assert_eq!(ramanujan(&["formal-check", "--g", "0"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["--json", "symplectic-selftest", "--g", "2", "--trials", "10", "--seed", "3"][..],
        &["--json", "formal-check", "--g", "2", "--trials", "6", "--seed", "9"],
        &["--json", "flow", "--chart", "b", "--q0", "0.01", "--q1", "0.03"],
        &["rederive-connection", "--chart", "b"],
    ] {
        let (a, b) = (ramanujan(args), ramanujan(args));
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stderr, b.stderr, "{args:?}");
    }
    // a different seed draws different trials but the same checks
    let a = report(&ramanujan(&["formal-check", "--g", "2", "--trials", "4", "--seed", "1"]));
    let b = report(&ramanujan(&["formal-check", "--g", "2", "--trials", "4", "--seed", "2"]));
    assert_eq!(check_names(&a), check_names(&b));
}

#[test]
fn json_flag_is_one_line_and_quiet_silences_stderr() {
    let out = ramanujan(&["--json", "--quiet", "solve-field", "--chart", "b"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(out.stderr.is_empty());
    let r = report(&out);
    assert_eq!(r["data"]["solved"]["v11"]["b6"], "b2*b6 - b4^2");
    assert_eq!(r["data"]["scaling"]["exponent"], -2);
}

#[test]
fn rederived_b_chart_reports_its_diff() {
    let out = ramanujan(&["rederive-connection", "--chart", "b"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let diff = r["data"]["diff"].as_array().unwrap();
    assert!(!diff.is_empty());
    assert!(diff.iter().all(|d| d["coord"] == "b4" || d["coord"] == "b6"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("printed entries differing"));

    let e = report(&ramanujan(&["rederive-connection", "--chart", "e"]));
    assert!(all_pass(&e));
    assert!(e["data"]["diff"].as_array().unwrap().is_empty());
}

#[test]
fn flow_report_and_csv_dump() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("traj.csv");
    let out = ramanujan(&[
        "flow", "--chart", "e", "--q0", "0.01", "--q1", "0.02", "--tol", "1e-10", "--dump-csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let err = r["data"]["max_abs_err"].as_f64().unwrap();
    assert!(err < 1e-8);
    let steps = r["data"]["steps"].as_u64().unwrap() as usize;
    assert_eq!(r["data"]["endpoint"].as_array().unwrap().len(), 3);

    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,tau_re,tau_im,e2_re,e2_im,e4_re,e4_im,e6_re,e6_im");
    // start plus one row per accepted step
    assert_eq!(lines.len(), steps + 2);
    let last: Vec<f64> = lines[lines.len() - 1].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((last[1] - 0.02f64.ln()).abs() < 1e-12);
    let end = r["data"]["endpoint"][0][0].as_f64().unwrap();
    // serde_json's default float parser may be off by an ulp
    assert!((last[3] - end).abs() <= 1e-15 * end.abs());
}

#[test]
fn reports_are_copied_to_the_report_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ramanujan"))
        .args(["--quiet", "solve-field", "--chart", "e"])
        .env("RAMANUJAN_REPORT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let saved = std::fs::read(dir.path().join("solve-field.json")).unwrap();
    assert_eq!(saved, out.stdout);
}

#[test]
fn all_passes_on_a_correct_build() {
    let out = ramanujan(&["--json", "all", "--order", "200", "--g", "4", "--tol", "1e-10"]);
    let r = report(&out);
    let failed: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["status"] != "pass").collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert_eq!(out.status.code(), Some(0));
    let names = check_names(&r);
    for want in [
        "verify-qseries/ramanujan_theta_E6",
        "integrality/E2_integral",
        "rederive-connection-e/derived_equals_printed",
        "rederive-connection-b/derived_flat",
        "solve-field-b/scaling_exponent",
        "symplectic/completion/g=6",
        "symplectic/transitivity/g=5",
        "formal/g=4/levi_doubled_diagonal",
        "formal/g=6/commutation",
        "flow-b/endpoint_matches_series",
    ] {
        assert!(names.iter().any(|n| n == want), "missing {want}");
    }
}
