//! End-to-end tests of the `tisgm` binary: output shapes, determinism, and
//! the exit-code contract (0 pass, 1 verification failure, 2 usage/config).

use std::process::{Command, Output};

fn tisgm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tisgm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn count_emits_exact_json() {
    let out = tisgm(&["count", "--q", "3", "--k", "2", "--theta", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "{\"regime\":\"all_open\",\"count\":7}\n");
}

#[test]
fn count_tsv_format() {
    let out = tisgm(&["count", "--q", "3", "--k", "2", "--theta", "5", "--format", "tsv"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "regime\tcount\nall_open\t7\n");
}

#[test]
fn count_at_the_critical_weight() {
    let out = tisgm(&["count", "--q", "3", "--k", "2", "--theta", "4"]);
    assert_eq!(stdout_of(&out), "{\"regime\":\"at_thetac\",\"count\":4}\n");
    // A decimal near but not equal to theta_c is classified exactly.
    let out = tisgm(&["count", "--q", "3", "--k", "2", "--theta", "3.999999999999999"]);
    let text = stdout_of(&out);
    assert!(text.contains("\"count\":7"), "exact decimal must defeat the float tolerance: {text}");
}

#[test]
fn count_accepts_coupling_temperature_pair() {
    // J = ln 4, T = 1 gives theta = 4 = theta_c.
    let j = format!("{}", 4.0f64.ln());
    let out = tisgm(&["count", "--q", "3", "--k", "2", "--J", &j, "--T", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout_of(&out), "{\"regime\":\"at_thetac\",\"count\":4}\n");
}

#[test]
fn enumerate_lists_seven_records() {
    let out = tisgm(&["enumerate", "--q", "3", "--k", "2", "--theta", "5"]);
    assert!(out.status.success());
    let records: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let arr = records.as_array().unwrap();
    assert_eq!(arr.len(), 7);
    assert_eq!(arr[0]["M"], serde_json::json!([]));
    assert_eq!(arr[0]["zstar"], serde_json::json!(1.0));
    assert_eq!(arr[0]["regime"], "all_open");
    let z = arr.iter().filter_map(|r| r["zstar"].as_f64()).collect::<Vec<_>>();
    assert!(z.iter().any(|v| (v - 11.65685424949238).abs() < 1e-9));
}

#[test]
fn roots_reports_the_quadratic_pair() {
    let out = tisgm(&["roots", "--q", "3", "--k", "2", "--theta", "5", "--m", "1"]);
    assert!(out.status.success());
    let xs: Vec<f64> = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(xs.len(), 2);
    assert!((xs[0] - (2.0 - 2.0f64.sqrt())).abs() <= 1e-10);
    assert!((xs[1] - (2.0 + 2.0f64.sqrt())).abs() <= 1e-10);
}

#[test]
fn roots_double_root_repeats_by_multiplicity() {
    let theta = format!("{}", 1.0 + 2.0 * 2.0f64.sqrt());
    let out = tisgm(&["roots", "--q", "3", "--k", "2", "--theta", &theta, "--m", "1"]);
    let xs: Vec<f64> = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(xs.len(), 2);
    assert!((xs[0] - xs[1]).abs() <= 1e-12);
}

#[test]
fn critical_table_q3() {
    let out = tisgm(&["critical", "--q", "3", "--k", "2", "--J", "1"]);
    assert!(out.status.success());
    let table: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let points = table["points"].as_array().unwrap();
    assert_eq!(points.len(), 1);
    assert!((points[0]["x_star"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() <= 1e-12);
    assert!((points[0]["theta_m"].as_f64().unwrap() - (1.0 + 2.0 * std::f64::consts::SQRT_2)).abs() <= 1e-12);
    // T_c,1 = 1/ln(1 + 2√2)
    assert!((points[0]["T_cm"].as_f64().unwrap() - 0.7449044551221581).abs() <= 1e-12);
    assert_eq!(table["theta_c"].as_f64().unwrap(), 4.0);
    assert!((table["T_cr"].as_f64().unwrap() - 0.7213475204444817).abs() <= 1e-12);
}

#[test]
fn critical_table_q4_top_weight_equals_theta_c() {
    let out = tisgm(&["critical", "--q", "4", "--k", "2", "--J", "1"]);
    let table: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let points = table["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    assert_eq!(points[1]["theta_m"].as_f64().unwrap(), 5.0);
    assert_eq!(table["theta_c"].as_f64().unwrap(), 5.0);
}

#[test]
fn critical_table_ising() {
    let out = tisgm(&["critical", "--q", "2", "--k", "2", "--J", "1", "--format", "tsv"]);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "m\tx_star\ttheta_m\tT_cm");
    let row = lines.next().unwrap();
    assert!(row.starts_with("1\t1.00000000000\t3.00000000000\t"));
}

#[test]
fn verify_passes_and_is_deterministic() {
    let args = [
        "verify", "--q", "3", "--k", "2", "--theta", "5", "--depth", "2", "--starts", "800",
        "--seed", "7",
    ];
    let first = tisgm(&args);
    assert!(first.status.success(), "stderr: {}", String::from_utf8_lossy(&first.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&first)).unwrap();
    assert_eq!(report["all_pass"], serde_json::json!(true));
    assert_eq!(report["count"], serde_json::json!(7));
    assert_eq!(report["schema_version"], serde_json::json!(1));
    // Identical config and seed must give byte-identical output.
    let second = tisgm(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_single_measure_regime() {
    let out = tisgm(&[
        "verify", "--q", "3", "--k", "2", "--theta", "3", "--depth", "2", "--starts", "400",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(report["count"], serde_json::json!(1));
    assert_eq!(report["regime"], "unique");
}

#[test]
fn verify_guard_rejects_oversized_volume() {
    // 3^|V_3| = 3^22 blows the configuration budget.
    let out = tisgm(&["verify", "--q", "3", "--k", "2", "--theta", "5", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("size guard"), "diagnostic: {err}");
}

#[test]
fn usage_errors_exit_two() {
    // No θ specification at all.
    let out = tisgm(&["count", "--q", "3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    // --J without --T is rejected by the parser.
    let out = tisgm(&["count", "--q", "3", "--k", "2", "--J", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // Both θ and the pair.
    let out = tisgm(&["count", "--q", "3", "--k", "2", "--theta", "4", "--J", "1", "--T", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // Out-of-range block size.
    let out = tisgm(&["roots", "--q", "3", "--k", "2", "--theta", "5", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
    // q below the model's domain.
    let out = tisgm(&["count", "--q", "1", "--k", "2", "--theta", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_is_deterministic_and_writes_files() {
    let dir = std::env::temp_dir().join("tisgm-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("enumerate.json");
    let path_str = path.to_str().unwrap();
    let args =
        ["enumerate", "--q", "4", "--k", "2", "--theta", "6", "--out", path_str];
    let out = tisgm(&args);
    assert!(out.status.success());
    assert!(stdout_of(&out).is_empty());
    let from_file = std::fs::read_to_string(&path).unwrap();
    let records: serde_json::Value = serde_json::from_str(&from_file).unwrap();
    assert_eq!(records.as_array().unwrap().len(), 15);

    let direct = tisgm(&["enumerate", "--q", "4", "--k", "2", "--theta", "6"]);
    assert_eq!(stdout_of(&direct), from_file);
    std::fs::remove_file(&path).ok();
}
