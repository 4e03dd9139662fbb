use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn hypcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypcap")).args(args).output().expect("run hypcap")
}

fn json(out: &Output) -> Vec<Value> {
    serde_json::from_slice::<Value>(&out.stdout).expect("json report").as_array().expect("row list").clone()
}

#[test]
fn mu_json_rows() {
    let out = hypcap(&["mu", "0.7071067811865476"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    let mu = rows[0]["values"]["mu"].as_f64().unwrap();
    assert!((mu - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
    for key in ["id", "inputs", "values", "residual", "verdicts"] {
        assert!(rows[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn domain_error_exits_two() {
    let out = hypcap(&["mu", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)[0]["error"].as_str().unwrap().contains("domain"));
}

#[test]
fn usage_error_exits_two() {
    assert_eq!(hypcap(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(hypcap(&["f1f2", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(hypcap(&["seq-area", "--c", "4"]).status.code(), Some(2));
}

#[test]
fn cap_disk_matches_closed_form() {
    let out = hypcap(&["cap-disk", "--radius", "1", "--center", "0.3,0"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json(&out)[0];
    assert!(row["values"]["rel_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn polygon_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("tri.json");
    fs::write(&input, r#"{"vertices": [[0.6, 0.0], [0.2, -0.5], [-0.3, -0.5]]}"#).unwrap();
    let out_path = dir.path().join("report.json");
    let out = hypcap(&["cap-polygon", input.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rows: Vec<Value> = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    let cap = rows[0]["values"]["capacity"].as_f64().unwrap();
    assert!((cap / 5.61438997196548 - 1.0).abs() < 5e-4);
    assert_eq!(rows[0]["verdicts"]["perimeter_bound"]["status"], "pass");
}

#[test]
fn degenerate_polygon_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.json");
    fs::write(&input, r#"[{"vertices": [[0.1, 0.0], [0.2, 0.0], [0.3, 0.0]]}]"#).unwrap();
    let out = hypcap(&["triangle-conjecture", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn regular_table_csv_layout() {
    let out = hypcap(&["regular-table", "--m", "3,4", "--r", "0.5,0.9", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,m=3,m=4");
    assert!(lines[1].starts_with("0.5,5.97990"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn f1f2_csv_and_determinism() {
    let args = ["f1f2", "--points", "20", "--format", "csv"];
    let a = hypcap(&args);
    let b = hypcap(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("verdict_positive"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn verify_passes_and_is_seed_stable() {
    let a = hypcap(&["verify", "--seed", "11"]);
    let b = hypcap(&["verify", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a).len(), 5);
}

#[test]
fn triangle_bounds_sandwich() {
    let out = hypcap(&["triangle-bounds", "--s", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let row = &json(&out)[0];
    let v = &row["values"];
    let (lo, cap, hi) = (v["lower"].as_f64().unwrap(), v["capacity"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lo < cap && cap < hi);
}

#[test]
fn sequence_perimeter_increases() {
    let out = hypcap(&["seq-perim", "--c", "20", "--m-min", "3", "--m-max", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let caps: Vec<f64> = json(&out).iter().map(|r| r["values"]["capacity"].as_f64().unwrap()).collect();
    assert!(caps.windows(2).all(|w| w[1] > w[0]));
}
