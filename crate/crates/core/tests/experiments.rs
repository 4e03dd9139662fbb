use std::f64::consts::TAU;

use hypcap::condenser::ref_cap_m1;
use hypcap::harness::{
    run_polygon_conjecture, run_regular_table, run_sequence_area, run_sequence_perim, run_triangle_conjecture,
    tables, PolygonCase, RunConfig, Status,
};
use hypcap::hypgeom::{regular_polygon, regular_radius_from_area};

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

#[test]
fn triangle_rows_match_reference() {
    let cases: Vec<PolygonCase> = tables::triangles().into_iter().filter(|c| c.id == "T1" || c.id == "T5").collect();
    let rows = run_triangle_conjecture(&cases, &RunConfig::default());
    assert!(rel(rows[0].values["cap_T"], 5.61438997196548) < 5e-4);
    assert!(rel(rows[0].values["cap_T0"], 4.96507462804135) < 5e-4);
    assert_eq!(rows[0].verdicts["conjecture"].status, Status::Pass);
    assert!(rel(rows[1].values["cap_T"], 13.2881689301735) < 5e-4);
    assert!(rel(rows[1].values["cap_T0"], 13.2881521954927) < 5e-4);
    assert!(rows[1].verdicts["conjecture"].holds());
    for row in &rows {
        assert_eq!(row.verdicts["area_match"].status, Status::Pass);
        for v in row.verdicts.values() {
            assert_eq!(v.recompute(), v.status);
        }
    }
}

#[test]
fn polygon_rows_match_reference() {
    let cases: Vec<PolygonCase> = tables::polygons().into_iter().take(2).collect();
    let rows = run_polygon_conjecture(&cases, &RunConfig::default());
    assert!(rel(rows[0].values["cap_P"], 9.0274303701827) < 5e-4);
    assert!(rel(rows[0].values["cap_P0"], 9.07270475215184) < 5e-4);
    assert!(rel(rows[1].values["cap_P"], 8.3279404581868) < 5e-4);
    assert!(rel(rows[1].values["cap_P0"], 8.32794231176445) < 5e-4);
    assert!(rows.iter().all(|r| r.verdicts["conjecture"].holds()));
}

#[test]
fn regular_polygon_is_its_own_competitor() {
    let p = regular_polygon(5, 0.6).unwrap();
    let v: Vec<[f64; 2]> = p.vertices().iter().map(|q| [q.z().re, q.z().im]).collect();
    let rows = run_polygon_conjecture(&[PolygonCase::new("reg5", &v)], &RunConfig::default());
    let (a, b) = (rows[0].values["cap_P"], rows[0].values["cap_P0"]);
    assert!((a - b).abs() <= 2.0 * rows[0].residual * a + 1e-12);
    assert!(rows[0].verdicts["conjecture"].holds());
}

#[test]
fn regular_table_anchors() {
    let rows = run_regular_table(&[3, 7], &[0.5, 0.9], None, &RunConfig::default());
    let cap = |id: &str| rows.iter().find(|r| r.id == id).unwrap().values["capacity"];
    assert!(rel(cap("m3_r0.5"), 5.9799062371) < 5e-4);
    assert!(rel(cap("m7_r0.9"), 24.452171599) < 5e-4);
    assert!(rows.iter().all(|r| r.status() == Status::Pass));
}

#[test]
fn area_sequence_small_set_limit_and_triangle_path() {
    let cfg = RunConfig::default();
    let small = run_sequence_area(0.01, &[3], &cfg).unwrap();
    let reference = 4.0 * std::f64::consts::PI / (1.0 + 4.0 * std::f64::consts::PI / 0.01_f64).ln();
    assert!(rel(small[0].values["capacity"], reference) < 0.05);
    assert!(rel(ref_cap_m1(0.01).unwrap(), reference) < 1e-12);

    let seq = run_sequence_area(3.0, &[3], &cfg).unwrap();
    let r = regular_radius_from_area(3, 3.0).unwrap();
    let w = hypcap::Complex64::from_polar(r, TAU / 3.0);
    let tri = run_triangle_conjecture(&[PolygonCase::new("eq", &[[r, 0.0], [w.re, w.im], [w.re, -w.im]])], &cfg);
    let (a, b) = (seq[0].values["capacity"], tri[0].values["cap_T"]);
    assert!(rel(a, b) <= 2.0 * seq[0].residual.max(tri[0].residual) + 1e-12, "{a} {b}");
}

#[test]
fn perimeter_sequence_gap_shrinks() {
    let rows = run_sequence_perim(20.0, &[3, 4, 5, 6, 7, 8], &RunConfig::default()).unwrap();
    let gaps: Vec<f64> = rows.iter().map(|r| r.values["disk_bound"] - r.values["capacity"]).collect();
    assert!(gaps.iter().all(|g| *g > 0.0));
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = RunConfig::default();
    let cases: Vec<PolygonCase> = tables::triangles().into_iter().take(3).collect();
    let a = serde_json::to_string(&run_triangle_conjecture(&cases, &cfg)).unwrap();
    let b = serde_json::to_string(&run_triangle_conjecture(&cases, &cfg)).unwrap();
    assert_eq!(a, b);
}
