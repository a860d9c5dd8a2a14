//! On-disk formats read by downstream tools: snapshot CSV and JSON outputs.

use mprk_harness::io::{read_json, read_snapshot, write_json, write_snapshot, FailureInfo, RunSummary, Snapshot};
use mprk_harness::study::{EocRow, EocTable};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snapshot_values_round_trip_bitwise(rows in prop::collection::vec(prop::collection::vec(finite(), 3), 0..20)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let snap = Snapshot {
            metadata: vec![("time".into(), "1e-3".into())],
            columns: vec!["x".into(), "rho".into(), "p".into()],
            rows,
        };
        write_snapshot(&path, &snap).unwrap();
        let back = read_snapshot(&path).unwrap();
        prop_assert_eq!(back.rows.len(), snap.rows.len());
        for (a, b) in back.rows.iter().flatten().zip(snap.rows.iter().flatten()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn snapshot_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let snap = Snapshot {
        metadata: vec![("scheme".into(), "MPHeun".into()), ("cells".into(), "2".into())],
        columns: vec!["x".into(), "rho".into()],
        rows: vec![vec![0.25, 1.0], vec![0.75, 0.5]],
    };
    write_snapshot(&path, &snap).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[..3], ["#scheme=MPHeun", "#cells=2", "x,rho"]);
    assert_eq!(lines[3], "2.5000000000000000e-1,1.0000000000000000e0");
    assert_eq!(lines.len(), 5);
}

#[test]
fn metadata_with_separators_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let snap = Snapshot { metadata: vec![("a=b".into(), "c".into())], columns: vec!["x".into()], rows: vec![] };
    assert!(write_snapshot(&dir.path().join("s.csv"), &snap).is_err());
}

#[test]
fn summary_json_field_names() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("summary.json");
    let summary = RunSummary {
        scenario: "vacuum".into(),
        scheme: "MPE-rhoE".into(),
        order: 1,
        cells: 200,
        cfl: 0.1,
        safety: 1.0,
        t_end: 0.03,
        completed: false,
        steps: 12,
        time: 1e-3,
        dt_min: 1e-5,
        dt_max: 1e-4,
        min_pressure: 1e-3,
        wall_time_s: 0.1,
        snapshots: vec!["snapshot_000000.csv".into()],
        failure: Some(FailureInfo { step: 13, time: 1e-3, positivity: true, message: "negative pressure".into() }),
    };
    write_json(&path, &summary).unwrap();
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for key in [
        "scenario",
        "scheme",
        "order",
        "cells",
        "cfl",
        "safety",
        "t_end",
        "completed",
        "steps",
        "time",
        "dt_min",
        "dt_max",
        "min_pressure",
        "wall_time_s",
        "snapshots",
        "failure",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    assert_eq!(value["failure"]["step"], 13);
    assert_eq!(read_json::<RunSummary>(&path).unwrap(), summary);
}

#[test]
fn eoc_json_uses_null_for_the_last_row() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eoc.json");
    let table = EocTable {
        scheme: "FE".into(),
        cfl: 0.5,
        rows: vec![
            EocRow { cells: 10, l1: 0.2, l2: 0.3, eoc_l1: Some(1.0), eoc_l2: Some(0.9) },
            EocRow { cells: 20, l1: 0.1, l2: 0.16, eoc_l1: None, eoc_l2: None },
        ],
    };
    write_json(&path, &vec![table.clone()]).unwrap();
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(value[0]["rows"][1]["eoc_l1"].is_null());
    assert_eq!(read_json::<Vec<EocTable>>(&path).unwrap(), vec![table]);
}
