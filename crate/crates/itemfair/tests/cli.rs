mod common;

use common::*;
use serde_json::Value;

fn zero(_: f64) -> f64 {
    0.0
}

fn report(dir: &std::path::Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn ideal_exam_has_no_unfair_items() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "ideal.csv", &ideal_csv(20, 20, &[]));
    let out = dir.path().join("out");
    let o = run(&["analyze", &csv, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let r = report(&out);
    assert_eq!(r["unfair_items"].as_array().unwrap().len(), 0);
    assert_eq!(r["iterations"].as_array().unwrap().len(), 1);
    for p in r["iterations"][0]["points"].as_array().unwrap() {
        assert!(p["d"].as_f64().unwrap().abs() < 1e-9);
    }
    for name in [
        "report.json",
        "report.txt",
        "plane_iter1.svg",
        "plane_final.svg",
    ] {
        assert!(out.join(name).exists(), "{name}");
    }
}

#[test]
fn all_wrong_item_sits_far_below_the_ideal_line() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "bad.csv", &ideal_csv(20, 30, &[zero]));
    let out = dir.path().join("out");
    let o = run(&[
        "analyze",
        &csv,
        "--out-dir",
        out.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    let unfair = r["unfair_items"].as_array().unwrap();
    assert_eq!(unfair.len(), 1);
    assert_eq!(unfair[0]["id"], "i31");
    assert!((unfair[0]["d"].as_f64().unwrap() + 1.0 / 2f64.sqrt()).abs() < 1e-9);
    let stdout: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(stdout, r);
    let text = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(text.contains("unfair items: i31"), "{text}");
}

#[test]
fn fixed_cutoff_rule_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "bad.csv", &ideal_csv(20, 10, &[zero]));
    let out = dir.path().join("out");
    let o = run(&[
        "analyze",
        &csv,
        "--out-dir",
        out.to_str().unwrap(),
        "--cutoff-rule",
        "fixed",
        "--fixed-cutoff",
        "0.2",
        "--plot",
        "none",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["config"]["cutoff_rule"], "fixed");
    assert_eq!(r["iterations"][0]["d_f"].as_f64(), Some(0.2));
    assert!(!out.join("plane_final.svg").exists());
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let items: Vec<_> = (0..40)
        .map(|i| {
            (
                1.0,
                -1.0 + i as f64 / 20.0,
                0.1,
                if i == 5 { 0.45 } else { 1.0 },
            )
        })
        .collect();
    let spec = write(dir.path(), "items.json", &items_json(&items));
    let gen = |name: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "generate",
            "--items",
            &spec,
            "--examinees",
            "250",
            "--seed",
            "11",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        std::fs::read(out).unwrap()
    };
    let a = gen("a.csv");
    let b = gen("b.csv");
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 251);
    let truth: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.truth.json")).unwrap())
            .unwrap();
    assert_eq!(truth["seed"], 11);
    assert_eq!(truth["unfair_item_ids"], serde_json::json!(["i6"]));

    let other = dir.path().join("c.csv");
    run(&[
        "generate",
        "--items",
        &spec,
        "--examinees",
        "250",
        "--seed",
        "12",
        "--out",
        other.to_str().unwrap(),
    ]);
    assert_ne!(std::fs::read(other).unwrap(), b);
}

#[test]
fn empty_cohort_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "empty.csv", ",i1,i2,i3\n");
    let o = run(&["analyze", &csv, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    assert!(!dir.path().join("report.json").exists());

    let spec = write(
        dir.path(),
        "items.json",
        &items_json(&[(1.0, 0.0, 0.0, 1.0); 3]),
    );
    let o = run(&[
        "generate",
        "--items",
        &spec,
        "--examinees",
        "0",
        "--seed",
        "1",
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tied_totals_exit_with_degenerate_status() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(
        dir.path(),
        "tied.csv",
        ",i1,i2,i3\ns1,1,0,1\ns2,0,1,1\ns3,1,1,0\n",
    );
    let o = run(&["analyze", &csv, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_input_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(
        dir.path(),
        "bad.csv",
        ",i1,i2,i3\ns1,1,0,1\ns2,0,x,1\ns3,1,1,0\n",
    );
    let o = run(&["analyze", &csv, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("row 3") && msg.contains("column 3"), "{msg}");

    assert_eq!(
        run(&["analyze", "/nonexistent/x.csv"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["analyze", &csv, "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn compare_flags_items_per_group() {
    let dir = tempfile::tempdir().unwrap();
    fn half(g: f64) -> f64 {
        g * 0.2
    }
    let a = write(dir.path(), "a.csv", &ideal_csv(20, 11, &[]));
    let b = write(dir.path(), "b.csv", &ideal_csv(20, 10, &[zero]));
    let c = write(dir.path(), "c.csv", &ideal_csv(20, 10, &[half]));
    let out = dir.path().join("out");
    let o = run(&[
        "compare",
        "--group",
        &format!("A={a}"),
        "--group",
        &format!("B={b}"),
        "--group",
        &format!("C={c}"),
        "--out-dir",
        out.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["item_ids"], serde_json::json!(["i11"]));
    let rows = v["rows"].as_array().unwrap();
    let flagged: Vec<bool> = rows
        .iter()
        .map(|r| r["cells"][0]["flagged"].as_bool().unwrap())
        .collect();
    assert_eq!(flagged, [false, true, true]);
    assert!(out.join("groups.txt").exists());

    let o = run(&["compare", "--group", "nolabel"]);
    assert_eq!(o.status.code(), Some(1));
}
