//! End-to-end tests of the `concap` binary.

use std::path::Path;
use std::process::{Command, Output};

use concap::cli::ResultRecord;
use concap::specialfn::hyp_disk_capacity;

fn concap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_concap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn capacity_record_reproduces_itself() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cap.toml",
        r#"
units = "euclidean"
disks = [
  { center = [0.5, 0.0], radius = 0.1 },
  { center = [-0.25, 0.43301270189221935], radius = 0.1 },
  { center = [-0.25, -0.43301270189221935], radius = 0.1 },
]
"#,
    );
    let out = concap(&["capacity", "--config", &cfg, "--n", "64"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let record = ResultRecord::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let cap1 = record.outputs["capacity"].as_f64().unwrap();

    // the echoed config (n override included) must reproduce the capacity
    let echoed = write(dir.path(), "echo.toml", &toml::to_string(&record.config).unwrap());
    let out2 = concap(&["capacity", "--config", &echoed]);
    assert!(out2.status.success(), "{}", String::from_utf8_lossy(&out2.stderr));
    let record2 = ResultRecord::from_json(&String::from_utf8(out2.stdout).unwrap()).unwrap();
    let cap2 = record2.outputs["capacity"].as_f64().unwrap();
    assert!((cap1 - cap2).abs() <= 1e-12, "{cap1} vs {cap2}");
}

#[test]
fn malformed_config_is_rejected_with_the_offending_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "disks = [ { center = [0.0, 0.0], radiuss = 0.1 } ]\n",
    );
    let out = concap(&["capacity", "--config", &cfg]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("radiuss"), "stderr: {stderr}");
}

#[test]
fn sweep_is_symmetric_in_the_angle() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        r#"
[sweep]
kind = "angular"
radius = 0.4
r_center = 0.5
points = 9
"#,
    );
    let out = concap(&["sweep", "--config", &cfg, "--n", "64"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let caps: Vec<f64> = text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(caps.len(), 9);
    for i in 0..caps.len() / 2 {
        let (a, b) = (caps[i], caps[caps.len() - 1 - i]);
        assert!((a - b).abs() <= 1e-8, "cap({i}) = {a} vs mirrored {b}");
    }
}

#[test]
fn condensed_radius_round_trips_through_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "condense.toml",
        r#"
[condense]
m = 6
ring_radius = 0.75
r_min = 0.2
r_max = 0.8
points = 4
"#,
    );
    let out = concap(&["condense", "--config", &cfg, "--n", "64"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let (capacity, condensed_radius) = (row[1], row[2]);
        let back = hyp_disk_capacity(condensed_radius).unwrap();
        assert!((back - capacity).abs() <= 1e-10, "{back} vs {capacity}");
    }
}

#[test]
fn table_one_comparison_passes() {
    let out = concap(&["table", "--id", "1", "--n", "256"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
}

#[test]
fn unknown_table_id_fails() {
    let out = concap(&["table", "--id", "9"]);
    assert!(!out.status.success());
}
