mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const TWO_SUPPLIERS: &str = r#"
schema_version = "1.0.0"
name = "two-suppliers"
objective = "price"

[time]
start = 2020-01-01T00:00:00Z
step = "1 h"
steps = 2

[[buses]]
id = "el"
carrier = "electricity"

[[flows]]
id = "cheap"
to = "el"
capacity = "2 kW"
price = "40 EUR/MWh"

[[flows]]
id = "dear"
to = "el"
capacity = "5 kW"
price = "90 EUR/MWh"

[[flows]]
id = "load"
from = "el"
fixed = { values = [1.5, 3.0], unit = "kW" }
is_demand = true
"#;

fn heatlevels(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatlevels"))
        .args(args)
        .current_dir(cwd)
        .env_remove("HEATLEVELS_OUTPUT_DIR")
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scenario(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn solve_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let doc = scenario(dir.path(), TWO_SUPPLIERS);
    let out = heatlevels(&["solve", &doc, "-o", "out"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let line = stdout(&out);
    // 1.5 kWh + 2 kWh at 40 EUR/MWh, 1 kWh at 90 EUR/MWh.
    let objective: f64 = line.trim().strip_prefix("OPTIMAL objective=").unwrap().parse().unwrap();
    assert!((objective - (3.5e-3 * 40.0 + 1e-3 * 90.0)).abs() < 1e-12);
    for file in ["dispatch.csv", "storage.csv", "dispatch_long.csv", "kpi.json"] {
        assert!(dir.path().join("out").join(file).is_file(), "{file}");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let doc = scenario(dir.path(), TWO_SUPPLIERS);
    let out = Command::new(env!("CARGO_BIN_EXE_heatlevels"))
        .args(["solve", &doc])
        .current_dir(dir.path())
        .env("HEATLEVELS_OUTPUT_DIR", dir.path().join("from_env"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("from_env/kpi.json").is_file());
}

#[test]
fn bundled_scenario_solves() {
    let dir = tempfile::tempdir().unwrap();
    let doc = common::bundled_scenario();
    let out = heatlevels(&["solve", doc.to_str().unwrap(), "--objective", "price", "-o", "res"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("OPTIMAL objective="));
    let kpi = heatlevels(&["kpi", doc.to_str().unwrap(), "-r", "res"], dir.path());
    assert_eq!(kpi.status.code(), Some(0), "{}", stderr(&kpi));
    let stored = fs::read_to_string(dir.path().join("res/kpi.json")).unwrap();
    let stored: serde_json::Value = serde_json::from_str(&stored).unwrap();
    let recomputed: serde_json::Value = serde_json::from_str(&stdout(&kpi)).unwrap();
    let cost = |v: &serde_json::Value| v["cost_eur_per_mwh"].as_f64().unwrap();
    assert!((cost(&stored) - cost(&recomputed)).abs() <= 1e-9 * cost(&stored).abs());
}

#[test]
fn validate_reports_broken_series() {
    let dir = tempfile::tempdir().unwrap();
    let ok = heatlevels(&["validate", &scenario(dir.path(), TWO_SUPPLIERS)], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).trim(), "VALID scenario=two-suppliers");

    let broken = TWO_SUPPLIERS.replace(
        "{ values = [1.5, 3.0], unit = \"kW\" }",
        "{ series = \"gone.csv\", column = \"load\", unit = \"kW\" }",
    );
    let out = heatlevels(&["validate", &scenario(dir.path(), &broken)], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("gone.csv"), "{}", stderr(&out));
}

#[test]
fn over_demand_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let doc = scenario(dir.path(), &TWO_SUPPLIERS.replace("[1.5, 3.0]", "[1.5, 8.0]"));
    let out = heatlevels(&["solve", &doc, "-o", "out"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("infeasible"), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("INFEASIBLE objective="));
}

#[test]
fn unpriced_sink_with_revenue_is_unbounded() {
    let dir = tempfile::tempdir().unwrap();
    let text = TWO_SUPPLIERS.replace("capacity = \"5 kW\"\n", "") + "\n[[flows]]\nid = \"export\"\nfrom = \"el\"\nprice = \"-100 EUR/MWh\"\n";
    let out = heatlevels(&["solve", &scenario(dir.path(), &text), "-o", "out"], dir.path());
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn io_failures_exit_five() {
    let dir = tempfile::tempdir().unwrap();
    let doc = scenario(dir.path(), TWO_SUPPLIERS);
    fs::write(dir.path().join("taken"), "").unwrap();
    let out = heatlevels(&["solve", &doc, "-o", "taken"], dir.path());
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
    let out = heatlevels(&["validate", "missing.toml"], dir.path());
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(heatlevels(&["frobnicate"], dir.path()).status.code(), Some(2));
    let doc = scenario(dir.path(), TWO_SUPPLIERS);
    assert_eq!(heatlevels(&["solve", &doc, "--objective", "carbon"], dir.path()).status.code(), Some(2));
}

#[test]
fn export_lp_to_stdout_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let doc = scenario(dir.path(), TWO_SUPPLIERS);
    let out = heatlevels(&["export-lp", &doc], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("\\") || text.starts_with("Minimize"), "{text}");
    assert!(text.contains("Subject To") && text.trim_end().ends_with("End"));
    let file = heatlevels(&["export-lp", &doc, "-o", "model.lp"], dir.path());
    assert_eq!(file.status.code(), Some(0));
    assert_eq!(fs::read_to_string(dir.path().join("model.lp")).unwrap(), text);
}

#[test]
fn oracle_check_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let doc = scenario(dir.path(), TWO_SUPPLIERS);
    let out = heatlevels(&["oracle-check", &doc, "--points", "101"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let line = stdout(&out);
    assert!(line.starts_with("OPTIMAL objective="), "{line}");
    assert!(line.contains(" oracle=") && line.contains(" gap="), "{line}");
}

#[test]
fn coarse_oracle_grid_fails_the_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let doc = scenario(dir.path(), TWO_SUPPLIERS);
    let out = heatlevels(&["oracle-check", &doc, "--points", "11"], dir.path());
    assert_ne!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("exceeds"), "{}", stderr(&out));
    let loose = heatlevels(&["oracle-check", &doc, "--points", "11", "--tolerance", "0.05"], dir.path());
    assert_eq!(loose.status.code(), Some(0), "{}", stderr(&loose));
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let doc = scenario(dir.path(), TWO_SUPPLIERS);
    let a = heatlevels(&["solve", &doc, "-o", "a"], dir.path());
    let b = heatlevels(&["solve", &doc, "-o", "b"], dir.path());
    assert_eq!(a.stdout, b.stdout);
    for file in ["dispatch.csv", "storage.csv", "dispatch_long.csv", "kpi.json"] {
        assert_eq!(fs::read(dir.path().join("a").join(file)).unwrap(), fs::read(dir.path().join("b").join(file)).unwrap(), "{file}");
    }
}
