//! The `hetcdc` binary end to end.

use std::process::{Command, Output};

use hetcdc::model::AllocationDoc;

fn hetcdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetcdc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn load_reports_regime_optimum_and_bounds() {
    let o = hetcdc(&["load", "--M", "6,7,7", "--N", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for needle in ["regime R2", "L* = 12", "uncoded = 16", "pairing (at placement)  12", "genie                   10"] {
        assert!(s.contains(needle), "missing {needle:?} in\n{s}");
    }
}

#[test]
fn place_emits_parseable_json() {
    let o = hetcdc(&["place", "--M", "7,7,6", "--N", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = AllocationDoc::from_json(&stdout(&o)).unwrap();
    assert_eq!(doc.m, vec![7, 7, 6]);
    assert_eq!(doc.regime.as_deref(), Some("R2"));
    let alloc = doc.allocation().unwrap();
    assert_eq!(hetcdc::coding_k3::achievable_load(&alloc).unwrap(), doc.load);
}

#[test]
fn simulate_reports_success() {
    let o = hetcdc(&["simulate", "--M", "6,7,7", "--N", "12", "--seed", "5", "--T", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["success"], true);
    assert_eq!(v["report"]["bytes_on_wire"], 12 * 16);
    assert_eq!(hetcdc(&["simulate", "--M", "6,7,7", "--N", "12", "--T", "3"]).status.code(), Some(1));
}

#[test]
fn bounds_flags_active_bound() {
    let s = stdout(&hetcdc(&["bounds", "--M", "1,2,6", "--N", "6"]));
    assert!(s.contains("genie                   8  (active)"), "{s}");
}

#[test]
fn oracle_agrees_on_half_integer_instance() {
    let s = stdout(&hetcdc(&["oracle", "--M", "2,2,2", "--N", "3"]));
    assert!(s.contains("min = 3/2"));
    assert!(s.contains("agree = true"));
    let o = hetcdc(&["oracle", "--M", "6,7,7", "--N", "12", "--budget", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("BudgetExceeded"));
}

#[test]
fn lp_k4_with_model_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.txt");
    let o = hetcdc(&["lp", "--K", "4", "--M", "6,6,6,6", "--N", "12", "--dump-model", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["optimum"], "12");
    assert_eq!(v["claim"], "achievable");
    let dump = std::fs::read_to_string(&path).unwrap();
    assert!(dump.contains("+1 x3_1 +1 x3_2 +1 x3_3 -1 S123 <= 0"), "{dump}");
    assert_eq!(hetcdc(&["lp", "--M", "1,1,1,1,1,1,1", "--N", "7"]).status.code(), Some(1));
}

#[test]
fn sweep_writes_agreeing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = hetcdc(&["sweep", "--Nmax", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut r = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, hetcdc::cli::SWEEP_HEADER);
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), hetcdc::cli::sweep_grid(6).len());
    assert!(rows.iter().all(|row| &row[8] == "true"));
    assert_eq!(&rows[0][5], "0/1");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hetcdc(&[]).status.code(), Some(2));
    assert_eq!(hetcdc(&["load", "--N", "12"]).status.code(), Some(2));
    assert_eq!(hetcdc(&["load", "--M", "6,seven,7", "--N", "12"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_one_with_name() {
    let o = hetcdc(&["load", "--M", "-1,7,7", "--N", "12"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("BadDimension"));
}
