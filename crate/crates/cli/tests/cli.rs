use std::process::{Command, Output};

use serde_json::Value;

fn grcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grcalc")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = grcalc(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn cell(v: &Value, pred: impl Fn(&Value) -> bool) -> u64 {
    v["rows"].as_array().unwrap().iter().find(|r| pred(r)).unwrap()["value"].as_u64().unwrap()
}

#[test]
fn catlie_table_contains_three_two() {
    let v = json(&["dims", "catlie", "--max-s", "3"]);
    assert_eq!(v["schema"], "1");
    assert_eq!(cell(&v, |r| r["s"] == 3 && r["t"] == 2), 6);
    assert_eq!(cell(&v, |r| r["s"] == 2 && r["t"] == 3), 0);
}

#[test]
fn passi_and_prop_dims() {
    assert_eq!(cell(&json(&["dims", "passi", "--d", "2", "--t", "2"]), |_| true), 7);
    let v = json(&["dims", "prop", "--n", "1", "--s", "0", "--t", "2", "--enumerate"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["value"] == 1));
}

#[test]
fn every_cell_has_provenance() {
    for args in [
        &["dims", "catlie", "--max-s", "2"][..],
        &["dims", "witt", "--t", "2", "--max-k", "4"],
        &["dims", "tower", "--s", "1", "--t", "2", "--d", "2", "--check"],
        &["dims", "mlie", "--legs", "3", "--degree", "2"],
        &["dims", "catass", "--max-s", "2"],
    ] {
        let v = json(args);
        for r in v["rows"].as_array().unwrap() {
            let p = r["provenance"].as_str().unwrap();
            assert!(["enumeration", "formula", "rank"].contains(&p), "{args:?}: {p}");
        }
    }
    let out = grcalc(&["dims", "catlie", "--max-s", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("s,t,value,provenance"));
}

#[test]
fn bch_listing() {
    let coeffs = |d: &str| -> Vec<(String, String)> {
        json(&["bch", "--d", d])["terms"]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| (t["word"].as_str().unwrap().into(), t["coeff"].as_str().unwrap().into()))
            .collect()
    };
    let pairs = |v: &[(&str, &str)]| -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    };
    assert_eq!(coeffs("1"), pairs(&[("a", "1"), ("b", "1")]));
    assert_eq!(coeffs("2"), pairs(&[("a", "1"), ("b", "1"), ("ab", "1/2")]));
    let d3 = coeffs("3");
    assert_eq!(d3.len(), 5);
    assert!(d3[3..].iter().all(|(_, c)| c == "1/12" || c == "-1/12"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [&["verify", "catprop", "--seed", "7"][..], &["tower", "compose", "--f", "a->ab", "--g", "a->ba; b->b", "--d", "3"]] {
        let (a, b) = (grcalc(args), grcalc(args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn verify_reports() {
    let v = json(&["verify", "freelie", "--seed", "1"]);
    assert_eq!(v["passed"], true);
    let v = json(&["tower", "verify", "--seed", "1"]);
    let ids: Vec<&str> =
        v["suites"][0]["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"projection-well-defined"));
    assert!(ids.contains(&"composition-well-defined"));
}

#[test]
fn verify_all_aggregates_suites() {
    let v = json(&["verify", "all", "--seed", "3"]);
    let suites: Vec<&str> =
        v["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(suites, ["freelie", "grfun", "catprop", "tower", "jacobi"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["verify", "nosuch"][..],
        &["dims", "passi", "--d", "9", "--t", "2"],
        &["dims", "catlie", "--max-s", "5"],
        &["jacobi", "prop", "--n", "4", "--s", "0", "--t", "2"],
        &["tower", "compose", "--f", "a->q", "--g", "a->a", "--d", "2"],
        &["bogus"],
    ] {
        let out = grcalc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    // caps can be raised
    assert!(grcalc(&["dims", "catlie", "--max-s", "5", "--cap-rank", "5"]).status.success());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = grcalc(&["dims", "witt", "--t", "2", "--max-k", "3", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text, "t,k,value,provenance\n2,1,2,formula\n2,2,1,formula\n2,3,2,formula\n");
}

#[test]
fn jacobi_commands() {
    let v = json(&["jacobi", "chord", "--n", "1", "--s", "1", "--list"]);
    assert_eq!(v["count"], 3);
    assert_eq!(v["diagrams"].as_array().unwrap().len(), 3);
    assert_eq!(v["diagrams"][0]["entries"], 1);
    let v = json(&["jacobi", "mlie", "--legs", "2", "--degree", "1"]);
    assert_eq!(v["rows"][0]["value"], 1);
    let v = json(&["jacobi", "prop", "--n", "0", "--s", "3", "--t", "2"]);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["value"] == 6));
    let v = json(&["jacobi", "verify", "--max-degree", "2", "--seed", "1"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn timings_stay_off_stdout() {
    let a = grcalc(&["dims", "witt", "--t", "3", "--max-k", "3", "--timings"]);
    let b = grcalc(&["dims", "witt", "--t", "3", "--max-k", "3"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("elapsed_ms"));
}
