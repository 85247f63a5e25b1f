use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn univnc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_univnc")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn butterfly(dir: &Path) {
    assert_eq!(code(&univnc(&["gen", "--family", "butterfly", "-o", "bf.json"], dir)), 0);
}

#[test]
fn r2d2_run_decodes_both_sinks() {
    let dir = tempfile::tempdir().unwrap();
    butterfly(dir.path());
    let out = univnc(&["run", "bf.json", "--design", "r2d2", "--rate", "2"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for s in v["sinks"].as_array().unwrap() {
        assert_eq!(s["decode_ok"], true);
    }
}

#[test]
fn c3p0_det_is_sparse_power_of_z() {
    let dir = tempfile::tempdir().unwrap();
    butterfly(dir.path());
    let out = univnc(&["run", "bf.json", "--design", "c3p0", "--rate", "2"], dir.path());
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for s in v["sinks"].as_array().unwrap() {
        let det = s["det"].as_str().unwrap();
        let (num, den) = det.split_once('/').unwrap();
        assert_eq!(den, "0x1");
        // The first two source links carry unit vectors, so each butterfly
        // sink sees a single system of disjoint paths and det is one power of z.
        let terms = num.strip_prefix("sp:").unwrap().split(',').count();
        assert_eq!(terms, 1, "{det}");
    }
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    butterfly(dir.path());
    let args = ["run", "bf.json", "--design", "sup", "--epsilon", "0.2", "--seed", "5"];
    let a = univnc(&args, dir.path());
    let b = univnc(&args, dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn explicit_messages_are_decoded() {
    let dir = tempfile::tempdir().unwrap();
    butterfly(dir.path());
    let out = univnc(&["run", "bf.json", "--design", "wup", "--seed", "1", "--messages", "0x1f", "0xabc"], dir.path());
    assert_eq!(code(&out), 0);
    let out = univnc(&["run", "bf.json", "--design", "wup", "--seed", "1", "--messages", "0x1f"], dir.path());
    assert_eq!(code(&out), 1);
}

#[test]
fn seed_is_mandatory_for_randomness() {
    let dir = tempfile::tempdir().unwrap();
    butterfly(dir.path());
    assert_eq!(code(&univnc(&["run", "bf.json", "--design", "wup"], dir.path())), 1);
    assert_eq!(code(&univnc(&["gen", "--family", "random"], dir.path())), 1);
}

#[test]
fn transform_outputs_low_degree_graph() {
    let dir = tempfile::tempdir().unwrap();
    butterfly(dir.path());
    let out = univnc(&["transform", "bf.json"], dir.path());
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let edges = v["edges"].as_array().unwrap();
    for n in v["nodes"].as_array().unwrap() {
        let id = n["id"].as_str().unwrap();
        let indeg = edges.iter().filter(|e| e["head"] == id).count();
        let outdeg = edges.iter().filter(|e| e["tail"] == id).count();
        assert!(indeg + outdeg <= 3, "{id}");
    }
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{ nope").unwrap();
    let out = univnc(&["transform", "bad.json"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn montecarlo_contract() {
    let dir = tempfile::tempdir().unwrap();
    butterfly(dir.path());
    let zero = univnc(&["montecarlo", "bf.json", "--design", "sup", "--trials", "0", "--seed", "1"], dir.path());
    assert_eq!(code(&zero), 1);
    let args = ["montecarlo", "bf.json", "--design", "r2d2", "--trials", "10", "--seed", "3"];
    assert_eq!(code(&univnc(&args, dir.path())), 0);
    let csv = std::fs::read_to_string(dir.path().join("mc.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("trial,seed,failures"));
    assert!(lines.all(|l| l.ends_with(",0")));
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["failures"], 0);
    let sup = ["montecarlo", "bf.json", "--design", "sup", "--epsilon", "0.2", "--trials", "100", "--seed", "3"];
    assert_eq!(code(&univnc(&sup, dir.path())), 0);
}

#[test]
fn lowerbound_many_sinks_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = univnc(&["gen", "--family", "lowerbound", "--depth", "3", "--mode", "many-sinks"], dir.path());
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["sinks"].as_array().unwrap().len(), 28);
}

#[test]
fn szcheck_small_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = univnc(&["szcheck", "--instances", "20", "--trials", "100", "--seed", "2"], dir.path());
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"], 0);
}

#[test]
fn churn_with_five_joins() {
    let dir = tempfile::tempdir().unwrap();
    butterfly(dir.path());
    let script = r#"[
        {"op":"join","tail":"a","head":"d"},
        {"op":"join","tail":"s","head":"c"},
        {"op":"join","tail":"b","head":"w"},
        {"op":"join","tail":"w","head":"t1"},
        {"op":"join","tail":"c","head":"t2"}
    ]"#;
    std::fs::write(dir.path().join("script.json"), script).unwrap();
    let out = univnc(&["churn", "bf.json", "script.json", "--design", "r2d2", "--seed", "1"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let steps: Value = serde_json::from_slice(&out.stdout).unwrap();
    let steps = steps.as_array().unwrap();
    assert_eq!(steps.len(), 6);
    for s in steps {
        assert!(s["changed"].as_array().unwrap().is_empty());
        assert!(s["report"]["sinks"].as_array().unwrap().iter().all(|t| t["decode_ok"] == true));
    }
}

#[test]
fn churn_rejects_bad_script() {
    let dir = tempfile::tempdir().unwrap();
    butterfly(dir.path());
    std::fs::write(dir.path().join("s.json"), r#"[{"op":"teleport"}]"#).unwrap();
    let out = univnc(&["churn", "bf.json", "s.json", "--design", "c3p0"], dir.path());
    assert_eq!(code(&out), 2);
}
