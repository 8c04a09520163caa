use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ctn_core::experiments::{read_csv, CSV_HEADER};
use ctn_core::{GateClassTable, Mps};

fn ctn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctn")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const CIRCUIT: &str = r#"{"n": 4, "gates": [
    {"type": "H", "q": [0]}, {"type": "CX", "q": [0, 1]},
    {"type": "RZ", "q": [1], "theta": 0.7853981633974483},
    {"type": "RANDOM_CLIFFORD"},
    {"type": "RP", "pauli": "XYZI", "theta": 0.3}
]}"#;

#[test]
fn run_writes_csv_and_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("c.json");
    fs::write(&circuit, CIRCUIT).unwrap();
    let out = dir.path().join("t.csv");
    let dump = dir.path().join("state.bin");
    let o = ctn(&["run", "--circuit", s(&circuit), "--cool", "exact+heuristic:k=2,d=2", "--chi-max", "16", "--seed", "7", "--out", s(&out), "--dump-state", s(&dump)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let records = read_csv(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[1].method, "exact+heuristic:k=2,d=2");
    let mps = Mps::read_snapshot(&mut fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(mps.n(), 4);

    let again = dir.path().join("t2.csv");
    assert!(ctn(&["run", "--circuit", s(&circuit), "--seed", "7", "--chi-max", "16", "--out", s(&again)]).status.success());
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());

    let stdout = ctn(&["run", "--circuit", s(&circuit), "--cool", "none"]);
    assert!(stdout.status.success());
    assert!(String::from_utf8_lossy(&stdout.stdout).starts_with(&CSV_HEADER.join(",")));
}

#[test]
fn invalid_input_exits_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("bad.json");
    fs::write(&circuit, r#"{"n": 2, "gates": [{"type": "CX", "q": [0, 5]}]}"#).unwrap();
    let o = ctn(&["run", "--circuit", s(&circuit)]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));

    let missing = ctn(&["run", "--circuit", s(&dir.path().join("nope.json"))]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope.json"));

    assert!(!ctn(&["run", "--circuit", s(&circuit), "--cool", "heuristic:k=4"]).status.success());
    assert!(!ctn(&["classes", "--k", "4", "--out", "x"]).status.success());
    let out = dir.path().join("e.csv");
    assert!(!ctn(&["experiment", "doped", "--n", "1", "--out", s(&out)]).status.success());
    assert!(!ctn(&["experiment", "doped", "--n", "4", "--theta", "pi/8", "--out", s(&out)]).status.success());
    assert!(!ctn(&["experiment", "fidelity", "--n", "14", "--out", s(&out)]).status.success());
}

#[test]
fn doped_and_angle_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let o = ctn(&["experiment", "doped", "--n", "6", "--t-max", "8", "--realizations", "3", "--seed", "2", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let records = read_csv(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(records.len(), 24);
    assert!(records.iter().all(|r| r.n == 6 && r.seed == 2));

    let out = dir.path().join("a.csv");
    let json = dir.path().join("fit.json");
    let o = ctn(&[
        "experiment", "angles", "--n", "4", "--t-max", "8", "--realizations", "4", "--theta", "pi/8,3pi/16,0.785398", "--cool", "none",
        "--out", s(&out), "--json", s(&json),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_csv(fs::File::open(&out).unwrap()).unwrap().len(), 3 * 4 * 8);
    let fit: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(fit["alphas"].as_array().unwrap().len(), 3);
    assert!(String::from_utf8_lossy(&o.stdout).contains("R²"));
}

#[test]
fn comparison_and_fidelity_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let json = dir.path().join("k.json");
    let o = ctn(&["experiment", "compare-k", "--n", "5", "--t-max", "4", "--realizations", "2", "--depth", "1", "--out", s(&out), "--json", s(&json)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let records = read_csv(fs::File::open(&out).unwrap()).unwrap();
    assert_eq!(records.len(), 2 * 2 * 4);
    assert!(records.iter().any(|r| r.method == "heuristic:k=3,d=1"));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(summary["policies"][0], "heuristic:k=2,d=1");

    let out = dir.path().join("depth.csv");
    let o = ctn(&["experiment", "depth", "--n", "5", "--t-max", "4", "--realizations", "2", "--depths", "1,3", "--out", s(&out)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("heuristic:k=2,d=1 vs heuristic:k=2,d=3"));

    let out = dir.path().join("f.csv");
    let o = ctn(&["experiment", "fidelity", "--n", "6", "--t-max", "10", "--realizations", "2", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 8);
    assert!(text.starts_with("seed,realization,n,t_count,chi,inv_chi,fidelity,discarded_weight"));
}

#[test]
fn classes_table_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c2.bin");
    let o = ctn(&["classes", "--k", "2", "--out", s(&out)]);
    assert!(o.status.success());
    let table = GateClassTable::read(&mut fs::File::open(&out).unwrap()).unwrap();
    assert_eq!((table.k(), table.class_count()), (2, 20));
}

#[test]
fn verify_theorem_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = ctn(&["verify", "theorem", "--samples", "40", "--seed", "3", "--report", s(&report)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["samples"], 40);
    assert_eq!(r["iff_violations"], 0);
    assert!(!ctn(&["verify", "theorem", "--samples", "0"]).status.success());
}
