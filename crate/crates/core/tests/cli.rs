use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const KARATE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate.txt");
const CLUBS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/karate_clubs.txt");

fn bethe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bethe")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = bethe(&[
            "generate", "--n", "500", "--k", "2", "--cin", "9", "--cout", "1",
            "--theta", "power-uniform(3,10,3)", "--seed", "4",
            "--out-dir", dir.path().to_str().unwrap(), "--name", name,
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let edges = std::fs::read(path(dir.path(), &format!("{name}.edges"))).unwrap();
        let labels = std::fs::read(path(dir.path(), &format!("{name}.labels"))).unwrap();
        (edges, labels)
    };
    let (e1, l1) = run("a");
    let (e2, l2) = run("b");
    assert_eq!(e1, e2);
    assert_eq!(l1, l2);
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(path(dir.path(), "a.json")).unwrap()).unwrap();
    assert_eq!(manifest["nodes"], 500);
    assert_eq!(manifest["seed"], 4);
    assert!(manifest["stats"]["c_hat"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_input_exits_with_2() {
    let out = bethe(&["generate", "--n", "100", "--cin", "0", "--cout", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bethe(&["cluster", "/nonexistent/graph.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.txt");
    std::fs::write(&bad, "1 2\n2 x\n").unwrap();
    let out = bethe(&["score", bad.to_str().unwrap(), CLUBS]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn cluster_and_score_agree() {
    let dir = tempfile::tempdir().unwrap();
    let labels = path(dir.path(), "labels.txt");
    let report = json(&bethe(&[
        "cluster", KARATE, "--k", "2", "--truth", CLUBS, "--labels", labels.to_str().unwrap(),
    ]));
    assert_eq!(report["k_hat"], 2);
    let overlap = report["scores"]["overlap"].as_f64().unwrap();
    assert!(overlap > 0.9, "{overlap}");

    let score = json(&bethe(&["score", KARATE, labels.to_str().unwrap(), "--truth", CLUBS]));
    for key in ["modularity", "neg_log_likelihood", "overlap"] {
        assert_eq!(score[key], report["scores"][key], "{key}");
    }
    // the written labels are keyed by the original node ids
    let first = std::fs::read_to_string(&labels).unwrap();
    assert!(first.lines().any(|l| l.starts_with("34 ")));
}

#[test]
fn cluster_without_row_normalization() {
    let report = json(&bethe(&["cluster", KARATE, "--k", "2", "--no-row-norm", "--truth", CLUBS, "--labels", "/dev/null"]));
    assert_eq!(report["config"]["options"]["row_norm"], false);
    assert!(report["scores"]["modularity"].as_f64().unwrap() > 0.3);
}

#[test]
fn spectrum_traces_cross_zero_at_zeta() {
    let v = json(&bethe(&["spectrum", KARATE, "--p", "3", "--points", "30", "--zeta", "2"]));
    let rho = v["rho"].as_f64().unwrap();
    let traces = v["traces"].as_array().unwrap();
    assert_eq!(traces.len(), 30);
    assert_eq!(traces[0]["r"].as_f64().unwrap(), 1.0);
    assert_eq!(traces[29]["r"].as_f64().unwrap(), rho.sqrt());

    // H_1 = D − A has a single zero on a connected graph
    let at_one: Vec<f64> = traces[0]["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(at_one[0].abs() < 1e-8);
    assert!(at_one[1] > 1e-3);

    let zeta2 = v["zeta"][1]["zeta"].as_f64().unwrap();
    let s2 = |t: &Value| t["eigenvalues"][1].as_f64().unwrap();
    for w in traces.windows(2) {
        let (r0, r1) = (w[0]["r"].as_f64().unwrap(), w[1]["r"].as_f64().unwrap());
        if s2(&w[0]) > 0.0 && s2(&w[1]) <= 0.0 {
            assert!(r0 < zeta2 && zeta2 <= r1, "crossing in [{r0}, {r1}], ζ_2 = {zeta2}");
            return;
        }
    }
    panic!("s_2 never changes sign");
}

#[test]
fn benchmark_writes_one_row_per_run() {
    let dir = tempfile::tempdir().unwrap();
    let rows = path(dir.path(), "rows.csv");
    let summary = path(dir.path(), "summary.csv");
    let out = bethe(&[
        "benchmark", "--n", "600", "--c", "8", "--alpha-min", "1", "--alpha-max", "2", "--points", "2",
        "--seeds", "2", "--methods", "algorithm2,adjacency", "--restarts", "3",
        "--out", rows.to_str().unwrap(), "--summary", summary.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&rows).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 2);
    assert_eq!(std::fs::read_to_string(&summary).unwrap().lines().count(), 1 + 2 * 2);
}

#[test]
fn benchmark_on_a_graph_file() {
    let out = bethe(&["benchmark", "--graph", KARATE, "--truth", CLUBS, "--k", "2", "--methods", "algorithm2,reg-sym-laplacian"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
}
