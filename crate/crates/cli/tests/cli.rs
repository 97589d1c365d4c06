use std::path::Path;
use std::process::{Command, Output};

fn biaslens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biaslens")).args(args).output().expect("binary runs")
}

fn synth(dir: &Path, comments: usize) {
    let out = biaslens(&["synth", "--out", dir.to_str().unwrap(), "--comments", &comments.to_string()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn synth_then_run_with_config() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), 150);
    let config = dir.path().join("run.toml");
    let out = biaslens(&["run", "--config", config.to_str().unwrap(), "--permutations", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report/report.json")).unwrap()).unwrap();
    assert_eq!(report["metadata"]["config"]["permutations"], 50);
    assert_eq!(report["metadata"]["config"]["seed"], 1);
    assert!(dir.path().join("report/manifest.json").is_file());
    assert!(dir.path().join("report/overall/lexical_pmie.csv").is_file());
}

#[test]
fn flags_alone_are_enough() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), 80);
    let p = |f: &str| dir.path().join(f).to_str().unwrap().to_string();
    let out = biaslens(&[
        "run",
        "--corpus",
        &p("corpus.jsonl"),
        "--registry",
        &p("registry.csv"),
        "--analyses",
        "coverage,nominal",
        "--format",
        "json",
        "--exclude-entity",
        "M0000",
        "--out",
        &p("out"),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("out/report.json")).unwrap()).unwrap();
    let scopes = report["scopes"].as_array().unwrap();
    assert_eq!(scopes.len(), 2);
    assert!(scopes[0].get("coverage").is_some());
    assert!(scopes[0].get("sentiment").is_none());
    assert!(!dir.path().join("out/tests.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), 60);
    let config = dir.path().join("run.toml");
    let config = config.to_str().unwrap();

    // Missing input file: config error.
    let out = biaslens(&["run", "--config", config, "--vad", "/nonexistent/vad.tsv"]);
    assert_eq!(out.status.code(), Some(1));
    let out = biaslens(&["run", "--config", config, "--permutations", "0"]);
    assert_eq!(out.status.code(), Some(1));

    // Corrupt corpus: ingest error.
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{not json\n{also not\n").unwrap();
    let out = biaslens(&["run", "--config", config, "--corpus", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    // Dropping every female entity leaves the gendered analyses one-sided.
    let registry = dir.path().join("registry.csv");
    let text = std::fs::read_to_string(&registry).unwrap();
    let males: String = text.lines().filter(|l| !l.starts_with('F')).map(|l| format!("{l}\n")).collect();
    let male_registry = dir.path().join("male_registry.csv");
    std::fs::write(&male_registry, males).unwrap();
    let relaxed = dir.path().join("relaxed.toml");
    let toml = std::fs::read_to_string(config).unwrap() + "max_malformed_fraction = 1.0\n";
    std::fs::write(&relaxed, toml).unwrap();
    let out = biaslens(&[
        "run",
        "--config",
        relaxed.to_str().unwrap(),
        "--registry",
        male_registry.to_str().unwrap(),
        "--permutations",
        "20",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("report/report.json").is_file());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), 100);
    let config = dir.path().join("run.toml");
    let report = dir.path().join("report/report.json");
    let mut seen = Vec::new();
    for _ in 0..2 {
        let o = biaslens(&["run", "--config", config.to_str().unwrap(), "--permutations", "100"]);
        assert!(o.status.success());
        seen.push(std::fs::read(&report).unwrap());
    }
    assert_eq!(seen[0], seen[1]);
}
