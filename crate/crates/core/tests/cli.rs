//! The `roadkg` binary as a process: exit codes and run-directory artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn roadkg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roadkg"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

/// Run directory printed on the last stdout line.
fn run_dir(out: &Output) -> PathBuf {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    PathBuf::from(stdout.lines().last().expect("run directory line"))
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn rules() -> String {
    format!("{}/data/jaad_rules.txt", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn help_and_version_exit_zero() {
    let h = roadkg(&["--help"]);
    assert_eq!(h.status.code(), Some(0));
    let text = String::from_utf8(h.stdout).unwrap();
    for sub in ["build-kg", "train", "predict", "evaluate", "synth", "explain"] {
        assert!(text.contains(sub));
    }
    assert_eq!(roadkg(&["--version"]).status.code(), Some(0));
    assert_eq!(roadkg(&["predict", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_and_config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = p(tmp.path());
    assert_eq!(roadkg(&[]).status.code(), Some(2));
    assert_eq!(roadkg(&["train", "--preset", "bogus"]).status.code(), Some(2));
    assert_eq!(roadkg(&["--mode", "cyclist", "build-kg"]).status.code(), Some(2));
    let missing = roadkg(&["build-kg", "--ontology", "/no/such/ontology.toml", "--out", out]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("ontology"));
    let bad_cfg = tmp.path().join("bad.toml");
    std::fs::write(&bad_cfg, "unknown_key = 3\n").unwrap();
    assert_eq!(roadkg(&["build-kg", "--config", p(&bad_cfg)]).status.code(), Some(2));
    assert_eq!(roadkg(&["synth", "--noise", "1.5", "--out", out]).status.code(), Some(2));
    // The pedestrian ontology under vehicle mode.
    let onto = format!("{}/data/pedestrian_ontology.toml", env!("CARGO_MANIFEST_DIR"));
    assert_eq!(roadkg(&["build-kg", "--ontology", &onto, "--out", out]).status.code(), Some(2));
}

#[test]
fn runtime_failure_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("broken.csv");
    std::fs::write(&csv, "trackId,frame\n1,2\n").unwrap();
    let o = roadkg(&["build-kg", "--data", p(&csv), "--out", p(tmp.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn vehicle_workflow() {
    let tmp = tempfile::tempdir().unwrap();
    let out = p(tmp.path());
    let synth = run_dir(&roadkg(&["synth", "--per-label", "40", "--seed", "2", "--out", out]));
    let csv = synth.join("synthetic.csv");
    assert!(synth.join("spec.json").is_file());
    assert!(synth.file_name().unwrap().to_str().unwrap().ends_with("-seed2"));

    let kg = run_dir(&roadkg(&["build-kg", "--data", p(&csv), "--out", out]));
    let triples = std::fs::read_to_string(kg.join("triples.tsv")).unwrap();
    let stats: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(kg.join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["triples"].as_u64().unwrap() as usize, triples.lines().count());

    let tr = run_dir(&roadkg(&["train", "--data", p(&csv), "--preset", "desk", "--epochs", "20", "--out", out]));
    for f in ["checkpoint.rkge", "train_report.json", "calibration.json", "config.toml", "stats.json"] {
        assert!(tr.join(f).is_file(), "{f} missing");
    }
    let resolved = std::fs::read_to_string(tr.join("config.toml")).unwrap();
    assert!(resolved.contains("max_epochs = 20"));

    let ckpt = tr.join("checkpoint.rkge");
    let pr = roadkg(&[
        "predict",
        "--checkpoint",
        p(&ckpt),
        "--frame",
        "LATERAL_VELOCITY_IS=movingRight,LATERAL_ACCELERATION_IS=rightAcceletion",
        "--out",
        out,
    ]);
    let stdout = String::from_utf8(pr.stdout.clone()).unwrap();
    assert!(stdout.contains("\"posteriors\""));
    assert!(stdout.contains("The vehicle is expected to"));
    let dir = run_dir(&pr);
    let trace: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("trace.json")).unwrap()).unwrap();
    assert_eq!(trace["evidence"].as_array().unwrap().len(), 2);
    assert_eq!(std::fs::read_to_string(dir.join("predictions.jsonl")).unwrap().lines().count(), 1);

    let ev = run_dir(&roadkg(&["evaluate", "--data", p(&csv), "--preset", "desk", "--horizons", "1,3", "--out", out]));
    let tsv = std::fs::read_to_string(ev.join("horizon.tsv")).unwrap();
    assert!(tsv.starts_with("horizon_s\tclass"));
    assert!(tsv.lines().any(|l| l.starts_with("3.0\tmacro avg")));
    assert!(!tsv.lines().any(|l| l.starts_with("2.0")));
    assert!(ev.join("horizon.json").is_file() && ev.join("horizon.txt").is_file());

    let scored = run_dir(&roadkg(&["evaluate", "--data", p(&csv), "--checkpoint", p(&ckpt), "--out", out]));
    assert!(std::fs::read_to_string(scored.join("report.txt")).unwrap().contains("macro avg"));
}

#[test]
fn pedestrian_workflow_with_rules_and_rag() {
    let tmp = tempfile::tempdir().unwrap();
    let out = p(tmp.path());
    let rules = rules();
    let synth = run_dir(&roadkg(&["synth", "--mode", "pedestrian", "--per-label", "80", "--noise", "0.1", "--out", out]));
    let csv = synth.join("synthetic.csv");
    let plain = run_dir(&roadkg(&["build-kg", "--mode", "pedestrian", "--data", p(&csv), "--out", out]));
    let ruled = run_dir(&roadkg(&["build-kg", "--mode", "pedestrian", "--data", p(&csv), "--rules", &rules, "--out", out]));
    let count = |d: &Path| std::fs::read_to_string(d.join("triples.tsv")).unwrap().lines().count();
    assert!(count(&ruled) > count(&plain));

    let tr = run_dir(&roadkg(&[
        "train", "--mode", "pedestrian", "--data", p(&csv), "--rules", &rules, "--preset", "desk", "--out", out,
    ]));
    let ckpt = tr.join("checkpoint.rkge");
    let pr = run_dir(&roadkg(&[
        "predict", "--mode", "pedestrian", "--rules", &rules, "--checkpoint", p(&ckpt), "--data", p(&csv), "--rag",
        "--k", "2", "--out", out,
    ]));
    let lines = std::fs::read_to_string(pr.join("predictions.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 160);
    let first: serde_json::Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert!(first["rag_answer"].as_str().unwrap().contains("[context: chunk-"));

    let ex = roadkg(&[
        "explain", "--mode", "pedestrian", "--data", p(&csv), "--query", "why does a walking pedestrian cross", "--k", "3",
        "--out", out,
    ]);
    let dir = run_dir(&ex);
    let prompt: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("prompt.json")).unwrap()).unwrap();
    assert_eq!(prompt["chunks"].as_array().unwrap().len(), 3);
    assert!(std::fs::read_to_string(dir.join("answer.txt")).unwrap().starts_with("why does a walking pedestrian cross"));
}

#[test]
fn config_file_drives_a_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!("mode = \"pedestrian\"\nseed = 12\nout = \"{}\"\n", tmp.path().join("runs").display()),
    )
    .unwrap();
    let d = run_dir(&roadkg(&["synth", "--config", p(&cfg), "--per-label", "20"]));
    assert!(d.starts_with(tmp.path().join("runs")));
    let spec: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("spec.json")).unwrap()).unwrap();
    assert_eq!(spec["seed"], 12);
    assert_eq!(spec["counts"]["kind"], "pedestrian");
}
