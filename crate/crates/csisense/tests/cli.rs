use std::path::Path;
use std::process::{Command, Output};

use csisense::harness::{Report, RunReport};
use csisense::io::load_dataset;

fn csisense(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csisense"))
        .current_dir(dir)
        .env_remove("CSISENSE_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

const GEN: &str = r#"{
  "gen": {"subcarriers": 4, "rf_chains": 6, "snapshots": 200, "noise_std": 0.05, "seed": 3},
  "counts": {"v1": 6, "v2": 6, "v3": 6, "v4": 6, "v5": 6}
}"#;

const TRAIN: &str = r#"{"epochs": 20}"#;

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("gen.json"), GEN).unwrap();
    std::fs::write(dir.path().join("train.json"), TRAIN).unwrap();
    ok(&csisense(
        dir.path(),
        &["generate", "--config", "gen.json", "--out", "data.csid"],
    ));
    dir
}

#[test]
fn generate_then_dump_and_export() {
    let dir = setup();
    let d = load_dataset(dir.path().join("data.csid")).unwrap();
    assert_eq!(d.len(), 30);
    assert_eq!(d.experiments[0].csi.dim(), (4, 6, 200));

    ok(&csisense(
        dir.path(),
        &[
            "preprocess",
            "--in",
            "data.csid",
            "--amplitude-out",
            "amp.csid",
            "--phase-out",
            "phase.csid",
        ],
    ));
    let amp = load_dataset(dir.path().join("amp.csid")).unwrap();
    assert_eq!(amp.len(), 30);
    assert!(amp.experiments[0]
        .csi
        .data()
        .iter()
        .all(|z| z.im == 0.0 && z.re >= 0.0));

    ok(&csisense(
        dir.path(),
        &[
            "features",
            "--in",
            "data.csid",
            "--case",
            "2",
            "--antennas",
            "1,2,3",
            "--out",
            "f.json",
        ],
    ));
    let rows: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0]["x"].as_array().unwrap().len(), 4);
    assert!(rows.iter().all(|r| r["label"] == 0 || r["label"] == 1));
}

#[test]
fn run_is_byte_identical_across_invocations() {
    let dir = setup();
    let args = [
        "run",
        "--in",
        "data.csid",
        "--case",
        "1",
        "--model",
        "both",
        "--seed",
        "7",
        "--train-config",
        "train.json",
    ];
    let mut a = args.to_vec();
    a.extend(["--report", "a.json"]);
    let mut b = args.to_vec();
    b.extend(["--report", "b.json"]);
    ok(&csisense(dir.path(), &a));
    ok(&csisense(dir.path(), &b));
    let ja = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(ja, std::fs::read(dir.path().join("b.json")).unwrap());
    let report = Report::from_json(std::str::from_utf8(&ja).unwrap()).unwrap();
    assert_eq!(report.runs.len(), 2);
    assert_eq!(report.runs[0].test_size, report.runs[1].test_size);
}

#[test]
fn seed_env_overrides_flag() {
    let dir = setup();
    let run = |env: Option<&str>, seed: &str, out: &str| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_csisense"));
        c.current_dir(dir.path()).env_remove("CSISENSE_SEED");
        if let Some(v) = env {
            c.env("CSISENSE_SEED", v);
        }
        let o = c
            .args([
                "run",
                "--in",
                "data.csid",
                "--case",
                "3",
                "--model",
                "svm",
                "--seed",
                seed,
                "--report",
                out,
            ])
            .output()
            .unwrap();
        ok(&o);
        Report::from_json(&std::fs::read_to_string(dir.path().join(out)).unwrap()).unwrap()
    };
    let by_env = run(Some("11"), "0", "env.json");
    let by_flag = run(None, "11", "flag.json");
    assert_eq!(by_env.runs[0].seed, 11);
    assert_eq!(by_env, by_flag);
}

#[test]
fn train_then_eval() {
    let dir = setup();
    ok(&csisense(
        dir.path(),
        &[
            "train",
            "--in",
            "data.csid",
            "--case",
            "1",
            "--model",
            "nn",
            "--seed",
            "2",
            "--train-config",
            "train.json",
            "--out",
            "model.json",
        ],
    ));
    ok(&csisense(
        dir.path(),
        &[
            "eval",
            "--in",
            "data.csid",
            "--case",
            "1",
            "--seed",
            "2",
            "--model-file",
            "model.json",
            "--report",
            "eval.json",
        ],
    ));
    let r = RunReport::from_json(&std::fs::read_to_string(dir.path().join("eval.json")).unwrap())
        .unwrap();
    assert_eq!(r.test_size, 5);
    assert_eq!(r.confusion.iter().flatten().sum::<usize>(), 5);
}

#[test]
fn ablate_reports_each_count() {
    let dir = setup();
    let out = csisense(
        dir.path(),
        &[
            "ablate",
            "--in",
            "data.csid",
            "--case",
            "1",
            "--model",
            "svm",
            "--antenna-counts",
            "2,6",
            "--seeds",
            "2",
            "--format",
            "json",
        ],
    );
    ok(&out);
    let r = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(r.runs.len(), 4);
    let sizes: Vec<usize> = r.summaries.iter().map(|s| s.rf_chains).collect();
    assert_eq!(sizes, vec![2, 6]);
}

#[test]
fn text_report_on_stdout() {
    let dir = setup();
    let out = csisense(
        dir.path(),
        &[
            "run",
            "--in",
            "data.csid",
            "--case",
            "2",
            "--model",
            "svm",
            "--antennas",
            "1,2",
        ],
    );
    ok(&out);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("pred 0") && text.contains("true 1") && text.contains("M = 2"));
}

#[test]
fn failures_exit_nonzero_with_stage() {
    let dir = setup();
    let out = csisense(
        dir.path(),
        &[
            "run",
            "--in",
            "data.csid",
            "--case",
            "1",
            "--antennas",
            "1,9",
        ],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("[select antennas]"));

    let out = csisense(dir.path(), &["run", "--in", "missing.csid", "--case", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("[load]"));

    let out = csisense(dir.path(), &["run", "--in", "data.csid", "--case", "7"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("[case]"));

    let out = csisense(
        dir.path(),
        &["run", "--in", "data.csid", "--case", "1", "--format", "xml"],
    );
    assert!(!out.status.success());
}
