use std::path::Path;
use std::process::{Command, Output};

fn pwroc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwroc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synth_then_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let out = pwroc(&[
        "synth",
        "--duration",
        "5000",
        "--events",
        "5",
        "--detector",
        "oracle:100:0",
        "--jitter",
        "0.2",
        "--seed",
        "4",
        "--out",
        p(&data),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let res = dir.path().join("res");
    let out = pwroc(&[
        "evaluate",
        "--scores",
        p(&data.join("scores.csv")),
        "--events",
        p(&data.join("events.csv")),
        "--window-min",
        "50",
        "--window-max",
        "150",
        "--window-step",
        "50",
        "--agg",
        "median",
        "--out",
        p(&res),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in [
        "curve_50.csv",
        "curve_100.csv",
        "curve_150.csv",
        "surface.csv",
        "summary.json",
        "threshold_metrics.csv",
    ] {
        assert!(res.join(f).exists(), "{f} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(res.join("summary.json")).unwrap()).unwrap();
    let at_lead = summary["windows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|w| w["window"] == 100.0)
        .unwrap();
    assert_eq!(at_lead["auc"], 1.0);
    let curve = std::fs::read_to_string(res.join("curve_100.csv")).unwrap();
    assert!(curve.starts_with("threshold,fpr,tpr\ninf,0.0000000000000000e0,0.0000000000000000e0\n"));
}

#[test]
fn compare_prints_config_and_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    pwroc(&[
        "synth",
        "--duration",
        "2000",
        "--events",
        "4",
        "--detector",
        "oracle:50:0.2",
        "--out",
        p(&data),
    ]);
    let res = dir.path().join("cmp");
    let out = pwroc(&[
        "compare",
        "--scores",
        p(&data.join("scores.csv")),
        "--events",
        p(&data.join("events.csv")),
        "--window",
        "50",
        "--alpha",
        "0.5,1",
        "--out",
        p(&res),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let echo: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(echo["config"]["alphas"], serde_json::json!([0.5, 1.0]));
    let table = std::fs::read_to_string(res.join("comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let scores = dir.path().join("s.csv");
    std::fs::write(&scores, "timestamp,score\n0,0.1\n2,0.2\n1,0.3\n").unwrap();
    let events = dir.path().join("e.csv");
    std::fs::write(&events, "timestamp\n2\n").unwrap();
    let out = pwroc(&[
        "evaluate",
        "--scores",
        p(&scores),
        "--events",
        p(&events),
        "--window",
        "1",
    ]);
    assert!(!out.status.success());
    let line: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(line["error"], "parse");
    assert!(line["message"].as_str().unwrap().contains(":4:"));

    let out = pwroc(&[
        "evaluate",
        "--scores",
        p(&dir.path().join("missing.csv")),
        "--events",
        p(&events),
    ]);
    let line: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(line["error"], "io");

    std::fs::write(&scores, "timestamp,score\n0,0.1\n1,0.2\n2,0.3\n").unwrap();
    let out = pwroc(&[
        "evaluate",
        "--scores",
        p(&scores),
        "--events",
        p(&events),
        "--window",
        "5",
    ]);
    let line: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(line["error"], "parameter");
}
