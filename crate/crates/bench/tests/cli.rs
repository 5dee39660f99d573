use std::path::Path;
use std::process::{Command, Output};

fn somm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_somm"))
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    assert_eq!(somm(&[]).status.code(), Some(1));
    assert_eq!(
        somm(&["oversample", "--in", "x.csv"]).status.code(),
        Some(1)
    );
    let help = somm(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("oversample"));
}

#[test]
fn bad_data_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b,label\n1,x,0\n2,3,1\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = somm(&["oversample", "--in", p(&bad), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 1"));
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"repeats": 0}"#).unwrap();
    assert_eq!(
        somm(&["classify", "--spec", p(&spec), "--out", p(dir.path())])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn oversample_appends_synthetic_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let g = somm(&[
        "gen-synthetic",
        "--family",
        "sd3",
        "--nmaj",
        "100",
        "--nmin",
        "6",
        "--seed",
        "1",
        "--out",
        p(&data),
    ]);
    assert!(g.status.success());
    let original = std::fs::read_to_string(&data).unwrap();
    for method in ["somm", "smote", "random"] {
        let out = dir.path().join(format!("{method}.csv"));
        let o = somm(&[
            "oversample",
            "--in",
            p(&data),
            "--out",
            p(&out),
            "--method",
            method,
            "--minority-label",
            "1",
            "--k",
            "3",
            "--seed",
            "2",
            "--n",
            "88",
        ]);
        assert!(
            o.status.success(),
            "{method}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(
            text.starts_with(&original),
            "{method}: original rows come first"
        );
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 106 + 88);
        assert!(lines[107..].iter().all(|l| l.ends_with(",1")));
    }
}

#[test]
fn attempt_cap_writes_partial_and_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // minority rows surrounded by majority rows: almost every candidate is dropped
    let mut csv = String::from("x,y,label\n");
    for i in 0..40 {
        for j in 0..40 {
            csv.push_str(&format!("{},{},0\n", i as f64 / 39.0, j as f64 / 39.0));
        }
    }
    csv.push_str("0.0,0.0,1\n1.0,1.0,1\n");
    let data = dir.path().join("cap.csv");
    std::fs::write(&data, csv).unwrap();
    let out = dir.path().join("out.csv");
    let o = somm(&[
        "oversample",
        "--in",
        p(&data),
        "--out",
        p(&out),
        "--minority-label",
        "1",
        "--k",
        "1",
        "--n",
        "500",
        "--max-attempts-factor",
        "1",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let rows = std::fs::read_to_string(&out).unwrap().lines().count() - 1;
    assert!((1602..1602 + 500).contains(&rows));
}

#[test]
fn diversity_command_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("div.json");
    std::fs::write(
        &spec,
        r#"{"data_source": {"synthetic": {"family": "sd2", "n_majority": 100, "n_minority": 20}},
            "task": "diversity", "samplers": ["somm", "smote", "none"], "repeats": 5}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = somm(&["diversity", "--spec", p(&spec), "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in [
        "results.csv",
        "aggregates.csv",
        "best.csv",
        "significance.csv",
        "manifest.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let results = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 5 * 3);
    // wrong command for the task
    assert_eq!(
        somm(&["classify", "--spec", p(&spec), "--out", p(&out)])
            .status
            .code(),
        Some(2)
    );
}
