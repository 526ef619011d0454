use std::path::Path;
use std::process::Command;

use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fermibath"))
}

fn run(args: &[&str], out: &Path) -> i32 {
    let status = bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("-q")
        .status()
        .expect("spawn fermibath");
    status.code().expect("exit code")
}

fn body(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

fn config_line(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).unwrap();
    let line = text.lines().next().unwrap();
    serde_json::from_str(line.strip_prefix("# config: ").expect("config header")).unwrap()
}

#[test]
fn help_exits_zero() {
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(bin().args(["eta", "--help"]).output().unwrap().status.code(), Some(0));
}

#[test]
fn bad_input_exits_one() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["echo", "--L", "5", "--lambda", "0.5", "--delta", "0.1"], dir.path()), 1);
    assert_eq!(run(&["echo", "--L", "4", "--lambda", "-1", "--delta", "0.1"], dir.path()), 1);
    assert_eq!(run(&["echo", "--no-such-flag"], dir.path()), 1);
    assert_eq!(run(&["frobnicate"], dir.path()), 1);
    assert_eq!(run(&["oracle-check", "--L", "40", "--lambda", "0.5", "--delta", "0.1"], dir.path()), 1);
    let missing = dir.path().join("nope.csv");
    assert_eq!(run(&["echo", "--spectrum", missing.to_str().unwrap()], dir.path()), 1);
}

#[test]
fn numerical_failure_exits_two() {
    // delta = 0 leaves eta at zero, so ln(-eta) cannot be fitted
    let dir = tempdir().unwrap();
    let code = run(&["scaling", "--sizes", "4,6,8", "--lambda", "0.5", "--delta", "0"], dir.path());
    assert_eq!(code, 2);
}

#[test]
fn zero_coupling_echo_is_one() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["echo", "--L", "4", "--lambda", "0.5", "--delta", "0"], dir.path()), 0);
    let rows = body(&dir.path().join("echo.csv"));
    assert_eq!(rows[0], "t,re_x,im_x,abs_x,echo");
    assert!(rows.len() > 2);
    for r in &rows[1..] {
        let echo: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(echo, 1.0, "{r}");
    }
}

#[test]
fn every_output_carries_its_config() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["eta", "--L", "8", "--lambda", "0.7", "--delta", "0.2", "--heatmap", "--n-points", "64"], dir.path()), 0);
    for f in ["eta.csv", "heatmap.csv"] {
        let cfg = config_line(&dir.path().join(f));
        assert_eq!(cfg["command"], "eta");
        assert_eq!(cfg["L"], 8);
        assert_eq!(cfg["delta"], 0.2);
        assert!(cfg.get("out").is_none());
    }
    assert!(dir.path().join("heatmap.svg").exists());
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"L": 6, "lambda": 0.3, "delta": 0.4, "n-points": 20}"#).unwrap();
    let out = dir.path().join("o");
    let code = run(&["echo", "--config", cfg.to_str().unwrap(), "--lambda", "0.9"], &out);
    assert_eq!(code, 0);
    let got = config_line(&out.join("echo.csv"));
    assert_eq!(got["L"], 6);
    assert_eq!(got["lambda"], 0.9);
    assert_eq!(got["delta"], 0.4);
    assert_eq!(body(&out.join("echo.csv")).len(), 21);

    std::fs::write(&cfg, r#"{"L": 6, "bogus": 1}"#).unwrap();
    assert_eq!(run(&["echo", "--config", cfg.to_str().unwrap()], &out), 1);
}

#[test]
fn oracle_check_passes_on_small_ring() {
    let dir = tempdir().unwrap();
    assert_eq!(run(&["oracle-check", "--L", "8", "--lambda", "0.5", "--delta", "0.25"], dir.path()), 0);
    assert!(dir.path().join("oracle_check.csv").exists());
}

#[test]
fn spectrum_file_reproduces_builtin_echo() {
    let dir = tempdir().unwrap();
    let p = ["--L", "10", "--lambda", "0.8", "--delta", "0.3", "--n-points", "50", "--t-end", "10"];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&[&["spectrum"], &p[..]].concat(), &a), 0);
    assert_eq!(run(&[&["echo"], &p[..]].concat(), &a), 0);
    let spec = a.join("spectrum.csv");
    let code = run(&["echo", "--spectrum", spec.to_str().unwrap(), "--n-points", "50", "--t-end", "10"], &b);
    assert_eq!(code, 0);
    assert_eq!(body(&a.join("echo.csv")), body(&b.join("echo.csv")));
}

#[test]
fn all_subcommands_write_their_files() {
    let dir = tempdir().unwrap();
    let cases: [(&[&str], &[&str]); 6] = [
        (&["spectrum", "--L", "6", "--lambda", "0.5", "--delta", "0.1"], &["spectrum.csv"]),
        (
            &["scan-lambda", "--L", "20", "--lambda-min", "0.5", "--lambda-max", "1.5", "--lambda-steps", "3", "--delta", "0.1"],
            &["scan.csv", "scan.svg"],
        ),
        (&["witness", "--L", "20", "--lambda", "0.9", "--delta", "0.1"], &["witness.csv", "witness.svg"]),
        (
            &["scaling", "--sizes", "20,30,40", "--lambda", "0.99", "--delta", "0.01", "--onset"],
            &["sweep.csv", "onset.csv", "fit.csv", "scaling.svg"],
        ),
        (
            &["two-qubit", "--L", "6", "--lambda", "0.5", "--delta1", "0.1", "--delta2", "0.3", "--n-points", "40"],
            &["two_qubit_trace.csv", "two_qubit_eta.csv", "two_qubit_spectrum.csv", "two_qubit.svg"],
        ),
        (&["echo", "--L", "6", "--lambda", "0.5", "--delta", "0.1"], &["echo.csv", "echo.svg"]),
    ];
    for (i, (args, files)) in cases.iter().enumerate() {
        let out = dir.path().join(i.to_string());
        assert_eq!(run(args, &out), 0, "{args:?}");
        for f in *files {
            assert!(out.join(f).exists(), "{args:?} missing {f}");
        }
    }
}

#[test]
fn library_entry_point_matches_binary() {
    let dir = tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let code = fermibath::cli::run(["fermibath", "echo", "--L", "4", "--lambda", "0.5", "--delta", "0.1", "--out", out, "-q"]);
    assert_eq!(code, 0);
    assert_eq!(fermibath::cli::run(["fermibath", "echo", "--L", "3", "-q"]), 1);
}
