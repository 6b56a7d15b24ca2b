use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pcp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn small_spec(dir: &Path) -> String {
    let path = dir.join("small.json");
    let p = path.to_str().unwrap().to_string();
    let out = pcp(&[
        "design", "--channel", "bec:0.3", "--channel", "bec:0.6", "--k", "4", "--n1", "8", "--out", &p,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn design_small_example() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&spec).unwrap()).unwrap();
    assert_eq!(doc["lengths"], serde_json::json!([8, 8]));
    assert_eq!(doc["rates"], serde_json::json!(["1/2", "1/4"]));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(format!("{spec}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "design");
    assert_eq!(manifest["parameters"]["k"], 4);
    let check = pcp(&["check", "--spec", &spec]);
    assert_eq!(check.status.code(), Some(0));
    assert!(stdout(&check).contains("rates [1/2, 1/4]"));
}

#[test]
fn design_three_level_mode() {
    let out = pcp(&["design", "--table1-mode", "--channel", "biawgn:0.9"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["lengths"], serde_json::json!([256, 128, 195]));
    assert_eq!(doc["sizes"], serde_json::json!([[192, 128, 85], [64, 42], [65]]));
}

#[test]
fn usage_errors_exit_two() {
    let out = pcp(&["design", "--channel", "bec:0.3", "--n1", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--k"));
    assert_eq!(pcp(&["design", "--channel", "bec:2", "--k", "4", "--n1", "8"]).status.code(), Some(2));
    assert_eq!(pcp(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn construction_failure_exits_one() {
    let out = pcp(&["design", "--channel", "bec:0.6", "--channel", "bec:0.3", "--k", "4", "--n1", "8"]);
    assert_eq!(out.status.code(), Some(1));
    let out = pcp(&["design", "--channel", "bec:0.3", "--k", "9", "--lengths", "8,8"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn encode_decode_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path());
    let zero = pcp(&["encode", "--spec", &spec, "--level", "2", "--in", "0"]);
    assert_eq!(stdout(&zero).trim(), "00");
    for message in ["0", "5", "b", "f"] {
        let c1 = stdout(&pcp(&["encode", "--spec", &spec, "--level", "1", "--in", message]));
        let c2 = stdout(&pcp(&["encode", "--spec", &spec, "--level", "2", "--in", message]));
        let out = pcp(&[
            "decode", "--spec", &spec, "--chunk", c1.trim(), "--chunk", c2.trim(), "--truth", message,
        ]);
        assert_eq!(out.status.code(), Some(0));
        let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(doc["message"], message);
        assert_eq!(doc["stages"][0]["level"], 2);
        assert!(doc["stages"].as_array().unwrap().iter().all(|s| s["correct"] == true));
    }
}

#[test]
fn length_mismatch_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path());
    assert_eq!(pcp(&["encode", "--spec", &spec, "--level", "1", "--in", "123"]).status.code(), Some(1));
    assert_eq!(pcp(&["decode", "--spec", &spec, "--chunk", "0"]).status.code(), Some(1));
    assert_eq!(pcp(&["encode", "--spec", &spec, "--level", "3", "--in", "1"]).status.code(), Some(1));
}

#[test]
fn unreadable_spec_exits_one() {
    let out = pcp(&["simulate", "--spec", "/nonexistent/spec.json", "--sweep", "bec:0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/spec.json"));
}

#[test]
fn noiseless_single_trial() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path());
    let out = pcp(&["simulate", "--spec", &spec, "--sweep", "bec:0", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "param,rate_index,rate,trials,block_errors,bit_errors,mean_tx,throughput,stderr");
    assert_eq!(lines.len(), 3);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(4) == Some("0")));
}

#[test]
fn same_seed_same_csv_for_any_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path());
    let run = |threads: &str, name: &str| {
        let csv = dir.path().join(name);
        let csv = csv.to_str().unwrap();
        let out = pcp(&[
            "simulate", "--spec", &spec, "--sweep", "bec:0.2:0.6:0.2", "--trials", "500", "--seed", "9",
            "--threads", threads, "--csv", csv, "--baseline", "random-puncturing", "--baseline-n-u", "16",
            "--baseline-k", "4", "--baseline-lengths", "8,16",
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let base = csv.replace(".csv", ".baseline.csv");
        (fs::read(csv).unwrap(), fs::read(base).unwrap())
    };
    let a = run("1", "a.csv");
    let b = run("4", "b.csv");
    let c = run("1", "c.csv");
    assert_eq!(a, b);
    assert_eq!(a, c);
    assert!(dir.path().join("a.csv.manifest.json").exists());
}

#[test]
fn reliability_dump() {
    let out = pcp(&["reliability", "--channel", "bec:0.5", "--n", "3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["indices"], serde_json::json!([4]));
    assert_eq!(doc["metric"], serde_json::json!([1.0, 0.75, 0.625, 0.125]));
}

#[test]
fn tampered_spec_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path());
    let text = fs::read_to_string(&spec).unwrap().replace("\"1/4\"", "\"1/3\"");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, text).unwrap();
    let out = pcp(&["check", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(c.1)"));
}
