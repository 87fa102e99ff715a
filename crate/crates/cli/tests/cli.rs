use std::process::{Command, Output};

fn qrom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrom")).args(args).output().expect("qrom runs")
}

#[test]
fn lemma_defaults_pass_and_misreported_eps_fails() {
    let ok = qrom(&["lemmas", "--trials", "100", "--oracles", "100", "--format", "csv"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.starts_with("# qrom lemmas schema_version=1\n"));

    let bad = qrom(&["lemmas", "--trials", "100", "--oracles", "100", "--epsilon-scale", "0.01", "--format", "csv"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8(bad.stdout).unwrap();
    let flagged = text
        .lines()
        .find(|l| l.starts_with("lemmas,lemma2-dist-le-2sqrt-t-eps"))
        .unwrap();
    assert!(flagged.ends_with(",false,true"), "{flagged}");
}

#[test]
fn separation_rejects_alpha_without_unsafe_flag() {
    let out = qrom(&["separation", "--alpha", "8", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("6·log2(α)") && err.contains("--unsafe-params"), "{err}");

    let out = qrom(&["separation", "--alpha", "8", "--trials", "2", "--rounds", "8", "--unsafe-params"]);
    assert!(out.status.code() != Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn single_trial_separation_is_valid_json_lines() {
    let out = qrom(&["separation", "--trials", "1", "--rounds", "8", "--round-lines"]);
    assert!(out.status.code().is_some_and(|c| c <= 1));
    let text = String::from_utf8(out.stdout).unwrap();
    let kinds: Vec<String> = text
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            assert_eq!(v["schema_version"], 1);
            v["kind"].as_str().unwrap().to_string()
        })
        .collect();
    assert_eq!(kinds[0], "config");
    assert_eq!(kinds[1], "summary");
    assert_eq!(kinds.iter().filter(|k| *k == "run").count(), 2);
    assert_eq!(kinds.iter().filter(|k| *k == "round").count(), 16);
}

#[test]
fn reduce_reports_coron_no_abort() {
    let out = qrom(&["reduce", "--scheme", "clawfree-fdh", "--trials", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let row = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == "no-abort-vs-(1-1/p)^q")
        .unwrap();
    assert!((row["bound"].as_f64().unwrap() - 0.3585).abs() < 1e-3);
    assert_eq!(row["pass"], true);
}

#[test]
fn bad_flags_exit_with_two() {
    assert_eq!(qrom(&["reduce", "--scheme", "rsa"]).status.code(), Some(2));
    assert_eq!(qrom(&["separation", "--rounds", "2"]).status.code(), Some(2));
}
