use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ablab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ablab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ablab-cli-{}-{name}", std::process::id()))
}

#[test]
fn group_summary() {
    let out = ablab(&["group", "--group", "sym:3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["command"], "group");
    assert_eq!(v["group_order"], 6);
    assert_eq!(v["report"]["abelian"], false);
    assert_eq!(v["report"]["commutator_subgroup_order"], 3);
}

#[test]
fn diagnose_reports_exact_ratios() {
    let out = ablab(&["diagnose", "--group", "cyclic:8", "--set", "interval:0..2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["growth"]["tripling"], serde_json::json!([7, 3]));
    assert_eq!(v["report"]["growth"]["square_size"], 5);
}

#[test]
fn output_is_byte_identical_across_runs_and_jobs() {
    let args = ["--seed", "3", "croot-sisask", "--group", "dihedral:8", "--set", "random:density=1/3"];
    let a = ablab(&args);
    let mut with_jobs = vec!["--jobs", "3"];
    with_jobs.extend_from_slice(&args);
    let b = ablab(&with_jobs);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_changes_random_sets() {
    let run = |seed: &str| json(&ablab(&["--seed", seed, "diagnose", "--group", "cyclic:64", "--set", "random:density=1/2"]));
    assert_ne!(run("1")["set_digests"], run("2")["set_digests"]);
    assert_eq!(run("1")["set_digests"], run("1")["set_digests"]);
}

#[test]
fn regularity_writes_coset_csv() {
    let csv = tmp("cosets.csv");
    let out = ablab(&[
        "regularity",
        "--group",
        "ea:2^6",
        "--set",
        "cosets:H=<1,2,4>,reps=[0,8,24]",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["success"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("representative"));
    let rows: Vec<&str> = lines.collect();
    let index = json(&out)["report"]["index"].as_u64().unwrap() as usize;
    assert_eq!(rows.len(), index);
    std::fs::remove_file(csv).ok();
}

#[test]
fn out_flag_writes_the_report() {
    let path = tmp("report.json");
    let out = ablab(&["--out", path.to_str().unwrap(), "group", "--group", "cyclic:5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["group_order"], 5);
    std::fs::remove_file(path).ok();
}

#[test]
fn set_file_round_trip() {
    let path = tmp("set.txt");
    std::fs::write(&path, "0, 3 5\n7").unwrap();
    let spec = format!("file:{}", path.display());
    let from_file = json(&ablab(&["diagnose", "--group", "cyclic:12", "--set", &spec]));
    let inline = json(&ablab(&["diagnose", "--group", "cyclic:12", "--set", "elems:[0,3,5,7]"]));
    assert_eq!(from_file["set_digests"], inline["set_digests"]);
    std::fs::remove_file(path).ok();
}

#[test]
fn saturation_in_a5() {
    let out = ablab(&["saturation", "--group", "alt:5", "--set", "random:density=1/2,seed=4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["report"]["all_equal"], true);
}

#[test]
fn verify_suite_passes() {
    let out = ablab(&["verify", "--suite", "regression"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["trials"], 12);
}

#[test]
fn parse_errors_exit_2() {
    for args in [
        vec!["group", "--group", "nonsense:3"],
        vec!["diagnose", "--group", "cyclic:8", "--set", "elems:[0,"],
        vec!["regularity", "--group", "cyclic:8", "--set", "all", "--eps", "x/y"],
        vec!["verify", "--suite", "unknown"],
        vec!["frobnicate"],
    ] {
        let out = ablab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn errors_carry_a_reproducer() {
    let out = ablab(&["--seed", "9", "group", "--group", "nonsense:3"]);
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["exit_code"], 2);
    assert!(v["reproducer"].as_str().unwrap().contains("nonsense:3"));
}

#[test]
fn caps_exit_3() {
    let big = ablab(&["--max-order", "16", "group", "--group", "cyclic:32"]);
    assert_eq!(big.status.code(), Some(3));
    let vc = ablab(&["diagnose", "--group", "ea:2^6", "--set", "random:density=1/2,seed=1", "--vc-cap", "1"]);
    assert_eq!(vc.status.code(), Some(3));
}
