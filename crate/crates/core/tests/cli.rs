use std::process::Command;

use serde_json::Value;
use ugk::cli::{run, EXIT_FAILS, EXIT_INPUT, EXIT_OK, REPORT_SCHEMA};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}.ug", env!("CARGO_MANIFEST_DIR"))
}

fn ugk(args: &[&str]) -> ugk::cli::Outcome {
    run(std::iter::once("ugk").chain(args.iter().copied()))
}

#[test]
fn check_example_k_and_infinity() {
    let out = ugk(&["check", "--conditions", "K,INF", &fixture("example")]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
    assert!(out.stdout.contains("K   holds"));
    assert!(out.stdout.contains("INF holds"));
}

#[test]
fn check_nd_on_v1_fails_with_certificate() {
    let out = ugk(&["check", "--conditions", "ND", "--json", &fixture("v1")]);
    assert_eq!(out.code, EXIT_FAILS);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["schema"], REPORT_SCHEMA);
    assert_eq!(v["results"][0]["verdict"], "fails");
    assert!(out.stdout.contains("V1"));
}

#[test]
fn json_reports_are_byte_identical() {
    let a = ugk(&["check", "--json", &fixture("example")]);
    let b = ugk(&["check", "--json", &fixture("example")]);
    assert_eq!(a, b);
}

#[test]
fn eval_prints_f3_order() {
    let out = ugk(&["eval", &fixture("example"), "-e", "l = f3(D(; mie#0));; order l;; involution l"]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    assert_eq!(out.stdout, "3\nfalse\n");
}

#[test]
fn witness_script_replays() {
    let out = ugk(&["witness", &fixture("example"), "--kind", "f3", "--set", "D(; mie#0)"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("# verified: true"));
    let script: String = out.stdout.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join(";;");
    let again = ugk(&["eval", &fixture("example"), "-e", &script]);
    assert_eq!(again.code, EXIT_OK, "{}", again.stderr);
    assert_eq!(again.stdout.lines().next(), Some("3"));
}

#[test]
fn f1_witness_with_point() {
    let out = ugk(&[
        "witness",
        &fixture("example"),
        "--kind",
        "f1",
        "--set",
        "D(; mie#0)",
        "--point",
        "fin(; mie#0)",
        "--json",
    ]);
    assert_eq!(out.code, EXIT_OK);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["transcript"]["verified"], true);
}

#[test]
fn mie_and_rfum() {
    let out = ugk(&["mie", &fixture("example")]);
    assert_eq!(out.stdout, "1 minimal infinite emitter(s)\nmie#0 = all \\ {0,1,2}\n");
    assert_eq!(ugk(&["rfum", &fixture("example")]).code, EXIT_OK);
    let bad = ugk(&["rfum", &fixture("rfum_bad")]);
    assert_eq!(bad.code, EXIT_FAILS);
    assert!(bad.stdout.contains("r(a)"));
    assert_eq!(ugk(&["check", &fixture("rfum_bad")]).code, EXIT_INPUT);
}

#[test]
fn oracle_diff_small_run() {
    let out = ugk(&["oracle-diff", &fixture("two_loops"), "--trials", "20", "--seed", "3"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("0 divergences"));
}

#[test]
fn input_errors_exit_three() {
    assert_eq!(ugk(&["check", "--bogus", &fixture("loop")]).code, EXIT_INPUT);
    assert_eq!(ugk(&["check", "/nonexistent.ug"]).code, EXIT_INPUT);
    assert_eq!(ugk(&["check", "--conditions", "Q", &fixture("loop")]).code, EXIT_INPUT);
    let dir = std::env::temp_dir().join("ugk-cli-empty.ug");
    std::fs::write(&dir, "").unwrap();
    let out = ugk(&["check", dir.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INPUT);
    assert!(out.stderr.contains("sink"));
    let bad = ugk(&["eval", &fixture("example"), "-e", "order pi_hat(Z(e1; e2; mie#7))"]);
    assert_eq!(bad.code, EXIT_INPUT);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ugk");
    let ok = Command::new(bin).args(["check", "--conditions", "K", &fixture("example")]).output().unwrap().status;
    assert_eq!(ok.code(), Some(EXIT_OK));
    let fails = Command::new(bin).args(["check", "--conditions", "L", &fixture("loop")]).output().unwrap().status;
    assert_eq!(fails.code(), Some(EXIT_FAILS));
}
