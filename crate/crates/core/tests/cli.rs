use std::process::{Command, Output};

use serde_json::Value;

fn idealpack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idealpack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn without_timing(mut v: Value) -> String {
    v.as_object_mut().unwrap().remove("elapsed_ms");
    serde_json::to_string(&v).unwrap()
}

#[test]
fn pack_evens_is_two() {
    let out = idealpack(&[
        "pack", "--set", "evens", "--n", "2", "--shifts", "0..9", "--exact",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["value"], 2);
    assert_eq!(r["result"]["status"], "exact");
    assert_eq!(r["result"]["family"], serde_json::json!([0, 1]));
}

#[test]
fn arity_one_is_a_usage_error() {
    let out = idealpack(&["pack", "--set", "evens", "--n", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_set_and_bad_margin() {
    assert_eq!(
        idealpack(&["pack", "--set", "squares"]).status.code(),
        Some(2)
    );
    let out = idealpack(&["small", "--set", "evens", "--margin", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = [
        "complete",
        "--kind",
        "pack2",
        "--stages",
        "3",
        "--threshold",
        "8",
        "--window",
        "4000",
    ];
    let a = idealpack(&args);
    let b = idealpack(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timing(json(&a)), without_timing(json(&b)));
    let p = [
        "pack",
        "--set",
        "union(triangular, evens)",
        "--n",
        "3",
        "--shifts",
        "0..20",
        "--exact",
    ];
    assert_eq!(
        without_timing(json(&idealpack(&p))),
        without_timing(json(&idealpack(&p)))
    );
}

#[test]
fn density_zero_reports_carry_the_proxy_flag() {
    let out = idealpack(&[
        "pack",
        "--set",
        "triangular",
        "--ideal",
        "density-zero",
        "--shifts",
        "0..5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"proxy-for-N\": true"));
    let out = idealpack(&["density", "--set", "triangular", "--window", "5000"]);
    assert_eq!(json(&out)["provenance"]["proxy-for-N"], true);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "[group]\nkind = \"cyclic\"\norder = 12\n\n[pack]\nn = 3\nexact = true\n\n[small]\nm = 2\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let out = idealpack(&["pack", "--config", p, "--set", "evens"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["scale"]["order"], 12);
    assert_eq!(r["result"]["n"], 3);
    let out = idealpack(&["pack", "--config", p, "--set", "evens", "--n", "2"]);
    assert_eq!(json(&out)["result"]["n"], 2);

    std::fs::write(&path, "frobnicate = 1\n").unwrap();
    assert_eq!(
        idealpack(&["pack", "--config", p, "--set", "evens"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verdict_exit_codes() {
    let small = idealpack(&["small", "--set", "evens", "--window", "3000"]);
    assert_eq!(small.status.code(), Some(1));
    assert_eq!(
        json(&small)["result"]["translators"],
        serde_json::json!([0, 1])
    );
    let f2 = idealpack(&[
        "f2",
        "--depth",
        "10",
        "--translators",
        "b^0..b^8",
        "--n",
        "2",
    ]);
    assert_eq!(f2.status.code(), Some(0));
    assert_eq!(json(&f2)["result"]["report"]["disjoint"], true);
    let overlap = idealpack(&["f2", "--depth", "10", "--translators", "e,a", "--n", "2"]);
    assert_eq!(overlap.status.code(), Some(1));
}

#[test]
fn measure_and_text_format() {
    let out = idealpack(&[
        "measure",
        "--avoid",
        "triangular",
        "--F",
        "{1}",
        "--n",
        "10",
        "--eval",
        "evens",
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("  L: 21\n"));
    assert!(text.contains("  mu_avoid: 0\n"));
    assert!(text.contains("    evens: 11/21\n"));
}

#[test]
fn verify_one_criterion() {
    let out = idealpack(&["verify-paper", "--criterion", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["result"]["passed"], 1);
    assert_eq!(r["result"]["failed"], 0);
}

#[test]
fn negative_ranges_are_values() {
    let out = idealpack(&["pack", "--set", "evens", "--shifts", "-5..5", "--window", "-200..200", "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["scale"]["core"], serde_json::json!([-200, 200]));
    assert_eq!(r["scale"]["margin"], 5);
    assert_eq!(r["result"]["value"], 2);
}
