use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_henselium"))
}

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = bin().args(args).output().expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json, out)
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

#[test]
fn lift_reports_trace_and_certificate() {
    let (code, v, _) = run(&[
        "--json", "--vars", "s,t", "lift", "--poly", "X^2-X-t", "--start", "1", "--prec", "(0,32)",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["trace"][0], "(0,1)");
    assert_eq!(v["certificate"], ">=(0,32)");
    assert!(v["root"].as_str().unwrap().starts_with("1 + t - t^2 + 2*t^3"));
}

#[test]
fn coarsen_reports_residue() {
    let (code, v, _) = run(&["--json", "--vars", "s,t", "coarsen", "--delta", "1", "s^2*t^-1 + 3*s^3*t"]);
    assert_eq!(code, 0);
    assert_eq!(v["coarse_value"], "(2)");
    assert_eq!(v["compose_check"]["pass"], true);
}

#[test]
fn exit_codes() {
    let (code, v, _) = run(&["--json", "lift", "--poly", "X^2 - X - u"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "UnknownVariable");

    let (code, _, _) = run(&[
        "--vars", "s,t", "--horizon", "(0,40)", "--expect", "IN_BASE_FIELD", "diagnose", "--poly",
        "X^2 - X - t", "--start", "1",
    ]);
    assert_eq!(code, 1);

    let (code, _, _) = run(&["--vars", "s,s", "lift", "--poly", "X"]);
    assert_eq!(code, 2);

    let (code, _, _) = run(&["--prec", "(0,10)", "--horizon", "(0,20)", "--vars", "s,t", "lift", "--poly", "X"]);
    assert_eq!(code, 2);
}

#[test]
fn disjoint_certifies_degree_drop() {
    let (code, v, _) = run(&[
        "--json", "--vars", "s,t", "--prec", "(0,32)", "disjoint", "--minpoly",
        "X^2 - (2*s^1+1)*X + (s^2 + s^1 - t^1)", "--henspoly", "X^2-X-t", "--shift", "s",
    ]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["verdict"], "DEGREE_DROP");
    assert_eq!(v["factor_degrees"], serde_json::json!([1, 1]));
}

#[test]
fn bundled_scenarios_pass() {
    for name in [
        "rank1_newton.scn",
        "rank2_distinguished.scn",
        "aat.scn",
        "tower.scn",
        "transfer.scn",
        "degree_drop.scn",
    ] {
        let path = scenario(name);
        let (code, v, out) = run(&["--json", "scenario", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(v["mismatches"], 0, "{name}");
        assert!(!v["reports"].as_array().unwrap().is_empty());
    }
}

#[test]
fn empty_scenario_is_an_empty_bundle() {
    let (code, v, _) = run(&["--json", "scenario", scenario("empty.scn").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["reports"], serde_json::json!([]));
}

#[test]
fn scenario_mismatch_exits_one() {
    let dir = std::env::temp_dir().join(format!("henselium-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.scn");
    std::fs::write(&file, "session --vars t --prec 8\nlift --poly \"X^2-X-t\" --start 1\nexpect /iterations 99\n")
        .unwrap();
    let (code, v, _) = run(&["--json", "scenario", file.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["reports"][0]["expectations"][0]["pass"], false);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_is_seeded() {
    let out = bin()
        .args(["--json", "sweep", "laws", "--count", "50"])
        .env("HENSELIUM_SEED", "42")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["verdict"], "PASS");
}

#[test]
fn text_rendering_is_flat() {
    let (code, _, out) = run(&["--vars", "t", "--prec", "8", "lift", "--poly", "X^2-X-t", "--start", "1"]);
    assert_eq!(code, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("certificate: ")));
}
