use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn scratch(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("expobs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).display().to_string()
}

fn expobs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expobs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_l4() {
    let out_path = scratch("l4.json");
    let out = expobs(&[
        "analyze",
        "--system",
        &fixture("L4.json"),
        "--observable",
        &fixture("L4_split.json"),
        "--resolution",
        "1",
        "--out",
        &out_path,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["e_star"], "1");
    assert_eq!(
        report["quotients"][0]["blocks"],
        serde_json::json!([["0", "1"], ["2", "3"]])
    );

    let svg_path = scratch("l4.svg");
    let out = expobs(&["plot", "--report", &out_path, "--out", &svg_path]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg.matches("rx=\"6\"").count(), 2);
}

#[test]
fn analyze_is_byte_identical() {
    let args = ["analyze", "--system", &fixture("CAT5.json"), "--seed", "3"];
    let (a, b) = (expobs(&args), expobs(&args));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn circle_certificate_round_trip() {
    let cert = scratch("cert.json");
    let out = expobs(&[
        "circle",
        "certify",
        "--map",
        &fixture("M0.json"),
        "--delta",
        "1/16",
        "--out",
        &cert,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        expobs(&["circle", "verify", "--cert", &cert]).status.code(),
        Some(0)
    );
    // A smaller threshold than certified is a violated inequality.
    assert_eq!(
        expobs(&["circle", "verify", "--cert", &cert, "--delta", "1/1000"])
            .status
            .code(),
        Some(2)
    );

    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    doc["trace"][0]["diameter"] = Value::from("1/1000");
    let tampered = scratch("tampered.json");
    std::fs::write(&tampered, doc.to_string()).unwrap();
    assert_eq!(
        expobs(&["circle", "verify", "--cert", &tampered])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn laws_on_r8_pass() {
    let out = expobs(&[
        "laws",
        "--system",
        &fixture("R8.json"),
        "--trials",
        "100",
        "--seed",
        "42",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["passed"], true);
}

#[test]
fn conjugacy_and_small_queries() {
    let out = expobs(&[
        "conjugacy",
        "--conjugacy",
        &fixture("L4_doubled.json"),
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = expobs(&["dstar", "--system", &fixture("CAT5.json")]);
    assert_eq!(stdout_json(&out)["e_star"], "2/5");
    let out = expobs(&["circle", "rotnum", "--map", &fixture("rot3_8.json")]);
    assert_eq!(stdout_json(&out)["rotation_number"], "3/8");
    let out = expobs(&["circle", "rigid", "--map", &fixture("rot3_8.json")]);
    assert_eq!(stdout_json(&out)["single_block"], true);
}

#[test]
fn interval_outcomes() {
    assert_eq!(
        expobs(&[
            "interval",
            "certify",
            "--map",
            &fixture("I_M0.json"),
            "--delta",
            "1/16"
        ])
        .status
        .code(),
        Some(0)
    );
    for map in ["I_identity.json", "I_reflection.json"] {
        let out = expobs(&[
            "interval",
            "certify",
            "--map",
            &fixture(map),
            "--delta",
            "1/16",
        ]);
        assert_eq!(out.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&out.stderr).contains("every point is fixed"));
    }
}

#[test]
fn symbolic_commands() {
    let out = expobs(&[
        "symbolic",
        "pair",
        "--subshift",
        &fixture("golden_mean.json"),
    ]);
    let pair = stdout_json(&out);
    assert_eq!(pair["y"]["core"], "1");
    let out = expobs(&[
        "symbolic",
        "ball",
        "--point",
        r#"{"left":"01","right":"01"}"#,
        "--observable",
        r#"{"window":0,"table":{"1":["1","0"]}}"#,
        "--epsilon",
        "1",
        "--bound",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["passed"], true);
}

#[test]
fn validation_errors_exit_one() {
    let out = expobs(&[
        "quotient",
        "--system",
        &fixture("L4.json"),
        "--threshold",
        "1/0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = expobs(&["dstar", "--system", &fixture("missing.json")]);
    assert_eq!(out.status.code(), Some(1));
}
