use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn freefield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freefield"))
        .args(args)
        .env("FREEFIELD_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn miura_of_u_equals_t() {
    let out = freefield(&["miura", "--algebra", "A1", "--u", "poly:t"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["form"], "canonical");
    let v1: Vec<&str> = v["coefficients"]["v1"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(&v1[..3], &["1/2", "0", "1/4"]);
    assert!(v1[3..].iter().all(|c| *c == "0"));
}

#[test]
fn kernel_dimensions() {
    let out = freefield(&["kernel", "--algebra", "A1", "--max-degree", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["dims"], serde_json::json!([1, 0, 1, 1, 2, 2, 4]));
    let out = freefield(&["kernel", "-a", "B2", "-d", "4", "--screening", "dual"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "PASS");
}

#[test]
fn verify_km_a1_symbolic() {
    let out = freefield(&["verify-km", "--algebra", "A1", "--level", "symbolic", "--cutoff", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["residuals"], 0);
    assert_eq!(v["vectors"], 258);
}

#[test]
fn verify_km_small_a2_and_critical() {
    let out = freefield(&["verify-km", "-a", "A2", "-l", "1", "-c", "2", "--max-degree", "2", "--zero-modes", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let out = freefield(&["verify-km", "-a", "A1", "-l", "critical", "-c", "2", "--max-degree", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["verify-km", "--cutoff", "-1"][..],
        &["verify-km", "--algebra", "A2", "--level", "symbolic"],
        &["verify-km", "--algebra", "E8"],
        &["verify-km", "--level", "1/0"],
        &["kernel", "--max-degree", "-3"],
        &["miura", "--u", "poly:t^"],
        &["miura", "--algebra", "A2", "--u", "poly:t"],
        &["frobnicate"],
    ] {
        let out = freefield(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = freefield(&["miura", "--u", "poly:1+"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("offset"), "{err}");
}

#[test]
fn canonical_input_is_a_fixed_point() {
    let first = scratch("fixed.json");
    let second = scratch("fixed-again.json");
    let gauge = scratch("fixed-gauge.json");
    let out = freefield(&["miura", "--u", "poly:1/3 - 2*t + t^3", "-o", first.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = freefield(&[
        "canonical",
        first.to_str().unwrap(),
        "--gauge",
        gauge.to_str().unwrap(),
        "-o",
        second.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());
    let g: Value = serde_json::from_str(&fs::read_to_string(&gauge).unwrap()).unwrap();
    assert_eq!(g["log"]["e(1)"], serde_json::json!([]));
}

#[test]
fn canonical_reduces_a_raw_oper() {
    // ∂ + f + w·h with w = t reduces to v₁ = w² + w′ = 1 + t².
    let raw = scratch("raw.json");
    fs::write(
        &raw,
        r#"{"algebra":"A1","form":"raw","valuation":0,"truncation":6,
            "coefficients":{"h1":["0","1"]}}"#,
    )
    .unwrap();
    let out = freefield(&["canonical", raw.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["coefficients"]["v1"], serde_json::json!(["1", "0", "1", "0", "0"]));
}

#[test]
fn malformed_oper_files_are_usage_errors() {
    let bad = scratch("bad.json");
    fs::write(&bad, r#"{"algebra":"A1","form":"raw""#).unwrap();
    let out = freefield(&["canonical", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    fs::write(&bad, r#"{"algebra":"A1","form":"raw","valuation":0,"truncation":2,"coefficients":{"h1":["x"]}}"#)
        .unwrap();
    assert_eq!(freefield(&["canonical", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["ope", "-a", "A2", "-l", "-3/2", "h1", "f(1,1)"];
    let a = freefield(&args);
    let b = freefield(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(!v["products"].as_array().unwrap().is_empty());
}

#[test]
fn ope_of_e_and_f() {
    let v = json(&freefield(&["ope", "e(1)", "f(1)"]));
    let products = v["products"].as_array().unwrap();
    let double = products.iter().find(|p| p["n"] == 1).unwrap();
    assert_eq!(double["value"], serde_json::json!([{ "monomial": [], "coeff": "k" }]));
}

#[test]
fn provenance_header_is_a_separate_line() {
    let plain = freefield(&["realization", "-l", "2"]);
    let tagged = freefield(&["realization", "-l", "2", "--provenance"]);
    let text = String::from_utf8(tagged.stdout).unwrap();
    let (head, body) = text.split_once('\n').unwrap();
    assert!(head.starts_with("# freefield"));
    assert_eq!(body.as_bytes(), &plain.stdout[..]);
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_freefield"))
        .args(["kernel", "-d", "2"])
        .env("FREEFIELD_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
