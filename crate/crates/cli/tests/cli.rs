use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qhm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhm")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qhm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const ELEMENT: &str = r#"{"c":1,"mu":"1/4","nu":"1/6","components":[{"p":0,"expr":"1"},{"p":1,"expr":"e(2x+0y+0)*abs(sinpi(x))"}]}"#;

#[test]
fn trace_range_prints_canonical_form() {
    let out = qhm(&["trace-range", "--mu", "1/4", "--nu", "1/6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "{\"D\":6,\"H\":[[1]]}\n");
    assert!(!out.stderr.is_empty());
}

#[test]
fn verify_reports_tolerance_and_samples() {
    for check in ["cocycle", "embedding", "partition", "covariance", "tracial"] {
        let out = qhm(&["verify", check, "--mu", "1/4", "--nu", "1/6", "--samples", "32", "--pairs", "2", "--grid", "64"]);
        assert_eq!(out.status.code(), Some(0), "{check}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["check"], check);
        assert_eq!(v["report"]["pass"], true);
        let text = v["report"].to_string();
        assert!(text.contains("tolerance"), "{check}: {text}");
        assert!(text.contains("samples") || text.contains("pairs"), "{check}: {text}");
    }
}

#[test]
fn trace_of_an_element_file() {
    let path = scratch("trace.json", ELEMENT);
    let out = qhm(&["trace", "--element", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["trace"]["re"], 1.0);
    assert!(v["seams"].is_array());
}

#[test]
fn non_invariant_measure_exits_one() {
    let element = scratch("ni-element.json", ELEMENT);
    let measure = scratch("ni-measure.json", r#"{"type":"atomic","points":[["1/10","0"]],"weights":["1"]}"#);
    let out = qhm(&["trace", "--element", element.to_str().unwrap(), "--measure", measure.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["invariance_defect"].as_f64().unwrap() > 0.0);
    assert!(v.get("error").is_some());
}

#[test]
fn dsl_errors_report_file_positions() {
    let text = "{\"c\":1,\"mu\":\"1/4\",\"nu\":\"1/6\",\n\"components\":[{\"p\":0,\"expr\":\"sinpi(z)\"}]}";
    let path = scratch("bad.json", text);
    let out = qhm(&["norm", "--element", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qhm(&["verify", "cocycle", "--mu", "1/4"]).status.code(), Some(2));
    assert_eq!(qhm(&["trace-range", "--mu", "1/0", "--nu", "0"]).status.code(), Some(2));
    assert_eq!(qhm(&["trace", "--element", "/nonexistent/element.json"]).status.code(), Some(2));
    assert_eq!(qhm(&["--help"]).status.code(), Some(0));
}

#[test]
fn classify_and_orbit_oracle() {
    let out = qhm(&["classify", "--mu", "1/4", "--nu", "1/6", "--mu2", "1/6", "--nu2", "1/4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["decision"]["verdict"], "RationalCaseOrbitOnly");
    let out = qhm(&["classify", "--c", "1", "--c2", "2", "--mu", "sqrt(2)", "--nu", "0", "--mu2", "sqrt(2)", "--nu2", "0"]);
    assert_eq!(json(&out)["decision"]["verdict"], "NotIsomorphic");
    let out = qhm(&["orbit-oracle", "--q", "6", "--a", "2", "--b", "4", "--a2", "0", "--b2", "2"]);
    assert_eq!(json(&out)["same_orbit"], true);
}

#[test]
fn norm_bounds_and_output_file() {
    let element = scratch("norm.json", ELEMENT);
    let target = element.with_file_name("norm-report.json");
    let out = qhm(&["norm", "--element", element.to_str().unwrap(), "--levels", "2", "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["bounds"].as_array().unwrap().len(), 2);
    assert_eq!(v["monotone"], true);
}

#[test]
fn strip_mass_and_winding() {
    let out = qhm(&["strip-mass", "--mu", "1/5", "--nu", "2/9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["strip_mass"]["exact"], "2/5");
    let out = qhm(&["winding", "--mu", "1/4", "--nu", "1/6", "--breakpoints", "1/2", "--windings", "3,4"]);
    assert_eq!(json(&out)["winding"], "NotFixed");
}

#[test]
fn strip_mass_rejects_non_invariant_measures() {
    let measure = scratch("strip-measure.json", r#"{"type":"product","x":{"type":"atomic","points":["0","1/2"],"weights":["1/2","1/2"]},"y":{"type":"haar"},"N":64}"#);
    let out = qhm(&["strip-mass", "--mu", "1/5", "--nu", "2/9", "--measure", measure.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["invariance_defect"], 2.0);
    let out = qhm(&["strip-mass", "--mu", "1/4", "--nu", "2/9", "--measure", measure.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["strip_mass"]["exact"], "1/2");
}
